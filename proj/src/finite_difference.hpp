#pragma once

// Eighth-order central difference stencils (internal helper).

#include <array>

namespace specbound::detail {

inline constexpr std::array<double, 4> kFirstDerivative8 = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0,
                                                            -1.0 / 280.0};
inline constexpr std::array<double, 4> kSecondDerivative8 = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0,
                                                             -1.0 / 560.0};

template <class F>
auto first_derivative(F&& fn, double x, double step) {
    auto acc = kFirstDerivative8[0] * (fn(x + step) - fn(x - step));
    for (int k = 2; k <= 4; ++k)
        acc += kFirstDerivative8[k - 1] * (fn(x + k * step) - fn(x - k * step));
    return acc / step;
}

template <class F>
auto second_derivative(F&& fn, double x, double step) {
    // Written in difference form so constants differentiate to exactly zero.
    const auto centre = fn(x);
    auto acc = kSecondDerivative8[0] * ((fn(x + step) - centre) + (fn(x - step) - centre));
    for (int k = 2; k <= 4; ++k)
        acc += kSecondDerivative8[k - 1] * ((fn(x + k * step) - centre) + (fn(x - k * step) - centre));
    return acc / (step * step);
}

}  // namespace specbound::detail
