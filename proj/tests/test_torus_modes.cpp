#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "generators.hpp"
#include "specbound/errors.hpp"
#include "specbound/torus_modes.hpp"

using namespace specbound;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

TubeGeometry scheduled(double R, double r0) {
    return make_tube(R, r0, R - 1.0, std::exp(-2 * R), std::exp(-R));
}

double kappa_oracle(ModeIndex m, double u, const TubeGeometry& g) {
    const Big x = Big(g.R()) - Big(u);
    const Big num = 2 * boost::math::constants::pi<Big>() * m.s + Big(m.r) * Big(g.rho());
    const Big f = cosh(x), h = sinh(x);
    const Big value = num * num / (f * f * Big(g.epsilon()) * Big(g.epsilon())) + Big(m.r * m.r) / (h * h);
    return value.convert_to<double>();
}

// Same formula in long double, for lattice scans.
double kappa_direct(ModeIndex m, double u, const TubeGeometry& g) {
    const long double x = static_cast<long double>(g.R()) - u;
    const long double num = 2 * std::numbers::pi_v<long double> * m.s + static_cast<long double>(m.r) * g.rho();
    const long double f = std::cosh(x) * static_cast<long double>(g.epsilon());
    const long double h = std::sinh(x);
    return static_cast<double>(num * num / (f * f) + static_cast<long double>(m.r) * m.r / (h * h));
}

}  // namespace

TEST_CASE("kappa(1,0) one unit from the core is 1/sinh^2(1)") {
    const auto g = make_tube(6.0, 0.0, 5.0, 1e-3, 0.0);
    const Big s1 = sinh(Big(1));
    const double expected = (1 / (s1 * s1)).convert_to<double>();
    CHECK(expected == doctest::Approx(0.72406166).epsilon(1e-8));
    CHECK(kappa({1, 0}, 5.0, g).kappa == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("kappa matches a 50-digit evaluation (property)") {
    testgen::Gen gen(11);
    for (int trial = 0; trial < 300; ++trial) {
        const double R = gen.uniform(1.5, 12.0);
        const auto g = make_tube(R, 0.0, R - 1.0, gen.uniform(1e-8, 1.0), gen.uniform(0.0, 3.0));
        const ModeIndex m{static_cast<int>(gen.integer(-20, 20)), static_cast<int>(gen.integer(-20, 20))};
        const double u = gen.uniform(0.0, R - 1e-3);
        const double got = kappa(m, u, g).kappa;
        CHECK(got == doctest::Approx(kappa_oracle(m, u, g)).epsilon(1e-12));
    }
}

TEST_CASE("kappa at the core is defined only without theta winding") {
    const auto g = scheduled(6.0, 0.0);
    CHECK_NOTHROW(kappa({0, 3}, 6.0, g));
    CHECK_THROWS_AS(kappa({1, 0}, 6.0, g), DomainError);
    CHECK_THROWS_AS(kappa({0, 1}, 6.5, g), DomainError);
    CHECK_THROWS_AS(kappa({0, 1}, -0.1, g), DomainError);
}

TEST_CASE("kappa increases in u (property)") {
    testgen::Gen gen(12);
    for (int trial = 0; trial < 200; ++trial) {
        const double R = gen.uniform(2.0, 10.0);
        const auto g = scheduled(R, 0.0);
        const ModeIndex m{static_cast<int>(gen.integer(-5, 5)), static_cast<int>(gen.integer(-5, 5))};
        if (m.is_zero()) continue;
        const double a = gen.uniform(0.0, R - 0.2);
        const double b = gen.uniform(a, R - 0.1);
        CHECK(kappa(m, a, g).kappa <= kappa(m, b, g).kappa);
    }
}

TEST_CASE("off-zero minimum agrees with a brute-force lattice scan") {
    for (const double R : {4.0, 6.0, 8.0, 10.0}) {
        const auto g = scheduled(R, 0.2);
        const auto result = min_offzero_kappa(g, 16);
        // kappa is increasing in u, so the minimum over [r0, R0] sits at r0.
        double brute = INFINITY;
        ModeIndex arg;
        for (int r = -64; r <= 64; ++r)
            for (int s = -64; s <= 64; ++s) {
                if (r == 0 && s == 0) continue;
                const double k = kappa_direct({r, s}, 0.2, g);
                if (k < brute) {
                    brute = k;
                    arg = {r, s};
                }
            }
        CHECK(result.value == doctest::Approx(brute).epsilon(1e-12));
        CHECK(std::abs(result.argmin.r) == std::abs(arg.r));
        CHECK(result.tail_bound > result.value);
        CHECK(result.value > 5.0);
    }
}

TEST_CASE("tail bound is below every mode outside the box") {
    testgen::Gen gen(13);
    for (int trial = 0; trial < 20; ++trial) {
        const double R = gen.uniform(2.0, 9.0);
        const auto g = make_tube(R, 0.0, R - 1.0, gen.uniform(1e-6, 0.5), gen.uniform(0.0, 3.1));
        const int M = static_cast<int>(gen.integer(1, 12));
        const double u_lo = gen.uniform(0.0, R - 1.5);
        const double bound = lattice_tail_bound(g, M, u_lo, R - 1.0);
        const int W = 6 * (M + 1);
        double outside = INFINITY;
        for (int r = -W; r <= W; ++r)
            for (int s = -W; s <= W; ++s)
                if (std::abs(r) > M || std::abs(s) > M)
                    outside = std::min(outside, kappa_direct({r, s}, u_lo, g));
        CHECK(bound <= outside * (1 + 1e-12));
    }
}

TEST_CASE("mode selection certifies the discarded lattice") {
    const auto g = scheduled(6.0, 0.2);
    const double level = 40.0;
    const auto sel = select_modes(g, level, 0.2, 5.0);
    CHECK(sel.tail_bound > level);
    for (std::size_t i = 0; i < sel.modes.size(); ++i) CHECK(sel.infima[i] <= level);
    for (int r = -40; r <= 40; ++r)
        for (int s = -40; s <= 40; ++s) {
            const ModeIndex m{r, s};
            const bool selected = std::find(sel.modes.begin(), sel.modes.end(), m) != sel.modes.end();
            if (!selected) CHECK(kappa_direct(m, 0.2, g) > level);
        }
    CHECK(std::find(sel.modes.begin(), sel.modes.end(), ModeIndex{0, 0}) != sel.modes.end());
    CHECK_THROWS_AS(select_modes(g, 1e12, 0.2, 5.0, 1, 8), TruncationError);
}

TEST_CASE("enumerate_modes is the lexicographic box") {
    const auto modes = enumerate_modes(2);
    CHECK(modes.size() == 25);
    CHECK(std::is_sorted(modes.begin(), modes.end()));
    CHECK(modes.front() == ModeIndex{-2, -2});
    CHECK(modes.back() == ModeIndex{2, 2});
}

TEST_CASE("fibre eigenfunction identities and normalisation") {
    for (const double R : {6.0, 10.0}) {
        const auto g = scheduled(R, 0.2);
        const std::vector<double> u = {0.2, 1.0, 2.5, R - 1.0};
        const std::vector<ModeIndex> modes = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                              {1, 1}, {2, -1}, {-3, 2}, {3, 0}, {0, 2}};
        for (const auto& m : modes) {
            const auto rep = verify_mode_identities(m, g, u);
            CAPTURE(m);
            CHECK(rep.passed);
            CHECK(rep.max_residual <= 1e-6);
            CHECK(rep.normalization_error <= 1e-8);
        }
    }
}

TEST_CASE("fibre eigenfunctions are orthonormal") {
    const auto g = scheduled(6.0, 0.2);
    const std::vector<ModeIndex> modes = {{0, 0}, {1, 0}, {0, 1}, {-1, 1}};
    for (const auto& a : modes)
        for (const auto& b : modes) {
            const auto ip = fiber_inner_product(a, b, g, 1.5);
            CHECK(std::abs(ip - std::complex<double>(a == b ? 1.0 : 0.0, 0.0)) < 1e-8);
        }
}

TEST_CASE("mode table csv") {
    const auto g = scheduled(6.0, 0.2);
    std::vector<FiberEigenvalue> rows = {kappa({1, 0}, 0.5, g), kappa({0, 1}, 0.5, g)};
    std::ostringstream os;
    write_mode_table(os, rows);
    const auto text = os.str();
    CHECK(text.rfind("r,s,u,kappa\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
