#include "specbound/torus_modes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "finite_difference.hpp"
#include "specbound/errors.hpp"
#include "specbound/format.hpp"

namespace specbound {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGridSpacing = 1e-3;

// (2 pi s + r rho) / eps, the t-frequency of the mode.
double t_frequency(ModeIndex m, const TubeGeometry& g) {
    return (kTwoPi * m.s + m.r * g.rho()) / g.epsilon();
}

std::pair<double, double> grid_minimum(ModeIndex mode, const TubeGeometry& g, double lo,
                                       double hi) {
    const auto n = std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / kGridSpacing)));
    double best = std::numeric_limits<double>::infinity();
    double at = lo;
    for (long k = 0; k <= n; ++k) {
        const double u = (k == n) ? hi : lo + (hi - lo) * static_cast<double>(k) / n;
        const double value = kappa(mode, u, g).kappa;
        if (value < best) {
            best = value;
            at = u;
        }
    }
    return {best, at};
}

bool on_box_boundary(ModeIndex m, int M) { return std::abs(m.r) == M || std::abs(m.s) == M; }

std::complex<double> eigenfunction(ModeIndex m, const TubeGeometry& g, double u, double t,
                                   double theta) {
    const WarpedProfile profile(g);
    const double phase = t_frequency(m, g) * t - m.r * theta;
    const double norm = std::sqrt(kTwoPi * g.epsilon() * profile.f(u) * profile.h(u));
    return std::polar(1.0 / norm, phase);
}

// Integrates a complex integrand over tau in [0,1], theta in [0, 2 pi) by
// composite 30-point Gauss-Legendre on 8 panels per direction. Non-adaptive:
// cancelling integrands (orthogonality checks) would drive an adaptive rule to
// its depth limit.
template <class F>
std::complex<double> integrate_fundamental_domain(F&& integrand) {
    using boost::math::quadrature::gauss;
    constexpr int panels = 8;
    auto composite = [](auto&& fn, double a, double b) {
        const double w = (b - a) / panels;
        std::complex<double> sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double lo = a + p * w;
            const double re = gauss<double, 30>::integrate([&](double x) { return fn(x).real(); }, lo, lo + w);
            const double im = gauss<double, 30>::integrate([&](double x) { return fn(x).imag(); }, lo, lo + w);
            sum += std::complex<double>(re, im);
        }
        return sum;
    };
    return composite(
        [&](double tau) {
            return composite([&](double theta) { return integrand(tau, theta); }, 0.0, kTwoPi);
        },
        0.0, 1.0);
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const ModeIndex& m) {
    return os << '(' << m.r << ',' << m.s << ')';
}

FiberEigenvalue kappa(ModeIndex mode, double u, const TubeGeometry& geometry) {
    const double R = geometry.R();
    if (!(u >= 0.0 && u <= R)) throw DomainError("kappa requires 0 <= u <= R");
    if (u == R && mode.r != 0)
        throw DomainError("kappa: fibre circle collapses at u = R (h = 0) for r != 0");
    const double x = R - u;
    const double along = (kTwoPi * mode.s + mode.r * geometry.rho()) /
                         (std::cosh(x) * geometry.epsilon());
    double value = along * along;
    if (mode.r != 0) {
        const double around = mode.r / std::sinh(x);
        value += around * around;
    }
    return {mode, u, value};
}

std::vector<ModeIndex> enumerate_modes(int M_max) {
    if (M_max < 0) throw DomainError("enumerate_modes requires M_max >= 0");
    std::vector<ModeIndex> modes;
    modes.reserve(static_cast<std::size_t>(2 * M_max + 1) * (2 * M_max + 1));
    for (int r = -M_max; r <= M_max; ++r)
        for (int s = -M_max; s <= M_max; ++s) modes.push_back({r, s});
    return modes;
}

double kappa_infimum(ModeIndex mode, const TubeGeometry& geometry, double u_lo, double u_hi) {
    if (!(u_lo <= u_hi)) throw DomainError("kappa_infimum requires u_lo <= u_hi");
    return grid_minimum(mode, geometry, u_lo, u_hi).first;
}

double lattice_tail_bound(const TubeGeometry& geometry, int M, double u_lo, double u_hi) {
    if (M < 0) throw DomainError("lattice_tail_bound requires M >= 0");
    if (!(u_lo <= u_hi && u_hi < geometry.R()))
        throw DomainError("lattice_tail_bound requires u_lo <= u_hi < R");
    // Both coefficients are smallest at u_lo (cosh, sinh of R - u shrink with u).
    const double x = geometry.R() - u_lo;
    const double A = 1.0 / std::pow(std::cosh(x) * geometry.epsilon(), 2);
    const double B = 1.0 / std::pow(std::sinh(x), 2);
    const double rho = geometry.rho();
    const double next = M + 1.0;

    // |r| > M with |r| rho <= pi: nearest multiple of 2 pi to r rho is 0.
    double bound = next * next * (A * rho * rho + B);
    // |r| > M with |r| rho > pi: only the theta term is certain.
    if (rho > 0.0) {
        const double r_min = std::max(next, std::numbers::pi / rho);
        bound = std::min(bound, B * r_min * r_min);
    }
    // |r| <= M, |s| > M: |2 pi s + r rho| >= 2 pi (M+1) - M pi.
    const double gap = std::numbers::pi * (M + 2.0);
    bound = std::min(bound, A * gap * gap);
    return bound;
}

OffzeroMinimum min_offzero_kappa(const TubeGeometry& geometry, int M_max) {
    if (M_max < 1) throw DomainError("min_offzero_kappa requires M_max >= 1");
    const double lo = geometry.r0();
    const double hi = geometry.R0();

    OffzeroMinimum out;
    out.M_max = M_max;
    out.value = std::numeric_limits<double>::infinity();
    out.boundary_min = std::numeric_limits<double>::infinity();
    for (const ModeIndex m : enumerate_modes(M_max)) {
        if (m.is_zero()) continue;
        const auto [value, at] = grid_minimum(m, geometry, lo, hi);
        if (value < out.value) {
            out.value = value;
            out.argmin = m;
            out.u_at = at;
        }
        if (on_box_boundary(m, M_max)) out.boundary_min = std::min(out.boundary_min, value);
    }
    out.tail_bound = lattice_tail_bound(geometry, M_max, lo, hi);
    if (!(out.tail_bound > out.value))
        throw TruncationError("off-zero fibre minimum not certified: tail bound " +
                              format_double(out.tail_bound) + " <= box minimum " +
                              format_double(out.value));
    return out;
}

ModeSelection select_modes(const TubeGeometry& geometry, double level, double u_lo,
                           double u_hi, int M_start, int M_cap) {
    int M = std::max(1, M_start);
    double tail = lattice_tail_bound(geometry, M, u_lo, u_hi);
    while (!(tail > level)) {
        if (M >= M_cap)
            throw TruncationError("lattice truncation for level " + format_double(level) +
                                  " not certified at M_max = " + std::to_string(M));
        M = std::min(2 * M, M_cap);
        tail = lattice_tail_bound(geometry, M, u_lo, u_hi);
    }

    ModeSelection out;
    out.M_max = M;
    out.tail_bound = tail;
    for (const ModeIndex m : enumerate_modes(M)) {
        // kappa increases with u, so its value at u_lo is the infimum; the grid
        // minimum is only computed for modes that survive this cut.
        if (kappa(m, u_lo, geometry).kappa > level) continue;
        const double inf = kappa_infimum(m, geometry, u_lo, u_hi);
        if (inf <= level) {
            out.modes.push_back(m);
            out.infima.push_back(inf);
        }
    }
    return out;
}

ModeIdentityReport verify_mode_identities(ModeIndex mode, const TubeGeometry& geometry,
                                          std::span<const double> u_samples,
                                          double tolerance) {
    using detail::first_derivative;
    using detail::second_derivative;

    ModeIdentityReport rep;
    rep.mode = mode;
    rep.tolerance = tolerance;
    const WarpedProfile profile(geometry);
    const double omega = t_frequency(mode, geometry);
    const double step_t =
        omega != 0.0 ? 0.05 / std::abs(omega) : 0.05 * geometry.epsilon();
    const double step_t2 = 2.0 * step_t;
    const double step_theta = 0.05 / std::max(1, std::abs(mode.r));
    constexpr double step_u = 1e-2;
    const std::complex<double> I(0.0, 1.0);

    const double t0 = 0.37 * geometry.epsilon();
    const double theta0 = 1.1;

    for (const double u : u_samples) {
        if (!(u - 4 * step_u >= 0.0 && u + 4 * step_u < geometry.R()))
            throw DomainError("verify_mode_identities: u sample too close to the tube ends");
        const auto g = eigenfunction(mode, geometry, u, t0, theta0);
        const double mag = std::abs(g);

        // u-direction: g depends on u only through 1/sqrt(f h).
        const double x = geometry.R() - u;
        const double dlog = -(std::tanh(x) + 1.0 / std::tanh(x));  // (log fh)'
        const double d2log = 1.0 / std::pow(std::cosh(x), 2) - 1.0 / std::pow(std::sinh(x), 2);
        auto gu = [&](double v) { return eigenfunction(mode, geometry, v, t0, theta0); };
        const auto du = first_derivative(gu, u, step_u);
        rep.du = std::max(rep.du, std::abs(du - (-0.5 * dlog) * g) /
                                      (mag * std::max(1.0, std::abs(0.5 * dlog))));
        const double c2 = -0.5 * d2log + 0.25 * dlog * dlog;
        const auto d2u = second_derivative(gu, u, step_u);
        rep.d2u = std::max(rep.d2u, std::abs(d2u - c2 * g) / (mag * std::max(1.0, std::abs(c2))));

        auto gt = [&](double t) { return eigenfunction(mode, geometry, u, t, theta0); };
        const double scale_t = std::max(1.0, std::abs(omega));
        const auto dt = first_derivative(gt, t0, step_t);
        rep.dt = std::max(rep.dt, std::abs(dt - I * omega * g) / (mag * scale_t));
        const auto d2t = second_derivative(gt, t0, step_t2);
        rep.d2t = std::max(rep.d2t, std::abs(d2t + omega * omega * g) / (mag * scale_t * scale_t));

        auto gth = [&](double th) { return eigenfunction(mode, geometry, u, t0, th); };
        const double r = mode.r;
        const double scale_th = std::max(1.0, std::abs(r));
        const auto dth = first_derivative(gth, theta0, step_theta);
        rep.dtheta = std::max(rep.dtheta, std::abs(dth + I * r * g) / (mag * scale_th));
        const auto d2th = second_derivative(gth, theta0, 2.0 * step_theta);
        rep.d2theta =
            std::max(rep.d2theta, std::abs(d2th + r * r * g) / (mag * scale_th * scale_th));

        // Delta_0 = -(f^-2 d_t^2 + h^-2 d_theta^2) on F_u.
        const double f = profile.f(u);
        const double h = profile.h(u);
        const auto lap = -(d2t / (f * f) + d2th / (h * h));
        const double k = kappa(mode, u, geometry).kappa;
        rep.eigen = std::max(rep.eigen, std::abs(lap - k * g) / (mag * std::max(1.0, k)));

        const auto shifted = eigenfunction(mode, geometry, u, t0 + geometry.epsilon(),
                                           theta0 + geometry.rho());
        const auto wrapped = eigenfunction(mode, geometry, u, t0, theta0 + 2.0 * std::numbers::pi);
        rep.periodicity = std::max(
            {rep.periodicity, std::abs(shifted - g) / mag, std::abs(wrapped - g) / mag});

        // |a_i|^2 f h over the fundamental domain, t = eps * tau.
        const double area_scale = geometry.epsilon() * f * h;
        const auto mass = integrate_fundamental_domain([&](double tau, double theta) {
            const double phase = omega * geometry.epsilon() * tau - r * theta;
            return std::complex<double>(std::norm(std::polar(1.0, phase)) * area_scale, 0.0);
        });
        const double expected = kTwoPi * area_scale;
        rep.normalization_error =
            std::max(rep.normalization_error, std::abs(mass.real() - expected) / expected);
    }

    rep.max_residual = std::max({rep.du, rep.d2u, rep.dt, rep.d2t, rep.dtheta, rep.d2theta,
                                 rep.eigen, rep.periodicity});
    rep.passed = rep.max_residual <= tolerance && rep.normalization_error <= 1e-8;
    return rep;
}

std::complex<double> fiber_inner_product(ModeIndex a, ModeIndex b, const TubeGeometry& geometry,
                                         double u) {
    const WarpedProfile profile(geometry);
    const double area_scale = geometry.epsilon() * profile.f(u) * profile.h(u);
    return integrate_fundamental_domain([&](double tau, double theta) {
        const double t = geometry.epsilon() * tau;
        return eigenfunction(a, geometry, u, t, theta) *
               std::conj(eigenfunction(b, geometry, u, t, theta)) * area_scale;
    });
}

void write_mode_table(std::ostream& os, std::span<const FiberEigenvalue> rows) {
    os << "r,s,u,kappa\n";
    for (const auto& row : rows)
        os << row.mode.r << ',' << row.mode.s << ',' << format_double(row.u) << ','
           << format_double(row.kappa) << '\n';
}

}  // namespace specbound
