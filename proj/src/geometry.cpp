#include "specbound/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "specbound/errors.hpp"

namespace specbound {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

bool within(double value, double lo, double hi) {
    constexpr double slack = 1e-12;
    return value >= lo * (1.0 - slack) && value <= hi * (1.0 + slack);
}

}  // namespace

TubeGeometry::TubeGeometry(double R, std::optional<double> r0, double R0, double epsilon,
                           double rho)
    : R_(R), r0_(r0), R0_(R0), epsilon_(epsilon), rho_(rho) {
    require(std::isfinite(R) && R > 0.0, "tube radius R must be positive");
    require(std::isfinite(R0) && R0 < R, "outer truncation R0 must satisfy R0 < R");
    const double inner = r0.value_or(0.0);
    require(std::isfinite(inner) && inner >= 0.0, "inner truncation r0 must be >= 0");
    require(inner < R0, "inner truncation must satisfy r0 < R0");
    require(std::isfinite(epsilon) && epsilon > 0.0, "core geodesic length epsilon must be positive");
    require(std::isfinite(rho) && rho >= 0.0 && rho < std::numbers::pi,
            "twist angle rho must lie in [0, pi)");
}

double TubeGeometry::r0() const {
    if (!r0_) throw DomainError("inner truncation r0 is unset (run find_r0 first)");
    return *r0_;
}

TubeGeometry TubeGeometry::with_r0(double r0) const {
    return TubeGeometry(R_, r0, R0_, epsilon_, rho_);
}

TubeGeometry make_tube(double R, double r0, double R0, double epsilon, double rho) {
    return TubeGeometry(R, r0, R0, epsilon, rho);
}

void WarpedProfile::check_u(double u) const {
    if (!(u < geometry_.R())) throw DomainError("u must be < R (fibre degenerates at u = R)");
}

double WarpedProfile::f(double u) const { return std::cosh(geometry_.R() - u); }

double WarpedProfile::h(double u) const {
    check_u(u);
    return std::sinh(geometry_.R() - u);
}

double WarpedProfile::H(double u) const {
    check_u(u);
    const double x = geometry_.R() - u;
    return 0.5 * (std::tanh(x) + 1.0 / std::tanh(x));
}

double WarpedProfile::beta(double u) const { return -2.0 * H(u); }

void DegenerationSchedule::validate() const {
    require(D1 > 0.0 && D1 <= D2, "schedule requires 0 < D1 <= D2");
    require(E1 > 0.0 && E1 <= E2, "schedule requires 0 < E1 <= E2");
    for (std::size_t i = 1; i < R_grid.size(); ++i)
        require(R_grid[i] > R_grid[i - 1], "R_grid must be strictly increasing");
}

bool DegenerationSchedule::admits(const TubeGeometry& g) const {
    const double e2 = std::exp(-2.0 * g.R());
    const double e1 = std::exp(-g.R());
    return within(g.epsilon(), D1 * e2, D2 * e2) && within(g.rho(), E1 * e1, E2 * e1);
}

TubeGeometry schedule_instantiate(const DegenerationSchedule& schedule, std::size_t j) {
    schedule.validate();
    if (j >= schedule.R_grid.size())
        throw DomainError("schedule index " + std::to_string(j) + " out of range (grid has " +
                          std::to_string(schedule.R_grid.size()) + " entries)");
    const double R = schedule.R_grid[j];
    return TubeGeometry(R, std::nullopt, R - 1.0, schedule.D1 * std::exp(-2.0 * R),
                        schedule.E1 * std::exp(-R));
}

std::pair<double, double> aux_phi_psi(const TubeGeometry& geometry, double u) {
    const double R = geometry.R();
    if (!(u >= 0.0 && u <= R)) throw DomainError("aux_phi_psi requires 0 <= u <= R");
    const double grow = std::expm1(2.0 * u);  // e^{2u} - 1
    const double tail = std::exp(-2.0 * R) * (2.0 + grow);  // e^{-2R}(1 + e^{2u})
    const double c = std::cosh(R);
    const double s = std::sinh(R);
    const double phi = 0.25 * grow / (c * c) * (tail + 2.0);
    const double psi = 0.25 * grow / (s * s) * (tail - 2.0);
    return {phi, psi};
}

}  // namespace specbound
