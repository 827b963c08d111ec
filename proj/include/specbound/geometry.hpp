#pragma once

// Warped-product model of a truncated hyperbolic tube.
//
// The radial coordinate throughout is u = R - r, the distance from the outer
// boundary of the tube. In these coordinates the fibre torus F_u carries the
// flat metric f(u)^2 dt^2 + h(u)^2 dtheta^2 with f = cosh(R - u) and
// h = sinh(R - u).

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace specbound {

class TubeGeometry {
public:
    /// Validated constructor; see make_tube. `r0 == std::nullopt` leaves the
    /// inner truncation unset (it is chosen later by find_r0).
    TubeGeometry(double R, std::optional<double> r0, double R0, double epsilon, double rho);

    double R() const noexcept { return R_; }
    double R0() const noexcept { return R0_; }
    double epsilon() const noexcept { return epsilon_; }
    double rho() const noexcept { return rho_; }

    bool has_r0() const noexcept { return r0_.has_value(); }
    /// Throws DomainError if r0 has not been set.
    double r0() const;
    /// r0 if set, otherwise 0 (the placeholder used for range checks).
    double r0_or_zero() const noexcept { return r0_.value_or(0.0); }

    /// Copy with the inner truncation set.
    TubeGeometry with_r0(double r0) const;

    friend bool operator==(const TubeGeometry&, const TubeGeometry&) = default;

private:
    double R_;
    std::optional<double> r0_;
    double R0_;
    double epsilon_;
    double rho_;
};

/// Checks 0 <= r0 < R0 < R, epsilon > 0, 0 <= rho < pi; throws DomainError.
TubeGeometry make_tube(double R, double r0, double R0, double epsilon, double rho);

/// Metric functions of the fibres as functions of u.
class WarpedProfile {
public:
    explicit WarpedProfile(TubeGeometry geometry) : geometry_(std::move(geometry)) {}

    const TubeGeometry& geometry() const noexcept { return geometry_; }

    double f(double u) const;  ///< cosh(R - u)
    double h(double u) const;  ///< sinh(R - u), requires u < R
    /// Mean curvature of F_u: -1/2 d/du log(f h) = (tanh(R-u) + coth(R-u)) / 2.
    double H(double u) const;
    /// d/du log(f h) = -2 H(u), the Robin coefficient of the absolute condition.
    double beta(double u) const;

private:
    void check_u(double u) const;
    TubeGeometry geometry_;
};

struct DegenerationSchedule {
    double D1 = 1.0;
    double D2 = 1.0;
    double E1 = 1.0;
    double E2 = 1.0;
    std::vector<double> R_grid;

    /// Throws DomainError unless 0 < D1 <= D2, 0 < E1 <= E2, R_grid strictly increasing.
    void validate() const;

    /// D1 e^{-2R} <= epsilon <= D2 e^{-2R} and E1 e^{-R} <= rho <= E2 e^{-R}
    /// (relative slack of 1e-12 for rounding).
    bool admits(const TubeGeometry& g) const;
};

/// Geometry for R = R_grid[j]: epsilon = D1 e^{-2R}, rho = E1 e^{-R}, R0 = R - 1,
/// r0 unset.
TubeGeometry schedule_instantiate(const DegenerationSchedule& schedule, std::size_t j);

/// Deviations phi(u), psi(u) of the exact tube metric from the warped product
/// metric du^2 + e^{-2u}(cosh^2 R dt^2 + sinh^2 R dtheta^2). Requires 0 <= u <= R.
std::pair<double, double> aux_phi_psi(const TubeGeometry& geometry, double u);

}  // namespace specbound
