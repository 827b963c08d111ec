#pragma once

// Closed-form spectral resolution of the scalar Laplacian on the twisted
// flat tori F_u of a tube, with certified lattice truncation.

#include <compare>
#include <complex>
#include <ostream>
#include <span>
#include <vector>

#include "specbound/geometry.hpp"

namespace specbound {

/// Lattice index i = (r, s) in Z^2; r winds in theta, s in t.
struct ModeIndex {
    int r = 0;
    int s = 0;

    bool is_zero() const noexcept { return r == 0 && s == 0; }
    friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

std::ostream& operator<<(std::ostream& os, const ModeIndex& m);

struct FiberEigenvalue {
    ModeIndex mode;
    double u = 0.0;
    double kappa = 0.0;
};

/// kappa_(r,s)(u) = (2 pi s + r rho)^2 / (f(u)^2 eps^2) + r^2 / h(u)^2.
///
/// Requires 0 <= u <= R; at u = R the fibre collapses (h = 0), which is only
/// admissible for r = 0 where the h-term is absent. Otherwise throws DomainError.
FiberEigenvalue kappa(ModeIndex mode, double u, const TubeGeometry& geometry);

/// All (r, s) with |r|, |s| <= M_max in lexicographic order.
std::vector<ModeIndex> enumerate_modes(int M_max);

/// Minimum of kappa over a uniform u-grid (spacing <= 1e-3, endpoints included).
double kappa_infimum(ModeIndex mode, const TubeGeometry& geometry, double u_lo, double u_hi);

/// Rigorous lower bound for kappa over all modes outside the box |r|,|s| <= M and
/// all u in [u_lo, u_hi]. Uses that both kappa terms increase with u, that
/// |2 pi s + r rho| >= |r| rho whenever |r| rho <= pi, and rho < pi.
double lattice_tail_bound(const TubeGeometry& geometry, int M, double u_lo, double u_hi);

struct OffzeroMinimum {
    double value = 0.0;        ///< min over box modes != 0 and the u-grid
    ModeIndex argmin;
    double u_at = 0.0;
    int M_max = 0;
    double boundary_min = 0.0;  ///< min over modes on the box boundary
    double tail_bound = 0.0;    ///< certified bound for every mode outside the box
};

/// Smallest off-zero fibre eigenvalue on [r0, R0]. Throws TruncationError when
/// the tail bound does not exceed the minimum found inside the box.
OffzeroMinimum min_offzero_kappa(const TubeGeometry& geometry, int M_max);

/// Modes whose fibre eigenvalue may drop to `level` somewhere on [u_lo, u_hi].
struct ModeSelection {
    std::vector<ModeIndex> modes;         ///< lexicographic, zero mode included if selected
    std::vector<double> infima;           ///< inf_u kappa per selected mode
    int M_max = 0;                        ///< box size used
    double tail_bound = 0.0;              ///< > level, certifies the rest of the lattice
};

/// Grows the box from M_start (doubling) until the tail bound exceeds `level`;
/// throws TruncationError when M_cap is reached first.
ModeSelection select_modes(const TubeGeometry& geometry, double level, double u_lo,
                           double u_hi, int M_start = 1, int M_cap = 4096);

struct ModeIdentityReport {
    ModeIndex mode;
    // Max residuals, each relative to |g| times the natural scale of the term.
    double du = 0.0;          ///< d_u g = -1/2 (log fh)' g
    double d2u = 0.0;         ///< d_u^2 g = [-1/2 (log fh)'' + 1/4 ((log fh)')^2] g
    double dt = 0.0;          ///< d_t g = i (2 pi s + r rho)/eps g
    double d2t = 0.0;
    double dtheta = 0.0;      ///< d_theta g = -i r g
    double d2theta = 0.0;
    double eigen = 0.0;       ///< Delta_0 g = kappa g in f^2 dt^2 + h^2 dtheta^2
    double periodicity = 0.0; ///< g(t + eps, theta + rho) = g(t, theta + 2 pi) = g
    double max_residual = 0.0;
    double normalization_error = 0.0;  ///< |int |a|^2 dA - 2 pi eps f h| / (2 pi eps f h)
    double tolerance = 0.0;
    bool passed = false;
};

/// Checks the derivative identities of the normalised fibre eigenfunctions
/// g_i(u,t,theta) = exp(i[(2 pi s + r rho) t/eps - r theta]) / sqrt(2 pi eps f h(u))
/// by high-order finite differences at the given u samples, and the norm of the
/// unnormalised a_i by composite Gauss-Legendre quadrature. Failures are reported, not thrown.
ModeIdentityReport verify_mode_identities(ModeIndex mode, const TubeGeometry& geometry,
                                          std::span<const double> u_samples,
                                          double tolerance = 1e-6);

/// <g_a, g_b> on F_u by composite Gauss-Legendre quadrature over the fundamental domain
/// [0, eps) x [0, 2 pi) with area element f h dt dtheta.
std::complex<double> fiber_inner_product(ModeIndex a, ModeIndex b, const TubeGeometry& geometry,
                                         double u);

/// CSV with header r,s,u,kappa.
void write_mode_table(std::ostream& os, std::span<const FiberEigenvalue> rows);

}  // namespace specbound
