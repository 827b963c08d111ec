#pragma once

// Regular self-adjoint eigenproblems  -a'' + q(u) a = lambda a  on [m0, m1]
// with Dirichlet or Robin ends, solved by two independent routes:
//   * a symmetric tridiagonal finite-difference discretisation with Sturm
//     bisection and Richardson extrapolation;
//   * Pruefer-phase shooting with fixed-step RK4, where the phase both counts
//     eigenvalues (oscillation theorem) and brackets them.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "specbound/tridiagonal.hpp"

namespace specbound {

/// a'(e) - beta a(e) = 0 at endpoint e, with the coordinate derivative at both
/// ends (no outward-normal flip). Dirichlet is a(e) = 0.
struct BoundaryCondition {
    enum class Kind { Dirichlet, Robin };
    Kind kind = Kind::Dirichlet;
    double beta = 0.0;

    static BoundaryCondition dirichlet() { return {Kind::Dirichlet, 0.0}; }
    static BoundaryCondition robin(double beta) { return {Kind::Robin, beta}; }
    static BoundaryCondition neumann() { return robin(0.0); }

    bool is_robin() const noexcept { return kind == Kind::Robin; }
    friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;
};

struct ConstantPotential {
    double value = 0.0;
};

/// offset + sum_j amplitude_j sin(frequency_j u + phase_j)
struct TrigPotential {
    struct Term {
        double amplitude = 0.0;
        double frequency = 0.0;
        double phase = 0.0;
    };
    double offset = 0.0;
    std::vector<Term> terms;
};

/// Piecewise-linear interpolation of samples (u strictly increasing).
struct TabulatedPotential {
    std::vector<double> u;
    std::vector<double> q;
};

/// Arbitrary callable; not serialisable.
struct CustomPotential {
    std::function<double(double)> fn;
    std::string label;
};

class Potential {
public:
    using Variant = std::variant<ConstantPotential, TrigPotential, TabulatedPotential,
                                 CustomPotential>;

    Potential() : repr_(ConstantPotential{}) {}
    Potential(ConstantPotential p) : repr_(std::move(p)) {}
    Potential(TrigPotential p) : repr_(std::move(p)) {}
    Potential(TabulatedPotential p);
    Potential(CustomPotential p);

    static Potential constant(double c) { return Potential(ConstantPotential{c}); }
    static Potential custom(std::function<double(double)> fn, std::string label = "custom") {
        return Potential(CustomPotential{std::move(fn), std::move(label)});
    }

    double operator()(double u) const;
    const Variant& repr() const noexcept { return repr_; }

private:
    Variant repr_;
};

struct SLProblem {
    Potential q;
    double m0 = 0.0;
    double m1 = 1.0;
    BoundaryCondition left;
    BoundaryCondition right;

    double length() const noexcept { return m1 - m0; }

    /// Rejects intervals shorter than 1e-6, non-finite Robin coefficients and
    /// potentials that are non-finite at any of `samples` + 1 equispaced points.
    void validate(std::size_t samples = 256) const;
};

/// Lower bound C >= 0 such that every eigenvalue is >= inf q - C. Only the
/// destabilising boundary terms contribute (beta_left < 0, beta_right > 0);
/// from the trace inequality b a(e)^2 <= |a'|^2 + (b/l + b^2)|a|^2 on a
/// segment of length l adjacent to e.
double boundary_form_shift(const SLProblem& problem);

/// inf over `samples` + 1 equispaced points of q, minus boundary_form_shift.
double spectrum_lower_bound(const SLProblem& problem, std::size_t samples = 4096);

enum class SolveMethod { FiniteDifference, Shooting, CrossValidated };
std::string_view to_string(SolveMethod m);

struct SpectrumResult {
    std::vector<double> eigenvalues;     ///< ascending
    std::vector<double> error_estimate;  ///< per eigenvalue, >= 0
    std::vector<std::size_t> indices;    ///< position in the full spectrum (0-based)
    SolveMethod method = SolveMethod::FiniteDifference;
    std::size_t grid_n = 0;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    bool empty() const noexcept { return eigenvalues.empty(); }
};

struct Window {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = 0.0;
};

/// Central-difference discretisation on grid_n intervals (grid_n >= 16).
/// Robin ends use ghost-point elimination followed by a diagonal similarity
/// (half-weight boundary rows) so the matrix stays symmetric. Eigenvalues of the
/// grid_n and 2 grid_n discretisations are Richardson-extrapolated; the error
/// estimate compares against the extrapolation one level coarser.
SpectrumResult solve_fd(const SLProblem& problem, std::size_t grid_n, Window window);

/// The symmetric tridiagonal matrix of the discretisation (exposed for tests).
SymTridiagonal assemble_fd(const SLProblem& problem, std::size_t grid_n);

struct ShootingOptions {
    double initial_step = 0.02;    ///< h0, halved until eigenvalues stabilise
    double stiff_step_cap = 0.5;   ///< step * sqrt(|q| + |lambda|) limit (RK4 stability)
    double tolerance = 1e-10;      ///< relative change accepted between halvings
    int max_halvings = 10;
};

/// Eigenvalues in [window.lo, window.hi) by Pruefer phase: the phase at m1
/// counts eigenvalues below lambda and is bisected against its target.
SpectrumResult solve_shooting(const SLProblem& problem, Window window,
                              const ShootingOptions& options = {});

/// Exact number of eigenvalues < lambda_star from the Pruefer phase at m1,
/// refined until two consecutive step halvings agree.
std::size_t count_below(const SLProblem& problem, double lambda_star,
                        const ShootingOptions& options = {});

/// Pruefer phase theta(m1; lambda) with theta(m0) fixed by the left condition
/// (Dirichlet 0, Robin atan2(1, beta)) for a given step h0.
double pruefer_phase(const SLProblem& problem, double lambda, double initial_step,
                     double stiff_step_cap = 0.5, double lambda_scale = 0.0);

struct CrossValidation {
    SpectrumResult fd;
    SpectrumResult shooting;
    SpectrumResult merged;        ///< method CrossValidated when `agreed`
    double max_discrepancy = 0.0;
    bool agreed = false;          ///< same eigenvalue count and |fd - shoot| <= err_fd + err_shoot
};

CrossValidation cross_validate(const SLProblem& problem, std::size_t grid_n, Window window,
                               const ShootingOptions& options = {});

/// Eigenvalue number k (0-based) computed by both routes.
struct IndexedEigenvalue {
    std::size_t index = 0;
    double fd = 0.0;
    double fd_error = 0.0;
    double shooting = 0.0;
    double shooting_error = 0.0;

    double discrepancy() const noexcept;
    bool agreed() const noexcept { return discrepancy() <= fd_error + shooting_error; }
    /// The value with the smaller error bar.
    double value() const noexcept { return fd_error < shooting_error ? fd : shooting; }
    /// max(smaller error bar, discrepancy)
    double error() const noexcept;
};

IndexedEigenvalue cross_validate_index(const SLProblem& problem, std::size_t k,
                                       std::size_t grid_n, const ShootingOptions& options = {});

}  // namespace specbound
