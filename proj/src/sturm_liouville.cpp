#include "specbound/sturm_liouville.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <set>

#include "specbound/errors.hpp"
#include "specbound/format.hpp"

namespace specbound {

// ---------------------------------------------------------------------------
// Potential

Potential::Potential(TabulatedPotential p) : repr_(ConstantPotential{}) {
    if (p.u.size() < 2 || p.u.size() != p.q.size())
        throw DomainError("tabulated potential needs >= 2 samples with matching u and q");
    for (std::size_t i = 1; i < p.u.size(); ++i)
        if (!(p.u[i] > p.u[i - 1]))
            throw DomainError("tabulated potential u must be strictly increasing");
    repr_ = std::move(p);
}

Potential::Potential(CustomPotential p) : repr_(ConstantPotential{}) {
    if (!p.fn) throw DomainError("custom potential needs a callable");
    repr_ = std::move(p);
}

double Potential::operator()(double u) const {
    struct Eval {
        double u;
        double operator()(const ConstantPotential& p) const { return p.value; }
        double operator()(const TrigPotential& p) const {
            double acc = p.offset;
            for (const auto& t : p.terms) acc += t.amplitude * std::sin(t.frequency * u + t.phase);
            return acc;
        }
        double operator()(const TabulatedPotential& p) const {
            if (u <= p.u.front()) return p.q.front();
            if (u >= p.u.back()) return p.q.back();
            const auto it = std::upper_bound(p.u.begin(), p.u.end(), u);
            const auto i = static_cast<std::size_t>(it - p.u.begin());
            const double w = (u - p.u[i - 1]) / (p.u[i] - p.u[i - 1]);
            return (1.0 - w) * p.q[i - 1] + w * p.q[i];
        }
        double operator()(const CustomPotential& p) const { return p.fn(u); }
    };
    return std::visit(Eval{u}, repr_);
}

// ---------------------------------------------------------------------------
// Problem checks and bounds

void SLProblem::validate(std::size_t samples) const {
    if (!(std::isfinite(m0) && std::isfinite(m1)))
        throw DomainError("interval endpoints must be finite");
    if (!(m1 - m0 >= 1e-6)) throw DomainError("interval must have length >= 1e-6");
    for (const auto* bc : {&left, &right})
        if (bc->is_robin() && !std::isfinite(bc->beta))
            throw DomainError("Robin coefficient must be finite");
    samples = std::max<std::size_t>(samples, 1);
    for (std::size_t i = 0; i <= samples; ++i) {
        const double u = m0 + (m1 - m0) * static_cast<double>(i) / samples;
        if (!std::isfinite(q(u)))
            throw DomainError("potential is not finite at u = " + format_double(u));
    }
}

double boundary_form_shift(const SLProblem& problem) {
    // The quadratic form is  int a'^2 + q a^2  + beta_L a(m0)^2 - beta_R a(m1)^2.
    std::vector<double> bad;
    if (problem.left.is_robin() && problem.left.beta < 0.0) bad.push_back(-problem.left.beta);
    if (problem.right.is_robin() && problem.right.beta > 0.0) bad.push_back(problem.right.beta);
    if (bad.empty()) return 0.0;
    // With two bad ends each estimate lives on its own half of the interval.
    const double seg = bad.size() == 2 ? 0.5 * problem.length() : problem.length();
    double shift = 0.0;
    for (const double b : bad) shift = std::max(shift, b / seg + b * b);
    return shift;
}

double spectrum_lower_bound(const SLProblem& problem, std::size_t samples) {
    double inf_q = std::numeric_limits<double>::infinity();
    samples = std::max<std::size_t>(samples, 1);
    for (std::size_t i = 0; i <= samples; ++i)
        inf_q = std::min(inf_q, problem.q(problem.m0 + problem.length() * i / samples));
    return inf_q - boundary_form_shift(problem);
}

std::string_view to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::FiniteDifference: return "fd";
        case SolveMethod::Shooting: return "shooting";
        case SolveMethod::CrossValidated: return "cross_validated";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Finite differences

SymTridiagonal assemble_fd(const SLProblem& problem, std::size_t grid_n) {
    if (grid_n < 2) throw DomainError("finite-difference grid needs >= 2 intervals");
    const double h = problem.length() / static_cast<double>(grid_n);
    const double inv_h2 = 1.0 / (h * h);
    const bool robin_left = problem.left.is_robin();
    const bool robin_right = problem.right.is_robin();
    const std::size_t first = robin_left ? 0 : 1;
    const std::size_t last = robin_right ? grid_n : grid_n - 1;
    const std::size_t m = last - first + 1;

    std::vector<double> diag(m);
    std::vector<double> off(m - 1, -inv_h2);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = first + k;
        const double u = (i == grid_n) ? problem.m1 : problem.m0 + h * static_cast<double>(i);
        diag[k] = 2.0 * inv_h2 + problem.q(u);
    }
    // Ghost point a_{-1} = a_1 - 2 h beta a_0 turns row 0 into
    // (2 + 2 h beta)/h^2 a_0 - 2/h^2 a_1; scaling by the half boundary weight and
    // the similarity diag(1/sqrt(2), 1, ...) gives a symmetric row.
    if (robin_left) {
        diag.front() = 2.0 * (1.0 + h * problem.left.beta) * inv_h2 + problem.q(problem.m0);
        if (m > 1) off.front() = -std::numbers::sqrt2 * inv_h2;
    }
    if (robin_right) {
        diag.back() = 2.0 * (1.0 - h * problem.right.beta) * inv_h2 + problem.q(problem.m1);
        if (m > 1) off.back() = -std::numbers::sqrt2 * inv_h2;
    }
    return SymTridiagonal(std::move(diag), std::move(off));
}

namespace {

struct FdLadder {
    // grid_n / 2, grid_n, 2 grid_n
    SymTridiagonal coarse;
    SymTridiagonal mid;
    SymTridiagonal fine;

    FdLadder(const SLProblem& p, std::size_t n)
        : coarse(assemble_fd(p, n / 2)), mid(assemble_fd(p, n)), fine(assemble_fd(p, 2 * n)) {}

    struct Value {
        double value;
        double error;
    };

    // Richardson value for eigenvalue k with an a-posteriori error estimate.
    Value extrapolate(std::size_t k) const {
        if (k >= mid.size())
            throw NumericalError("eigenvalue " + std::to_string(k) +
                                 " is not resolved by the finite-difference grid");
        const double f = fine.eigenvalue(k);
        const double m = mid.eigenvalue(k);
        const double ext = (4.0 * f - m) / 3.0;
        double err;
        if (k < coarse.size()) {
            const double c = coarse.eigenvalue(k);
            const double ext_coarse = (4.0 * m - c) / 3.0;
            // Leading error of the extrapolation is O(h^4): the coarse pair is
            // 16x worse, so their difference is ~15x the fine error; /8 keeps a
            // safety factor of two before the asymptotic regime.
            err = std::abs(ext - ext_coarse) / 8.0;
        } else {
            err = std::abs(f - m);
        }
        const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() *
                                std::max(std::abs(fine.gershgorin_lower()),
                                         std::abs(fine.gershgorin_upper()));
        return {ext, std::max(err, roundoff)};
    }
};

void check_grid(std::size_t grid_n) {
    if (grid_n < 16) throw DomainError("solve_fd requires grid_n >= 16");
}

}  // namespace

SpectrumResult solve_fd(const SLProblem& problem, std::size_t grid_n, Window window) {
    check_grid(grid_n);
    problem.validate(4 * grid_n);
    SpectrumResult out;
    out.method = SolveMethod::FiniteDifference;
    out.grid_n = grid_n;
    if (!(window.lo < window.hi)) return out;

    const FdLadder ladder(problem, grid_n);
    // Candidates from the finest level in a slightly widened window; the
    // extrapolated value decides membership.
    const double pad = 1e-3 * std::max(1.0, std::abs(window.hi));
    const double lo = std::isfinite(window.lo) ? window.lo - pad : ladder.fine.gershgorin_lower() - 1.0;
    for (const auto& [k, raw] : ladder.fine.eigenvalues_in(lo, window.hi + pad)) {
        (void)raw;
        const auto v = ladder.extrapolate(k);
        if (v.value >= window.lo && v.value < window.hi) {
            out.eigenvalues.push_back(v.value);
            out.error_estimate.push_back(v.error);
            out.indices.push_back(k);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pruefer shooting

namespace {

constexpr double kPi = std::numbers::pi;

struct PhaseMesh {
    std::vector<double> u;      // nodes, u.front() = m0, u.back() = m1
    std::vector<double> q;      // q at nodes
    std::vector<double> q_mid;  // q at cell midpoints
};

// Steps are at most h0, resolve oscillation up to lambda_hi at a rate that
// refines with h0, and keep RK4 stable where q - lambda_lo is large.
PhaseMesh build_mesh(const SLProblem& p, double h0, double reference_step, double stiff_cap,
                     double lambda_lo, double lambda_hi) {
    PhaseMesh mesh;
    const double accuracy_cap = 0.25 * h0 / reference_step;
    double u = p.m0;
    mesh.u.push_back(u);
    mesh.q.push_back(p.q(u));
    while (u < p.m1) {
        const double qu = mesh.q.back();
        const double osc = std::max(lambda_hi - qu, 0.0);
        const double stiff = std::max(qu - lambda_lo, 0.0);
        double step = std::min({h0, accuracy_cap / std::sqrt(osc + 1.0),
                                stiff_cap / std::sqrt(stiff + 1.0)});
        // Look ahead so a steep rise of q inside the step cannot break stability.
        const double q_ahead = p.q(std::min(u + step, p.m1));
        const double stiff_ahead = std::max(q_ahead - lambda_lo, 0.0);
        step = std::min(step, stiff_cap / std::sqrt(stiff_ahead + 1.0));
        if (!(step > 0.0) || !std::isfinite(step))
            throw NumericalError("Pruefer mesh: step size underflow near u = " + format_double(u));
        double next = u + step;
        if (next > p.m1 - 1e-3 * step) next = p.m1;
        mesh.q_mid.push_back(p.q(0.5 * (u + next)));
        mesh.u.push_back(next);
        mesh.q.push_back(p.q(next));
        u = next;
    }
    return mesh;
}

double scale_for(double lambda, double q) { return std::sqrt(std::max(std::abs(lambda - q), 1.0)); }

// Re-expresses a phase under a new scale: tan(theta') = (s_new / s_old) tan(theta)
// with theta' in the same [m pi, (m + 1) pi) band, so zeros of a are preserved.
double rescale(double theta, double s_old, double s_new) {
    const double m = std::floor(theta / kPi);
    const double phi = theta - m * kPi;
    return m * kPi + std::atan2(s_new * std::sin(phi), s_old * std::cos(phi));
}

double initial_phase(const BoundaryCondition& bc, double scale) {
    // a = sin(theta)/sqrt(S), a' = sqrt(S) cos(theta)  =>  tan(theta) = S a / a'.
    return bc.is_robin() ? std::atan2(scale, bc.beta) : 0.0;
}

double target_phase(const BoundaryCondition& bc, double scale) {
    return bc.is_robin() ? std::atan2(scale, bc.beta) : kPi;
}

struct PhaseEnd {
    double theta;
    double scale;
};

PhaseEnd integrate_phase(const SLProblem& p, const PhaseMesh& mesh, double lambda) {
    const std::size_t cells = mesh.q_mid.size();
    double scale = scale_for(lambda, mesh.q_mid.front());
    double theta = initial_phase(p.left, scale);
    auto rhs = [&](double th, double q) {
        const double c = std::cos(th);
        const double s = std::sin(th);
        return scale * c * c + (lambda - q) / scale * s * s;
    };
    for (std::size_t i = 0; i < cells; ++i) {
        const double s_new = scale_for(lambda, mesh.q_mid[i]);
        if (i > 0 && s_new != scale) {
            theta = rescale(theta, scale, s_new);
            scale = s_new;
        }
        const double h = mesh.u[i + 1] - mesh.u[i];
        const double k1 = rhs(theta, mesh.q[i]);
        const double k2 = rhs(theta + 0.5 * h * k1, mesh.q_mid[i]);
        const double k3 = rhs(theta + 0.5 * h * k2, mesh.q_mid[i]);
        const double k4 = rhs(theta + h * k3, mesh.q[i + 1]);
        theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!std::isfinite(theta))
        throw NumericalError("Pruefer integration produced a non-finite phase at lambda = " +
                             format_double(lambda));
    return {theta, scale};
}

// Number of eigenvalues below lambda implied by the end phase.
std::size_t phase_count(const SLProblem& p, const PhaseEnd& end) {
    const double excess = end.theta - target_phase(p.right, end.scale);
    if (excess <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(excess / kPi));
}

// theta(m1) - (theta_B + k pi); increasing in lambda.
double phase_mismatch(const SLProblem& p, const PhaseMesh& mesh, double lambda, std::size_t k) {
    const auto end = integrate_phase(p, mesh, lambda);
    return end.theta - target_phase(p.right, end.scale) - kPi * static_cast<double>(k);
}

class Shooter {
public:
    Shooter(const SLProblem& p, Window window, const ShootingOptions& opt)
        : p_(p), opt_(opt) {
        floor_ = spectrum_lower_bound(p);
        bracket_lo_ = floor_ - 1.0;
        lambda_hi_ = std::max(window.hi, floor_);
    }

    const PhaseMesh& mesh(int level) {
        while (static_cast<int>(meshes_.size()) <= level) {
            const double h0 = opt_.initial_step / std::pow(2.0, meshes_.size());
            meshes_.push_back(build_mesh(p_, h0, opt_.initial_step, opt_.stiff_step_cap,
                                         bracket_lo_, lambda_hi_));
        }
        return meshes_[level];
    }

    std::size_t count(double lambda, int level) {
        return phase_count(p_, integrate_phase(p_, mesh(level), lambda));
    }

    // Converged count: two consecutive levels agree and the phase is settled.
    std::size_t converged_count(double lambda, int first_level = 0) {
        if (lambda <= floor_) return 0;
        auto prev = integrate_phase(p_, mesh(first_level), lambda);
        for (int level = first_level + 1; level <= opt_.max_halvings; ++level) {
            const auto cur = integrate_phase(p_, mesh(level), lambda);
            if (phase_count(p_, cur) == phase_count(p_, prev) &&
                std::abs(rescale(cur.theta, cur.scale, 1.0) - rescale(prev.theta, prev.scale, 1.0)) <
                    1e-6)
                return phase_count(p_, cur);
            prev = cur;
        }
        throw NumericalError("Pruefer eigenvalue count did not stabilise at lambda = " +
                             format_double(lambda));
    }

    struct Root {
        double value;
        double error;
        int level;  // mesh level at which the value settled
    };

    Root eigenvalue(std::size_t k) {
        double previous = 0.0;
        double lo = bracket_lo_;
        double hi = lambda_hi_;
        for (int level = 0; level <= opt_.max_halvings; ++level) {
            const auto& m = mesh(level);
            auto g = [&](double x) { return phase_mismatch(p_, m, x, k); };
            // Expand the bracket until it straddles the root at this resolution.
            double width = std::max(hi - lo, 1.0);
            for (int i = 0; g(lo) >= 0.0; ++i) {
                if (i > 60) throw NumericalError("Pruefer bracket (lower) not found");
                lo -= width;
                width *= 2.0;
            }
            width = std::max(hi - lo, 1.0);
            for (int i = 0; g(hi) <= 0.0; ++i) {
                if (i > 60) throw NumericalError("Pruefer bracket (upper) not found");
                hi += width;
                width *= 2.0;
            }
            double a = lo, b = hi;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(1.0, std::abs(mid)))
                    break;
                if (g(mid) > 0.0)
                    b = mid;
                else
                    a = mid;
            }
            const double value = 0.5 * (a + b);
            if (level > 0) {
                const double change = std::abs(value - previous);
                if (change <= opt_.tolerance * std::max(1.0, std::abs(value))) {
                    // RK4: the step-halving difference is ~15x the remaining error.
                    const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                                         std::max(1.0, std::abs(value));
                    return {value, std::max(change / 15.0, floor), level};
                }
                const double span = std::max(100.0 * change, 1e-8 * std::max(1.0, std::abs(value)));
                lo = value - span;
                hi = value + span;
            }
            previous = value;
        }
        throw NumericalError("Pruefer eigenvalue " + std::to_string(k) +
                             " did not converge under step halving");
    }

private:
    const SLProblem& p_;
    ShootingOptions opt_;
    double floor_;       // no eigenvalue lies below this
    double bracket_lo_;
    double lambda_hi_;
    std::vector<PhaseMesh> meshes_;
};

}  // namespace

double pruefer_phase(const SLProblem& problem, double lambda, double initial_step,
                     double stiff_step_cap, double lambda_scale) {
    const double lam_lo = std::min(lambda, lambda_scale);
    const double lam_hi = std::max(lambda, lambda_scale);
    const auto mesh = build_mesh(problem, initial_step, initial_step, stiff_step_cap, lam_lo, lam_hi);
    const auto end = integrate_phase(problem, mesh, lambda);
    // Report in the unscaled convention: tan(theta) = a / a'.
    return rescale(end.theta, end.scale, 1.0);
}

std::size_t count_below(const SLProblem& problem, double lambda_star,
                        const ShootingOptions& options) {
    problem.validate();
    if (!std::isfinite(lambda_star)) throw DomainError("count_below requires finite lambda");
    Shooter shooter(problem, Window{-std::numeric_limits<double>::infinity(), lambda_star},
                    options);
    return shooter.converged_count(lambda_star);
}

SpectrumResult solve_shooting(const SLProblem& problem, Window window,
                              const ShootingOptions& options) {
    problem.validate();
    SpectrumResult out;
    out.method = SolveMethod::Shooting;
    if (!(window.lo < window.hi)) return out;
    Shooter shooter(problem, window, options);
    const std::size_t first =
        std::isfinite(window.lo) ? shooter.converged_count(window.lo) : 0;
    const std::size_t last = shooter.converged_count(window.hi);
    for (std::size_t k = first; k < last; ++k) {
        const auto root = shooter.eigenvalue(k);
        // Oscillation check: exactly k eigenvalues lie below the root.
        const double probe = std::max(100.0 * root.error, 1e-8 * std::max(1.0, std::abs(root.value)));
        const int level = std::max(root.level - 1, 0);
        if (shooter.converged_count(root.value - probe, level) != k ||
            shooter.converged_count(root.value + probe, level) != k + 1)
            throw NumericalError("Pruefer phase count disagrees with root " + std::to_string(k));
        out.eigenvalues.push_back(root.value);
        out.error_estimate.push_back(root.error);
        out.indices.push_back(k);
    }
    return out;
}

double IndexedEigenvalue::discrepancy() const noexcept { return std::abs(fd - shooting); }

double IndexedEigenvalue::error() const noexcept {
    return std::max(std::min(fd_error, shooting_error), discrepancy());
}

CrossValidation cross_validate(const SLProblem& problem, std::size_t grid_n, Window window,
                               const ShootingOptions& options) {
    check_grid(grid_n);
    CrossValidation cv;
    cv.fd = solve_fd(problem, grid_n, window);
    cv.shooting = solve_shooting(problem, window, options);
    cv.merged.method = SolveMethod::CrossValidated;
    cv.merged.grid_n = grid_n;

    // Align by spectral index; an index present on one side only is solved on
    // the other so eigenvalues straddling the window edge are still compared.
    std::set<std::size_t> all(cv.fd.indices.begin(), cv.fd.indices.end());
    all.insert(cv.shooting.indices.begin(), cv.shooting.indices.end());
    std::optional<FdLadder> ladder;
    std::optional<Shooter> shooter;
    auto lookup = [](const SpectrumResult& r, std::size_t k) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < r.indices.size(); ++i)
            if (r.indices[i] == k) return i;
        return std::nullopt;
    };

    bool agreed = true;
    for (const std::size_t k : all) {
        IndexedEigenvalue e;
        e.index = k;
        if (const auto i = lookup(cv.fd, k)) {
            e.fd = cv.fd.eigenvalues[*i];
            e.fd_error = cv.fd.error_estimate[*i];
        } else {
            if (!ladder) ladder.emplace(problem, grid_n);
            const auto v = ladder->extrapolate(k);
            e.fd = v.value;
            e.fd_error = v.error;
        }
        if (const auto i = lookup(cv.shooting, k)) {
            e.shooting = cv.shooting.eigenvalues[*i];
            e.shooting_error = cv.shooting.error_estimate[*i];
        } else {
            if (!shooter) shooter.emplace(problem, window, options);
            const auto r = shooter->eigenvalue(k);
            e.shooting = r.value;
            e.shooting_error = r.error;
        }
        cv.max_discrepancy = std::max(cv.max_discrepancy, e.discrepancy());
        agreed = agreed && e.agreed();
        const double value = e.value();
        if (value >= window.lo && value < window.hi) {
            cv.merged.eigenvalues.push_back(value);
            cv.merged.error_estimate.push_back(e.error());
            cv.merged.indices.push_back(k);
        }
    }
    cv.agreed = agreed;
    if (!agreed) cv.merged.method = SolveMethod::FiniteDifference;
    return cv;
}

IndexedEigenvalue cross_validate_index(const SLProblem& problem, std::size_t k,
                                       std::size_t grid_n, const ShootingOptions& options) {
    check_grid(grid_n);
    problem.validate(4 * grid_n);
    IndexedEigenvalue e;
    e.index = k;
    const FdLadder ladder(problem, grid_n);
    const auto v = ladder.extrapolate(k);
    e.fd = v.value;
    e.fd_error = v.error;
    Shooter shooter(problem, Window{-std::numeric_limits<double>::infinity(), v.value}, options);
    const auto r = shooter.eigenvalue(k);
    e.shooting = r.value;
    e.shooting_error = r.error;
    return e;
}

}  // namespace specbound
