#pragma once

// Comparison of  -a'' + q a = 0  against  -v'' + k^2 v = 0  when q > k^2:
// Riccati-slope domination a'/a >= v'/v for Robin-type starts, the asymptotic
// slope bound, and exponential growth of Dirichlet starts.

#include <cstdint>
#include <string_view>
#include <vector>

#include "specbound/sturm_liouville.hpp"

namespace specbound {

struct ComparisonCase {
    Potential q;
    double k = 1.0;
    double alpha = 0.0;  ///< Robin start a(m0) = 1, a'(m0) = -alpha
    double m0 = 0.0;
    double m1 = 10.0;
    double step = 0.01;

    /// Throws DomainError unless m0 < m1, k > 0, step > 0, alpha <= k and, unless
    /// `relaxed`, the sampled infimum of q exceeds k^2.
    void validate(bool relaxed = false) const;
};

enum class StartMode { RobinStart, DirichletStart };
std::string_view to_string(StartMode m);

struct Trajectories {
    std::vector<double> u;
    std::vector<double> a, da;  ///< integrated
    std::vector<double> v, dv;  ///< closed form
    std::vector<double> v_integrated, dv_integrated;
    double step_used = 0.0;           ///< after halving
    double halving_error = 0.0;       ///< max relative change of a, a' between the last two steps
    double closed_form_error = 0.0;   ///< max relative |v_integrated - v|
};

/// RK4 with step halving until two consecutive steps agree to 1e-10 (relative);
/// throws NumericalError after 12 halvings. DirichletStart uses a'(m0) = slope.
Trajectories integrate_pair(const ComparisonCase& c, StartMode mode, double dirichlet_slope = 1.0,
                            bool relaxed = false);

struct RiccatiReport {
    double min_margin = 0.0;  ///< min of a'/a - v'/v over the checked grid points
    std::size_t checked = 0;
    std::size_t skipped = 0;  ///< |a| or |v| below 1e-10 of its maximum
    double tolerance = 1e-8;
    bool passed = false;
};

RiccatiReport verify_riccati(const ComparisonCase& c, bool relaxed = false);

struct SlopeReport {
    double m1 = 0.0;
    double slope = 0.0;         ///< a'(m1)/a(m1)
    double v_slope = 0.0;       ///< v'(m1)/v(m1)
    double v_slope_limit = 0.0; ///< k for alpha < k, -k at alpha = k
    double bound = 0.0;         ///< k/2
    bool passed = false;        ///< slope >= k/2 - 1e-6
};

/// Requires m1_large >= m0 + 10/k.
SlopeReport asymptotic_slope(const ComparisonCase& c, double m1_large);

struct GrowthReport {
    double delta = 0.0;
    double a_delta = 0.0;
    /// min over u in [delta, m1] of a(u) / (a(delta) e^{k (u - delta)/2}); >= 1 when
    /// the bound holds (for either sign of a'(m0)).
    double min_ratio = 0.0;
    std::size_t sign_changes = 0;  ///< zeros of a in (m0, m1]
    double a_end = 0.0;
    bool passed = false;
};

/// delta defaults to m0 + 1/k when delta_offset <= 0.
GrowthReport dirichlet_growth(const ComparisonCase& c, double initial_slope = 1.0,
                              double delta_offset = 0.0);

struct SuiteConfig {
    std::uint64_t seed = 7;
    std::size_t count = 20;
    double k_min = 0.5;
    double k_max = 3.0;
    std::size_t noise_terms = 3;
};

/// Seeded cases: q = k^2 + c0 + sum_j a_j (1 + sin(w_j u + p_j)) with c0 in
/// [0.1, 1], a_j in [0, 0.5]; alpha in [-k, k]; m1 = m0 + 10/k.
std::vector<ComparisonCase> random_cases(const SuiteConfig& config);

struct RobinSuiteEntry {
    ComparisonCase c;
    RiccatiReport riccati;
    SlopeReport slope;
    bool passed = false;
};

struct DirichletSuiteEntry {
    ComparisonCase c;
    double initial_slope = 1.0;
    GrowthReport growth;
    bool passed = false;
};

std::vector<RobinSuiteEntry> run_robin_suite(const SuiteConfig& config);
/// Initial slopes alternate in sign.
std::vector<DirichletSuiteEntry> run_dirichlet_suite(const SuiteConfig& config);

}  // namespace specbound
