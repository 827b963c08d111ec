// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "generators.hpp"
#include "specbound/discrete_hodge.hpp"
#include "specbound/dissection.hpp"
#include "specbound/format.hpp"
#include "specbound/ode_compare.hpp"
#include "specbound/sturm_liouville.hpp"
#include "specbound/torus_modes.hpp"
#include "specbound/tube_spectrum.hpp"

using namespace specbound;
using std::numbers::pi;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

SLProblem free_string(double length, BoundaryCondition bc) {
    SLProblem p;
    p.m1 = length;
    p.left = p.right = bc;
    return p;
}

Outcome classical_spectra() {
    double worst_dir = 0.0, worst_neu = 0.0;
    const auto dir = solve_fd(free_string(pi, BoundaryCondition::dirichlet()), 1024, {-1.0, 26.0});
    bool ok = dir.size() == 5;
    for (std::size_t k = 0; ok && k < 5; ++k) {
        const double exact = (k + 1.0) * (k + 1.0);
        worst_dir = std::max(worst_dir, std::abs(dir.eigenvalues[k] - exact) / exact);
    }
    const auto neu = solve_fd(free_string(1.0, BoundaryCondition::neumann()), 1024, {-1.0, 17 * pi * pi});
    ok = ok && neu.size() == 5;
    for (std::size_t k = 0; ok && k < 5; ++k) {
        const double exact = k * k * pi * pi;
        worst_neu = std::max(worst_neu, std::abs(neu.eigenvalues[k] - exact) / std::max(1.0, exact));
    }
    ok = ok && worst_dir <= 1e-6 && worst_neu <= 1e-6;
    return {ok, "max rel err Dirichlet " + fmt(worst_dir) + ", Neumann " + fmt(worst_neu) + " (tol 1e-6)"};
}

Outcome method_agreement() {
    testgen::Gen gen(2024);
    double worst = 0.0;
    std::size_t agreed = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = gen.problem();
        const double floor = spectrum_lower_bound(p);
        const auto cv = cross_validate(p, 1024, {floor - 1.0, floor + 60.0});
        agreed += cv.agreed && cv.fd.size() == cv.shooting.size();
        worst = std::max(worst, cv.max_discrepancy);
    }
    return {agreed == 10 && worst <= 1e-6,
            std::to_string(agreed) + "/10 agree within combined error, max discrepancy " + fmt(worst) +
                " (tol 1e-6)"};
}

Outcome fiber_identities() {
    const std::vector<ModeIndex> modes = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                          {1, 1}, {2, -1}, {-3, 2}, {3, 0}, {0, 2}};
    double residual = 0.0, norm = 0.0;
    bool ok = true;
    for (const double R : {6.0, 10.0}) {
        const auto g = make_tube(R, 0.2, R - 1.0, std::exp(-2 * R), std::exp(-R));
        const std::vector<double> u = {0.2, 1.0, 2.5, R - 1.0};
        for (const auto& m : modes) {
            const auto rep = verify_mode_identities(m, g, u, 1e-6);
            ok = ok && rep.passed;
            residual = std::max(residual, rep.max_residual);
            norm = std::max(norm, rep.normalization_error);
        }
    }
    ok = ok && residual <= 1e-6 && norm <= 1e-8;
    return {ok, "10 modes x R in {6,10}: max residual " + fmt(residual) + " (tol 1e-6), normalisation " +
                    fmt(norm) + " (tol 1e-8)"};
}

Outcome tube_threshold() {
    DegenerationSchedule s;
    s.R_grid = {6.0, 8.0, 10.0};
    SweepOptions opt;  // lambda_max 2, r0 threshold 5, pass threshold 1 - 1e-3
    const auto rows = sweep(s, opt);
    bool ok = rows.size() == 3;
    std::string detail;
    for (const auto& row : rows) {
        ok = ok && row.ok() && row.passed(opt.pass_threshold) && row.spectrum->all_cross_validated;
        detail += "R=" + format_double(row.R) + ": ";
        if (!row.ok()) {
            detail += "failed; ";
            continue;
        }
        detail += "r0=" + fmt(row.r0->r0) + ", " + std::to_string(row.spectrum->entries.size()) +
                  " eigenvalues in (0,2], off-zero floor " + fmt(row.spectrum->offzero_floor()) + "; ";
    }
    return {ok, detail + "threshold 1 - 1e-3, both solvers"};
}

Outcome appendix_verifiers() {
    SuiteConfig cfg;  // seed 7
    const auto robin = run_robin_suite(cfg);
    cfg.count = 10;
    const auto dirichlet = run_dirichlet_suite(cfg);
    std::size_t rp = 0, dp = 0;
    double margin = INFINITY, slope_gap = INFINITY, ratio = INFINITY;
    for (const auto& e : robin) {
        const bool ok = e.riccati.min_margin >= -1e-8 && e.slope.slope >= e.c.k / 2 - 1e-6 &&
                        std::abs(e.slope.m1 - (e.c.m0 + 10.0 / e.c.k)) <= 1e-12 * e.slope.m1;
        rp += ok;
        margin = std::min(margin, e.riccati.min_margin);
        slope_gap = std::min(slope_gap, e.slope.slope - e.c.k / 2);
    }
    for (const auto& e : dirichlet) {
        const bool ok = e.growth.passed && std::abs(e.growth.delta - (e.c.m0 + 1.0 / e.c.k)) <= 1e-12;
        dp += ok;
        ratio = std::min(ratio, e.growth.min_ratio);
    }
    return {rp == 20 && dp == 10,
            "Riccati/slope " + std::to_string(rp) + "/20 (min margin " + fmt(margin) + ", min slope - k/2 " +
                fmt(slope_gap) + "), growth " + std::to_string(dp) + "/10 (min ratio " + fmt(ratio) + ")"};
}

Outcome dissection_regression() {
    CoverSpec single;
    single.mu_set = {2.5};
    single.adjacency = {{}};
    const bool pass_through = laplacian_bound(single).mu_bound == 2.5;

    CoverSpec two;
    two.mu_set = {1.0, 1.0};
    two.adjacency = {{1}, {0}};
    two.mu_pair[{0, 1}] = 1.0;
    two.C_rho = 1.0;
    // References rounded once from 50-digit values.
    using Big = boost::multiprecision::cpp_bin_float_50;
    const double inv34 = (Big(1) / 34).convert_to<double>();
    const double inv_sqrt34 = (1 / sqrt(Big(34))).convert_to<double>();
    const bool fixture = laplacian_bound(two).mu_bound == inv34 && dirac_bound(two).lambda_bound == inv_sqrt34;

    testgen::Gen gen(61);
    std::size_t sqrt_ok = 0, mono_ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = gen.cover();
        auto sq = c;
        for (auto& m : sq.mu_set) m *= m;
        for (auto& [k, m] : sq.mu_pair) m *= m;
        sqrt_ok += dirac_bound(c).lambda_bound == std::sqrt(laplacian_bound(sq).mu_bound);
    }
    testgen::Gen pert(62);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = pert.cover();
        const double base = laplacian_bound(c).mu_bound;
        auto up = c;
        up.mu_set[static_cast<std::size_t>(pert.integer(0, static_cast<long>(c.size()) - 1))] *=
            pert.uniform(1.0, 3.0);
        for (auto& [k, m] : up.mu_pair)
            if (pert.coin()) m *= pert.uniform(1.0, 3.0);
        auto steeper = c;
        steeper.C_rho += pert.uniform(0.0, 4.0);
        mono_ok += laplacian_bound(up).mu_bound >= base && laplacian_bound(steeper).mu_bound <= base;
    }
    return {pass_through && fixture && sqrt_ok == 100 && mono_ok == 100,
            std::string("pass-through ") + (pass_through ? "exact" : "WRONG") + ", 1/34 and 1/sqrt(34) " +
                (fixture ? "exact" : "WRONG") + ", sqrt identity " + std::to_string(sqrt_ok) +
                "/100, monotone " + std::to_string(mono_ok) + "/100"};
}

Outcome s1_validity() {
    bool ok = true;
    std::string detail;
    for (const std::size_t n : {64u, 128u})
        for (const double f : {0.125, 0.25}) {
            const auto r = s1_case_study(n, f);
            long kernels = 0;
            for (const auto k : r.overlap_kernel_dims) kernels += static_cast<long>(k);
            const bool row = r.bound.mu_bound > 0.0 && r.bound.mu_bound <= r.mu_N && r.N_consistent &&
                             r.bound.counts.N == 1 + kernels;
            ok = ok && row;
            detail += "n=" + std::to_string(n) + " f=" + fmt(f) + ": " + fmt(r.bound.mu_bound) +
                      " <= mu_N=" + fmt(r.mu_N) + (row ? "; " : " FAIL; ");
        }
    return {ok, detail};
}

Outcome structure_suite() {
    double worst = 0.0;
    bool ok = true;
    std::size_t eigenvalues_checked = 0;
    for (const std::size_t n : {8u, 32u, 128u}) {
        const std::vector<DiracComplexMatrix> cs = {
            build_circle_complex(n, 2 * pi), build_interval_complex(n, 1.0, IntervalCondition::Absolute),
            build_interval_complex(n, 1.0, IntervalCondition::Relative)};
        for (const auto& c : cs) {
            const auto id = check_identities(c);
            worst = std::max(worst, id.max());
            const auto rep = verify_decomposition(c, 1e-12);
            ok = ok && rep.passed && rep.multiplicities_consistent &&
                 rep.dim_harmonic + rep.dim_exact + rep.dim_coexact == rep.dim_total;
            for (const auto& m : rep.multiplicities) {
                ok = ok && (m.value == 0.0 ? m.total == rep.dim_harmonic : m.total == m.exact + m.coexact);
                ++eigenvalues_checked;
            }
        }
    }
    ok = ok && worst <= 1e-12;
    return {ok, "max identity residual " + fmt(worst) + " (tol 1e-12), multiplicity bookkeeping on " +
                    std::to_string(eigenvalues_checked) + " distinct eigenvalues"};
}

Outcome berger_curve() {
    const double step = 1.0;
    const auto grid = uniform_grid(0.0, 200.0, step);
    const auto c = berger_scaling(1.0, 1.0, 2, 0.1, grid, {10.0});
    if (c.t_star.empty() || !c.t_star[0].second) return {false, "t* not reached"};
    const double t = *c.t_star[0].second;
    const auto i = static_cast<std::size_t>(std::llround(t / step));
    const bool ok = c.strictly_increasing && c.t[i] == t && c.value[i] >= 10.0 && i > 0 && c.value[i - 1] < 10.0;
    return {ok, "t*(10) = " + format_double(t) + ", curve(t*) = " + format_double(c.value[i]) +
                    ", curve(t* - step) = " + format_double(c.value[i - 1]) + ", strictly increasing: " +
                    (c.strictly_increasing ? "yes" : "no")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;  // wall-clock limit; 0 = none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "classical spectra", 1.0, classical_spectra},
        {2, "method agreement", 10.0, method_agreement},
        {3, "fibre-mode identities", 5.0, fiber_identities},
        {4, "tube threshold", 60.0, tube_threshold},
        {5, "comparison ODE verifiers", 10.0, appendix_verifiers},
        {6, "dissection formula regression", 0.0, dissection_regression},
        {7, "S1 validity oracle", 30.0, s1_validity},
        {8, "Dirac complex structure", 0.0, structure_suite},
        {9, "Berger curve", 0.0, berger_curve},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.budget_s <= 0.0 || secs < c.budget_s;
        const bool passed = out.passed && in_time;
        failures += !passed;
        std::printf("%s criterion %d (%s): %s [%.2f s%s]\n", passed ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), secs,
                    c.budget_s > 0.0 ? (" of " + fmt(c.budget_s) + " s budget").c_str() : "");
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
