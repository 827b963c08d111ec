#include "specbound/ode_compare.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "specbound/errors.hpp"
#include "specbound/format.hpp"

namespace specbound {

namespace {

constexpr std::size_t kSamples = 2048;

double sampled_inf(const Potential& q, double m0, double m1) {
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= kSamples; ++i) inf = std::min(inf, q(m0 + (m1 - m0) * i / kSamples));
    return inf;
}

double sampled_sup(const Potential& q, double m0, double m1) {
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= kSamples; ++i) sup = std::max(sup, q(m0 + (m1 - m0) * i / kSamples));
    return sup;
}

using State = std::array<double, 2>;  // (a, a')

// a'' = q a with RK4; `sub` steps per output interval of width h.
void integrate(const std::function<double(double)>& q, State y, double m0, double h, std::size_t n,
               std::size_t sub, std::vector<double>& a, std::vector<double>& da) {
    a.assign(n + 1, 0.0);
    da.assign(n + 1, 0.0);
    a[0] = y[0];
    da[0] = y[1];
    const double hs = h / static_cast<double>(sub);
    auto f = [&](double u, const State& s) { return State{s[1], q(u) * s[0]}; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < sub; ++j) {
            const double u = m0 + h * static_cast<double>(i) + hs * static_cast<double>(j);
            const State k1 = f(u, y);
            const State k2 = f(u + 0.5 * hs, {y[0] + 0.5 * hs * k1[0], y[1] + 0.5 * hs * k1[1]});
            const State k3 = f(u + 0.5 * hs, {y[0] + 0.5 * hs * k2[0], y[1] + 0.5 * hs * k2[1]});
            const State k4 = f(u + hs, {y[0] + hs * k3[0], y[1] + hs * k3[1]});
            y[0] += hs / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += hs / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
            throw NumericalError("comparison integrator overflowed");
        a[i + 1] = y[0];
        da[i + 1] = y[1];
    }
}

// Relative change of the state (a, a'/scale) between two integrations.
double state_change(const std::vector<double>& a1, const std::vector<double>& d1,
                    const std::vector<double>& a2, const std::vector<double>& d2, double scale) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a1.size(); ++i) {
        const double size = std::abs(a2[i]) + std::abs(d2[i]) / scale;
        const double diff = std::abs(a1[i] - a2[i]) + std::abs(d1[i] - d2[i]) / scale;
        worst = std::max(worst, diff / size);
    }
    return worst;
}

struct Integrated {
    std::vector<double> a, da;
    double change = 0.0;
    std::size_t sub = 1;
};

Integrated integrate_converged(const std::function<double(double)>& q, State y0, double m0,
                               double h, std::size_t n, double scale) {
    Integrated prev;
    integrate(q, y0, m0, h, n, 1, prev.a, prev.da);
    for (std::size_t sub = 2, level = 0; level < 12; sub *= 2, ++level) {
        Integrated cur;
        cur.sub = sub;
        integrate(q, y0, m0, h, n, sub, cur.a, cur.da);
        cur.change = state_change(prev.a, prev.da, cur.a, cur.da, scale);
        if (cur.change <= 1e-10) return cur;
        prev = std::move(cur);
    }
    throw NumericalError("comparison integrator did not settle under step halving");
}

}  // namespace

void ComparisonCase::validate(bool relaxed) const {
    if (!(m0 < m1) || !std::isfinite(m0) || !std::isfinite(m1))
        throw DomainError("comparison case needs finite m0 < m1");
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("comparison constant k must be positive");
    if (!(step > 0.0)) throw DomainError("integrator step must be positive");
    if (!(alpha <= k)) throw DomainError("Robin start requires alpha <= k");
    if (!relaxed) {
        const double inf = sampled_inf(q, m0, m1);
        if (!(inf > k * k))
            throw DomainError("comparison needs q > k^2; sampled inf q = " + format_double(inf));
    }
}

std::string_view to_string(StartMode m) {
    return m == StartMode::RobinStart ? "robin" : "dirichlet";
}

Trajectories integrate_pair(const ComparisonCase& c, StartMode mode, double dirichlet_slope,
                            bool relaxed) {
    c.validate(relaxed);
    const auto n = static_cast<std::size_t>(std::ceil((c.m1 - c.m0) / c.step - 1e-9));
    const double h = (c.m1 - c.m0) / static_cast<double>(n);
    const State y0 = mode == StartMode::RobinStart ? State{1.0, -c.alpha} : State{0.0, dirichlet_slope};
    const double scale = std::sqrt(std::max(sampled_sup(c.q, c.m0, c.m1), c.k * c.k));

    Trajectories t;
    const Potential& q = c.q;
    const auto a = integrate_converged([&q](double u) { return q(u); }, y0, c.m0, h, n, scale);
    const double k2 = c.k * c.k;
    const auto v = integrate_converged([k2](double) { return k2; }, y0, c.m0, h, n, scale);
    t.a = a.a;
    t.da = a.da;
    t.v_integrated = v.a;
    t.dv_integrated = v.da;
    t.step_used = h / static_cast<double>(a.sub);
    t.halving_error = a.change;

    t.u.resize(n + 1);
    t.v.resize(n + 1);
    t.dv.resize(n + 1);
    double worst = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double u = c.m0 + h * static_cast<double>(i);
        const double x = c.k * (u - c.m0);
        t.u[i] = u;
        t.v[i] = y0[0] * std::cosh(x) + y0[1] / c.k * std::sinh(x);
        t.dv[i] = y0[0] * c.k * std::sinh(x) + y0[1] * std::cosh(x);
        const double size = std::abs(t.v[i]) + std::abs(t.dv[i]) / scale;
        const double diff =
            std::abs(t.v[i] - t.v_integrated[i]) + std::abs(t.dv[i] - t.dv_integrated[i]) / scale;
        worst = std::max(worst, diff / size);
    }
    t.closed_form_error = worst;
    return t;
}

RiccatiReport verify_riccati(const ComparisonCase& c, bool relaxed) {
    const auto t = integrate_pair(c, StartMode::RobinStart, 1.0, relaxed);
    RiccatiReport rep;
    double amax = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < t.u.size(); ++i) {
        amax = std::max(amax, std::abs(t.a[i]));
        vmax = std::max(vmax, std::abs(t.v[i]));
    }
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.u.size(); ++i) {
        if (std::abs(t.a[i]) < 1e-10 * amax || std::abs(t.v[i]) < 1e-10 * vmax) {
            ++rep.skipped;
            continue;
        }
        ++rep.checked;
        rep.min_margin = std::min(rep.min_margin, t.da[i] / t.a[i] - t.dv[i] / t.v[i]);
    }
    rep.passed = rep.checked > 0 && rep.min_margin >= -rep.tolerance;
    return rep;
}

SlopeReport asymptotic_slope(const ComparisonCase& c, double m1_large) {
    if (!(m1_large >= c.m0 + 10.0 / c.k - 1e-12))
        throw DomainError("asymptotic slope needs m1 >= m0 + 10/k");
    ComparisonCase longer = c;
    longer.m1 = m1_large;
    const auto t = integrate_pair(longer, StartMode::RobinStart);
    SlopeReport rep;
    rep.m1 = m1_large;
    const double a_end = t.a.back();
    rep.slope = t.da.back() / a_end;
    rep.v_slope = t.dv.back() / t.v.back();
    rep.v_slope_limit = c.alpha < c.k ? c.k : -c.k;
    rep.bound = 0.5 * c.k;
    rep.passed = std::isfinite(rep.slope) && a_end != 0.0 && rep.slope >= rep.bound - 1e-6;
    return rep;
}

GrowthReport dirichlet_growth(const ComparisonCase& c, double initial_slope, double delta_offset) {
    if (initial_slope == 0.0 || !std::isfinite(initial_slope))
        throw DomainError("Dirichlet start needs a nonzero finite slope");
    const double offset = delta_offset > 0.0 ? delta_offset : 1.0 / c.k;
    GrowthReport rep;
    rep.delta = c.m0 + offset;
    if (!(rep.delta < c.m1)) throw DomainError("delta must lie inside (m0, m1)");

    const auto t = integrate_pair(c, StartMode::DirichletStart, initial_slope);
    // delta need not sit on the output grid; a(delta) comes from a separate run.
    ComparisonCase head = c;
    head.m1 = rep.delta;
    const auto th = integrate_pair(head, StartMode::DirichletStart, initial_slope);
    rep.a_delta = th.a.back();
    rep.a_end = t.a.back();

    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.u.size(); ++i) {
        if (i > 0 && (t.a[i] == 0.0 || t.a[i] * t.a[i - 1] < 0.0)) ++rep.sign_changes;
        if (t.u[i] < rep.delta) continue;
        const double envelope = rep.a_delta * std::exp(0.5 * c.k * (t.u[i] - rep.delta));
        rep.min_ratio = std::min(rep.min_ratio, t.a[i] / envelope);
    }
    rep.passed = rep.sign_changes == 0 && rep.a_end != 0.0 && rep.min_ratio >= 1.0 - 1e-8;
    return rep;
}

std::vector<ComparisonCase> random_cases(const SuiteConfig& config) {
    if (!(config.k_min > 0.0 && config.k_min <= config.k_max))
        throw DomainError("suite needs 0 < k_min <= k_max");
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    std::vector<ComparisonCase> out;
    for (std::size_t n = 0; n < config.count; ++n) {
        ComparisonCase c;
        c.k = uniform(config.k_min, config.k_max);
        const double c0 = uniform(0.1, 1.0);
        TrigPotential q;
        q.offset = c.k * c.k + c0;
        for (std::size_t j = 0; j < config.noise_terms; ++j) {
            const double amp = uniform(0.0, 0.5);
            q.offset += amp;  // amp (1 + sin) >= 0
            q.terms.push_back({amp, uniform(0.2, 4.0), uniform(0.0, 2.0 * std::numbers::pi)});
        }
        c.q = Potential(q);
        c.alpha = uniform(-c.k, c.k);
        c.m0 = uniform(0.0, 1.0);
        c.m1 = c.m0 + 10.0 / c.k;
        const double qmax = q.offset + 0.5 * config.noise_terms;
        c.step = std::min(0.01, 0.1 / std::sqrt(qmax));
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<RobinSuiteEntry> run_robin_suite(const SuiteConfig& config) {
    std::vector<RobinSuiteEntry> out;
    for (auto& c : random_cases(config)) {
        RobinSuiteEntry e;
        e.riccati = verify_riccati(c);
        e.slope = asymptotic_slope(c, c.m0 + 10.0 / c.k);
        e.passed = e.riccati.passed && e.slope.passed;
        e.c = std::move(c);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<DirichletSuiteEntry> run_dirichlet_suite(const SuiteConfig& config) {
    std::vector<DirichletSuiteEntry> out;
    std::size_t n = 0;
    for (auto& c : random_cases(config)) {
        DirichletSuiteEntry e;
        e.initial_slope = (n++ % 2 == 0) ? 1.0 : -1.0;
        e.growth = dirichlet_growth(c, e.initial_slope);
        e.passed = e.growth.passed;
        e.c = std::move(c);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace specbound
