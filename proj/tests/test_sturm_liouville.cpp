#include <boost/math/special_functions/airy.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "generators.hpp"
#include "specbound/errors.hpp"
#include "specbound/sturm_liouville.hpp"

using namespace specbound;
using std::numbers::pi;

namespace {

SLProblem free_problem(double m1, BoundaryCondition left, BoundaryCondition right) {
    SLProblem p;
    p.m1 = m1;
    p.left = left;
    p.right = right;
    return p;
}

// Eigenvalues of -a'' = lambda a on [0, 1], a(0) = 0, a'(1) = beta a(1):
// s cos s = beta sin s with lambda = s^2, plus -sigma^2 with tanh sigma = sigma / beta
// when beta > 1.
std::vector<double> robin_oracle(double beta, std::size_t count) {
    std::vector<double> out;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    if (beta > 1.0) {
        auto g = [&](double s) { return std::tanh(s) - s / beta; };
        std::uintmax_t it = 200;
        const auto [a, b] = boost::math::tools::toms748_solve(g, 1e-6, beta + 1.0, tol, it);
        const double sigma = 0.5 * (a + b);
        out.push_back(-sigma * sigma);
    }
    auto g = [&](double s) { return s * std::cos(s) - beta * std::sin(s); };
    for (double lo = 1e-9; out.size() < count; lo += 0.01) {
        const double hi = lo + 0.01;
        if (g(lo) * g(hi) < 0.0) {
            std::uintmax_t it = 200;
            const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, it);
            const double s = 0.5 * (a + b);
            out.push_back(s * s);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("tridiagonal inertia matches a dense eigensolver (property)") {
    testgen::Gen gen(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::size_t>(gen.integer(1, 40));
        std::vector<double> d(n), e(n ? n - 1 : 0);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) M(i, i) = d[i] = gen.uniform(-10, 10);
        for (std::size_t i = 0; i + 1 < n; ++i) M(i, i + 1) = M(i + 1, i) = e[i] = gen.uniform(-5, 5);
        const SymTridiagonal T(d, e);
        const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues();
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(T.eigenvalue(k) == doctest::Approx(ref(k)).epsilon(1e-12).scale(10));
            if (k + 1 < n && ref(k + 1) - ref(k) > 1e-8)
                CHECK(T.count_below(0.5 * (ref(k) + ref(k + 1))) == k + 1);
        }
        CHECK(T.gershgorin_lower() <= ref(0));
        CHECK(T.gershgorin_upper() >= ref(n - 1));
    }
}

TEST_CASE("Dirichlet and Neumann spectra of the free string") {
    const auto dir = free_problem(pi, BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet());
    const auto fd = solve_fd(dir, 1024, {-1.0, 26.0});
    REQUIRE(fd.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        const double exact = (k + 1.0) * (k + 1.0);
        CHECK(std::abs(fd.eigenvalues[k] - exact) <= 1e-6 * exact);
        CHECK(fd.indices[k] == k);
    }
    const auto neu = free_problem(1.0, BoundaryCondition::neumann(), BoundaryCondition::neumann());
    const auto fn = solve_fd(neu, 1024, {-1.0, 17 * pi * pi});
    REQUIRE(fn.size() == 5);
    CHECK(std::abs(fn.eigenvalues[0]) <= 1e-6);
    for (std::size_t k = 1; k < 5; ++k) {
        const double exact = k * k * pi * pi;
        CHECK(std::abs(fn.eigenvalues[k] - exact) <= 1e-6 * exact);
    }
    const auto sh = solve_shooting(neu, {-1.0, 17 * pi * pi});
    REQUIRE(sh.size() == 5);
    for (std::size_t k = 1; k < 5; ++k) CHECK(sh.eigenvalues[k] == doctest::Approx(k * k * pi * pi).epsilon(1e-9));
}

TEST_CASE("Robin spectra against the transcendental equation") {
    for (const double beta : {-1.0, 0.5, 2.0}) {
        CAPTURE(beta);
        const auto p = free_problem(1.0, BoundaryCondition::dirichlet(), BoundaryCondition::robin(beta));
        const auto exact = robin_oracle(beta, 4);
        const auto cv = cross_validate(p, 1024, {-50.0, exact.back() + 1.0});
        CHECK(cv.agreed);
        REQUIRE(cv.merged.size() == exact.size());
        for (std::size_t k = 0; k < exact.size(); ++k) {
            CHECK(std::abs(cv.merged.eigenvalues[k] - exact[k]) <= 1e-6 * std::max(1.0, std::abs(exact[k])));
            CHECK(std::abs(cv.merged.eigenvalues[k] - exact[k]) <=
                  cv.merged.error_estimate[k] + 1e-9 * std::max(1.0, std::abs(exact[k])));
        }
        CHECK(spectrum_lower_bound(p) <= exact.front());
    }
}

TEST_CASE("linear potential against the zeros of Ai") {
    // -a'' + u a = lambda a on [0, 20], Dirichlet: lambda_k = -a_k up to e^{-40}.
    SLProblem p;
    p.m1 = 20.0;
    p.q = Potential::custom([](double u) { return u; }, "linear");
    const auto cv = cross_validate(p, 2048, {-1.0, 9.0});
    CHECK(cv.agreed);
    REQUIRE(cv.merged.size() >= 4);
    for (std::size_t k = 0; k < 4; ++k) {
        const double exact = -boost::math::airy_ai_zero<double>(static_cast<int>(k + 1));
        CHECK(cv.merged.eigenvalues[k] == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("finite differences and shooting agree on random smooth potentials") {
    testgen::Gen gen(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = gen.problem();
        const double floor = spectrum_lower_bound(p);
        const auto cv = cross_validate(p, 1024, {floor - 1.0, floor + 60.0});
        CAPTURE(trial);
        CHECK(cv.agreed);
        CHECK(cv.fd.size() == cv.shooting.size());
        worst = std::max(worst, cv.max_discrepancy);
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("a constant shift of q shifts every eigenvalue") {
    testgen::Gen gen(33);
    for (int trial = 0; trial < 5; ++trial) {
        auto p = gen.problem();
        auto trig = std::get<TrigPotential>(p.q.repr());
        const double c = gen.uniform(-5.0, 5.0);
        const auto base = solve_fd(p, 1024, {spectrum_lower_bound(p) - 1.0, 40.0});
        trig.offset += c;
        p.q = Potential(trig);
        const auto shifted = solve_fd(p, 1024, {spectrum_lower_bound(p) - 1.0, 40.0 + c});
        REQUIRE(shifted.size() == base.size());
        for (std::size_t k = 0; k < base.size(); ++k)
            CHECK(shifted.eigenvalues[k] == doctest::Approx(base.eigenvalues[k] + c).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("eigenvalues are monotone in the potential (property)") {
    testgen::Gen gen(34);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = gen.problem();
        auto bumped = p;
        const double centre = gen.uniform(p.m0, p.m1);
        const double height = gen.uniform(0.1, 5.0);
        const Potential q = p.q;
        bumped.q = Potential::custom(
            [=](double u) { return q(u) + height * std::exp(-4.0 * (u - centre) * (u - centre)); });
        const auto a = solve_fd(p, 1024, {spectrum_lower_bound(p) - 1.0, 30.0});
        const auto b = solve_fd(bumped, 1024, {spectrum_lower_bound(bumped) - 1.0, 40.0});
        for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
            CHECK(b.eigenvalues[k] >= a.eigenvalues[k] - a.error_estimate[k] - b.error_estimate[k]);
    }
}

TEST_CASE("count_below is consistent with the computed spectrum (property)") {
    testgen::Gen gen(35);
    for (int trial = 0; trial < 8; ++trial) {
        const auto p = gen.problem();
        const double floor = spectrum_lower_bound(p);
        const auto r = solve_fd(p, 1024, {floor - 1.0, floor + 40.0});
        CHECK(count_below(p, floor - 0.5) == 0);
        for (std::size_t k = 0; k + 1 < r.size(); ++k) {
            const double mid = 0.5 * (r.eigenvalues[k] + r.eigenvalues[k + 1]);
            CHECK(count_below(p, mid) == r.indices[k] + 1);
        }
        for (std::size_t k = 0; k < r.size(); ++k) CHECK(r.eigenvalues[k] >= floor);
    }
}

TEST_CASE("boundary form shift counts only destabilising ends") {
    auto p = free_problem(2.0, BoundaryCondition::robin(1.0), BoundaryCondition::robin(-1.0));
    CHECK(boundary_form_shift(p) == 0.0);
    p.left = BoundaryCondition::robin(-1.0);
    CHECK(boundary_form_shift(p) == doctest::Approx(1.0 / 2.0 + 1.0));
    p.right = BoundaryCondition::robin(1.0);
    CHECK(boundary_form_shift(p) == doctest::Approx(1.0 / 1.0 + 1.0));
}

TEST_CASE("indexed cross-validation") {
    const auto p = free_problem(pi, BoundaryCondition::dirichlet(), BoundaryCondition::dirichlet());
    for (std::size_t k = 0; k < 6; ++k) {
        const auto e = cross_validate_index(p, k, 1024);
        CHECK(e.agreed());
        CHECK(e.value() == doctest::Approx((k + 1.0) * (k + 1.0)).epsilon(1e-9));
        CHECK(e.error() >= e.discrepancy());
    }
}

TEST_CASE("fd matrix is symmetric tridiagonal with ghost-point Robin rows") {
    const auto p = free_problem(1.0, BoundaryCondition::robin(-0.5), BoundaryCondition::dirichlet());
    const auto T = assemble_fd(p, 64);
    const double h = 1.0 / 64;
    CHECK(T.size() == 64);  // Robin left node kept, Dirichlet right node removed
    CHECK(T.diag()[0] == doctest::Approx(2.0 * (1.0 + h * -0.5) / (h * h)));
    CHECK(T.off()[0] == doctest::Approx(-std::sqrt(2.0) / (h * h)));
    CHECK(T.diag()[5] == doctest::Approx(2.0 / (h * h)));
}

TEST_CASE("invalid problems are rejected") {
    SLProblem p;
    p.m0 = 1.0;
    p.m1 = 1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.m1 = 2.0;
    p.left = BoundaryCondition::robin(NAN);
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.left = BoundaryCondition::dirichlet();
    p.q = Potential::custom([](double u) { return 1.0 / (u - 1.5); });
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK_THROWS_AS(Potential(TabulatedPotential{{0.0, 0.0}, {1.0, 2.0}}), DomainError);
    CHECK_THROWS_AS(solve_fd(free_problem(1.0, {}, {}), 8, {0.0, 10.0}), DomainError);
}

TEST_CASE("potential evaluation") {
    const Potential tab(TabulatedPotential{{0.0, 1.0, 3.0}, {0.0, 2.0, -2.0}});
    CHECK(tab(0.5) == doctest::Approx(1.0));
    CHECK(tab(2.0) == doctest::Approx(0.0));
    const Potential trig(TrigPotential{1.0, {{2.0, 3.0, 0.5}}});
    CHECK(trig(0.7) == doctest::Approx(1.0 + 2.0 * std::sin(3.0 * 0.7 + 0.5)));
}
