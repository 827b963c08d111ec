#include "specbound/discrete_hodge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "specbound/errors.hpp"

namespace specbound {

std::string_view to_string(IntervalCondition c) {
    return c == IntervalCondition::Absolute ? "absolute" : "relative";
}

DiracComplexMatrix DiracComplexMatrix::from_derivative(Eigen::MatrixXd D, double step) {
    DiracComplexMatrix c;
    c.dim_plus = static_cast<std::size_t>(D.cols());
    c.dim_minus = static_cast<std::size_t>(D.rows());
    c.step = step;
    const Eigen::Index p = D.cols();
    const Eigen::Index m = D.rows();
    const Eigen::Index n = p + m;
    c.d = Eigen::MatrixXd::Zero(n, n);
    c.d.block(p, 0, m, p) = D;
    c.delta = c.d.transpose();
    c.T = Eigen::MatrixXd::Identity(n, n);
    c.T.bottomRightCorner(m, m) *= -1.0;
    c.Q = c.d + c.delta;
    c.P = c.Q * c.Q;
    c.D = std::move(D);
    return c;
}

DiracComplexMatrix build_circle_complex(std::size_t n, double length) {
    if (n < 4) throw DomainError("circle complex needs n >= 4");
    if (!(length > 0.0)) throw DomainError("circle length must be positive");
    const double h = length / static_cast<double>(n);
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index e = 0; e < N; ++e) {
        D(e, e) = -1.0 / h;
        D(e, (e + 1) % N) = 1.0 / h;
    }
    return DiracComplexMatrix::from_derivative(std::move(D), h);
}

DiracComplexMatrix build_interval_complex(std::size_t n, double length, IntervalCondition cond) {
    if (n < 4) throw DomainError("interval complex needs n >= 4");
    if (!(length > 0.0)) throw DomainError("interval length must be positive");
    const double h = length / static_cast<double>(n);
    const auto E = static_cast<Eigen::Index>(n);
    if (cond == IntervalCondition::Absolute) {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(E, E + 1);
        for (Eigen::Index e = 0; e < E; ++e) {
            D(e, e) = -1.0 / h;
            D(e, e + 1) = 1.0 / h;
        }
        return DiracComplexMatrix::from_derivative(std::move(D), h);
    }
    // Column j is interior node j + 1.
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(E, E - 1);
    for (Eigen::Index e = 0; e < E; ++e) {
        if (e >= 1) D(e, e - 1) = -1.0 / h;
        if (e + 1 <= E - 1) D(e, e) = 1.0 / h;
    }
    return DiracComplexMatrix::from_derivative(std::move(D), h);
}

std::vector<double> circle_spectrum(std::size_t n, double length) {
    const double h = length / static_cast<double>(n);
    std::vector<double> out;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
        out.push_back(4.0 * s * s / (h * h));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> interval_function_spectrum(std::size_t n, double length, IntervalCondition c) {
    const double h = length / static_cast<double>(n);
    std::vector<double> out;
    const double nodes = c == IntervalCondition::Absolute ? n + 1.0 : static_cast<double>(n);
    const std::size_t first = c == IntervalCondition::Absolute ? 0 : 1;
    const std::size_t last = c == IntervalCondition::Absolute ? n : n - 1;
    for (std::size_t k = first; k <= last; ++k) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(k) / (2.0 * nodes));
        out.push_back(4.0 * s * s / (h * h));
    }
    return out;
}

namespace {

bool same_value(double a, double b) {
    return std::abs(a - b) <= std::max(1e-12, 1e-9 * std::max(std::abs(a), std::abs(b)));
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

struct Ranges {
    Eigen::MatrixXd exact;    // orthonormal basis of range(d), graded coordinates
    Eigen::MatrixXd coexact;  // orthonormal basis of range(delta)
};

Ranges ranges(const DiracComplexMatrix& c) {
    const auto p = static_cast<Eigen::Index>(c.dim_plus);
    const auto m = static_cast<Eigen::Index>(c.dim_minus);
    const Eigen::Index n = p + m;
    Ranges r;
    if (c.D.size() == 0) {
        r.exact.resize(n, 0);
        r.coexact.resize(n, 0);
        return r;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.D, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    const double tol = 1e-9 * (sv.size() ? sv(0) : 0.0);
    while (rank < sv.size() && sv(rank) > tol) ++rank;
    r.exact = Eigen::MatrixXd::Zero(n, rank);
    r.exact.bottomRows(m) = svd.matrixU().leftCols(rank);
    r.coexact = Eigen::MatrixXd::Zero(n, rank);
    r.coexact.topRows(p) = svd.matrixV().leftCols(rank);
    return r;
}

// Orthonormal basis of the part of span(E) inside span(B), for spaces where the
// principal angles are 0 or pi/2 (eigenspaces of P against ranges of d, delta).
Eigen::MatrixXd intersect(const Eigen::MatrixXd& B, const Eigen::MatrixXd& E) {
    if (B.cols() == 0 || E.cols() == 0) return Eigen::MatrixXd(E.rows(), 0);
    const Eigen::MatrixXd proj = B * (B.transpose() * E);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj, Eigen::ComputeThinU);
    Eigen::Index k = 0;
    while (k < svd.singularValues().size() && svd.singularValues()(k) > 0.5) ++k;
    return svd.matrixU().leftCols(k);
}

Eigen::MatrixXd group_vectors(const SpectralData& s, double value) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        const double v = s.values(i);
        const bool zero = std::abs(v) <= s.zero_tolerance;
        if (value == 0.0 ? zero : (!zero && same_value(v, value))) cols.push_back(i);
    }
    Eigen::MatrixXd E(s.vectors.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        E.col(static_cast<Eigen::Index>(j)) = s.vectors.col(cols[j]);
    return E;
}

}  // namespace

SpectralData diagonalize(const Eigen::MatrixXd& symmetric) {
    SpectralData s;
    if (symmetric.size() == 0) return s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    s.values = es.eigenvalues();
    s.vectors = es.eigenvectors();
    s.zero_tolerance = std::max(1e-12, 1e-9 * s.values.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        double v = s.values(i);
        if (std::abs(v) <= s.zero_tolerance) v = 0.0;
        if (!s.groups.empty() &&
            (v == 0.0 ? s.groups.back().value == 0.0
                      : (s.groups.back().value != 0.0 && same_value(v, s.values(i - 1))))) {
            ++s.groups.back().multiplicity;
        } else {
            s.groups.push_back({v, 1});
        }
    }
    return s;
}

double IdentityResiduals::max() const {
    return std::max({dd, delta_delta, adjoint, T_squared, anticommute, P_split, P_symmetric});
}

IdentityResiduals check_identities(const DiracComplexMatrix& c) {
    // Relative to the natural scale of each product.
    const double nd = std::max(max_abs(c.d), 1e-300);
    const double np = std::max(max_abs(c.P), 1e-300);
    const Eigen::Index n = static_cast<Eigen::Index>(c.dim());
    IdentityResiduals r;
    r.dd = max_abs(c.d * c.d) / (nd * nd);
    r.delta_delta = max_abs(c.delta * c.delta) / (nd * nd);
    // <d x, y> = <x, delta y> for basis vectors x, y; both grades carry the
    // same weight, so this is delta = d^T entrywise.
    r.adjoint = max_abs(c.step * c.d.transpose() - c.step * c.delta) / (c.step * nd);
    r.T_squared = max_abs(c.T * c.T - Eigen::MatrixXd::Identity(n, n));
    r.anticommute = max_abs(c.Q * c.T + c.T * c.Q) / nd;
    r.P_split = max_abs(c.P - (c.d * c.delta + c.delta * c.d)) / np;
    r.P_symmetric = max_abs(c.P - c.P.transpose()) / np;
    return r;
}

DecompositionReport verify_decomposition(const DiracComplexMatrix& c, double tolerance) {
    DecompositionReport rep;
    rep.dim_total = c.dim();
    rep.identities = check_identities(c);
    const auto eig = diagonalize(c.P);
    const auto rng = ranges(c);
    const Eigen::MatrixXd H = group_vectors(eig, 0.0);
    rep.dim_harmonic = static_cast<std::size_t>(H.cols());
    rep.dim_exact = static_cast<std::size_t>(rng.exact.cols());
    rep.dim_coexact = static_cast<std::size_t>(rng.coexact.cols());

    rep.orthogonality = std::max({max_abs(H.transpose() * rng.exact),
                                  max_abs(H.transpose() * rng.coexact),
                                  max_abs(rng.exact.transpose() * rng.coexact)});
    const auto n = static_cast<Eigen::Index>(c.dim());
    const Eigen::MatrixXd sum = H * H.transpose() + rng.exact * rng.exact.transpose() +
                                rng.coexact * rng.coexact.transpose();
    rep.completeness = max_abs(sum - Eigen::MatrixXd::Identity(n, n));

    rep.multiplicities_consistent = true;
    for (const auto& g : eig.groups) {
        DecompositionReport::Multiplicity m{g.value, g.multiplicity, 0, 0};
        if (g.value == 0.0) {
            if (g.multiplicity != rep.dim_harmonic) rep.multiplicities_consistent = false;
        } else {
            const Eigen::MatrixXd E = group_vectors(eig, g.value);
            m.exact = static_cast<std::size_t>(intersect(rng.exact, E).cols());
            m.coexact = static_cast<std::size_t>(intersect(rng.coexact, E).cols());
            if (m.exact + m.coexact != m.total || m.exact != m.coexact)
                rep.multiplicities_consistent = false;
        }
        rep.multiplicities.push_back(m);
    }
    // Orthogonality and completeness come out of two eigensolvers and carry their
    // rounding; the algebraic identities are exact by construction.
    constexpr double subspace_tol = 1e-9;
    rep.passed = rep.identities.max() <= tolerance && rep.orthogonality <= subspace_tol &&
                 rep.completeness <= subspace_tol &&
                 rep.dim_harmonic + rep.dim_exact + rep.dim_coexact == rep.dim_total &&
                 rep.multiplicities_consistent;
    return rep;
}

EigenspaceSplit verify_eigenspace_pairing(const DiracComplexMatrix& c, double lambda,
                                          double tolerance) {
    if (!(lambda > 0.0)) throw DomainError("eigenspace pairing needs lambda > 0");
    const auto eig = diagonalize(c.P);
    const auto it = std::find_if(eig.groups.begin(), eig.groups.end(), [&](const EigenGroup& g) {
        return g.value != 0.0 && same_value(g.value, lambda);
    });
    if (it == eig.groups.end()) throw DomainError("lambda is not an eigenvalue of P");
    const auto rng = ranges(c);
    EigenspaceSplit s;
    s.lambda = it->value;
    s.E = group_vectors(eig, it->value);
    s.E_exact = intersect(rng.exact, s.E);
    s.E_coexact = intersect(rng.coexact, s.E);
    s.orthogonality = max_abs(s.E_exact.transpose() * s.E_coexact);

    const double root = std::sqrt(s.lambda);
    const Eigen::MatrixXd dX = c.d * s.E_coexact;
    const Eigen::MatrixXd deltaY = c.delta * s.E_exact;
    s.d_into_exact = max_abs(dX - s.E_exact * (s.E_exact.transpose() * dX)) / root;
    s.delta_into_coexact = max_abs(deltaY - s.E_coexact * (s.E_coexact.transpose() * deltaY)) / root;
    const auto k = s.E_coexact.cols();
    s.norm_identity =
        max_abs(dX.transpose() * dX - s.lambda * Eigen::MatrixXd::Identity(k, k)) / s.lambda;
    auto rank = [root](const Eigen::MatrixXd& m) {
        if (m.cols() == 0) return std::size_t{0};
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        std::size_t r = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 0.5 * root) ++r;
        return r;
    };
    s.rank_d_on_coexact = rank(dX);
    s.rank_delta_on_exact = rank(deltaY);
    const auto ne = static_cast<std::size_t>(s.E_exact.cols());
    const auto nc = static_cast<std::size_t>(s.E_coexact.cols());
    s.passed = ne == nc && ne + nc == static_cast<std::size_t>(s.E.cols()) &&
               s.rank_d_on_coexact == ne && s.rank_delta_on_exact == nc &&
               s.orthogonality <= tolerance && s.d_into_exact <= tolerance &&
               s.delta_into_coexact <= tolerance && s.norm_identity <= tolerance;
    return s;
}

MinimaxReport verify_minimax(const DiracComplexMatrix& c, std::size_t i, double tolerance) {
    if (i == 0) throw DomainError("verify_minimax needs i >= 1");
    MinimaxReport rep;
    rep.i = i;
    // P on range(d) is d delta = D D^T on the minus grade; on range(delta) it is
    // delta d = D^T D on the plus grade.
    const auto exact = diagonalize(c.D * c.D.transpose());
    const auto coexact = diagonalize(c.D.transpose() * c.D);
    auto positive = [](const SpectralData& s) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index k = 0; k < s.values.size(); ++k)
            if (s.values(k) > s.zero_tolerance) idx.push_back(k);
        return idx;
    };
    const auto pe = positive(exact);
    const auto pc = positive(coexact);
    if (pe.size() < i || pc.size() < i) {
        rep.empty = true;
        rep.passed = true;
        return rep;
    }
    rep.lambda_exact = exact.values(pe[i - 1]);
    rep.lambda_coexact = coexact.values(pc[i - 1]);
    rep.pairing_residual = std::abs(rep.lambda_exact - rep.lambda_coexact) / rep.lambda_exact;

    Eigen::MatrixXd L(c.D.rows(), static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < i; ++k) L.col(static_cast<Eigen::Index>(k)) = exact.vectors.col(pe[k]);
    // Minimum-norm preimages through the pseudo-inverse (a separate factorisation).
    const Eigen::MatrixXd pinv = c.D.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::MatrixXd Xi = pinv * L;
    const Eigen::MatrixXd gram = Xi.transpose() * Xi;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    rep.sup_quotient = 1.0 / es.eigenvalues()(0);
    rep.quotient_residual = std::abs(rep.sup_quotient - rep.lambda_exact) / rep.lambda_exact;
    rep.passed = rep.pairing_residual <= tolerance && rep.quotient_residual <= tolerance;
    return rep;
}

namespace {

// Smallest positive eigenvalue of P with a nontrivial exact part.
double smallest_positive_exact(const DiracComplexMatrix& c) {
    const auto eig = diagonalize(c.P);
    const auto rng = ranges(c);
    for (const auto& g : eig.groups) {
        if (g.value <= 0.0) continue;
        if (intersect(rng.exact, group_vectors(eig, g.value)).cols() > 0) return g.value;
    }
    throw NumericalError("complex has no positive exact eigenvalue");
}

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }

}  // namespace

S1CaseReport s1_case_study(std::size_t n, double overlap_fraction) {
    if (n < 32) throw DomainError("s1_case_study needs n >= 32");
    if (!(overlap_fraction > 0.0 && overlap_fraction < 0.5))
        throw DomainError("overlap fraction must lie in (0, 1/2)");
    S1CaseReport rep;
    rep.n = n;
    rep.overlap_fraction = overlap_fraction;
    const double length = 2.0 * std::numbers::pi;
    const double h = length / static_cast<double>(n);
    rep.step = h;
    const std::size_t half = n / 2;
    const auto c = static_cast<std::size_t>(std::lround(overlap_fraction * static_cast<double>(n) / 2.0));
    if (c < 1 || c + 1 >= std::min(half, n - half))
        throw DomainError("degenerate overlap: each overlap component needs between 1 and n/2 - 2 edges");
    rep.overlap_edges = c;

    // U_0 covers edges [0, half + c), U_1 covers [half, n + c) mod n; the overlap
    // components are edges [half, half + c) and [0, c).
    const std::size_t arc0 = half + c;
    const std::size_t arc1 = n - half + c;
    rep.arc_edges = arc0;

    const auto circle = build_circle_complex(n, length);
    {
        const auto eig = diagonalize(circle.P);
        const auto rng = ranges(circle);
        for (const auto& g : eig.groups) {
            if (g.value <= 0.0) continue;
            const auto k = intersect(rng.exact, group_vectors(eig, g.value)).cols();
            for (Eigen::Index j = 0; j < k; ++j) rep.circle_exact_spectrum.push_back(g.value);
        }
    }

    const auto U0 = build_interval_complex(arc0, arc0 * h, IntervalCondition::Absolute);
    const auto U1 = build_interval_complex(arc1, arc1 * h, IntervalCondition::Absolute);
    rep.mu_arcs = {smallest_positive_exact(U0), smallest_positive_exact(U1)};

    // Overlap components can be shorter than the interval builder's minimum of
    // four edges, so they are assembled directly (Absolute condition).
    auto component = [&](std::size_t edges) {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(edges),
                                                  static_cast<Eigen::Index>(edges + 1));
        for (Eigen::Index e = 0; e < static_cast<Eigen::Index>(edges); ++e) {
            D(e, e) = -1.0 / h;
            D(e, e + 1) = 1.0 / h;
        }
        return DiracComplexMatrix::from_derivative(std::move(D), h);
    };
    const auto W0 = component(c);
    const auto W1 = component(c);
    rep.mu_overlap = std::min(smallest_positive_exact(W0), smallest_positive_exact(W1));
    long harmonic = 0;
    for (const auto* w : {&W0, &W1}) {
        const auto eig = diagonalize(w->P);
        std::size_t k = 0;
        for (const auto& g : eig.groups)
            if (g.value == 0.0) k = g.multiplicity;
        rep.overlap_kernel_dims.push_back(k);
        harmonic += static_cast<long>(k);
    }

    // rho_0 rises across [0, c], falls across [half, half + c]; rho_1 = 1 - rho_0.
    std::vector<double> rho0(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (k <= c)
            rho0[k] = smoothstep(static_cast<double>(k) / static_cast<double>(c));
        else if (k < half)
            rho0[k] = 1.0;
        else if (k <= half + c)
            rho0[k] = 1.0 - smoothstep(static_cast<double>(k - half) / static_cast<double>(c));
    }
    double max_grad = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        max_grad = std::max(max_grad, std::abs(rho0[(k + 1) % n] - rho0[k]) / h);
    rep.C_rho = 0.5 * max_grad * max_grad;

    rep.cover.mu_set = rep.mu_arcs;
    rep.cover.adjacency = {{1}, {0}};
    rep.cover.mu_pair[pair_key(0, 1)] = rep.mu_overlap;
    rep.cover.C_rho = rep.C_rho;
    rep.cover.h_pair[pair_key(0, 1)] = harmonic;
    rep.bound = laplacian_bound(rep.cover);

    const auto N = static_cast<std::size_t>(rep.bound.counts.N);
    rep.N_consistent = rep.bound.counts.N == 1 + harmonic && harmonic == 2;
    if (N > rep.circle_exact_spectrum.size()) throw NumericalError("circle spectrum shorter than N");
    rep.mu_N = rep.circle_exact_spectrum[N - 1];
    rep.margin = rep.mu_N - rep.bound.mu_bound;
    rep.passed = rep.bound.mu_bound > 0.0 && rep.bound.mu_bound <= rep.mu_N && rep.N_consistent;
    return rep;
}

}  // namespace specbound
