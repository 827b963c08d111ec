#pragma once

// Finite-dimensional Dirac complexes: the rolled-up de Rham complex of a
// discretised circle or interval. Functions (plus grade) live on nodes and
// 1-forms (minus grade) on edges; the inner product is step times the Euclidean
// one on both grades, so the coderivative is the transpose of the derivative.

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "specbound/dissection.hpp"

namespace specbound {

enum class IntervalCondition {
    Absolute,  ///< 1-form coefficients vanish at the ends; Neumann on functions
    Relative,  ///< function coefficients vanish at the ends; Dirichlet on functions
};

std::string_view to_string(IntervalCondition c);

struct DiracComplexMatrix {
    std::size_t dim_plus = 0;
    std::size_t dim_minus = 0;
    double step = 1.0;
    Eigen::MatrixXd D;      ///< dim_minus x dim_plus block of d
    Eigen::MatrixXd d;      ///< on the graded space, plus -> minus
    Eigen::MatrixXd delta;  ///< minus -> plus
    Eigen::MatrixXd T;      ///< +1 on plus, -1 on minus
    Eigen::MatrixXd Q;      ///< d + delta
    Eigen::MatrixXd P;      ///< Q^2

    std::size_t dim() const noexcept { return dim_plus + dim_minus; }

    /// Assembles d, delta, T, Q, P from the block D.
    static DiracComplexMatrix from_derivative(Eigen::MatrixXd D, double step);
};

/// n periodic nodes on a circle of the given length; D is the forward difference.
DiracComplexMatrix build_circle_complex(std::size_t n, double length);

/// n intervals of [0, length]; Absolute keeps all n + 1 nodes, Relative only the
/// n - 1 interior ones. Both keep the n edges.
DiracComplexMatrix build_interval_complex(std::size_t n, double length, IntervalCondition c);

/// Closed forms of the function-grade spectra.
std::vector<double> circle_spectrum(std::size_t n, double length);
std::vector<double> interval_function_spectrum(std::size_t n, double length, IntervalCondition c);

/// Eigenvalues grouped by |a - b| <= max(1e-12, 1e-9 max(|a|, |b|)); values with
/// |x| <= max(1e-12, 1e-9 |P|) count as zero.
struct EigenGroup {
    double value = 0.0;
    std::size_t multiplicity = 0;
};

struct SpectralData {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXd vectors;  ///< orthonormal columns
    double zero_tolerance = 0.0;
    std::vector<EigenGroup> groups;
};

SpectralData diagonalize(const Eigen::MatrixXd& symmetric);

struct IdentityResiduals {
    double dd = 0.0;              ///< |d d|
    double delta_delta = 0.0;     ///< |delta delta|
    double adjoint = 0.0;         ///< |delta - d^T|  (Green identity on basis vectors)
    double T_squared = 0.0;       ///< |T^2 - I|
    double anticommute = 0.0;     ///< |Q T + T Q|
    double P_split = 0.0;         ///< |P - (d delta + delta d)|
    double P_symmetric = 0.0;
    double max() const;
};

IdentityResiduals check_identities(const DiracComplexMatrix& c);

struct DecompositionReport {
    std::size_t dim_total = 0;
    std::size_t dim_harmonic = 0;  ///< kernel of P
    std::size_t dim_exact = 0;     ///< rank of d
    std::size_t dim_coexact = 0;   ///< rank of delta
    double orthogonality = 0.0;    ///< max |<x, y>| across the three subspaces
    double completeness = 0.0;     ///< |Pi_H + Pi_d + Pi_delta - I|
    IdentityResiduals identities;
    /// Per distinct eigenvalue of P: multiplicity = exact + coexact part (zero:
    /// multiplicity = kernel dimension).
    struct Multiplicity {
        double value = 0.0;
        std::size_t total = 0;
        std::size_t exact = 0;
        std::size_t coexact = 0;
    };
    std::vector<Multiplicity> multiplicities;
    bool multiplicities_consistent = false;
    bool passed = false;
};

DecompositionReport verify_decomposition(const DiracComplexMatrix& c, double tolerance = 1e-12);

struct EigenspaceSplit {
    double lambda = 0.0;
    Eigen::MatrixXd E;          ///< orthonormal basis of the P-eigenspace
    Eigen::MatrixXd E_exact;    ///< E intersected with range(d)
    Eigen::MatrixXd E_coexact;  ///< E intersected with range(delta)
    double orthogonality = 0.0;       ///< |E_exact^T E_coexact|
    double d_into_exact = 0.0;        ///< d E_coexact leaves E_exact by at most this
    double delta_into_coexact = 0.0;  ///< delta E_exact leaves E_coexact by at most this
    double norm_identity = 0.0;       ///< |(d X)^T (d X) - lambda I| / lambda for X = E_coexact
    std::size_t rank_d_on_coexact = 0;
    std::size_t rank_delta_on_exact = 0;
    bool passed = false;
};

/// Throws DomainError when lambda <= 0 or is not an eigenvalue of P.
EigenspaceSplit verify_eigenspace_pairing(const DiracComplexMatrix& c, double lambda,
                                          double tolerance = 1e-9);

struct MinimaxReport {
    std::size_t i = 0;
    bool empty = false;          ///< fewer than i positive exact eigenvalues
    double lambda_exact = 0.0;   ///< i-th positive eigenvalue of P on range(d)
    double lambda_coexact = 0.0; ///< i-th positive eigenvalue of P on range(delta)
    /// sup over eta in L of |eta|^2 / |xi|^2 with xi the minimum-norm solution of
    /// d xi = eta, L the span of the first i exact eigenvectors.
    double sup_quotient = 0.0;
    double pairing_residual = 0.0;
    double quotient_residual = 0.0;
    bool passed = false;
};

MinimaxReport verify_minimax(const DiracComplexMatrix& c, std::size_t i, double tolerance = 1e-9);

struct S1CaseReport {
    std::size_t n = 0;
    double overlap_fraction = 0.0;
    std::size_t arc_edges = 0;      ///< edges per arc
    std::size_t overlap_edges = 0;  ///< edges per overlap component
    double step = 0.0;
    std::vector<double> circle_exact_spectrum;  ///< positive, with multiplicity
    std::vector<double> mu_arcs;                ///< mu(U_0), mu(U_1)
    double mu_overlap = 0.0;
    std::vector<std::size_t> overlap_kernel_dims;  ///< per component
    double C_rho = 0.0;
    CoverSpec cover;
    BoundResult bound;
    double mu_N = 0.0;  ///< N-th positive exact eigenvalue of the circle
    double margin = 0.0;
    bool N_consistent = false;  ///< N = 1 + sum of overlap kernel dimensions
    bool passed = false;
};

/// Circle of length 2 pi, two arcs whose two overlap components together cover
/// the fraction `overlap_fraction` of the circle; smoothstep partition of unity.
S1CaseReport s1_case_study(std::size_t n, double overlap_fraction);

}  // namespace specbound
