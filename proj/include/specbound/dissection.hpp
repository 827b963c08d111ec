#pragma once

// Lower bounds for the N-th positive eigenvalue of a Dirac (or Dirac-Laplacian)
// operator from the spectral data of a cover U_0, ..., U_K and of the pairwise
// overlaps, and the scaling arithmetic for Berger-type metric families.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace specbound {

using PairKey = std::pair<std::size_t, std::size_t>;             ///< i < j
using TripleKey = std::array<std::size_t, 3>;                    ///< i < j < k

/// Normalises an unordered pair/triple to ascending order; rejects repeats.
PairKey pair_key(std::size_t i, std::size_t j);
TripleKey triple_key(std::size_t i, std::size_t j, std::size_t k);

struct CoverSpec {
    /// Smallest positive eigenvalue on exact sections of each set (absolute
    /// condition). dirac_bound reads these as Dirac eigenvalues instead.
    std::vector<double> mu_set;
    std::vector<std::vector<std::size_t>> adjacency;  ///< neighbours j != i
    std::map<PairKey, double> mu_pair;                ///< per adjacent pair
    double C_rho = 0.0;                               ///< 1/2 max_i sup |grad rho_i|^2
    std::map<PairKey, long> h_pair;                   ///< harmonic dimensions of overlaps
    std::map<TripleKey, long> h_triple;
    std::optional<std::vector<long>> h_set;           ///< only used by the literal N convention

    std::size_t size() const noexcept { return mu_set.size(); }

    /// Throws DomainError on asymmetric adjacency, self-loops, missing or
    /// non-positive mu values, negative dimensions or keys out of range.
    void validate() const;
};

enum class NConvention {
    /// N1 sums over unordered pairs i < j, N2 over unordered triples i < j < k.
    UnorderedPairs,
    /// Literal sums over all ordered index tuples including repeated indices
    /// (U_ii = U_i, U_iij = U_ij): N1 = sum h_set + 2 sum h_pair,
    /// N2 = sum h_set + 6 sum h_pair + 6 sum h_triple. Requires h_set.
    LiteralOrdered,
};

std::string_view to_string(NConvention c);
NConvention n_convention_from_string(std::string_view s);

struct NCount {
    long N1 = 0;
    long N2 = 0;
    long N = 1;
};

NCount compute_N(const CoverSpec& cover, NConvention convention = NConvention::UnorderedPairs);

struct BoundResult {
    double mu_bound = 0.0;      ///< Laplacian bound
    double lambda_bound = 0.0;  ///< sqrt(mu_bound), Dirac bound
    NCount counts;
    /// 1/mu_i + 4 sum_j (C_rho/mu_ij + 1)(1/mu_i + 1/mu_j), per set i.
    std::vector<double> per_set_terms;
};

/// mu_bound = 1 / sum_i per_set_terms[i], applying to the N-th eigenvalue.
BoundResult laplacian_bound(const CoverSpec& cover,
                            NConvention convention = NConvention::UnorderedPairs);

/// Same formula with Dirac eigenvalues as inputs (squared before use).
BoundResult dirac_bound(const CoverSpec& dirac_cover,
                        NConvention convention = NConvention::UnorderedPairs);

/// The `count` smallest sums a + b (a in A, b in B), ascending. Inputs sorted.
std::vector<double> kunneth_min_sum(const std::vector<double>& a, const std::vector<double>& b,
                                    std::size_t count);

struct BergerCurve {
    std::vector<double> t;
    std::vector<double> value;  ///< epsilon_bound (a + b t)^{2/m}
    /// For each requested threshold: smallest grid t with value >= threshold.
    std::vector<std::pair<double, std::optional<double>>> t_star;
    bool strictly_increasing = false;
};

BergerCurve berger_scaling(double a, double b, int m, double epsilon_bound,
                           const std::vector<double>& t_grid,
                           const std::vector<double>& thresholds = {});

/// Uniform grid t0, t0 + step, ..., <= t1 (inclusive within rounding).
std::vector<double> uniform_grid(double t0, double t1, double step);

}  // namespace specbound
