#include "specbound/dissection.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>

#include "specbound/errors.hpp"

namespace specbound {

PairKey pair_key(std::size_t i, std::size_t j) {
    if (i == j) throw DomainError("pair key needs two distinct sets");
    return i < j ? PairKey{i, j} : PairKey{j, i};
}

TripleKey triple_key(std::size_t i, std::size_t j, std::size_t k) {
    TripleKey t{i, j, k};
    std::sort(t.begin(), t.end());
    if (t[0] == t[1] || t[1] == t[2]) throw DomainError("triple key needs three distinct sets");
    return t;
}

namespace {

std::string pair_name(const PairKey& p) {
    return std::to_string(p.first) + "-" + std::to_string(p.second);
}

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

void CoverSpec::validate() const {
    const std::size_t n = mu_set.size();
    if (n == 0) throw DomainError("cover needs at least one set");
    if (adjacency.size() != n) throw DomainError("adjacency must have one list per set");
    for (std::size_t i = 0; i < n; ++i)
        if (!positive_finite(mu_set[i]))
            throw DomainError("mu_set[" + std::to_string(i) + "] must be positive and finite");
    if (!(C_rho >= 0.0) || !std::isfinite(C_rho)) throw DomainError("C_rho must be >= 0 and finite");
    for (std::size_t i = 0; i < n; ++i) {
        for (const std::size_t j : adjacency[i]) {
            if (j >= n) throw DomainError("adjacency index out of range");
            if (j == i) throw DomainError("adjacency must not contain self-loops");
            if (std::count(adjacency[i].begin(), adjacency[i].end(), j) != 1)
                throw DomainError("adjacency lists must not repeat neighbours");
            if (std::find(adjacency[j].begin(), adjacency[j].end(), i) == adjacency[j].end())
                throw DomainError("adjacency must be symmetric (" + std::to_string(i) + " -> " +
                                  std::to_string(j) + ")");
            const auto key = pair_key(i, j);
            const auto it = mu_pair.find(key);
            if (it == mu_pair.end()) throw DomainError("missing mu_pair for " + pair_name(key));
            if (!positive_finite(it->second))
                throw DomainError("mu_pair " + pair_name(key) + " must be positive and finite");
        }
    }
    auto adjacent = [&](std::size_t i, std::size_t j) {
        return std::find(adjacency[i].begin(), adjacency[i].end(), j) != adjacency[i].end();
    };
    for (const auto& [key, value] : mu_pair)
        if (key.first >= key.second || key.second >= n || !adjacent(key.first, key.second))
            throw DomainError("mu_pair " + pair_name(key) + " is not an adjacent pair");
    for (const auto& [key, d] : h_pair) {
        if (key.first >= key.second || key.second >= n || !adjacent(key.first, key.second))
            throw DomainError("h_pair " + pair_name(key) + " is not an adjacent pair");
        if (d < 0) throw DomainError("harmonic dimensions must be >= 0");
    }
    for (const auto& [key, d] : h_triple) {
        if (!(key[0] < key[1] && key[1] < key[2]) || key[2] >= n)
            throw DomainError("h_triple key out of range or unordered");
        if (!adjacent(key[0], key[1]) || !adjacent(key[1], key[2]) || !adjacent(key[0], key[2]))
            throw DomainError("h_triple entry for sets that do not pairwise intersect");
        if (d < 0) throw DomainError("harmonic dimensions must be >= 0");
    }
    if (h_set) {
        if (h_set->size() != n) throw DomainError("h_set must have one entry per set");
        for (const long d : *h_set)
            if (d < 0) throw DomainError("harmonic dimensions must be >= 0");
    }
}

std::string_view to_string(NConvention c) {
    return c == NConvention::UnorderedPairs ? "unordered" : "literal";
}

NConvention n_convention_from_string(std::string_view s) {
    if (s == "unordered") return NConvention::UnorderedPairs;
    if (s == "literal") return NConvention::LiteralOrdered;
    throw DomainError("unknown N convention '" + std::string(s) + "' (unordered, literal)");
}

NCount compute_N(const CoverSpec& cover, NConvention convention) {
    cover.validate();
    long pairs = 0;
    long triples = 0;
    for (const auto& [key, d] : cover.h_pair) pairs += d;
    for (const auto& [key, d] : cover.h_triple) triples += d;
    NCount c;
    if (convention == NConvention::UnorderedPairs) {
        c.N1 = pairs;
        c.N2 = triples;
    } else {
        if (!cover.h_set) throw DomainError("literal N convention requires h_set");
        long sets = 0;
        for (const long d : *cover.h_set) sets += d;
        c.N1 = sets + 2 * pairs;
        c.N2 = sets + 6 * pairs + 6 * triples;
    }
    c.N = c.N1 + c.N2 + 1;
    return c;
}

BoundResult laplacian_bound(const CoverSpec& cover, NConvention convention) {
    BoundResult out;
    out.counts = compute_N(cover, convention);  // validates
    const double C = cover.C_rho;
    double total = 0.0;
    for (std::size_t i = 0; i < cover.size(); ++i) {
        const double inv_i = 1.0 / cover.mu_set[i];
        double neighbours = 0.0;
        for (const std::size_t j : cover.adjacency[i]) {
            const double mu_ij = cover.mu_pair.at(pair_key(i, j));
            neighbours += (C / mu_ij + 1.0) * (inv_i + 1.0 / cover.mu_set[j]);
        }
        const double term = inv_i + 4.0 * neighbours;
        out.per_set_terms.push_back(term);
        total += term;
    }
    out.mu_bound = 1.0 / total;
    out.lambda_bound = std::sqrt(out.mu_bound);
    return out;
}

BoundResult dirac_bound(const CoverSpec& dirac_cover, NConvention convention) {
    dirac_cover.validate();
    CoverSpec squared = dirac_cover;
    for (double& x : squared.mu_set) x *= x;
    for (auto& [key, x] : squared.mu_pair) x *= x;
    return laplacian_bound(squared, convention);
}

std::vector<double> kunneth_min_sum(const std::vector<double>& a, const std::vector<double>& b,
                                    std::size_t count) {
    if (a.empty() || b.empty()) throw DomainError("kunneth_min_sum needs non-empty spectra");
    if (!std::is_sorted(a.begin(), a.end()) || !std::is_sorted(b.begin(), b.end()))
        throw DomainError("kunneth_min_sum needs sorted spectra");
    count = std::min(count, a.size() * b.size());
    // Frontier of (a_i + b_j, i, j); each row i advances along b.
    using Item = std::tuple<double, std::size_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t i = 0; i < std::min(a.size(), count); ++i) heap.emplace(a[i] + b[0], i, 0);
    std::vector<double> out;
    out.reserve(count);
    while (out.size() < count) {
        const auto [sum, i, j] = heap.top();
        heap.pop();
        out.push_back(sum);
        if (j + 1 < b.size()) heap.emplace(a[i] + b[j + 1], i, j + 1);
    }
    return out;
}

std::vector<double> uniform_grid(double t0, double t1, double step) {
    if (!(step > 0.0) || !(t1 >= t0) || !std::isfinite(t0) || !std::isfinite(t1))
        throw DomainError("uniform_grid needs t0 <= t1 and step > 0");
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) t.push_back(t0 + step * static_cast<double>(i));
    return t;
}

BergerCurve berger_scaling(double a, double b, int m, double epsilon_bound,
                           const std::vector<double>& t_grid, const std::vector<double>& thresholds) {
    if (!(a > 0.0) || !(b > 0.0) || !(epsilon_bound > 0.0))
        throw DomainError("berger_scaling needs a, b, epsilon_bound > 0");
    if (m < 2) throw DomainError("berger_scaling needs m >= 2");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        throw DomainError("berger_scaling needs an ascending t grid");
    BergerCurve c;
    c.t = t_grid;
    const double exponent = 2.0 / m;
    for (const double t : t_grid) {
        if (!(t >= 0.0)) throw DomainError("berger_scaling needs t >= 0");
        c.value.push_back(epsilon_bound * std::pow(a + b * t, exponent));
    }
    c.strictly_increasing = true;
    for (std::size_t i = 1; i < c.value.size(); ++i)
        if (!(c.value[i] > c.value[i - 1])) c.strictly_increasing = false;
    for (const double level : thresholds) {
        std::optional<double> hit;
        for (std::size_t i = 0; i < c.value.size(); ++i)
            if (c.value[i] >= level) {
                hit = c.t[i];
                break;
            }
        c.t_star.emplace_back(level, hit);
    }
    return c;
}

}  // namespace specbound
