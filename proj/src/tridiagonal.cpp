#include "specbound/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specbound/errors.hpp"

namespace specbound {

SymTridiagonal::SymTridiagonal(std::vector<double> diag, std::vector<double> off)
    : diag_(std::move(diag)), off_(std::move(off)) {
    if (diag_.empty()) throw DomainError("tridiagonal matrix must be non-empty");
    if (off_.size() + 1 != diag_.size())
        throw DomainError("tridiagonal off-diagonal must have size n - 1");

    off_sq_.resize(off_.size());
    double max_sq = 0.0;
    for (std::size_t i = 0; i < off_.size(); ++i) {
        off_sq_[i] = off_[i] * off_[i];
        max_sq = std::max(max_sq, off_sq_[i]);
    }
    lower_ = std::numeric_limits<double>::infinity();
    upper_ = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < diag_.size(); ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(off_[i - 1]);
        if (i < off_.size()) radius += std::abs(off_[i]);
        lower_ = std::min(lower_, diag_[i] - radius);
        upper_ = std::max(upper_, diag_[i] + radius);
    }
    pivmin_ = std::numeric_limits<double>::min() * std::max(1.0, max_sq);
}

std::size_t SymTridiagonal::count_below(double x) const {
    std::size_t negatives = 0;
    double pivot = diag_[0] - x;
    if (std::abs(pivot) < pivmin_) pivot = -pivmin_;
    if (pivot < 0.0) ++negatives;
    for (std::size_t i = 1; i < diag_.size(); ++i) {
        pivot = diag_[i] - x - off_sq_[i - 1] / pivot;
        if (std::abs(pivot) < pivmin_) pivot = -pivmin_;
        if (pivot < 0.0) ++negatives;
    }
    return negatives;
}

double SymTridiagonal::eigenvalue(std::size_t k) const {
    if (k >= size()) throw DomainError("tridiagonal eigenvalue index out of range");
    const double norm = std::max(std::abs(lower_), std::abs(upper_));
    double lo = lower_ - 1e-12 * norm - pivmin_;
    double hi = upper_ + 1e-12 * norm + pivmin_;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 200; ++it) {
        const double tol = 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin_;
        if (hi - lo <= tol) break;
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<std::pair<std::size_t, double>> SymTridiagonal::eigenvalues_in(double lo,
                                                                           double hi) const {
    std::vector<std::pair<std::size_t, double>> out;
    if (!(lo < hi)) return out;
    const std::size_t first = count_below(lo);
    const std::size_t last = count_below(hi);
    for (std::size_t k = first; k < last; ++k) out.emplace_back(k, eigenvalue(k));
    return out;
}

}  // namespace specbound
