#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace specbound {

/// Symmetric tridiagonal matrix with Sturm-sequence (inertia) eigenvalue
/// bisection. Eigenvalues are indexed from 0 in ascending order.
class SymTridiagonal {
public:
    SymTridiagonal(std::vector<double> diag, std::vector<double> off);

    std::size_t size() const noexcept { return diag_.size(); }
    const std::vector<double>& diag() const noexcept { return diag_; }
    const std::vector<double>& off() const noexcept { return off_; }

    /// Number of eigenvalues strictly below x (negative pivots of T - x I).
    std::size_t count_below(double x) const;

    /// k-th eigenvalue to within a few ulps of the matrix norm.
    double eigenvalue(std::size_t k) const;

    /// All eigenvalues in [lo, hi), ascending, with their indices.
    std::vector<std::pair<std::size_t, double>> eigenvalues_in(double lo, double hi) const;

    double gershgorin_lower() const noexcept { return lower_; }
    double gershgorin_upper() const noexcept { return upper_; }

private:
    std::vector<double> diag_;
    std::vector<double> off_;
    std::vector<double> off_sq_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    double pivmin_ = 0.0;
};

}  // namespace specbound
