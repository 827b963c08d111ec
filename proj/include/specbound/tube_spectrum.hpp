#pragma once

// Absolute-boundary spectrum of a truncated tube, assembled from the scalar
// boundary value problems  -a'' + kappa_i(u) a = lambda a  on [r0, R0], one per
// fibre mode i. Family Abs1 carries the Robin condition a' - (log fh)' a = 0 at
// both ends, family Abs2 the Dirichlet condition.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "specbound/geometry.hpp"
#include "specbound/sturm_liouville.hpp"
#include "specbound/torus_modes.hpp"

namespace specbound {

enum class BvpFamily { Abs1, Abs2 };
enum class FamilySelection { Abs1, Abs2, Both };

std::string_view to_string(BvpFamily f);
std::string_view to_string(FamilySelection f);
FamilySelection family_selection_from_string(std::string_view s);

SLProblem assemble_mode_problem(ModeIndex mode, const TubeGeometry& geometry, BvpFamily family);

struct TubeSpectrumRequest {
    TubeGeometry geometry;  ///< r0 must be set
    double lambda_max = 2.0;
    bool include_zero_mode = false;
    FamilySelection family = FamilySelection::Both;
    std::size_t grid_n = 1024;
    ShootingOptions shooting;
};

struct TubeEntry {
    ModeIndex mode;
    BvpFamily family = BvpFamily::Abs1;
    std::size_t index = 0;  ///< position in the spectrum of the mode problem
    double eigenvalue = 0.0;
    double error_estimate = 0.0;
    bool cross_validated = false;
};

struct TruncationCertificate {
    int M_max = 0;
    double level = 0.0;           ///< lambda_max plus the largest boundary-form shift
    double tail_bound = 0.0;      ///< every mode outside the box has kappa > this on [r0, R0]
    std::size_t modes_solved = 0;  ///< (mode, family) problems actually solved
    std::size_t modes_certified_empty = 0;
};

struct TubeSpectrum {
    std::vector<TubeEntry> entries;  ///< eigenvalues in (0, lambda_max], sorted
    /// Smallest positive eigenvalue over the solved off-zero mode problems, whether
    /// or not it lies in the window. Empty when no off-zero problem was solved.
    std::optional<double> min_positive_offzero;
    std::optional<TubeEntry> min_entry;
    /// Lower bound for every off-zero problem that was not solved.
    double unsolved_floor = 0.0;
    std::size_t nonpositive_offzero = 0;  ///< off-zero eigenvalues <= 0 (should be none)
    bool all_cross_validated = true;
    double max_discrepancy = 0.0;
    TruncationCertificate certificate;

    /// min(min_positive_offzero, unsolved_floor): lower bound for the whole
    /// off-zero absolute spectrum.
    double offzero_floor() const;
};

/// Throws TruncationError when the lattice cannot be certified.
TubeSpectrum tube_absolute_spectrum(const TubeSpectrumRequest& request);

struct R0Choice {
    double r0 = 0.0;
    double infimum = 0.0;  ///< inf over u in [r0, R0] and modes != 0 of kappa
    ModeIndex argmin;
    int M_max = 0;
    double tail_bound = 0.0;
};

/// Smallest r0 on the grid {0, 0.1, 0.2, ...} (r0 < R0) with
/// inf_{u, i != 0} kappa_i(u) > threshold. Throws DomainError when no grid point
/// reaches the threshold (tube too short).
R0Choice find_r0(const TubeGeometry& geometry, double threshold = 5.0);

struct SweepOptions {
    double lambda_max = 2.0;
    double r0_threshold = 5.0;
    double pass_threshold = 1.0 - 1e-3;
    FamilySelection family = FamilySelection::Both;
    bool include_zero_mode = false;
    std::size_t grid_n = 1024;
};

struct SweepRow {
    double R = 0.0;
    std::optional<R0Choice> r0;
    std::optional<TubeSpectrum> spectrum;
    std::string failure;  ///< empty on success

    bool ok() const noexcept { return failure.empty(); }
    /// Cross-validated and every off-zero eigenvalue >= the pass threshold.
    bool passed(double pass_threshold) const;
};

/// One row per R in the grid; per-R failures are recorded, not thrown.
std::vector<SweepRow> sweep(const DegenerationSchedule& schedule, const SweepOptions& options);

/// CSV: R,r0,mode_r,mode_s,family,eigenvalue,error_estimate
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace specbound
