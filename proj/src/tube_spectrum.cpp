#include "specbound/tube_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "specbound/errors.hpp"
#include "specbound/format.hpp"

namespace specbound {

std::string_view to_string(BvpFamily f) { return f == BvpFamily::Abs1 ? "abs1" : "abs2"; }

std::string_view to_string(FamilySelection f) {
    switch (f) {
        case FamilySelection::Abs1: return "abs1";
        case FamilySelection::Abs2: return "abs2";
        case FamilySelection::Both: return "both";
    }
    return "both";
}

FamilySelection family_selection_from_string(std::string_view s) {
    if (s == "abs1") return FamilySelection::Abs1;
    if (s == "abs2") return FamilySelection::Abs2;
    if (s == "both") return FamilySelection::Both;
    throw DomainError("unknown family '" + std::string(s) + "' (abs1, abs2, both)");
}

SLProblem assemble_mode_problem(ModeIndex mode, const TubeGeometry& geometry, BvpFamily family) {
    const double lo = geometry.r0();
    const double hi = geometry.R0();
    SLProblem p;
    p.m0 = lo;
    p.m1 = hi;
    if (mode.is_zero()) {
        p.q = Potential::constant(0.0);
    } else {
        p.q = Potential::custom(
            [mode, geometry](double u) { return kappa(mode, u, geometry).kappa; },
            "kappa");
    }
    if (family == BvpFamily::Abs1) {
        const WarpedProfile profile(geometry);
        p.left = BoundaryCondition::robin(profile.beta(lo));
        p.right = BoundaryCondition::robin(profile.beta(hi));
    } else {
        p.left = BoundaryCondition::dirichlet();
        p.right = BoundaryCondition::dirichlet();
    }
    return p;
}

double TubeSpectrum::offzero_floor() const {
    return std::min(min_positive_offzero.value_or(std::numeric_limits<double>::infinity()),
                    unsolved_floor);
}

namespace {

std::vector<BvpFamily> families(FamilySelection s) {
    switch (s) {
        case FamilySelection::Abs1: return {BvpFamily::Abs1};
        case FamilySelection::Abs2: return {BvpFamily::Abs2};
        case FamilySelection::Both: return {BvpFamily::Abs1, BvpFamily::Abs2};
    }
    return {};
}

}  // namespace

TubeSpectrum tube_absolute_spectrum(const TubeSpectrumRequest& request) {
    const TubeGeometry& g = request.geometry;
    if (!(request.lambda_max > 0.0) || !std::isfinite(request.lambda_max))
        throw DomainError("lambda_max must be positive and finite");
    const double lo = g.r0();
    const double hi = g.R0();
    const auto fams = families(request.family);

    // A Robin end with the destabilising sign lets eigenvalues sit below inf q,
    // so a mode can only be skipped once inf kappa - shift clears the window.
    double max_shift = 0.0;
    std::vector<double> shift(fams.size());
    for (std::size_t f = 0; f < fams.size(); ++f) {
        shift[f] = boundary_form_shift(assemble_mode_problem(ModeIndex{}, g, fams[f]));
        max_shift = std::max(max_shift, shift[f]);
    }

    TubeSpectrum out;
    out.certificate.level = request.lambda_max + max_shift;
    const auto sel = select_modes(g, out.certificate.level, lo, hi);
    out.certificate.M_max = sel.M_max;
    out.certificate.tail_bound = sel.tail_bound;
    out.unsolved_floor = sel.tail_bound - max_shift;

    const double window_hi = std::nextafter(request.lambda_max, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < sel.modes.size(); ++i) {
        const ModeIndex mode = sel.modes[i];
        if (mode.is_zero() && !request.include_zero_mode) continue;
        for (std::size_t f = 0; f < fams.size(); ++f) {
            if (sel.infima[i] - shift[f] > request.lambda_max) {
                ++out.certificate.modes_certified_empty;
                if (!mode.is_zero())
                    out.unsolved_floor = std::min(out.unsolved_floor, sel.infima[i] - shift[f]);
                continue;
            }
            ++out.certificate.modes_solved;
            const SLProblem problem = assemble_mode_problem(mode, g, fams[f]);
            const auto cv = cross_validate(problem, request.grid_n,
                                           Window{-std::numeric_limits<double>::infinity(), window_hi},
                                           request.shooting);
            out.all_cross_validated = out.all_cross_validated && cv.agreed;
            out.max_discrepancy = std::max(out.max_discrepancy, cv.max_discrepancy);

            auto make_entry = [&](std::size_t k, double value, double err, bool agreed) {
                return TubeEntry{mode, fams[f], k, value, err, agreed};
            };
            std::optional<TubeEntry> first_positive;
            for (std::size_t j = 0; j < cv.merged.size(); ++j) {
                const double v = cv.merged.eigenvalues[j];
                if (v <= 0.0) {
                    if (!mode.is_zero()) ++out.nonpositive_offzero;
                    continue;
                }
                auto e = make_entry(cv.merged.indices[j], v, cv.merged.error_estimate[j], cv.agreed);
                if (!first_positive) first_positive = e;
                out.entries.push_back(e);
            }
            if (mode.is_zero()) continue;
            if (!first_positive) {
                // Nothing positive in the window: solve the next eigenvalue directly.
                const std::size_t k = cv.merged.size();
                const auto e = cross_validate_index(problem, k, request.grid_n, request.shooting);
                out.all_cross_validated = out.all_cross_validated && e.agreed();
                out.max_discrepancy = std::max(out.max_discrepancy, e.discrepancy());
                if (e.value() > 0.0) first_positive = make_entry(k, e.value(), e.error(), e.agreed());
            }
            if (first_positive &&
                (!out.min_positive_offzero || first_positive->eigenvalue < *out.min_positive_offzero)) {
                out.min_positive_offzero = first_positive->eigenvalue;
                out.min_entry = first_positive;
            }
        }
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const TubeEntry& a, const TubeEntry& b) {
        return std::tie(a.eigenvalue, a.mode, a.family) < std::tie(b.eigenvalue, b.mode, b.family);
    });
    return out;
}

R0Choice find_r0(const TubeGeometry& geometry, double threshold) {
    if (!std::isfinite(threshold)) throw DomainError("find_r0 threshold must be finite");
    for (int k = 0;; ++k) {
        const double r0 = k / 10.0;
        if (!(r0 < geometry.R0())) break;
        const TubeGeometry g = geometry.with_r0(r0);
        // kappa increases with u, so the infimum over [r0, R0] sits at r0.
        for (int M = 1;; M *= 2) {
            try {
                const auto m = min_offzero_kappa(g, M);
                if (m.value > threshold) return {r0, m.value, m.argmin, m.M_max, m.tail_bound};
                break;
            } catch (const TruncationError&) {
                if (M >= 4096) throw;
            }
        }
    }
    throw DomainError("find_r0: no r0 < R0 = " + format_double(geometry.R0()) +
                      " reaches threshold " + format_double(threshold) + " (R too small)");
}

bool SweepRow::passed(double pass_threshold) const {
    return ok() && spectrum && spectrum->all_cross_validated && spectrum->nonpositive_offzero == 0 &&
           spectrum->offzero_floor() >= pass_threshold;
}

std::vector<SweepRow> sweep(const DegenerationSchedule& schedule, const SweepOptions& options) {
    schedule.validate();
    std::vector<SweepRow> rows;
    for (std::size_t j = 0; j < schedule.R_grid.size(); ++j) {
        SweepRow row;
        row.R = schedule.R_grid[j];
        try {
            const TubeGeometry base = schedule_instantiate(schedule, j);
            row.r0 = find_r0(base, options.r0_threshold);
            TubeSpectrumRequest req{base.with_r0(row.r0->r0), options.lambda_max,
                                    options.include_zero_mode, options.family, options.grid_n, {}};
            row.spectrum = tube_absolute_spectrum(req);
        } catch (const std::exception& e) {
            row.failure = e.what();
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.R < b.R; });
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "R,r0,mode_r,mode_s,family,eigenvalue,error_estimate\n";
    for (const auto& row : rows) {
        if (!row.spectrum) continue;
        for (const auto& e : row.spectrum->entries) {
            os << format_double(row.R) << ',' << format_double(row.r0->r0) << ',' << e.mode.r << ','
               << e.mode.s << ',' << to_string(e.family) << ',' << format_double(e.eigenvalue) << ','
               << format_double(e.error_estimate) << '\n';
        }
    }
}

}  // namespace specbound
