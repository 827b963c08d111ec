#pragma once

// JSON conversions for inputs and reports. Objects serialise with sorted keys
// and numbers with 17 significant digits (dump_canonical), so identical runs
// produce byte-identical files.

#include <string>

#include "json.hpp"
#include "specbound/discrete_hodge.hpp"
#include "specbound/dissection.hpp"
#include "specbound/geometry.hpp"
#include "specbound/ode_compare.hpp"
#include "specbound/sturm_liouville.hpp"
#include "specbound/tube_spectrum.hpp"

namespace specbound {

using Json = nlohmann::json;

/// Pretty-printed, sorted keys, %.17g numbers, non-finite numbers as null.
std::string dump_canonical(const Json& j);

/// Throws DomainError if `j` is not an object or has keys outside `allowed`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what);

Json to_json(const TubeGeometry& g);
TubeGeometry geometry_from_json(const Json& j);

Json to_json(const DegenerationSchedule& s);
DegenerationSchedule schedule_from_json(const Json& j);

Json to_json(const BoundaryCondition& bc);
BoundaryCondition boundary_from_json(const Json& j);

/// Constant, trig and tabulated potentials; custom potentials are reported by label.
Json to_json(const Potential& q);
Potential potential_from_json(const Json& j);

Json to_json(const SLProblem& p);
SLProblem problem_from_json(const Json& j);

Json to_json(const SpectrumResult& r);

Json to_json(const CoverSpec& c);
CoverSpec cover_from_json(const Json& j);

Json to_json(const BoundResult& b);
Json to_json(const TubeSpectrum& s);
Json to_json(const SweepRow& row, double pass_threshold);
Json to_json(const S1CaseReport& r);
Json to_json(const RobinSuiteEntry& e);
Json to_json(const DirichletSuiteEntry& e);
Json to_json(const BergerCurve& c);

}  // namespace specbound
