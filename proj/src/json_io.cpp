#include "specbound/json_io.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "specbound/errors.hpp"
#include "specbound/format.hpp"

namespace specbound {

namespace {

void write(std::ostringstream& os, const Json& j, int depth) {
    const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
    const std::string close(2 * static_cast<std::size_t>(depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {  // std::map: sorted
                if (!first) os << ",\n";
                first = false;
                os << pad << Json(key).dump() << ": ";
                write(os, value, depth + 1);
            }
            os << '\n' << close << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                write(os, j[i], depth + 1);
            }
            os << '\n' << close << ']';
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            os << (std::isfinite(x) ? format_double(x) : std::string("null"));
            return;
        }
        default:
            os << j.dump();
    }
}

double get_number(const Json& j, const char* key, const char* what) {
    if (!j.contains(key)) throw DomainError(std::string(what) + ": missing field '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw DomainError(std::string(what) + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double get_number_or(const Json& j, const char* key, double fallback, const char* what) {
    return j.contains(key) ? get_number(j, key, what) : fallback;
}

std::vector<double> get_numbers(const Json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw DomainError(std::string(what) + ": field '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw DomainError(std::string(what) + ": '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<std::size_t> split_key(const std::string& key, std::size_t parts, const char* what) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (true) {
        const auto dash = key.find('-', start);
        const std::string token = key.substr(start, dash == std::string::npos ? std::string::npos : dash - start);
        if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError(std::string(what) + ": malformed key '" + key + "'");
        out.push_back(std::stoul(token));
        if (dash == std::string::npos) break;
        start = dash + 1;
    }
    if (out.size() != parts) throw DomainError(std::string(what) + ": malformed key '" + key + "'");
    return out;
}

long get_dimension(const Json& v, const char* what) {
    if (!v.is_number_integer()) throw DomainError(std::string(what) + " must be integers");
    return v.get<long>();
}

std::string key_name(const PairKey& k) { return std::to_string(k.first) + "-" + std::to_string(k.second); }

std::string key_name(const TripleKey& k) {
    return std::to_string(k[0]) + "-" + std::to_string(k[1]) + "-" + std::to_string(k[2]);
}

Json mode_json(const ModeIndex& m) { return Json{{"r", m.r}, {"s", m.s}}; }

}  // namespace

std::string dump_canonical(const Json& j) {
    std::ostringstream os;
    write(os, j, 0);
    os << '\n';
    return os.str();
}

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw DomainError(std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw DomainError(std::string(what) + ": unknown key '" + key + "'");
    }
}

Json to_json(const TubeGeometry& g) {
    Json j{{"R", g.R()}, {"R0", g.R0()}, {"epsilon", g.epsilon()}, {"rho", g.rho()}};
    j["r0"] = g.has_r0() ? Json(g.r0()) : Json(nullptr);
    return j;
}

TubeGeometry geometry_from_json(const Json& j) {
    require_keys(j, {"R", "r0", "R0", "epsilon", "rho"}, "geometry");
    const double R = get_number(j, "R", "geometry");
    std::optional<double> r0;
    if (j.contains("r0") && !j.at("r0").is_null()) r0 = get_number(j, "r0", "geometry");
    return TubeGeometry(R, r0, get_number_or(j, "R0", R - 1.0, "geometry"),
                        get_number(j, "epsilon", "geometry"), get_number(j, "rho", "geometry"));
}

Json to_json(const DegenerationSchedule& s) {
    return Json{{"D1", s.D1}, {"D2", s.D2}, {"E1", s.E1}, {"E2", s.E2}, {"R_grid", s.R_grid}};
}

DegenerationSchedule schedule_from_json(const Json& j) {
    require_keys(j, {"D1", "D2", "E1", "E2", "R_grid"}, "schedule");
    DegenerationSchedule s;
    s.D1 = get_number_or(j, "D1", 1.0, "schedule");
    s.D2 = get_number_or(j, "D2", s.D1, "schedule");
    s.E1 = get_number_or(j, "E1", 1.0, "schedule");
    s.E2 = get_number_or(j, "E2", s.E1, "schedule");
    s.R_grid = get_numbers(j, "R_grid", "schedule");
    s.validate();
    return s;
}

Json to_json(const BoundaryCondition& bc) {
    if (bc.is_robin()) return Json{{"kind", "robin"}, {"beta", bc.beta}};
    return Json{{"kind", "dirichlet"}};
}

BoundaryCondition boundary_from_json(const Json& j) {
    require_keys(j, {"kind", "beta"}, "boundary condition");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw DomainError("boundary condition: 'kind' must be \"dirichlet\", \"robin\" or \"neumann\"");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "dirichlet") return BoundaryCondition::dirichlet();
    if (kind == "neumann") return BoundaryCondition::neumann();
    if (kind == "robin") return BoundaryCondition::robin(get_number(j, "beta", "boundary condition"));
    throw DomainError("boundary condition: unknown kind '" + kind + "'");
}

Json to_json(const Potential& q) {
    struct Visit {
        Json operator()(const ConstantPotential& p) const {
            return Json{{"type", "constant"}, {"value", p.value}};
        }
        Json operator()(const TrigPotential& p) const {
            Json terms = Json::array();
            for (const auto& t : p.terms)
                terms.push_back({{"amplitude", t.amplitude}, {"frequency", t.frequency}, {"phase", t.phase}});
            return Json{{"type", "trig"}, {"offset", p.offset}, {"terms", terms}};
        }
        Json operator()(const TabulatedPotential& p) const {
            return Json{{"type", "tabulated"}, {"u", p.u}, {"q", p.q}};
        }
        Json operator()(const CustomPotential& p) const {
            return Json{{"type", "custom"}, {"label", p.label}};
        }
    };
    return std::visit(Visit{}, q.repr());
}

Potential potential_from_json(const Json& j) {
    if (j.is_number()) return Potential::constant(j.get<double>());
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw DomainError("potential: expected a number or an object with 'type'");
    const auto type = j.at("type").get<std::string>();
    if (type == "constant") {
        require_keys(j, {"type", "value"}, "potential");
        return Potential::constant(get_number(j, "value", "potential"));
    }
    if (type == "trig") {
        require_keys(j, {"type", "offset", "terms"}, "potential");
        TrigPotential p;
        p.offset = get_number_or(j, "offset", 0.0, "potential");
        if (j.contains("terms")) {
            if (!j.at("terms").is_array()) throw DomainError("potential: 'terms' must be an array");
            for (const auto& t : j.at("terms")) {
                require_keys(t, {"amplitude", "frequency", "phase"}, "potential term");
                p.terms.push_back({get_number(t, "amplitude", "potential term"),
                                   get_number(t, "frequency", "potential term"),
                                   get_number_or(t, "phase", 0.0, "potential term")});
            }
        }
        return Potential(std::move(p));
    }
    if (type == "tabulated") {
        require_keys(j, {"type", "u", "q"}, "potential");
        return Potential(TabulatedPotential{get_numbers(j, "u", "potential"), get_numbers(j, "q", "potential")});
    }
    throw DomainError("potential: unknown type '" + type + "'");
}

Json to_json(const SLProblem& p) {
    return Json{{"m0", p.m0}, {"m1", p.m1}, {"potential", to_json(p.q)},
                {"bc_left", to_json(p.left)}, {"bc_right", to_json(p.right)}};
}

SLProblem problem_from_json(const Json& j) {
    require_keys(j, {"m0", "m1", "potential", "bc_left", "bc_right"}, "problem");
    SLProblem p;
    p.m0 = get_number(j, "m0", "problem");
    p.m1 = get_number(j, "m1", "problem");
    p.q = j.contains("potential") ? potential_from_json(j.at("potential")) : Potential::constant(0.0);
    if (!j.contains("bc_left") || !j.contains("bc_right"))
        throw DomainError("problem: 'bc_left' and 'bc_right' are required");
    p.left = boundary_from_json(j.at("bc_left"));
    p.right = boundary_from_json(j.at("bc_right"));
    p.validate();
    return p;
}

Json to_json(const SpectrumResult& r) {
    return Json{{"eigenvalues", r.eigenvalues},
                {"error_estimate", r.error_estimate},
                {"indices", r.indices},
                {"method", std::string(to_string(r.method))},
                {"grid_n", r.grid_n}};
}

Json to_json(const CoverSpec& c) {
    Json j{{"mu_set", c.mu_set}, {"adjacency", c.adjacency}, {"C_rho", c.C_rho}};
    Json mu = Json::object(), hp = Json::object(), ht = Json::object();
    for (const auto& [k, v] : c.mu_pair) mu[key_name(k)] = v;
    for (const auto& [k, v] : c.h_pair) hp[key_name(k)] = v;
    for (const auto& [k, v] : c.h_triple) ht[key_name(k)] = v;
    j["mu_pair"] = mu;
    j["h_pair"] = hp;
    j["h_triple"] = ht;
    if (c.h_set) j["h_set"] = *c.h_set;
    return j;
}

CoverSpec cover_from_json(const Json& j) {
    require_keys(j, {"mu_set", "adjacency", "mu_pair", "C_rho", "h_pair", "h_triple", "h_set"}, "cover");
    CoverSpec c;
    c.mu_set = get_numbers(j, "mu_set", "cover");
    if (!j.contains("adjacency") || !j.at("adjacency").is_array())
        throw DomainError("cover: 'adjacency' must be an array of arrays");
    for (const auto& row : j.at("adjacency")) {
        if (!row.is_array()) throw DomainError("cover: 'adjacency' must be an array of arrays");
        std::vector<std::size_t> list;
        for (const auto& v : row) {
            if (!v.is_number_integer() || v.get<long long>() < 0)
                throw DomainError("cover: adjacency entries must be non-negative integers");
            list.push_back(v.get<std::size_t>());
        }
        c.adjacency.push_back(std::move(list));
    }
    c.C_rho = get_number(j, "C_rho", "cover");
    auto object = [&](const char* key) -> const Json& {
        static const Json empty = Json::object();
        if (!j.contains(key)) return empty;
        if (!j.at(key).is_object()) throw DomainError(std::string("cover: '") + key + "' must be an object");
        return j.at(key);
    };
    for (const auto& [key, v] : object("mu_pair").items()) {
        const auto ij = split_key(key, 2, "cover mu_pair");
        if (!v.is_number()) throw DomainError("cover: mu_pair values must be numbers");
        c.mu_pair[pair_key(ij[0], ij[1])] = v.get<double>();
    }
    for (const auto& [key, v] : object("h_pair").items()) {
        const auto ij = split_key(key, 2, "cover h_pair");
        c.h_pair[pair_key(ij[0], ij[1])] = get_dimension(v, "cover: h_pair values");
    }
    for (const auto& [key, v] : object("h_triple").items()) {
        const auto ijk = split_key(key, 3, "cover h_triple");
        c.h_triple[triple_key(ijk[0], ijk[1], ijk[2])] = get_dimension(v, "cover: h_triple values");
    }
    if (j.contains("h_set")) {
        if (!j.at("h_set").is_array()) throw DomainError("cover: 'h_set' must be an array");
        std::vector<long> hs;
        for (const auto& v : j.at("h_set")) hs.push_back(get_dimension(v, "cover: h_set values"));
        c.h_set = std::move(hs);
    }
    c.validate();
    return c;
}

Json to_json(const BoundResult& b) {
    return Json{{"mu_bound", b.mu_bound},
                {"lambda_bound", b.lambda_bound},
                {"N", b.counts.N},
                {"N1", b.counts.N1},
                {"N2", b.counts.N2},
                {"per_set_terms", b.per_set_terms}};
}

Json to_json(const TubeSpectrum& s) {
    Json entries = Json::array();
    for (const auto& e : s.entries)
        entries.push_back({{"mode", mode_json(e.mode)},
                           {"family", std::string(to_string(e.family))},
                           {"index", e.index},
                           {"eigenvalue", e.eigenvalue},
                           {"error_estimate", e.error_estimate},
                           {"cross_validated", e.cross_validated}});
    Json j{{"entries", entries},
           {"unsolved_floor", s.unsolved_floor},
           {"offzero_floor", s.offzero_floor()},
           {"nonpositive_offzero", s.nonpositive_offzero},
           {"all_cross_validated", s.all_cross_validated},
           {"max_discrepancy", s.max_discrepancy},
           {"truncation_certificate",
            {{"M_max", s.certificate.M_max},
             {"level", s.certificate.level},
             {"tail_bound", s.certificate.tail_bound},
             {"modes_solved", s.certificate.modes_solved},
             {"modes_certified_empty", s.certificate.modes_certified_empty}}}};
    j["min_positive_offzero"] = s.min_positive_offzero ? Json(*s.min_positive_offzero) : Json(nullptr);
    if (s.min_entry)
        j["min_positive_offzero_mode"] = {{"mode", mode_json(s.min_entry->mode)},
                                          {"family", std::string(to_string(s.min_entry->family))},
                                          {"error_estimate", s.min_entry->error_estimate}};
    return j;
}

Json to_json(const SweepRow& row, double pass_threshold) {
    Json j{{"R", row.R}, {"failure", row.failure}, {"passed", row.passed(pass_threshold)}};
    if (row.r0)
        j["r0"] = {{"r0", row.r0->r0},
                   {"infimum", row.r0->infimum},
                   {"argmin", mode_json(row.r0->argmin)},
                   {"M_max", row.r0->M_max},
                   {"tail_bound", row.r0->tail_bound}};
    else
        j["r0"] = nullptr;
    j["spectrum"] = row.spectrum ? to_json(*row.spectrum) : Json(nullptr);
    return j;
}

Json to_json(const S1CaseReport& r) {
    return Json{{"n", r.n},
                {"overlap_fraction", r.overlap_fraction},
                {"arc_edges", r.arc_edges},
                {"overlap_edges", r.overlap_edges},
                {"step", r.step},
                {"circle_exact_spectrum", r.circle_exact_spectrum},
                {"mu_arcs", r.mu_arcs},
                {"mu_overlap", r.mu_overlap},
                {"overlap_kernel_dims", r.overlap_kernel_dims},
                {"C_rho", r.C_rho},
                {"cover", to_json(r.cover)},
                {"bound", to_json(r.bound)},
                {"mu_N", r.mu_N},
                {"margin", r.margin},
                {"N_consistent", r.N_consistent},
                {"passed", r.passed}};
}

namespace {

Json case_json(const ComparisonCase& c) {
    return Json{{"k", c.k}, {"alpha", c.alpha}, {"m0", c.m0}, {"m1", c.m1},
                {"step", c.step}, {"potential", to_json(c.q)}};
}

}  // namespace

Json to_json(const RobinSuiteEntry& e) {
    return Json{{"case", case_json(e.c)},
                {"riccati", {{"min_margin", e.riccati.min_margin},
                             {"checked", e.riccati.checked},
                             {"skipped", e.riccati.skipped},
                             {"passed", e.riccati.passed}}},
                {"slope", {{"m1", e.slope.m1},
                           {"slope", e.slope.slope},
                           {"bound", e.slope.bound},
                           {"v_slope", e.slope.v_slope},
                           {"v_slope_limit", e.slope.v_slope_limit},
                           {"passed", e.slope.passed}}},
                {"passed", e.passed}};
}

Json to_json(const DirichletSuiteEntry& e) {
    return Json{{"case", case_json(e.c)},
                {"initial_slope", e.initial_slope},
                {"growth", {{"delta", e.growth.delta},
                            {"a_delta", e.growth.a_delta},
                            {"min_ratio", e.growth.min_ratio},
                            {"sign_changes", e.growth.sign_changes},
                            {"a_end", e.growth.a_end},
                            {"passed", e.growth.passed}}},
                {"passed", e.passed}};
}

Json to_json(const BergerCurve& c) {
    Json stars = Json::array();
    for (const auto& [level, t] : c.t_star)
        stars.push_back({{"threshold", level}, {"t_star", t ? Json(*t) : Json(nullptr)}});
    return Json{{"t", c.t}, {"value", c.value}, {"t_star", stars},
                {"strictly_increasing", c.strictly_increasing}};
}

}  // namespace specbound
