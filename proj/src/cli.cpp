#include "specbound/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "specbound/discrete_hodge.hpp"
#include "specbound/dissection.hpp"
#include "specbound/errors.hpp"
#include "specbound/format.hpp"
#include "specbound/json_io.hpp"
#include "specbound/ode_compare.hpp"
#include "specbound/sturm_liouville.hpp"
#include "specbound/tube_spectrum.hpp"

namespace specbound {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    std::string subcommand;
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
};

struct Outputs {
    fs::path dir;

    void write(const std::string& name, const std::string& content) const {
        std::ofstream file(dir / name, std::ios::binary);
        if (!file) throw DomainError("cannot write " + (dir / name).string());
        file << content;
        if (!file) throw DomainError("write failed for " + (dir / name).string());
    }
};

Json defaults_for(const std::string& subcommand) {
    if (subcommand == "sl-solve")
        return Json{{"problem", nullptr}, {"lambda_min", nullptr}, {"lambda_max", 30.0},
                    {"count", nullptr}, {"grid_n", 1024}, {"cross_validate", false}};
    if (subcommand == "tube-sweep")
        return Json{{"schedule", {{"D1", 1.0}, {"E1", 1.0}, {"R_grid", {6.0, 8.0, 10.0}}}},
                    {"lambda_max", 2.0},
                    {"r0_threshold", 5.0},
                    {"threshold", 1.0},
                    {"tolerance", 1e-3},
                    {"family", "both"},
                    {"include_zero_mode", false},
                    {"grid_n", 1024}};
    if (subcommand == "bound")
        return Json{{"cover", nullptr}, {"partition_of_unity", nullptr},
                    {"operator", "laplacian"}, {"n_convention", "unordered"}};
    if (subcommand == "s1-dissect") return Json{{"n", 64}, {"overlap_fraction", 0.125}};
    if (subcommand == "compare-ode")
        return Json{{"seed", 7}, {"robin_count", 20}, {"dirichlet_count", 10},
                    {"k_min", 0.5}, {"k_max", 3.0}, {"noise_terms", 3}};
    if (subcommand == "berger-curve")
        return Json{{"a", 1.0}, {"b", 1.0}, {"m", 2}, {"epsilon", 0.1},
                    {"t_min", 0.0}, {"t_max", 200.0}, {"t_step", 1.0}, {"thresholds", {10.0}}};
    throw DomainError("unknown subcommand '" + subcommand + "'");
}

Json read_json_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw DomainError("cannot open config file '" + path + "'");
    try {
        return Json::parse(file);
    } catch (const Json::parse_error& e) {
        throw DomainError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void apply_override(Json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw DomainError("override '" + assignment + "' must have the form key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }

    std::vector<std::string> keys;
    std::stringstream ss(path);
    for (std::string key; std::getline(ss, key, '.');) {
        if (key.empty()) throw DomainError("override key '" + path + "' is malformed");
        keys.push_back(key);
    }
    if (!config.contains(keys.front()))
        throw DomainError("override: unknown key '" + keys.front() + "'");
    Json* node = &config;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        Json& child = (*node)[keys[i]];
        if (child.is_null()) child = Json::object();
        if (!child.is_object())
            throw DomainError("override: '" + keys[i] + "' is not an object");
        node = &child;
    }
    (*node)[keys.back()] = std::move(value);
}

Json resolve_config(const RunConfig& rc) {
    Json config = defaults_for(rc.subcommand);
    if (!rc.config_path.empty()) {
        const Json file = read_json_file(rc.config_path);
        if (!file.is_object()) throw DomainError("config file must hold a JSON object");
        for (const auto& [key, value] : file.items()) {
            if (!config.contains(key))
                throw DomainError("config: unknown key '" + key + "' for " + rc.subcommand);
            config[key] = value;
        }
    }
    for (const auto& o : rc.overrides) apply_override(config, o);
    if (rc.seed) {
        if (!config.contains("seed"))
            throw DomainError("--seed is not used by " + rc.subcommand);
        config["seed"] = *rc.seed;
    }
    return config;
}

double number(const Json& config, const char* key) {
    const auto& v = config.at(key);
    if (!v.is_number()) throw DomainError(std::string("config: '") + key + "' must be a number");
    return v.get<double>();
}

std::size_t count(const Json& config, const char* key) {
    const auto& v = config.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw DomainError(std::string("config: '") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

bool flag(const Json& config, const char* key) {
    const auto& v = config.at(key);
    if (!v.is_boolean()) throw DomainError(std::string("config: '") + key + "' must be true or false");
    return v.get<bool>();
}

std::string text(const Json& config, const char* key) {
    const auto& v = config.at(key);
    if (!v.is_string()) throw DomainError(std::string("config: '") + key + "' must be a string");
    return v.get<std::string>();
}

// ---- sl-solve --------------------------------------------------------------

SpectrumResult truncate(SpectrumResult r, std::size_t n) {
    if (r.size() > n) {
        r.eigenvalues.resize(n);
        r.error_estimate.resize(n);
        r.indices.resize(n);
    }
    return r;
}

std::string spectrum_csv(const SpectrumResult& r) {
    std::ostringstream os;
    os << "index,eigenvalue,error_estimate,method\n";
    for (std::size_t i = 0; i < r.size(); ++i)
        os << r.indices[i] << ',' << format_double(r.eigenvalues[i]) << ','
           << format_double(r.error_estimate[i]) << ',' << to_string(r.method) << '\n';
    return os.str();
}

int cmd_sl_solve(const Json& config, const Outputs& outputs, std::ostream& log) {
    if (config.at("problem").is_null()) throw DomainError("sl-solve: 'problem' is required");
    const SLProblem problem = problem_from_json(config.at("problem"));
    const std::size_t grid_n = count(config, "grid_n");
    const bool both = flag(config, "cross_validate");
    Window window;
    if (!config.at("lambda_min").is_null()) window.lo = number(config, "lambda_min");
    window.hi = number(config, "lambda_max");
    std::optional<std::size_t> wanted;
    if (!config.at("count").is_null()) wanted = count(config, "count");

    auto run = [&](Window w) {
        if (both) return cross_validate(problem, grid_n, w);
        CrossValidation cv;
        cv.fd = solve_fd(problem, grid_n, w);
        cv.merged = cv.fd;
        return cv;
    };
    CrossValidation cv = run(window);
    if (wanted) {
        // Grow the window until enough eigenvalues are found.
        const double floor = spectrum_lower_bound(problem);
        for (int i = 0; i < 40 && cv.merged.size() < *wanted; ++i) {
            window.hi = floor + 2.0 * std::max(window.hi - floor, 1.0);
            cv = run(window);
        }
        if (cv.merged.size() < *wanted)
            throw NumericalError("sl-solve: could not find the requested number of eigenvalues");
        cv.fd = truncate(cv.fd, *wanted);
        cv.shooting = truncate(cv.shooting, *wanted);
        cv.merged = truncate(cv.merged, *wanted);
    }

    Json report{{"problem", to_json(problem)},
                {"window", {{"lo", std::isfinite(window.lo) ? Json(window.lo) : Json(nullptr)},
                            {"hi", window.hi}}},
                {"result", to_json(cv.merged)}};
    if (both) {
        report["fd"] = to_json(cv.fd);
        report["shooting"] = to_json(cv.shooting);
        report["agreed"] = cv.agreed;
        report["max_discrepancy"] = cv.max_discrepancy;
    }
    outputs.write("spectrum.json", dump_canonical(report));
    outputs.write("spectrum.csv", spectrum_csv(cv.merged));
    log << "sl-solve: " << cv.merged.size() << " eigenvalues";
    if (both) log << (cv.agreed ? ", methods agree" : ", METHODS DISAGREE");
    log << '\n';
    return both && !cv.agreed ? kExitVerificationFailure : kExitOk;
}

// ---- tube-sweep ------------------------------------------------------------

int cmd_tube_sweep(const Json& config, const Outputs& outputs, std::ostream& log) {
    const DegenerationSchedule schedule = schedule_from_json(config.at("schedule"));
    const double threshold = number(config, "threshold");
    const double tolerance = number(config, "tolerance");
    SweepOptions options;
    options.lambda_max = number(config, "lambda_max");
    options.r0_threshold = number(config, "r0_threshold");
    options.pass_threshold = threshold - tolerance;
    options.family = family_selection_from_string(text(config, "family"));
    options.include_zero_mode = flag(config, "include_zero_mode");
    options.grid_n = count(config, "grid_n");

    const auto rows = sweep(schedule, options);

    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    outputs.write("sweep.csv", csv.str());

    // The window (0, lambda_max] is usually empty; this table records the
    // smallest off-zero eigenvalue per R regardless.
    std::ostringstream minima;
    minima << "R,r0,mode_r,mode_s,family,eigenvalue,error_estimate\n";
    for (const auto& row : rows) {
        if (!row.spectrum || !row.spectrum->min_entry) continue;
        const auto& e = *row.spectrum->min_entry;
        minima << format_double(row.R) << ',' << format_double(row.r0->r0) << ',' << e.mode.r
               << ',' << e.mode.s << ',' << to_string(e.family) << ','
               << format_double(e.eigenvalue) << ',' << format_double(e.error_estimate) << '\n';
    }
    outputs.write("sweep_min.csv", minima.str());

    Json summary = Json::array();
    Json details = Json::array();
    std::size_t failed_rows = 0, threshold_failures = 0;
    for (const auto& row : rows) {
        const bool passed = row.passed(options.pass_threshold);
        if (!row.ok()) ++failed_rows;
        else if (!passed) ++threshold_failures;
        Json s{{"R", row.R}, {"passed", passed}, {"failure", row.failure}};
        s["r0"] = row.r0 ? Json(row.r0->r0) : Json(nullptr);
        s["min_positive_offzero"] = row.spectrum && row.spectrum->min_positive_offzero
                                        ? Json(*row.spectrum->min_positive_offzero)
                                        : Json(nullptr);
        s["offzero_floor"] = row.spectrum ? Json(row.spectrum->offzero_floor()) : Json(nullptr);
        summary.push_back(std::move(s));
        details.push_back(to_json(row, options.pass_threshold));
    }
    outputs.write("sweep.json",
                  dump_canonical(Json{{"schedule", to_json(schedule)},
                                      {"threshold", threshold},
                                      {"tolerance", tolerance},
                                      {"pass_threshold", options.pass_threshold},
                                      {"lambda_max", options.lambda_max},
                                      {"r0_threshold", options.r0_threshold},
                                      {"family", std::string(to_string(options.family))},
                                      {"rows", summary},
                                      {"details", details},
                                      {"failed_rows", failed_rows},
                                      {"threshold_failures", threshold_failures}}));
    for (const auto& s : summary) {
        log << "R=" << format_double(s.at("R").get<double>()) << ": ";
        if (!s.at("failure").get<std::string>().empty())
            log << "failed (" << s.at("failure").get<std::string>() << ")\n";
        else
            log << "min off-zero eigenvalue "
                << (s.at("min_positive_offzero").is_null()
                        ? std::string("none")
                        : format_double(s.at("min_positive_offzero").get<double>()))
                << (s.at("passed").get<bool>() ? " PASS\n" : " FAIL\n");
    }
    return threshold_failures > 0 ? kExitVerificationFailure : kExitOk;
}

// ---- bound -----------------------------------------------------------------

// C_rho = 1/2 max_i sup |grad rho_i|^2 from samples of each rho_i on a uniform
// 1-d grid (forward differences).
double c_rho_from_samples(const Json& partition) {
    require_keys(partition, {"step", "samples"}, "partition_of_unity");
    if (!partition.contains("step") || !partition.at("step").is_number() ||
        !(partition.at("step").get<double>() > 0.0))
        throw DomainError("partition_of_unity: 'step' must be a positive number");
    const double step = partition.at("step").get<double>();
    if (!partition.contains("samples") || !partition.at("samples").is_array())
        throw DomainError("partition_of_unity: 'samples' must be an array of arrays");
    double worst = 0.0;
    for (const auto& rho : partition.at("samples")) {
        if (!rho.is_array() || rho.size() < 2)
            throw DomainError("partition_of_unity: each sample row needs at least two values");
        for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
            if (!rho[i].is_number() || !rho[i + 1].is_number())
                throw DomainError("partition_of_unity: samples must be numbers");
            const double g = (rho[i + 1].get<double>() - rho[i].get<double>()) / step;
            worst = std::max(worst, g * g);
        }
    }
    return 0.5 * worst;
}

int cmd_bound(const Json& config, const Outputs& outputs, std::ostream& log) {
    if (config.at("cover").is_null()) throw DomainError("bound: 'cover' is required");
    Json cover_json = config.at("cover");
    if (!config.at("partition_of_unity").is_null()) {
        if (cover_json.is_object() && cover_json.contains("C_rho"))
            throw DomainError("bound: give either cover.C_rho or partition_of_unity, not both");
        cover_json["C_rho"] = c_rho_from_samples(config.at("partition_of_unity"));
    }
    const CoverSpec cover = cover_from_json(cover_json);
    const std::string op = text(config, "operator");
    const NConvention convention = n_convention_from_string(text(config, "n_convention"));
    BoundResult result;
    if (op == "laplacian") result = laplacian_bound(cover, convention);
    else if (op == "dirac") result = dirac_bound(cover, convention);
    else throw DomainError("bound: operator must be \"laplacian\" or \"dirac\"");

    outputs.write("bound.json",
                  dump_canonical(Json{{"operator", op},
                                      {"n_convention", std::string(to_string(convention))},
                                      {"cover", to_json(cover)},
                                      {"result", to_json(result)}}));
    log << "bound (" << op << "): eigenvalue number " << result.counts.N << " >= "
        << format_double(op == "dirac" ? result.lambda_bound : result.mu_bound) << '\n';
    return kExitOk;
}

// ---- s1-dissect ------------------------------------------------------------

int cmd_s1_dissect(const Json& config, const Outputs& outputs, std::ostream& log) {
    const auto report = s1_case_study(count(config, "n"), number(config, "overlap_fraction"));
    outputs.write("s1.json", dump_canonical(to_json(report)));
    log << "s1-dissect: bound " << format_double(report.bound.mu_bound) << " <= mu_N "
        << format_double(report.mu_N) << (report.passed ? " PASS\n" : " FAIL\n");
    return report.passed ? kExitOk : kExitVerificationFailure;
}

// ---- compare-ode -----------------------------------------------------------

int cmd_compare_ode(const Json& config, const Outputs& outputs, std::ostream& log) {
    SuiteConfig suite;
    suite.seed = config.at("seed").get<std::uint64_t>();
    suite.k_min = number(config, "k_min");
    suite.k_max = number(config, "k_max");
    suite.noise_terms = count(config, "noise_terms");
    suite.count = count(config, "robin_count");
    const auto robin = run_robin_suite(suite);
    suite.count = count(config, "dirichlet_count");
    const auto dirichlet = run_dirichlet_suite(suite);

    Json robin_json = Json::array(), dirichlet_json = Json::array();
    std::size_t robin_passed = 0, dirichlet_passed = 0;
    std::ostringstream csv;
    csv << "suite,case,k,alpha,initial_slope,riccati_margin,slope,slope_bound,growth_ratio,passed\n";
    for (std::size_t i = 0; i < robin.size(); ++i) {
        const auto& e = robin[i];
        robin_passed += e.passed;
        robin_json.push_back(to_json(e));
        csv << "robin," << i << ',' << format_double(e.c.k) << ',' << format_double(e.c.alpha)
            << ",," << format_double(e.riccati.min_margin) << ',' << format_double(e.slope.slope)
            << ',' << format_double(e.slope.bound) << ",," << (e.passed ? 1 : 0) << '\n';
    }
    for (std::size_t i = 0; i < dirichlet.size(); ++i) {
        const auto& e = dirichlet[i];
        dirichlet_passed += e.passed;
        dirichlet_json.push_back(to_json(e));
        csv << "dirichlet," << i << ',' << format_double(e.c.k) << ",,"
            << format_double(e.initial_slope) << ",,,," << format_double(e.growth.min_ratio) << ','
            << (e.passed ? 1 : 0) << '\n';
    }
    outputs.write("compare_ode.json",
                  dump_canonical(Json{{"seed", suite.seed},
                                      {"robin", robin_json},
                                      {"dirichlet", dirichlet_json},
                                      {"robin_passed", robin_passed},
                                      {"dirichlet_passed", dirichlet_passed}}));
    outputs.write("compare_ode.csv", csv.str());
    log << "compare-ode: robin " << robin_passed << '/' << robin.size() << ", dirichlet "
        << dirichlet_passed << '/' << dirichlet.size() << '\n';
    return robin_passed == robin.size() && dirichlet_passed == dirichlet.size()
               ? kExitOk
               : kExitVerificationFailure;
}

// ---- berger-curve ----------------------------------------------------------

int cmd_berger_curve(const Json& config, const Outputs& outputs, std::ostream& log) {
    if (!config.at("m").is_number_integer()) throw DomainError("config: 'm' must be an integer");
    if (!config.at("thresholds").is_array()) throw DomainError("config: 'thresholds' must be an array");
    std::vector<double> thresholds;
    for (const auto& v : config.at("thresholds")) {
        if (!v.is_number()) throw DomainError("config: 'thresholds' must hold numbers");
        thresholds.push_back(v.get<double>());
    }
    const double step = number(config, "t_step");
    const auto grid = uniform_grid(number(config, "t_min"), number(config, "t_max"), step);
    const auto curve = berger_scaling(number(config, "a"), number(config, "b"),
                                      config.at("m").get<int>(), number(config, "epsilon"), grid,
                                      thresholds);

    // Each reported t* must be the first grid point at or above its threshold.
    bool crossings_ok = true;
    for (const auto& [level, t] : curve.t_star) {
        if (!t) continue;
        const auto pos = static_cast<std::size_t>(
            std::find(curve.t.begin(), curve.t.end(), *t) - curve.t.begin());
        crossings_ok = crossings_ok && pos < curve.t.size() && curve.value[pos] >= level &&
                       (pos == 0 || curve.value[pos - 1] < level);
    }

    std::ostringstream csv;
    csv << "t,value\n";
    for (std::size_t i = 0; i < curve.t.size(); ++i)
        csv << format_double(curve.t[i]) << ',' << format_double(curve.value[i]) << '\n';
    outputs.write("berger.csv", csv.str());
    Json report = to_json(curve);
    report["crossings_verified"] = crossings_ok;
    report["t_step"] = step;
    outputs.write("berger.json", dump_canonical(report));

    for (const auto& [level, t] : curve.t_star)
        log << "berger-curve: t*(" << format_double(level)
            << ") = " << (t ? format_double(*t) : std::string("not reached")) << '\n';
    return crossings_ok && curve.strictly_increasing ? kExitOk : kExitVerificationFailure;
}

int dispatch(const RunConfig& rc, const Json& config, const Outputs& outputs, std::ostream& log) {
    if (rc.subcommand == "sl-solve") return cmd_sl_solve(config, outputs, log);
    if (rc.subcommand == "tube-sweep") return cmd_tube_sweep(config, outputs, log);
    if (rc.subcommand == "bound") return cmd_bound(config, outputs, log);
    if (rc.subcommand == "s1-dissect") return cmd_s1_dissect(config, outputs, log);
    if (rc.subcommand == "compare-ode") return cmd_compare_ode(config, outputs, log);
    return cmd_berger_curve(config, outputs, log);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral lower bounds: Sturm-Liouville solvers, tube spectra, dissection bounds"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig rc;
    std::uint64_t seed = 0;
    app.add_option("--out", rc.out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized suites");
    app.add_option("--config", rc.config_path, "JSON config file");
    app.add_option("--override", rc.overrides, "key=value (dotted keys for nested fields)")
        ->allow_extra_args(false);

    const std::vector<std::pair<const char*, const char*>> commands = {
        {"sl-solve", "Eigenvalues of a Sturm-Liouville problem"},
        {"tube-sweep", "Absolute spectrum of truncated tubes along a degeneration schedule"},
        {"bound", "Dissection lower bound from cover data"},
        {"s1-dissect", "Dissection bound against the exact circle spectrum"},
        {"compare-ode", "Seeded comparison-ODE suites"},
        {"berger-curve", "Scaling curve of the Berger-type bound"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, description] : commands) subs[name] = app.add_subcommand(name, description);

    bool cross_validate = false;
    subs["sl-solve"]->add_flag("--cross-validate", cross_validate,
                               "Solve by finite differences and shooting and compare");
    bool dirac = false, laplacian = false;
    std::string n_convention;
    auto* dirac_flag = subs["bound"]->add_flag("--dirac", dirac, "Inputs are Dirac eigenvalues");
    subs["bound"]->add_flag("--laplacian", laplacian, "Inputs are Laplacian eigenvalues")
        ->excludes(dirac_flag);
    subs["bound"]->add_option("--n-convention", n_convention, "unordered | literal");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) rc.subcommand = name;
    if (seed_opt->count() > 0) rc.seed = seed;

    Json config;
    Outputs outputs;
    try {
        config = resolve_config(rc);
        if (cross_validate) config["cross_validate"] = true;
        if (dirac) config["operator"] = "dirac";
        if (laplacian) config["operator"] = "laplacian";
        if (!n_convention.empty()) config["n_convention"] = n_convention;
        outputs.dir = rc.out_dir;
        std::error_code ec;
        fs::create_directories(outputs.dir, ec);
        if (ec || !fs::is_directory(outputs.dir))
            throw DomainError("cannot create output directory '" + rc.out_dir + "'");
        outputs.write("config.json", dump_canonical(Json{{"subcommand", rc.subcommand},
                                                         {"config", config}}));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    try {
        return dispatch(rc, config, outputs, out);
    } catch (const DomainError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const Json::exception& e) {
        err << "input error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitVerificationFailure;
    }
}

}  // namespace specbound
