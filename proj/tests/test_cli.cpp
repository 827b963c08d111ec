#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "specbound/cli.hpp"
#include "specbound/json_io.hpp"

using namespace specbound;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = SPECBOUND_FIXTURES;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "specbound_cli_tests" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

}  // namespace

TEST_CASE("sl-solve on the free string fixture") {
    const auto dir = scratch("sl");
    const auto r = run({"sl-solve", "--config", kFixtures + "/sl_dirichlet_free.json", "--out", dir.string()});
    CHECK(r.code == kExitOk);
    const auto csv = slurp(dir / "spectrum.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "index,eigenvalue,error_estimate,method");
    for (int k = 1; k <= 5; ++k) {
        REQUIRE(std::getline(lines, line));
        std::istringstream fields(line);
        std::string idx, value;
        std::getline(fields, idx, ',');
        std::getline(fields, value, ',');
        CHECK(std::stoi(idx) == k - 1);
        CHECK(std::stod(value) == doctest::Approx(k * k).epsilon(1e-9));
    }
    CHECK_FALSE(std::getline(lines, line));
}

TEST_CASE("sl-solve --cross-validate records both methods") {
    const auto dir = scratch("sl_cv");
    const auto r = run({"sl-solve", "--config", kFixtures + "/sl_dirichlet_free.json", "--cross-validate",
                        "--out", dir.string()});
    CHECK(r.code == kExitOk);
    const auto j = read_json(dir / "spectrum.json");
    CHECK(j.at("fd").at("method") == "fd");
    CHECK(j.at("shooting").at("method") == "shooting");
    CHECK(j.at("agreed") == true);
    CHECK(j.at("result").at("method") == "cross_validated");
    CHECK(j.at("max_discrepancy").get<double>() <= 1e-6);
}

TEST_CASE("sl-solve count and overrides") {
    const auto dir = scratch("sl_count");
    const auto r = run({"sl-solve", "--config", kFixtures + "/sl_dirichlet_free.json", "--override", "count=8",
                        "--override", "lambda_max=2", "--override", "problem.m1=1.5707963267948966",
                        "--out", dir.string()});
    CHECK(r.code == kExitOk);
    const auto values = read_json(dir / "spectrum.json").at("result").at("eigenvalues");
    REQUIRE(values.size() == 8);
    CHECK(values[7].get<double>() == doctest::Approx(4.0 * 64).epsilon(1e-8));
}

TEST_CASE("input errors exit with status 2") {
    const auto dir = scratch("errors");
    CHECK(run({"sl-solve", "--config", kFixtures + "/missing.json", "--out", dir.string()}).code == kExitInputError);
    CHECK(run({"sl-solve", "--out", dir.string()}).code == kExitInputError);  // no problem given
    CHECK(run({"bound", "--override", "bogus=1", "--out", dir.string()}).code == kExitInputError);
    CHECK(run({"bound", "--config", kFixtures + "/cover_two_set.json", "--override", "cover.colour=1",
               "--out", dir.string()})
              .code == kExitInputError);
    CHECK(run({"bound", "--config", kFixtures + "/cover_two_set.json", "--n-convention", "literal",
               "--out", dir.string()})
              .code == kExitInputError);  // literal needs h_set
    CHECK(run({"tube-sweep", "--config", kFixtures + "/cover_two_set.json", "--out", dir.string()}).code ==
          kExitInputError);  // unknown top-level key
    CHECK(run({"berger-curve", "--seed", "3", "--out", dir.string()}).code == kExitInputError);
    CHECK(run({"no-such-command"}).code == kExitInputError);
    CHECK(run({}).code == kExitInputError);
    const auto help = run({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("tube-sweep") != std::string::npos);
}

TEST_CASE("bound fixtures") {
    const auto dir = scratch("bound");
    CHECK(run({"bound", "--config", kFixtures + "/cover_two_set.json", "--out", dir.string()}).code == kExitOk);
    auto j = read_json(dir / "bound.json");
    CHECK(j.at("result").at("mu_bound").get<double>() == 1.0 / 34.0);
    CHECK(j.at("result").at("per_set_terms").size() == 2);

    CHECK(run({"bound", "--config", kFixtures + "/cover_two_set.json", "--dirac", "--out", dir.string()}).code ==
          kExitOk);
    j = read_json(dir / "bound.json");
    CHECK(j.at("operator") == "dirac");
    CHECK(j.at("result").at("lambda_bound").get<double>() == std::sqrt(1.0 / 34.0));

    CHECK(run({"bound", "--config", kFixtures + "/cover_single.json", "--out", dir.string()}).code == kExitOk);
    CHECK(read_json(dir / "bound.json").at("result").at("mu_bound").get<double>() == 2.5);

    CHECK(run({"bound", "--config", kFixtures + "/cover_chain.json", "--out", dir.string()}).code == kExitOk);
    j = read_json(dir / "bound.json");
    CHECK(j.at("result").at("N").get<long>() == 1);
    CHECK(j.at("result").at("N1").get<long>() == 0);
    CHECK(j.at("result").at("N2").get<long>() == 0);
    CHECK(j.at("result").at("mu_bound").get<double>() == 1.0 / 74.0);
}

TEST_CASE("bound with a sampled partition of unity") {
    const auto dir = scratch("bound_pou");
    const auto r = run({"bound", "--config", kFixtures + "/cover_two_set.json", "--override", "cover.C_rho=null",
                        "--out", dir.string()});
    CHECK(r.code == kExitInputError);
    const auto cfg = dir / "pou.json";
    fs::create_directories(dir);
    auto j = Json::parse(slurp(kFixtures + "/cover_two_set.json"));
    j["cover"].erase("C_rho");
    // rho_0 falls linearly from 1 to 0 over two steps of 0.5: |grad| = 1, C_rho = 1/2.
    j["partition_of_unity"] = {{"step", 0.5}, {"samples", {{1.0, 0.5, 0.0}, {0.0, 0.5, 1.0}}}};
    std::ofstream(cfg) << j.dump();
    CHECK(run({"bound", "--config", cfg.string(), "--out", dir.string()}).code == kExitOk);
    CHECK(read_json(dir / "bound.json").at("cover").at("C_rho").get<double>() == 0.5);
}

TEST_CASE("tube-sweep fixtures") {
    const auto tiny = scratch("sweep_tiny");
    CHECK(run({"tube-sweep", "--config", kFixtures + "/sweep_tiny_R.json", "--out", tiny.string()}).code == kExitOk);
    const auto j = read_json(tiny / "sweep.json");
    REQUIRE(j.at("rows").size() == 1);
    CHECK(j.at("rows")[0].at("failure").get<std::string>().find("R too small") != std::string::npos);
    CHECK(j.at("failed_rows") == 1);

    const auto empty = scratch("sweep_empty");
    CHECK(run({"tube-sweep", "--config", kFixtures + "/sweep_empty.json", "--out", empty.string()}).code == kExitOk);
    CHECK(slurp(empty / "sweep.csv") == "R,r0,mode_r,mode_s,family,eigenvalue,error_estimate\n");
    CHECK(read_json(empty / "sweep.json").at("rows").empty());
}

TEST_CASE("s1-dissect, compare-ode and berger-curve fixtures") {
    const auto dir = scratch("misc");
    CHECK(run({"s1-dissect", "--config", kFixtures + "/s1_n64.json", "--out", dir.string()}).code == kExitOk);
    auto j = read_json(dir / "s1.json");
    CHECK(j.at("margin").get<double>() > 0.0);
    CHECK(j.at("bound").at("mu_bound").get<double>() <= j.at("mu_N").get<double>());

    CHECK(run({"compare-ode", "--config", kFixtures + "/ode_seed7.json", "--out", dir.string()}).code == kExitOk);
    j = read_json(dir / "compare_ode.json");
    CHECK(j.at("robin_passed") == 20);
    CHECK(j.at("dirichlet_passed") == 10);

    CHECK(run({"berger-curve", "--config", kFixtures + "/berger.json", "--out", dir.string()}).code == kExitOk);
    j = read_json(dir / "berger.json");
    CHECK(j.at("t_star")[0].at("t_star").get<double>() == 99.0);
    CHECK(j.at("crossings_verified") == true);
    CHECK(j.at("strictly_increasing") == true);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& dir : {a, b})
        CHECK(run({"compare-ode", "--config", kFixtures + "/ode_seed7.json", "--seed", "11", "--out",
                   dir.string()})
                  .code == kExitOk);
    CHECK(slurp(a / "compare_ode.json") == slurp(b / "compare_ode.json"));
    CHECK(slurp(a / "compare_ode.csv") == slurp(b / "compare_ode.csv"));
    CHECK(read_json(a / "compare_ode.json").at("seed") == 11);
    const auto c = scratch("det_c");
    CHECK(run({"compare-ode", "--seed", "12", "--out", c.string()}).code == kExitOk);
    CHECK(slurp(a / "compare_ode.json") != slurp(c / "compare_ode.json"));
}
