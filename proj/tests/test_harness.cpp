#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "nlsdp/harness.hpp"

using namespace nlsdp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("nlsdp_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("run on example 6.1 converges and emits valid artifacts") {
    TempDir tmp("run61");
    RunSpec spec;
    spec.problem = "example-6.1";
    spec.out_dir = tmp.path / "a";
    spec.probes = {"rate", "error-bound"};
    const RunOutcome out = run(spec);
    CHECK(out.result.status == AlmStatus::converged);
    CHECK(fs::exists(spec.out_dir / "trace.csv"));
    CHECK(fs::exists(spec.out_dir / "report.json"));
    CHECK(fs::exists(spec.out_dir / "summary.txt"));
    CHECK(validate_report_json(out.report_json).empty());

    const std::string csv = slurp(spec.out_dir / "trace.csv");
    CHECK(csv.rfind("k,rho,R,eps,inner_iters,grad_norm,V,dist_x,dist_lambda,f\n", 0) == 0);

    // Determinism: identical spec, identical bytes.
    RunSpec again = spec;
    again.out_dir = tmp.path / "b";
    const RunOutcome out2 = run(again);
    CHECK(out2.report_json == out.report_json);
    CHECK(out2.trace_csv == out.trace_csv);
    CHECK(slurp(again.out_dir / "trace.csv") == csv);
}

TEST_CASE("run rejects unknown problems before writing artifacts") {
    TempDir tmp("bad");
    RunSpec spec;
    spec.problem = "nosuch";
    spec.out_dir = tmp.path / "x";
    CHECK_THROWS_AS(run(spec), std::invalid_argument);
    CHECK_FALSE(fs::exists(spec.out_dir));
}

TEST_CASE("config file parsing and overrides") {
    TempDir tmp("cfg");
    const fs::path cfg_path = tmp.path / "run.cfg";
    std::ofstream(cfg_path) << "# comment\n"
                               "problem = example-6.1\n"
                               "rho0 = 25\n"
                               "xi = 0.25  # trailing comment\n"
                               "probes = rate,error-bound\n";
    RunSpec spec;
    apply_config(spec, parse_config_file(cfg_path));
    CHECK(spec.problem == "example-6.1");
    CHECK(spec.alm.rho0 == doctest::Approx(25.0));
    CHECK(spec.alm.xi == doctest::Approx(0.25));
    CHECK(spec.probes.count("rate") == 1);
    CHECK(spec.probes.count("error-bound") == 1);

    std::ofstream(cfg_path) << "bogus_key = 1\n";
    RunSpec other;
    CHECK_THROWS_AS(apply_config(other, parse_config_file(cfg_path)), std::invalid_argument);
}

TEST_CASE("sweep tabulates nonincreasing rates") {
    RunSpec spec;
    spec.problem = "example-6.1";
    const SweepOutcome out = sweep(spec, {10.0, 100.0, 1000.0});
    CHECK(out.rows.size() == 3);
    for (const SweepRow& r : out.rows) CHECK(r.status == "converged");
    CHECK(out.q_monotone);

    // Identical specs produce identical rows.
    const SweepOutcome rep = sweep(spec, {50.0, 50.0});
    CHECK(rep.rows[0].q_hat == rep.rows[1].q_hat);
    CHECK(rep.rows[0].iterations == rep.rows[1].iterations);

    CHECK_THROWS_AS(sweep(spec, {10.0}), std::invalid_argument);
}

TEST_CASE("report schema validator flags malformed documents") {
    CHECK(validate_report_json("{not json") == "not valid JSON");
    CHECK_FALSE(validate_report_json("{}").empty());
}
