#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>

#include "nlsdp/analysis.hpp"

namespace nlsdp {

struct RunSpec {
    std::string problem;
    std::string start = "paper-default";  // or comma-separated x coordinates
    AlmConfig alm;
    std::set<std::string> probes;  // rate, calmness, growth, assumption1, error-bound
    std::filesystem::path out_dir;
    unsigned seed = 42;

    void validate() const;
};

struct RunOutcome {
    AlmResult result;
    std::string report_json;   // serialized report
    std::string trace_csv;
    std::string summary_text;
};

/// Executes the solve plus requested probes; when out_dir is nonempty writes
/// trace.csv, report.json and summary.txt into it. Exit-style status:
/// 0 converged, 1 otherwise.
RunOutcome run(const RunSpec& spec);

struct SweepRow {
    double rho0 = 0.0;
    double q_hat = 0.0;
    int iterations = 0;
    double final_R = 0.0;
    std::string status;
};

struct SweepOutcome {
    std::vector<SweepRow> rows;
    bool q_monotone = false;  // q_hat nonincreasing in rho0 (1e-3 slack)
    std::string table_text;
};

/// Runs the spec once per rho0 value (concurrently, bounded workers) and
/// tabulates the fitted rates. Requires at least two values.
SweepOutcome sweep(const RunSpec& base, const std::vector<double>& rho0_values);

/// Flat `key = value` config file; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);
void apply_config(RunSpec& spec, const std::map<std::string, std::string>& kv);

/// Lightweight schema check for emitted report JSON; returns an empty string
/// when valid, else a description of the first violation.
std::string validate_report_json(const std::string& text);

std::string format_trace_csv(const AlmTrace& trace);

}  // namespace nlsdp
