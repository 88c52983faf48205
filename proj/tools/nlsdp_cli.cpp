#include <iostream>

#include <CLI11.hpp>

#include "nlsdp/harness.hpp"
#include "nlsdp/verify.hpp"

namespace {

void add_common_options(CLI::App* cmd, nlsdp::RunSpec& spec, std::string& config_path,
                        std::optional<double>& rho_cap) {
    cmd->add_option("--config", config_path, "flat key = value config file");
    cmd->add_option("--problem", spec.problem, "registered problem name");
    cmd->add_option("--start", spec.start, "'paper-default' or comma-separated x coordinates");
    cmd->add_option("--rho0", spec.alm.rho0, "initial penalty parameter");
    cmd->add_option("--varsigma", spec.alm.varsigma, "penalty growth factor (> 1)");
    cmd->add_option("--xi", spec.alm.xi, "V-test ratio in (0,1)");
    cmd->add_option("--eps0", spec.alm.eps0, "initial inner tolerance");
    cmd->add_option("--eps-exponent", spec.alm.eps_exponent, "eps_k = min(eps0 2^-k, R_k^e)");
    cmd->add_option("--stop-tol", spec.alm.stop_tol, "terminate when R <= stop-tol");
    cmd->add_option("--max-outer", spec.alm.max_outer, "outer iteration cap");
    cmd->add_option("--rho-cap", rho_cap, "upper bound on the penalty parameter");
    cmd->add_option("--out", spec.out_dir, "output directory for artifacts");
    cmd->add_option("--seed", spec.seed, "probe sampling seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ALM solver and verification harness for nonlinear SDP"};
    app.require_subcommand(1);

    nlsdp::RunSpec spec;
    std::string config_path;
    std::optional<double> rho_cap;
    std::vector<std::string> probe_names;
    std::vector<double> sweep_rho0;

    CLI::App* cmd_run = app.add_subcommand("run", "solve a registered problem and run probes");
    add_common_options(cmd_run, spec, config_path, rho_cap);
    cmd_run->add_option("--probe", probe_names,
                        "probe to run (repeatable): rate, calmness, growth, assumption1, "
                        "error-bound");

    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "run a rho0 sweep and tabulate fitted rates");
    add_common_options(cmd_sweep, spec, config_path, rho_cap);
    cmd_sweep->add_option("--rho0-list", sweep_rho0, "rho0 values (needs at least two)")
        ->delimiter(',');

    CLI::App* cmd_verify =
        app.add_subcommand("verify", "run the full acceptance and property suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (cmd_verify->parsed()) {
            const int failures = nlsdp::verify::run_all(std::cout);
            return failures == 0 ? 0 : 1;
        }

        // Config file first, command-line flags win.
        if (!config_path.empty()) {
            nlsdp::RunSpec file_spec;
            nlsdp::apply_config(file_spec, nlsdp::parse_config_file(config_path));
            const nlsdp::RunSpec cli_spec = spec;
            spec = file_spec;
            CLI::App* active = cmd_run->parsed() ? cmd_run : cmd_sweep;
            auto overridden = [&](const char* flag) { return active->count(flag) > 0; };
            if (overridden("--problem")) spec.problem = cli_spec.problem;
            if (overridden("--start")) spec.start = cli_spec.start;
            if (overridden("--rho0")) spec.alm.rho0 = cli_spec.alm.rho0;
            if (overridden("--varsigma")) spec.alm.varsigma = cli_spec.alm.varsigma;
            if (overridden("--xi")) spec.alm.xi = cli_spec.alm.xi;
            if (overridden("--eps0")) spec.alm.eps0 = cli_spec.alm.eps0;
            if (overridden("--eps-exponent")) spec.alm.eps_exponent = cli_spec.alm.eps_exponent;
            if (overridden("--stop-tol")) spec.alm.stop_tol = cli_spec.alm.stop_tol;
            if (overridden("--max-outer")) spec.alm.max_outer = cli_spec.alm.max_outer;
            if (overridden("--out")) spec.out_dir = cli_spec.out_dir;
            if (overridden("--seed")) spec.seed = cli_spec.seed;
        }
        if (rho_cap) spec.alm.rho_cap = rho_cap;
        for (const std::string& p : probe_names) spec.probes.insert(p);
        if (spec.problem.empty()) {
            std::cerr << "error: no problem selected (use --problem)\n";
            return 2;
        }

        if (cmd_run->parsed()) {
            const nlsdp::RunOutcome out = nlsdp::run(spec);
            std::cout << out.summary_text;
            return out.result.status == nlsdp::AlmStatus::converged ? 0 : 1;
        }
        if (cmd_sweep->parsed()) {
            const nlsdp::SweepOutcome out = nlsdp::sweep(spec, sweep_rho0);
            std::cout << out.table_text;
            return out.q_monotone ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
