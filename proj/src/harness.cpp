#include "nlsdp/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace nlsdp {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Vec parse_start_vector(const std::string& text) {
    Vec x;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        x.push_back(std::stod(tok));
    }
    return x;
}

json sym_to_json(const SymMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json config_to_json(const AlmConfig& cfg) {
    json j;
    j["rho0"] = cfg.rho0;
    j["varsigma"] = cfg.varsigma;
    j["xi"] = cfg.xi;
    j["eps0"] = cfg.eps0;
    j["eps_exponent"] = cfg.eps_exponent;
    j["max_outer"] = cfg.max_outer;
    j["stop_tol"] = cfg.stop_tol;
    if (cfg.rho_cap) j["rho_cap"] = *cfg.rho_cap;
    return j;
}

}  // namespace

void RunSpec::validate() const {
    find_problem(problem);  // throws on unknown names
    alm.validate();
    static const std::set<std::string> known = {"rate", "calmness", "growth", "assumption1",
                                                "error-bound"};
    for (const std::string& p : probes)
        if (!known.count(p)) throw std::invalid_argument("unknown probe: " + p);
}

std::string format_trace_csv(const AlmTrace& trace) {
    std::string out = "k,rho,R,eps,inner_iters,grad_norm,V,dist_x,dist_lambda,f\n";
    for (const AlmIterate& r : trace.rows) {
        out += std::to_string(r.k);
        out += ',' + fmt_double(r.rho);
        out += ',' + fmt_double(r.R);
        out += ',' + fmt_double(r.eps);
        out += ',' + std::to_string(r.inner_iters);
        out += ',' + fmt_double(r.grad_norm);
        out += ',' + fmt_double(r.V);
        out += ',' + fmt_double(r.dist_x);
        out += ',' + fmt_double(r.dist_lambda);
        out += ',' + fmt_double(r.f);
        out += '\n';
    }
    return out;
}

RunOutcome run(const RunSpec& spec) {
    spec.validate();
    const NlsdpProblem& prob = find_problem(spec.problem);
    const MultiplierSetModel& model = find_multiplier_model(spec.problem);

    KktPoint start = default_start(spec.problem);
    if (spec.start != "paper-default") {
        const Vec x = parse_start_vector(spec.start);
        if (static_cast<int>(x.size()) != prob.dim_x)
            throw std::invalid_argument("start vector has wrong dimension");
        start.x = x;
    }

    RunOutcome outcome;
    outcome.result = alm_solve(prob, start, spec.alm, &model);
    const AlmResult& res = outcome.result;

    json report;
    report["problem"] = spec.problem;
    report["seed"] = spec.seed;
    report["config"] = config_to_json(spec.alm);
    report["status"] = to_string(res.status);
    report["iterations"] = static_cast<int>(res.trace.rows.empty() ? 0 : res.trace.rows.back().k);
    json final_pt;
    final_pt["x"] = res.point.x;
    final_pt["y"] = res.point.y;
    final_pt["gamma"] = sym_to_json(res.point.gamma);
    final_pt["R"] = residual_R(prob, res.point);
    final_pt["f"] = prob.f(res.point.x);
    report["final"] = final_pt;
    json eps_over_R = json::array();
    for (const AlmIterate& r : res.trace.rows)
        if (r.R > 0.0 && r.eps > 0.0) eps_over_R.push_back(r.eps / r.R);
    report["eps_over_R"] = eps_over_R;
    {
        double m = 0.0;
        for (const AlmIterate& r : res.trace.rows) m = std::max(m, r.comp_viol);
        report["max_complementarity_violation"] = m;
    }

    json probes = json::object();
    if (spec.probes.count("rate")) {
        try {
            const RateReport rr = estimate_q_rate(res.trace, &model);
            json j;
            j["q_hat"] = rr.q_hat;
            j["reliable"] = rr.reliable;
            j["ratios"] = rr.ratios;
            j["tau_bound_series"] = rr.tau_bound_series;
            j["kappa2_hat"] = rr.kappa2_hat;
            j["zeta_hat"] = rr.zeta_hat;
            j["target_from_model"] = rr.target_from_model;
            probes["rate"] = j;
        } catch (const std::exception& e) {
            probes["rate"] = json{{"error", e.what()}};
        }
    }
    if (spec.probes.count("error-bound")) {
        const ErrorBoundSeries eb = error_bound_monitor(prob, res.trace, 0);
        json j;
        j["ratios"] = eb.ratios;
        j["kappa3_hat"] = eb.kappa3_hat;
        probes["error-bound"] = j;
    }
    if (spec.probes.count("calmness")) {
        KktPoint base{model.x_opt, model.lambda_ref.vec, model.lambda_ref.mat};
        const CalmnessReport cr = calmness_probe(prob, base, model, 1e-3, 100, spec.seed);
        json j;
        j["kappa_hat"] = cr.kappa_hat;
        j["radius"] = cr.radius;
        j["failures"] = cr.failures;
        j["samples"] = static_cast<int>(cr.samples.size());
        probes["calmness"] = j;
    }
    if (spec.probes.count("growth")) {
        const GrowthReport gr =
            quadratic_growth_probe(prob, model.x_opt, model, spec.alm.rho0, 1e-2, 50, spec.seed);
        json j;
        j["min_ratio"] = gr.min_ratio;
        j["min_ratio_half"] = gr.min_ratio_half;
        j["positive"] = gr.positive;
        j["stable"] = gr.stable;
        probes["growth"] = j;
    }
    if (spec.probes.count("assumption1")) {
        const Assumption1Report ar =
            assumption1_probe(prob, model.x_opt, model.lambda_ref, model, 50, spec.seed);
        json j;
        j["max_ratio"] = ar.max_ratio;
        j["samples"] = ar.samples;
        probes["assumption1"] = j;
    }
    report["probes"] = probes;

    outcome.report_json = report.dump(2) + "\n";
    outcome.trace_csv = format_trace_csv(res.trace);

    std::string summary;
    summary += "problem: " + spec.problem + "\n";
    summary += "status: " + std::string(to_string(res.status)) + "\n";
    summary += "outer iterations: " +
               std::to_string(res.trace.rows.empty() ? 0 : res.trace.rows.back().k) + "\n";
    summary += "final R: " + fmt_double(residual_R(prob, res.point)) + "\n";
    summary += "final x:";
    for (double v : res.point.x) summary += ' ' + fmt_double(v);
    summary += "\n";
    summary += "eps_k / R_k series (o(R) discipline):\n";
    summary += "  k    eps_k          R_k            eps/R\n";
    for (const AlmIterate& r : res.trace.rows) {
        if (!(r.R > 0.0) || !(r.eps > 0.0)) continue;
        char line[128];
        std::snprintf(line, sizeof(line), "  %-4d %-14.6g %-14.6g %-14.6g\n", r.k, r.eps, r.R,
                      r.eps / r.R);
        summary += line;
    }
    outcome.summary_text = summary;

    if (!spec.out_dir.empty()) {
        std::filesystem::create_directories(spec.out_dir);
        std::ofstream(spec.out_dir / "trace.csv") << outcome.trace_csv;
        std::ofstream(spec.out_dir / "report.json") << outcome.report_json;
        std::ofstream(spec.out_dir / "summary.txt") << outcome.summary_text;
    }
    return outcome;
}

SweepOutcome sweep(const RunSpec& base, const std::vector<double>& rho0_values) {
    if (rho0_values.size() < 2)
        throw std::invalid_argument("sweep: need at least two rho0 values");
    base.validate();

    std::vector<SweepRow> rows(rho0_values.size());
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(rho0_values.size(), hw ? hw : 2);
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mtx;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (next >= rho0_values.size()) return;
                    i = next++;
                }
                RunSpec spec = base;
                spec.alm.rho0 = rho0_values[i];
                spec.alm.rho_cap = rho0_values[i];
                // Rate measurement needs tolerance-tracking inner steps, a
                // deep trace, and an inexactness level scaled with rho so the
                // dual updates of different runs stay comparably local.
                spec.alm.stop_tol = std::min(spec.alm.stop_tol, 1e-13);
                spec.alm.eps0 = std::min(0.25, 2.5 / rho0_values[i]);
                spec.alm.inner.method = InnerMethod::fixed_gradient;
                spec.alm.inner.max_iters = 50000;
                spec.probes = {"rate"};
                if (!base.out_dir.empty()) {
                    std::ostringstream sub;
                    sub << "rho0_" << rho0_values[i] << "_" << i;
                    spec.out_dir = base.out_dir / sub.str();
                }
                const RunOutcome out = run(spec);
                SweepRow row;
                row.rho0 = rho0_values[i];
                row.status = to_string(out.result.status);
                const AlmTrace& tr = out.result.trace;
                row.iterations = tr.rows.empty() ? 0 : tr.rows.back().k;
                row.final_R = tr.rows.empty() ? 0.0 : tr.rows.back().R;
                try {
                    const MultiplierSetModel& model = find_multiplier_model(base.problem);
                    row.q_hat = estimate_q_rate(tr, &model).q_hat;
                } catch (const std::exception&) {
                    row.q_hat = std::numeric_limits<double>::quiet_NaN();
                }
                rows[i] = row;
            }
        });
    }
    for (std::thread& t : pool) t.join();

    SweepOutcome outcome;
    outcome.rows = rows;
    outcome.q_monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].q_hat <= rows[i - 1].q_hat + 1e-3)) outcome.q_monotone = false;

    std::ostringstream table;
    table << "rho0        q_hat          iters   final_R        status\n";
    for (const SweepRow& r : rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-11.6g %-14.8g %-7d %-14.6g %s\n", r.rho0, r.q_hat,
                      r.iterations, r.final_R, r.status.c_str());
        table << line;
    }
    table << (outcome.q_monotone ? "q_hat nonincreasing in rho0: yes\n"
                                 : "q_hat nonincreasing in rho0: NO\n");
    outcome.table_text = table.str();
    return outcome;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        const std::size_t b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const std::size_t e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

void apply_config(RunSpec& spec, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, val] : kv) {
        if (key == "problem")
            spec.problem = val;
        else if (key == "start")
            spec.start = val;
        else if (key == "rho0")
            spec.alm.rho0 = std::stod(val);
        else if (key == "varsigma")
            spec.alm.varsigma = std::stod(val);
        else if (key == "xi")
            spec.alm.xi = std::stod(val);
        else if (key == "eps0")
            spec.alm.eps0 = std::stod(val);
        else if (key == "eps_exponent")
            spec.alm.eps_exponent = std::stod(val);
        else if (key == "stop_tol")
            spec.alm.stop_tol = std::stod(val);
        else if (key == "max_outer")
            spec.alm.max_outer = std::stoi(val);
        else if (key == "rho_cap")
            spec.alm.rho_cap = std::stod(val);
        else if (key == "inner_method") {
            if (val == "qn")
                spec.alm.inner.method = InnerMethod::quasi_newton;
            else if (val == "gd")
                spec.alm.inner.method = InnerMethod::fixed_gradient;
            else
                throw std::invalid_argument("inner_method must be qn or gd");
        }
        else if (key == "seed")
            spec.seed = static_cast<unsigned>(std::stoul(val));
        else if (key == "out")
            spec.out_dir = val;
        else if (key == "probes") {
            std::stringstream ss(val);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) spec.probes.insert(tok);
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
}

std::string validate_report_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return "not valid JSON";
    const char* string_keys[] = {"problem", "status"};
    for (const char* k : string_keys)
        if (!j.contains(k) || !j[k].is_string()) return std::string("missing string key: ") + k;
    if (!j.contains("seed") || !j["seed"].is_number()) return "missing numeric key: seed";
    if (!j.contains("iterations") || !j["iterations"].is_number())
        return "missing numeric key: iterations";
    if (!j.contains("config") || !j["config"].is_object()) return "missing object key: config";
    for (const char* k : {"rho0", "varsigma", "xi", "eps0", "eps_exponent", "stop_tol"})
        if (!j["config"].contains(k) || !j["config"][k].is_number())
            return std::string("config missing numeric key: ") + k;
    if (!j.contains("final") || !j["final"].is_object()) return "missing object key: final";
    for (const char* k : {"x", "y", "gamma"})
        if (!j["final"].contains(k) || !j["final"][k].is_array())
            return std::string("final missing array key: ") + k;
    for (const char* k : {"R", "f"})
        if (!j["final"].contains(k) || !j["final"][k].is_number())
            return std::string("final missing numeric key: ") + k;
    if (!j.contains("eps_over_R") || !j["eps_over_R"].is_array())
        return "missing array key: eps_over_R";
    if (!j.contains("probes") || !j["probes"].is_object()) return "missing object key: probes";
    return "";
}

}  // namespace nlsdp
