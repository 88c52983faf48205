#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlsdp/analysis.hpp"
#include "test_util.hpp"

using namespace nlsdp;

namespace {

AlmTrace synthetic_geometric_trace(double ratio, int count) {
    AlmTrace trace;
    Vec x_hat{0.25};
    SymMatrix g_hat = SymMatrix::diag({0.0, -1.0, -2.0});
    Vec dx{1.0};
    SymMatrix dg(3);
    dg.set(0, 1, 0.5);
    dg.set(2, 2, -0.25);
    for (int k = 0; k <= count + 1; ++k) {
        AlmIterate row;
        row.k = k;
        const double w = (k <= count) ? std::pow(ratio, k) : 0.0;  // exact limit last
        row.x = Vec{x_hat[0] + w * dx[0]};
        row.lambda = KElement(Vec{}, g_hat + dg * w);
        row.rho = 10.0;
        row.R = w;
        row.eps = 0.5 * w * w;
        trace.rows.push_back(row);
    }
    return trace;
}

}  // namespace

TEST_CASE("estimate_q_rate recovers a synthetic geometric ratio") {
    const AlmTrace trace = synthetic_geometric_trace(0.3, 12);
    const RateReport rep = estimate_q_rate(trace, nullptr);
    CHECK(rep.reliable);
    CHECK(std::fabs(rep.q_hat - 0.3) <= 1e-3);
    for (double r : rep.ratios) CHECK(r == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(rep.tau_bound_series.size() == trace.rows.size() - 1);

    AlmTrace tiny;
    tiny.rows.assign(trace.rows.begin(), trace.rows.begin() + 4);
    CHECK_THROWS_AS(estimate_q_rate(tiny, nullptr), std::invalid_argument);
}

TEST_CASE("error_bound_monitor") {
    const NlsdpProblem& p = find_problem("example-6.1");

    // Stationary synthetic trace: ratios identically zero.
    AlmTrace flat;
    for (int k = 0; k < 5; ++k) {
        AlmIterate row;
        row.k = k;
        row.x = Vec{0.5};
        row.lambda = KElement(Vec{}, SymMatrix::diag({0.0, -1.0, -2.0}));
        row.R = 1.0;
        flat.rows.push_back(row);
    }
    const ErrorBoundSeries zero = error_bound_monitor(p, flat, 0);
    for (double r : zero.ratios) CHECK(r == doctest::Approx(0.0));

    // Converged run: ratios finite.
    const MultiplierSetModel& model = find_multiplier_model("example-6.1");
    AlmConfig cfg;
    const AlmResult run = alm_solve(p, default_start("example-6.1"), cfg, &model);
    REQUIRE(run.status == AlmStatus::converged);
    const ErrorBoundSeries eb = error_bound_monitor(p, run.trace, 0);
    CHECK(!eb.ratios.empty());
    for (double r : eb.ratios) CHECK(std::isfinite(r));
    CHECK(eb.kappa3_hat > 0.0);
}

TEST_CASE("solve_perturbed_kkt at zero perturbation returns the base point") {
    for (const std::string& name : problem_names()) {
        const NlsdpProblem& p = find_problem(name);
        const MultiplierSetModel& m = find_multiplier_model(name);
        const KktPoint base{m.x_opt, m.lambda_ref.vec, m.lambda_ref.mat};
        KktPoint out;
        REQUIRE(solve_perturbed_kkt(p, base, Perturbation::zero(p), out));
        CHECK(norm2(out.x - m.x_opt) <= 1e-7);
        CHECK(perturbed_kkt_residual(p, out, Perturbation::zero(p)) <= 1e-8);
    }
}

TEST_CASE("calmness_probe smoke on example 6.1") {
    const NlsdpProblem& p = find_problem("example-6.1");
    const MultiplierSetModel& m = find_multiplier_model("example-6.1");
    const KktPoint base{m.x_opt, m.lambda_ref.vec, m.lambda_ref.mat};
    const CalmnessReport rep = calmness_probe(p, base, m, 1e-3, 20, 7);
    CHECK(rep.samples.size() == 20);
    int solved = 0;
    for (const CalmnessSample& s : rep.samples)
        if (s.solved) {
            ++solved;
            CHECK(std::isfinite(s.ratio));
        }
    CHECK(solved > 0);
    CHECK(std::isfinite(rep.kappa_hat));

    // Probe requires a KKT base point.
    const KktPoint off{Vec{0.5}, Vec{}, m.lambda_ref.mat};
    CHECK_THROWS_AS(calmness_probe(p, off, m, 1e-3, 5, 7), std::invalid_argument);
}

TEST_CASE("quadratic_growth_probe on example 6.1") {
    const NlsdpProblem& p = find_problem("example-6.1");
    const MultiplierSetModel& m = find_multiplier_model("example-6.1");
    const GrowthReport g10 = quadratic_growth_probe(p, m.x_opt, m, 10.0, 1e-2, 40, 11);
    CHECK(g10.positive);
    CHECK(g10.min_ratio > 0.0);
    // Monotone in rho with identical samples.
    const GrowthReport g100 = quadratic_growth_probe(p, m.x_opt, m, 100.0, 1e-2, 40, 11);
    CHECK(g100.min_ratio >= g10.min_ratio - 1e-12);
}

TEST_CASE("assumption1_probe on both fixtures") {
    for (const std::string& name : problem_names()) {
        const NlsdpProblem& p = find_problem(name);
        const MultiplierSetModel& m = find_multiplier_model(name);
        const Assumption1Report rep =
            assumption1_probe(p, m.x_opt, m.lambda_ref, m, 40, 13);
        CHECK(rep.samples > 0);
        CHECK(std::isfinite(rep.max_ratio));
        // The hat construction collapses the ratio on these fixtures.
        CHECK(rep.max_ratio <= 1.0);
    }

    // lambda inside M: the restricted projection returns the projection.
    const MultiplierSetModel& m61 = find_multiplier_model("example-6.1");
    const KElement inside(Vec{}, SymMatrix::diag({-0.2, -1.0, -2.0}));
    CHECK((m61.project(inside) - m61.project_pi_restricted(inside)).norm() <= 1e-10);
}
