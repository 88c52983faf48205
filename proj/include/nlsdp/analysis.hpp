#pragma once

#include "nlsdp/alm.hpp"
#include "nlsdp/varanalysis.hpp"

namespace nlsdp {

struct RateReport {
    Vec target_x;
    KElement target_lambda;
    bool target_from_model = false;  // false: final-iterate proxy
    std::vector<double> ratios;      // per-step contraction of the distance to the target
    double q_hat = 0.0;              // geometric fit over the tail
    bool reliable = false;           // tail fit used >= 4 points
    std::vector<double> tau_bound_series;
    double kappa1_used = 1.0;
    double kappa2_hat = 0.0;
    double zeta_hat = 0.0;
};

/// Contraction ratios and a geometric tail fit against the limit point
/// (model projection of the final dual if a model is supplied, otherwise the
/// final iterate itself). kappa1 feeds the diagnostic tau^k series.
RateReport estimate_q_rate(const AlmTrace& trace, const MultiplierSetModel* model,
                           double kappa1 = 1.0);

struct ErrorBoundSeries {
    std::vector<int> ks;
    std::vector<double> ratios;       // (|x^{k+1}-x^k| + |l^{k+1}-l^k|) / R_k
    std::vector<double> running_max;
    double kappa3_hat = 0.0;          // max over the trailing window
};

ErrorBoundSeries error_bound_monitor(const NlsdpProblem& p, const AlmTrace& trace,
                                     int kappa3_window = 0);

struct CalmnessSample {
    double perturbation_norm = 0.0;
    double deviation = 0.0;  // |x - x_opt| + dist(lambda, M)
    double ratio = 0.0;
    bool solved = false;
};

struct CalmnessReport {
    std::vector<CalmnessSample> samples;
    double kappa_hat = 0.0;
    double radius = 0.0;
    int failures = 0;
    unsigned seed = 0;
};

/// Samples canonical perturbations in a ball, re-solves the KKT system for
/// each (damped Newton on a smoothed reformulation, ALM fallback) and
/// reports deviation/perturbation ratios.
CalmnessReport calmness_probe(const NlsdpProblem& p, const KktPoint& base,
                              const MultiplierSetModel& model, double radius, int count,
                              unsigned seed);

/// Warm-started solve of the perturbed KKT system. Returns false if neither
/// the Newton path nor the ALM fallback reached the residual target.
bool solve_perturbed_kkt(const NlsdpProblem& p, const KktPoint& base, const Perturbation& pert,
                         KktPoint& out);

struct GrowthReport {
    double min_ratio = 0.0;        // min (L(x,l,rho) - f(x_opt)) / |x-x_opt|^2 at `radius`
    double min_ratio_half = 0.0;   // same at radius/2
    bool positive = false;
    bool stable = false;  // the two minima within a factor of 10
    double rho = 0.0;
    double radius = 0.0;
};

GrowthReport quadratic_growth_probe(const NlsdpProblem& p, const Vec& x_opt,
                                    const MultiplierSetModel& model, double rho, double radius,
                                    int count, unsigned seed);

struct Assumption1Report {
    std::vector<double> ratios;  // |proj_M(lambda) - lambda_hat| / R(x, lambda)
    double max_ratio = 0.0;
    int samples = 0;
};

Assumption1Report assumption1_probe(const NlsdpProblem& p, const Vec& x_opt,
                                    const KElement& lambda_bar, const MultiplierSetModel& model,
                                    int count, unsigned seed, double radius = 1e-3);

}  // namespace nlsdp
