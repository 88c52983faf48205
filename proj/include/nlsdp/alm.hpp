#pragma once

#include <limits>
#include <optional>
#include <stdexcept>

#include "nlsdp/problem.hpp"

namespace nlsdp {

/// quasi_newton: limited-memory secant with Armijo backtracking (default).
/// fixed_gradient: adaptively damped gradient steps whose achieved gradient
/// norm tracks the requested tolerance instead of undershooting it by
/// orders; used by the rate-measurement experiments, where the contraction
/// per outer iteration must reflect the eps_k schedule.
enum class InnerMethod { quasi_newton, fixed_gradient };

struct InnerConfig {
    InnerMethod method = InnerMethod::quasi_newton;
    int max_iters = 2000;
    double ball_radius = 1.0;
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int memory = 8;
};

struct AlmConfig {
    double rho0 = 10.0;
    double varsigma = 10.0;  // penalty growth factor, > 1
    double xi = 0.5;         // V-test ratio, in (0,1)
    double eps0 = 0.1;
    double eps_exponent = 1.5;  // > 1 so that eps_k = o(R_k)
    double eps_floor = 1e-14;   // keeps the criterion above evaluation noise
    int max_outer = 100;
    double stop_tol = 1e-10;
    std::optional<double> rho_cap;
    InnerConfig inner;

    void validate() const;
};

enum class AlmStatus { converged, maxed, inner_failed };

const char* to_string(AlmStatus s);

struct AlmIterate {
    int k = 0;
    Vec x;
    KElement lambda;
    double rho = 0.0;
    double R = 0.0;
    double eps = 0.0;
    int inner_iters = 0;
    double grad_norm = 0.0;  // achieved inner gradient norm
    double V = 0.0;
    double comp_viol = 0.0;  // complementarity violation of the new dual pair
    double f = 0.0;
    double wall_seconds = 0.0;
    double dist_x = std::numeric_limits<double>::quiet_NaN();
    double dist_lambda = std::numeric_limits<double>::quiet_NaN();
};

struct AlmTrace {
    std::vector<AlmIterate> rows;
};

struct AlmResult {
    KktPoint point;
    AlmTrace trace;
    AlmStatus status = AlmStatus::maxed;
};

class InnerSolveFailure : public std::runtime_error {
public:
    InnerSolveFailure(std::string msg, Vec best, double achieved, int iters)
        : std::runtime_error(std::move(msg)),
          best_x(std::move(best)),
          achieved_norm(achieved),
          iterations(iters) {}

    Vec best_x;
    double achieved_norm;
    int iterations;
};

struct InnerResult {
    Vec x;
    double achieved_norm = 0.0;
    int iters = 0;
};

double aug_lagrangian_value(const NlsdpProblem& p, const Vec& x, const KElement& lambda,
                            double rho);
Vec aug_lagrangian_grad_x(const NlsdpProblem& p, const Vec& x, const KElement& lambda, double rho);

/// Limited-memory quasi-Newton minimization of the augmented Lagrangian with
/// Armijo backtracking, stopped at |grad| <= eps_k, localized to the ball
/// around x_start. Throws InnerSolveFailure at the iteration cap.
InnerResult inner_solve(const NlsdpProblem& p, const Vec& x_start, const KElement& lambda,
                        double rho, double eps_k, const InnerConfig& cfg);

KElement multiplier_update(const NlsdpProblem& p, const Vec& x_new, const KElement& lambda,
                           double rho);

/// Slack s = Pi_K(Phi(x) + lambda/rho) paired with the updated multiplier.
KElement multiplier_slack(const NlsdpProblem& p, const Vec& x_new, const KElement& lambda,
                          double rho);

double v_function(const NlsdpProblem& p, const Vec& x, const KElement& lambda_prev, double rho);

/// rho stays put on the first iteration or while V decreases by the factor
/// xi; otherwise it grows by varsigma (clamped at rho_cap when set).
double penalty_update(double v_now, std::optional<double> v_prev, double rho,
                      const AlmConfig& cfg);

AlmResult alm_solve(const NlsdpProblem& p, const KktPoint& start, const AlmConfig& cfg,
                    const MultiplierSetModel* model = nullptr);

}  // namespace nlsdp
