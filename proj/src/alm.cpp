#include "nlsdp/alm.hpp"

#include <chrono>
#include <cmath>
#include <deque>

namespace nlsdp {

void AlmConfig::validate() const {
    if (rho0 <= 0.0) throw std::invalid_argument("rho0 must be positive");
    if (varsigma <= 1.0) throw std::invalid_argument("varsigma must exceed 1");
    if (xi <= 0.0 || xi >= 1.0) throw std::invalid_argument("xi must lie in (0,1)");
    if (eps0 <= 0.0) throw std::invalid_argument("eps0 must be positive");
    if (eps_exponent <= 1.0) throw std::invalid_argument("eps_exponent must exceed 1");
    if (max_outer <= 0) throw std::invalid_argument("max_outer must be positive");
    if (stop_tol < 0.0) throw std::invalid_argument("stop_tol must be nonnegative");
    if (rho_cap && *rho_cap < rho0) throw std::invalid_argument("rho_cap below rho0");
}

const char* to_string(AlmStatus s) {
    switch (s) {
        case AlmStatus::converged: return "converged";
        case AlmStatus::maxed: return "maxed";
        case AlmStatus::inner_failed: return "inner-failed";
    }
    return "unknown";
}

double aug_lagrangian_value(const NlsdpProblem& p, const Vec& x, const KElement& lambda,
                            double rho) {
    if (rho <= 0.0) throw std::invalid_argument("aug_lagrangian_value: rho must be positive");
    KElement shifted = phi(p, x);
    shifted += lambda * (1.0 / rho);
    const double d = dist_K(shifted);
    const double ln = lambda.norm();
    return p.f(x) + 0.5 * rho * d * d - ln * ln / (2.0 * rho);
}

namespace {

// rho * (Phi(x) + lambda/rho - Pi_K(Phi(x) + lambda/rho)); equals the new
// multiplier and drives the gradient of the augmented Lagrangian.
KElement penalized_residual(const NlsdpProblem& p, const Vec& x, const KElement& lambda,
                            double rho) {
    KElement shifted = phi(p, x);
    shifted += lambda * (1.0 / rho);
    KElement d = shifted - project_K(shifted);
    return d * rho;
}

}  // namespace

Vec aug_lagrangian_grad_x(const NlsdpProblem& p, const Vec& x, const KElement& lambda,
                          double rho) {
    if (rho <= 0.0) throw std::invalid_argument("aug_lagrangian_grad_x: rho must be positive");
    const KElement d = penalized_residual(p, x, lambda, rho);
    Vec g = p.grad_f(x);
    if (p.dim_h > 0) axpy(g, 1.0, p.jac_h_adjoint(x, d.vec));
    axpy(g, 1.0, p.dG_adjoint(x, d.mat));
    return g;
}

namespace {

Vec clamp_to_ball(const Vec& x_start, Vec x, double radius) {
    Vec off = x - x_start;
    const double dist = norm2(off);
    if (dist > radius) {
        x = x_start;
        axpy(x, radius / dist, off);
    }
    return x;
}

// Gradient descent with an adaptive curvature bound. Steps are accepted only
// when the gradient norm decreases, so the returned iterate satisfies the
// criterion without sailing far past it.
InnerResult inner_solve_fixed_gradient(const NlsdpProblem& p, const Vec& x_start,
                                       const KElement& lambda, double rho, double eps_k,
                                       const InnerConfig& cfg) {
    Vec x = x_start;
    Vec g = aug_lagrangian_grad_x(p, x, lambda, rho);
    double gnorm = norm2(g);
    if (gnorm <= eps_k) return InnerResult{x, gnorm, 0};
    double l_hat = std::max(1.0, rho);
    Vec best_x = x;
    double best_gnorm = gnorm;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        bool moved = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Vec x_new = x;
            axpy(x_new, -1.0 / l_hat, g);
            x_new = clamp_to_ball(x_start, std::move(x_new), cfg.ball_radius);
            const Vec g_new = aug_lagrangian_grad_x(p, x_new, lambda, rho);
            const double gn_new = norm2(g_new);
            const double step_len = norm2(x_new - x);
            if (step_len > 0.0) {
                const double curvature = norm2(g_new - g) / step_len;
                if (gn_new < gnorm) {
                    x = std::move(x_new);
                    g = g_new;
                    gnorm = gn_new;
                    l_hat = std::max(0.9 * l_hat, 1.5 * curvature);
                    moved = true;
                    break;
                }
                l_hat = std::max(2.0 * l_hat, 1.5 * curvature);
            } else {
                l_hat *= 2.0;
            }
        }
        if (!moved)
            throw InnerSolveFailure("inner solve: gradient step stalled", best_x, best_gnorm, it);
        if (gnorm < best_gnorm) {
            best_gnorm = gnorm;
            best_x = x;
        }
        if (gnorm <= eps_k) return InnerResult{x, gnorm, it};
    }
    throw InnerSolveFailure("inner solve: iteration cap reached", best_x, best_gnorm,
                            cfg.max_iters);
}

}  // namespace

InnerResult inner_solve(const NlsdpProblem& p, const Vec& x_start, const KElement& lambda,
                        double rho, double eps_k, const InnerConfig& cfg) {
    if (eps_k <= 0.0) throw std::invalid_argument("inner_solve: eps_k must be positive");
    if (cfg.method == InnerMethod::fixed_gradient)
        return inner_solve_fixed_gradient(p, x_start, lambda, rho, eps_k, cfg);
    Vec x = x_start;
    Vec g = aug_lagrangian_grad_x(p, x, lambda, rho);
    double gnorm = norm2(g);
    Vec best_x = x;
    double best_gnorm = gnorm;
    if (gnorm <= eps_k) return InnerResult{x, gnorm, 0};

    double fval = aug_lagrangian_value(p, x, lambda, rho);
    std::deque<Vec> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int it = 1; it <= cfg.max_iters; ++it) {
        // Two-loop recursion.
        Vec d = g;
        for (double& v : d) v = -v;
        std::vector<double> alpha(s_hist.size(), 0.0);
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * dot(s_hist[i], d);
            axpy(d, -alpha[i], y_hist[i]);
        }
        if (!s_hist.empty()) {
            const double gamma =
                dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double& v : d) v *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * dot(y_hist[i], d);
            axpy(d, alpha[i] - beta, s_hist[i]);
        }
        double dir_deriv = dot(g, d);
        if (!(dir_deriv < -1e-14 * norm2(d) * gnorm)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = g;
            for (double& v : d) v = -v;
            dir_deriv = -gnorm * gnorm;
        }

        double step = 1.0;
        Vec x_new;
        double f_new = 0.0;
        bool accepted = false;
        // Rounding allowance keeps the test meaningful once f-differences
        // sit at machine scale while the gradient is still informative. The
        // value is a cancellation of terms up to |lambda|^2/(2 rho), so the
        // allowance scales with those magnitudes.
        const double lam_sq = lambda.norm() * lambda.norm();
        const double f_noise = 1e-12 * (1.0 + std::fabs(fval) + lam_sq / (2.0 * rho));
        for (int bt = 0; bt < 60; ++bt) {
            x_new = x;
            axpy(x_new, step, d);
            // Localize to the trust ball around the warm start.
            x_new = clamp_to_ball(x_start, std::move(x_new), cfg.ball_radius);
            f_new = aug_lagrangian_value(p, x_new, lambda, rho);
            if (f_new <= fval + cfg.armijo_c1 * step * dir_deriv + f_noise) {
                accepted = true;
                break;
            }
            step *= cfg.backtrack;
        }
        if (!accepted || x_new == x) {
            // No measurable progress left at this precision.
            throw InnerSolveFailure("inner solve: line search stalled", best_x, best_gnorm, it);
        }

        Vec g_new = aug_lagrangian_grad_x(p, x_new, lambda, rho);
        Vec s = x_new - x;
        Vec yv = g_new - g;
        const double sy = dot(s, yv);
        if (sy > 1e-10 * norm2(s) * norm2(yv)) {
            s_hist.push_back(s);
            y_hist.push_back(yv);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > cfg.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = std::move(x_new);
        g = std::move(g_new);
        fval = f_new;
        gnorm = norm2(g);
        if (gnorm < best_gnorm) {
            best_gnorm = gnorm;
            best_x = x;
        }
        if (gnorm <= eps_k) return InnerResult{x, gnorm, it};
    }
    throw InnerSolveFailure("inner solve: iteration cap reached", best_x, best_gnorm,
                            cfg.max_iters);
}

KElement multiplier_update(const NlsdpProblem& p, const Vec& x_new, const KElement& lambda,
                           double rho) {
    return penalized_residual(p, x_new, lambda, rho);
}

KElement multiplier_slack(const NlsdpProblem& p, const Vec& x_new, const KElement& lambda,
                          double rho) {
    KElement shifted = phi(p, x_new);
    shifted += lambda * (1.0 / rho);
    return project_K(shifted);
}

double v_function(const NlsdpProblem& p, const Vec& x, const KElement& lambda_prev, double rho) {
    const double g = norm2(aug_lagrangian_grad_x(p, x, lambda_prev, rho));
    KElement shifted = phi(p, x);
    shifted += lambda_prev * (1.0 / rho);
    const KElement res = phi(p, x) - project_K(shifted);
    return g + res.norm();
}

double penalty_update(double v_now, std::optional<double> v_prev, double rho,
                      const AlmConfig& cfg) {
    double next = rho;
    if (v_prev && !(v_now <= cfg.xi * *v_prev)) next = cfg.varsigma * rho;
    if (cfg.rho_cap) next = std::min(next, *cfg.rho_cap);
    return next;
}

namespace {

double complementarity_violation(const KElement& slack, const KElement& lambda_new) {
    const EigenDecomposition e = eig_sym(lambda_new.mat, 0.0);
    const double nsd_viol = std::max(e.lambda.front(), 0.0);
    const double ip = std::fabs(frobenius_inner(slack.mat, lambda_new.mat));
    const double scale = std::max(1.0, slack.mat.norm() * lambda_new.mat.norm());
    return std::max(nsd_viol, ip / scale);
}

}  // namespace

AlmResult alm_solve(const NlsdpProblem& p, const KktPoint& start, const AlmConfig& cfg,
                    const MultiplierSetModel* model) {
    cfg.validate();
    if (!all_finite(start.x) || !all_finite(start.y) || !start.gamma.is_finite())
        throw std::invalid_argument("alm_solve: start point must be finite");

    const auto t0 = std::chrono::steady_clock::now();
    auto seconds = [&t0]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    AlmResult result;
    Vec x = start.x;
    KElement lambda(start.y, start.gamma);
    double rho = cfg.rho0;
    std::optional<double> v_prev;

    for (int k = 0; k <= cfg.max_outer; ++k) {
        AlmIterate row;
        row.k = k;
        row.x = x;
        row.lambda = lambda;
        row.rho = rho;
        row.f = p.f(x);
        const KktPoint pt{x, lambda.vec, lambda.mat};
        row.R = residual_R(p, pt);
        if (model) {
            row.dist_x = norm2(x - model->x_opt);
            row.dist_lambda = model->distance(lambda);
        }
        // R is evaluated at (x^k, lambda^k) before the inner solve.
        if (row.R <= cfg.stop_tol) {
            row.wall_seconds = seconds();
            result.trace.rows.push_back(std::move(row));
            result.point = pt;
            result.status = AlmStatus::converged;
            return result;
        }
        if (k == cfg.max_outer) {
            row.wall_seconds = seconds();
            result.trace.rows.push_back(std::move(row));
            result.point = pt;
            result.status = AlmStatus::maxed;
            return result;
        }

        const double eps_k = std::max(
            std::min(cfg.eps0 * std::pow(2.0, -k), std::pow(row.R, cfg.eps_exponent)),
            cfg.eps_floor);
        row.eps = eps_k;

        InnerResult inner;
        try {
            inner = inner_solve(p, x, lambda, rho, eps_k, cfg.inner);
        } catch (const InnerSolveFailure& fail) {
            row.inner_iters = fail.iterations;
            row.grad_norm = fail.achieved_norm;
            row.wall_seconds = seconds();
            result.trace.rows.push_back(std::move(row));
            result.point = KktPoint{fail.best_x, lambda.vec, lambda.mat};
            result.status = AlmStatus::inner_failed;
            return result;
        }
        row.inner_iters = inner.iters;
        row.grad_norm = inner.achieved_norm;

        const KElement lambda_new = multiplier_update(p, inner.x, lambda, rho);
        const KElement slack = multiplier_slack(p, inner.x, lambda, rho);
        row.comp_viol = complementarity_violation(slack, lambda_new);
        const double v_now = v_function(p, inner.x, lambda, rho);
        row.V = v_now;
        const double rho_next = penalty_update(v_now, v_prev, rho, cfg);
        v_prev = v_now;

        row.wall_seconds = seconds();
        result.trace.rows.push_back(std::move(row));

        x = inner.x;
        lambda = lambda_new;
        rho = rho_next;
    }
    return result;  // unreachable
}

}  // namespace nlsdp
