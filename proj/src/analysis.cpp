#include "nlsdp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nlsdp {

namespace {

double pair_distance(const Vec& x, const KElement& lambda, const Vec& tx, const KElement& tl) {
    const double dx = norm2(x - tx);
    const double dl = (lambda - tl).norm();
    return std::sqrt(dx * dx + dl * dl);
}

}  // namespace

RateReport estimate_q_rate(const AlmTrace& trace, const MultiplierSetModel* model, double kappa1) {
    const std::vector<AlmIterate>& rows = trace.rows;
    if (rows.size() < 6) throw std::invalid_argument("estimate_q_rate: trace too short");

    RateReport rep;
    rep.kappa1_used = kappa1;
    rep.target_x = rows.back().x;
    if (model) {
        rep.target_lambda = model->project(rows.back().lambda);
        rep.target_from_model = true;
    } else {
        rep.target_lambda = rows.back().lambda;
    }

    std::vector<double> dist(rows.size());
    const double scale = 1.0 + norm2(rep.target_x) + rep.target_lambda.norm();
    for (std::size_t k = 0; k < rows.size(); ++k)
        dist[k] = pair_distance(rows[k].x, rows[k].lambda, rep.target_x, rep.target_lambda);

    std::vector<std::size_t> valid;
    for (std::size_t k = 0; k < rows.size(); ++k)
        if (dist[k] > 1e-13 * scale) valid.push_back(k);
    for (std::size_t i = 0; i + 1 < valid.size(); ++i)
        if (valid[i + 1] == valid[i] + 1) rep.ratios.push_back(dist[valid[i + 1]] / dist[valid[i]]);

    // Geometric tail fit: least squares of log(dist) against k over the last
    // (up to 8) valid points.
    const std::size_t tail = std::min<std::size_t>(valid.size(), 8);
    if (tail >= 4) {
        double sk = 0.0, sv = 0.0, skk = 0.0, skv = 0.0;
        for (std::size_t i = valid.size() - tail; i < valid.size(); ++i) {
            const double kk = static_cast<double>(valid[i]);
            const double vv = std::log(dist[valid[i]]);
            sk += kk;
            sv += vv;
            skk += kk * kk;
            skv += kk * vv;
        }
        const double nfit = static_cast<double>(tail);
        const double slope = (nfit * skv - sk * sv) / (nfit * skk - sk * sk);
        rep.q_hat = std::exp(slope);
        rep.reliable = true;
    } else if (!rep.ratios.empty()) {
        rep.q_hat = rep.ratios.back();
        rep.reliable = false;
    }

    // Empirical constants for the diagnostic tau^k series.
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        if (rows[k].R <= 0.0) continue;
        const double step = norm2(rows[k + 1].x - rows[k].x) +
                            (rows[k + 1].lambda - rows[k].lambda).norm();
        rep.zeta_hat = std::max(rep.zeta_hat, step / rows[k].R);
        double dev = norm2(rows[k].x - rep.target_x);
        dev += model ? model->distance(rows[k].lambda)
                     : (rows[k].lambda - rep.target_lambda).norm();
        if (dev > 1e-13 * scale) rep.kappa2_hat = std::max(rep.kappa2_hat, rows[k].R / dev);
    }
    const double front = 2.0 * std::sqrt(2.0) * rep.zeta_hat * kappa1 * rep.kappa2_hat *
                         rep.kappa2_hat;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        if (rows[k].R <= 0.0) {
            rep.tau_bound_series.push_back(0.0);
            continue;
        }
        rep.tau_bound_series.push_back(
            front * (rows[k].eps / rows[k].R + rep.zeta_hat / rows[k].rho));
    }
    return rep;
}

ErrorBoundSeries error_bound_monitor(const NlsdpProblem&, const AlmTrace& trace,
                                     int kappa3_window) {
    ErrorBoundSeries series;
    const std::vector<AlmIterate>& rows = trace.rows;
    double running = 0.0;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        if (rows[k].R <= 0.0) continue;  // degenerate entries skipped
        const double step = norm2(rows[k + 1].x - rows[k].x) +
                            (rows[k + 1].lambda - rows[k].lambda).norm();
        series.ks.push_back(rows[k].k);
        series.ratios.push_back(step / rows[k].R);
        running = std::max(running, series.ratios.back());
        series.running_max.push_back(running);
    }
    if (!series.ratios.empty()) {
        std::size_t from = 0;
        if (kappa3_window > 0 && series.ratios.size() > static_cast<std::size_t>(kappa3_window))
            from = series.ratios.size() - static_cast<std::size_t>(kappa3_window);
        for (std::size_t i = from; i < series.ratios.size(); ++i)
            series.kappa3_hat = std::max(series.kappa3_hat, series.ratios[i]);
    }
    return series;
}

namespace {

// Smoothed PSD projection: eigenvalue map (t + sqrt(t^2 + 4 mu^2)) / 2.
SymMatrix smoothed_psd(const EigenDecomposition& e, double mu) {
    Vec vals(e.lambda);
    for (double& v : vals) v = 0.5 * (v + std::sqrt(v * v + 4.0 * mu * mu));
    return reconstruct(e, vals);
}

// Derivative of the smoothed projection along H via the divided-difference
// (Loewner) formula.
SymMatrix smoothed_psd_deriv(const EigenDecomposition& e, double mu, const SymMatrix& h) {
    const int n = e.n;
    auto phi = [mu](double t) { return 0.5 * (t + std::sqrt(t * t + 4.0 * mu * mu)); };
    auto dphi = [mu](double t) { return 0.5 * (1.0 + t / std::sqrt(t * t + 4.0 * mu * mu)); };
    const SymMatrix ht = to_eigenbasis(e, h);
    SymMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double li = e.lambda[i], lj = e.lambda[j];
            const double w = (std::fabs(li - lj) > 1e-14 * (1.0 + std::fabs(li) + std::fabs(lj)))
                                 ? (phi(li) - phi(lj)) / (li - lj)
                                 : dphi(0.5 * (li + lj));
            out.set(i, j, w * ht(i, j));
        }
    return from_eigenbasis(e, out);
}

struct KktNewtonSystem {
    const NlsdpProblem* p;
    Perturbation pert;
    double mu;

    int dim() const { return p->dim_x + p->dim_h + p->dim_g * (p->dim_g + 1) / 2; }

    Vec pack(const KktPoint& pt) const {
        Vec z = pt.x;
        z.insert(z.end(), pt.y.begin(), pt.y.end());
        const Vec gc = sym_to_coords(pt.gamma);
        z.insert(z.end(), gc.begin(), gc.end());
        return z;
    }
    KktPoint unpack(const Vec& z) const {
        KktPoint pt;
        pt.x.assign(z.begin(), z.begin() + p->dim_x);
        pt.y.assign(z.begin() + p->dim_x, z.begin() + p->dim_x + p->dim_h);
        Vec gc(z.begin() + p->dim_x + p->dim_h, z.end());
        pt.gamma = coords_to_sym(p->dim_g, gc);
        return pt;
    }

    Vec residual(const KktPoint& pt) const {
        Vec r = lagrangian_grad_x(*p, pt);
        for (int i = 0; i < p->dim_x; ++i) r[i] -= pert.a1[i];
        if (p->dim_h > 0) {
            const Vec hv = p->h(pt.x) - pert.a2;
            r.insert(r.end(), hv.begin(), hv.end());
        }
        const SymMatrix gb = p->G(pt.x) - pert.b;
        const SymMatrix m = gb + pt.gamma;
        const EigenDecomposition em = eig_sym(m);
        const SymMatrix f3 = gb - smoothed_psd(em, mu);
        const Vec f3c = sym_to_coords(f3);
        r.insert(r.end(), f3c.begin(), f3c.end());
        return r;
    }

    // Dense Jacobian, row-major dim x dim, by columns over coordinate
    // directions of (x, y, Gamma).
    std::vector<double> jacobian(const KktPoint& pt) const {
        const int nx = p->dim_x, nh = p->dim_h, ng = p->dim_g;
        const int nmat = ng * (ng + 1) / 2;
        const int n = dim();
        const SymMatrix gb = p->G(pt.x) - pert.b;
        const EigenDecomposition em = eig_sym(gb + pt.gamma);
        std::vector<double> jac(static_cast<std::size_t>(n) * n, 0.0);
        auto set_col = [&](int col, const Vec& vals) {
            for (int r = 0; r < n; ++r) jac[static_cast<std::size_t>(r) * n + col] = vals[r];
        };
        for (int c = 0; c < nx; ++c) {
            Vec d(nx, 0.0);
            d[c] = 1.0;
            Vec col = p->hess_lagrangian(pt.x, pt.y, pt.gamma, d);
            if (nh > 0) {
                const Vec hd = p->jac_h(pt.x, d);
                col.insert(col.end(), hd.begin(), hd.end());
            }
            const SymMatrix gd = p->dG(pt.x, d);
            const SymMatrix f3d = gd - smoothed_psd_deriv(em, mu, gd);
            const Vec f3c = sym_to_coords(f3d);
            col.insert(col.end(), f3c.begin(), f3c.end());
            set_col(c, col);
        }
        for (int c = 0; c < nh; ++c) {
            Vec ey(nh, 0.0);
            ey[c] = 1.0;
            Vec col = p->jac_h_adjoint(pt.x, ey);
            col.resize(n, 0.0);
            set_col(nx + c, col);
        }
        for (int c = 0; c < nmat; ++c) {
            Vec gc(nmat, 0.0);
            gc[c] = 1.0;
            const SymMatrix eg = coords_to_sym(ng, gc);
            Vec col = p->dG_adjoint(pt.x, eg);
            col.resize(static_cast<std::size_t>(nx) + nh, 0.0);
            const SymMatrix f3d = smoothed_psd_deriv(em, mu, eg) * -1.0;
            const Vec f3c = sym_to_coords(f3d);
            col.insert(col.end(), f3c.begin(), f3c.end());
            set_col(nx + nh + c, col);
        }
        return jac;
    }
};

// Levenberg-style damped Newton on the smoothed system with smoothing
// continuation. Budget shared across the continuation stages.
bool newton_kkt(const NlsdpProblem& p, const Perturbation& pert, KktPoint& pt, int max_steps) {
    int budget = max_steps;
    for (double mu : {1e-4, 1e-6, 1e-8, 1e-11}) {
        KktNewtonSystem sys{&p, pert, mu};
        const int n = sys.dim();
        Vec z = sys.pack(pt);
        Vec f = sys.residual(pt);
        double fn = norm2(f);
        double nu = 1e-10;
        while (budget > 0 && fn > 1e-12 * (1.0 + pert.norm())) {
            --budget;
            const std::vector<double> jac = sys.jacobian(sys.unpack(z));
            // Normal equations with Levenberg damping.
            std::vector<double> jtj(static_cast<std::size_t>(n) * n, 0.0);
            Vec jtf(n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int r = 0; r < n; ++r)
                        s += jac[static_cast<std::size_t>(r) * n + i] *
                             jac[static_cast<std::size_t>(r) * n + j];
                    jtj[static_cast<std::size_t>(i) * n + j] = s;
                }
            double trace = 0.0;
            for (int i = 0; i < n; ++i) trace += jtj[static_cast<std::size_t>(i) * n + i];
            for (int i = 0; i < n; ++i)
                jtj[static_cast<std::size_t>(i) * n + i] += nu * std::max(trace / n, 1e-12);
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int r = 0; r < n; ++r)
                    s += jac[static_cast<std::size_t>(r) * n + i] * f[r];
                jtf[i] = -s;
            }
            Vec step;
            if (!solve_dense(jtj, jtf, n, step)) return false;
            bool improved = false;
            double t = 1.0;
            for (int bt = 0; bt < 25; ++bt) {
                Vec z_new = z;
                axpy(z_new, t, step);
                const Vec f_new = sys.residual(sys.unpack(z_new));
                const double fn_new = norm2(f_new);
                if (fn_new < (1.0 - 1e-4 * t) * fn) {
                    z = std::move(z_new);
                    f = f_new;
                    fn = fn_new;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if (improved) {
                nu = std::max(nu * 0.25, 1e-12);
            } else {
                nu *= 16.0;
                if (nu > 1e8) break;  // stalled at this smoothing level
            }
        }
        pt = sys.unpack(z);
    }
    return perturbed_kkt_residual(p, pt, pert) <= 1e-8 * (1.0 + pert.norm());
}

}  // namespace

bool solve_perturbed_kkt(const NlsdpProblem& p, const KktPoint& base, const Perturbation& pert,
                         KktPoint& out) {
    out = base;
    if (newton_kkt(p, pert, out, 50)) return true;
    // ALM fallback on the perturbed problem.
    const NlsdpProblem q = perturbed_problem(p, pert);
    AlmConfig cfg;
    cfg.stop_tol = 1e-10;
    cfg.max_outer = 40;
    const AlmResult res = alm_solve(q, base, cfg);
    if (res.status != AlmStatus::converged) return false;
    out = res.point;
    return perturbed_kkt_residual(p, out, pert) <= 1e-8 * (1.0 + pert.norm());
}

CalmnessReport calmness_probe(const NlsdpProblem& p, const KktPoint& base,
                              const MultiplierSetModel& model, double radius, int count,
                              unsigned seed) {
    if (residual_R(p, base) > 1e-8)
        throw std::invalid_argument("calmness_probe: base point is not KKT to tolerance");
    CalmnessReport report;
    report.radius = radius;
    report.seed = seed;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int pdim = p.dim_x + p.dim_h + p.dim_g * (p.dim_g + 1) / 2;

    for (int s = 0; s < count; ++s) {
        // Uniform direction in the product space, radius scaled for a
        // uniform draw from the ball.
        Vec dir(pdim);
        for (double& v : dir) v = gauss(rng);
        const double dn = norm2(dir);
        const double r = radius * std::pow(unif(rng), 1.0 / pdim);
        Perturbation pert = Perturbation::zero(p);
        if (dn > 0.0) {
            std::size_t idx = 0;
            for (int i = 0; i < p.dim_x; ++i) pert.a1[i] = r * dir[idx++] / dn;
            for (int i = 0; i < p.dim_h; ++i) pert.a2[i] = r * dir[idx++] / dn;
            Vec mc(dir.begin() + idx, dir.end());
            pert.b = coords_to_sym(p.dim_g, mc) * (r / dn);
        }
        CalmnessSample sample;
        sample.perturbation_norm = pert.norm();
        KktPoint sol;
        if (solve_perturbed_kkt(p, base, pert, sol)) {
            sample.solved = true;
            sample.deviation = norm2(sol.x - model.x_opt) + model.distance(sol.lambda());
            sample.ratio =
                sample.perturbation_norm > 0.0 ? sample.deviation / sample.perturbation_norm : 0.0;
            report.kappa_hat = std::max(report.kappa_hat, sample.ratio);
        } else {
            ++report.failures;
        }
        report.samples.push_back(sample);
    }
    return report;
}

GrowthReport quadratic_growth_probe(const NlsdpProblem& p, const Vec& x_opt,
                                    const MultiplierSetModel& model, double rho, double radius,
                                    int count, unsigned seed) {
    GrowthReport report;
    report.rho = rho;
    report.radius = radius;
    const double f_opt = p.f(x_opt);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    auto min_ratio_at = [&](double rad) {
        double worst = std::numeric_limits<double>::infinity();
        for (int s = 0; s < count; ++s) {
            Vec dx(p.dim_x);
            for (double& v : dx) v = gauss(rng);
            const double dn = norm2(dx);
            if (dn == 0.0) continue;
            // Keep |x - x_opt| bounded away from zero: the ratio is
            // undefined at x_opt itself.
            const double r = rad * (0.05 + 0.95 * unif(rng));
            Vec x = x_opt;
            axpy(x, r / dn, dx);
            // Multiplier sampled in M near the reference via an NSD
            // perturbation pushed through the exact projection.
            SymMatrix pert(p.dim_g);
            for (int i = 0; i < p.dim_g; ++i)
                for (int j = i; j < p.dim_g; ++j) pert.set(i, j, gauss(rng));
            const SymMatrix nsd = project_nsd(pert);
            const double pn = std::max(nsd.norm(), 1e-12);
            KElement cand = model.lambda_ref;
            cand.mat += nsd * (0.1 / pn);
            const KElement lam = model.kkt_project(cand);
            const double val = aug_lagrangian_value(p, x, lam, rho);
            const double dist2 = r * r;
            worst = std::min(worst, (val - f_opt) / dist2);
        }
        return worst;
    };

    report.min_ratio = min_ratio_at(radius);
    report.min_ratio_half = min_ratio_at(radius / 2.0);
    report.positive = report.min_ratio > 0.0 && report.min_ratio_half > 0.0;
    if (report.positive) {
        const double q = report.min_ratio / report.min_ratio_half;
        report.stable = q >= 0.1 && q <= 10.0;
    }
    return report;
}

Assumption1Report assumption1_probe(const NlsdpProblem& p, const Vec& x_opt,
                                    const KElement& lambda_bar, const MultiplierSetModel& model,
                                    int count, unsigned seed, double radius) {
    if (!model.project_pi_restricted)
        throw std::invalid_argument("assumption1_probe: model lacks the restricted projection");
    Assumption1Report report;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int s = 0; s < count; ++s) {
        Vec x = x_opt;
        for (double& v : x) v += radius * gauss(rng);
        KElement lam = lambda_bar;
        for (double& v : lam.vec) v += radius * gauss(rng);
        SymMatrix dm(p.dim_g);
        for (int i = 0; i < p.dim_g; ++i)
            for (int j = i; j < p.dim_g; ++j) dm.set(i, j, radius * gauss(rng));
        lam.mat += dm;
        if (model.contains(lam, 1e-12)) {
            // Push the matrix block outside M along its leading eigenvector.
            const EigenDecomposition e = eig_sym(lam.mat, 0.0);
            SymMatrix push(p.dim_g);
            for (int i = 0; i < p.dim_g; ++i)
                for (int j = i; j < p.dim_g; ++j)
                    push.set(i, j, e.vec(i, 0) * e.vec(j, 0));
            lam.mat += push * (0.5 * radius);
            if (model.contains(lam, 1e-12)) continue;
        }
        const KktPoint pt{x, lam.vec, lam.mat};
        const double r = residual_R(p, pt);
        if (r <= 0.0) continue;
        const double num = (model.project(lam) - model.project_pi_restricted(lam)).norm();
        report.ratios.push_back(num / r);
        report.max_ratio = std::max(report.max_ratio, report.ratios.back());
        ++report.samples;
    }
    return report;
}

}  // namespace nlsdp
