#include "nlsdp/varanalysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nlsdp {

SecondOrderData SecondOrderData::make(const SymMatrix& g, const SymMatrix& gamma, double rho) {
    if (rho <= 0.0) throw std::invalid_argument("SecondOrderData: rho must be positive");
    const double tol = 1e-7 * std::max(1.0, std::max(g.norm(), gamma.norm()));
    if (!in_normal_cone(g, gamma, tol))
        throw std::invalid_argument("SecondOrderData: (G, Gamma) not in gph N_{S^n_+}");
    SecondOrderData s;
    s.e = eig_sym(g + gamma);
    s.rho = rho;
    return s;
}

double sigma_term(const SymMatrix& g, const SymMatrix& gamma, const SymMatrix& z) {
    const SecondOrderData s = SecondOrderData::make(g, gamma, 1.0);
    const SymMatrix zt = to_eigenbasis(s.e, z);
    double upsilon = 0.0;
    for (int i : s.e.alpha)
        for (int j : s.e.gamma)
            upsilon += 2.0 * (s.e.lambda[j] / s.e.lambda[i]) * zt(i, j) * zt(i, j);
    return upsilon;
}

double d2_moreau_envelope_mat(const EigenDecomposition& e, double rho, const SymMatrix& B) {
    const SymMatrix bt = to_eigenbasis(e, B);
    double val = 0.0;
    for (int i : e.beta)
        for (int j : e.gamma) val += 2.0 * rho * bt(i, j) * bt(i, j);
    for (int i : e.gamma)
        for (int j : e.gamma) val += rho * bt(i, j) * bt(i, j);
    if (!e.beta.empty()) {
        const SymMatrix bb = submatrix(bt, e.beta);
        const SymMatrix res = bb - project_psd(bb);
        val += rho * frobenius_inner(res, res);
    }
    for (int i : e.alpha)
        for (int j : e.gamma) {
            const double t = e.lambda[j] / e.lambda[i];  // negative
            const double denom = -t + rho;
            val += 2.0 * rho * (t / denom) * (t / denom) * bt(i, j) * bt(i, j);
            const double zij = rho * bt(i, j) / denom;
            val -= 2.0 * t * zij * zij;
        }
    return val;
}

double d2_moreau_envelope(const SecondOrderData& s, const Vec& b, const SymMatrix& B) {
    if (B.dim() != s.e.n) throw std::invalid_argument("d2_moreau_envelope: dimension mismatch");
    return d2_moreau_envelope_mat(s.e, s.rho, B) + s.rho * dot(b, b);
}

double d2_moreau_oracle(const SecondOrderData& s, const Vec& b, const SymMatrix& B) {
    if (B.dim() != s.e.n) throw std::invalid_argument("d2_moreau_oracle: dimension mismatch");
    const EigenDecomposition& e = s.e;
    const double rho = s.rho;
    const SymMatrix bt = to_eigenbasis(e, B);
    const int n = e.n;

    // Work in the eigenbasis of A. Feasible set: W_bb PSD, W_bg = 0,
    // W_gg = 0; objective -Upsilon(W) + rho |W - Bt|^2.
    std::vector<char> in_alpha(n, 0), in_beta(n, 0), in_gamma(n, 0);
    for (int i : e.alpha) in_alpha[i] = 1;
    for (int i : e.beta) in_beta[i] = 1;
    for (int i : e.gamma) in_gamma[i] = 1;

    auto project_feasible = [&](const SymMatrix& w) {
        SymMatrix r = w;
        for (int i : e.beta)
            for (int j : e.gamma) r.set(i, j, 0.0);
        for (std::size_t a = 0; a < e.gamma.size(); ++a)
            for (std::size_t c = a; c < e.gamma.size(); ++c) r.set(e.gamma[a], e.gamma[c], 0.0);
        if (!e.beta.empty()) {
            const SymMatrix pb = project_psd(submatrix(w, e.beta));
            for (std::size_t a = 0; a < e.beta.size(); ++a)
                for (std::size_t c = a; c < e.beta.size(); ++c)
                    r.set(e.beta[a], e.beta[c], pb(static_cast<int>(a), static_cast<int>(c)));
        }
        return r;
    };
    auto objective = [&](const SymMatrix& w) {
        double v = 0.0;
        for (int i : e.alpha)
            for (int j : e.gamma)
                v += -2.0 * (e.lambda[j] / e.lambda[i]) * w(i, j) * w(i, j);
        const SymMatrix diff = w - bt;
        return v + rho * frobenius_inner(diff, diff);
    };
    auto gradient = [&](const SymMatrix& w) {
        SymMatrix g = (w - bt) * (2.0 * rho);
        for (int i : e.alpha)
            for (int j : e.gamma)
                g.add(i, j, -2.0 * (e.lambda[j] / e.lambda[i]) * w(i, j));
        return g;
    };

    double l_sigma = 0.0;
    for (int i : e.alpha)
        for (int j : e.gamma) l_sigma = std::max(l_sigma, -2.0 * e.lambda[j] / e.lambda[i]);
    const double lips = 2.0 * rho + l_sigma;
    const double step = 1.0 / lips;

    SymMatrix w = project_feasible(bt);
    constexpr int kMaxIters = 100000;
    for (int it = 0; it < kMaxIters; ++it) {
        const SymMatrix g = gradient(w);
        SymMatrix w_next = project_feasible(w - step * g);
        const SymMatrix gmap = (w - w_next) * lips;
        // Strong convexity modulus 2*rho bounds the remaining gap by
        // |gmap|^2 / (4 rho).
        const double gap = frobenius_inner(gmap, gmap) / (4.0 * rho);
        w = w_next;
        const double val = objective(w);
        if (gap <= 1e-8 * std::max(1.0, std::fabs(val)))
            return val + rho * dot(b, b);
    }
    throw OracleFailure("d2_moreau_oracle: projected gradient did not certify the gap");
}

namespace {

// Quadratic form of the SOSC at the KKT point, assembled by polarization so
// gradients are exact.
struct SoscForm {
    int dim = 0;
    std::vector<double> q;  // row-major dim x dim

    double value(const Vec& d) const {
        double v = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) v += q[static_cast<std::size_t>(i) * dim + j] * d[i] * d[j];
        return v;
    }
    Vec grad(const Vec& d) const {
        Vec g(dim, 0.0);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                g[i] += 2.0 * q[static_cast<std::size_t>(i) * dim + j] * d[j];
        return g;
    }
};

SoscForm build_sosc_form(const NlsdpProblem& p, const KktPoint& pt) {
    const int n = p.dim_x;
    auto eval = [&](const Vec& d) {
        const Vec hd = p.hess_lagrangian(pt.x, pt.y, pt.gamma, d);
        return dot(hd, d) - sigma_term(p.G(pt.x), pt.gamma, p.dG(pt.x, d));
    };
    SoscForm form;
    form.dim = n;
    form.q.assign(static_cast<std::size_t>(n) * n, 0.0);
    Vec diag_vals(n, 0.0);
    for (int i = 0; i < n; ++i) {
        Vec ei(n, 0.0);
        ei[i] = 1.0;
        diag_vals[i] = eval(ei);
        form.q[static_cast<std::size_t>(i) * n + i] = diag_vals[i];
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Vec eij(n, 0.0);
            eij[i] = 1.0;
            eij[j] = 1.0;
            const double qij = 0.5 * (eval(eij) - diag_vals[i] - diag_vals[j]);
            form.q[static_cast<std::size_t>(i) * n + j] = qij;
            form.q[static_cast<std::size_t>(j) * n + i] = qij;
        }
    return form;
}

// Feasibility violation of the critical cone of the problem at the KKT
// point: |jac_h d|^2 + dist^2(dG[d], critical cone of the SDP block).
struct ConeGeometry {
    const NlsdpProblem* p = nullptr;
    Vec x;
    EigenDecomposition e;  // of G(x) + Gamma

    double violation(const Vec& d) const {
        double v = 0.0;
        if (p->dim_h > 0) {
            const Vec hd = p->jac_h(x, d);
            v += dot(hd, hd);
        }
        const SymMatrix m = p->dG(x, d);
        const SymMatrix res = m - project_critical_cone(e, m);
        return v + frobenius_inner(res, res);
    }
    Vec violation_grad(const Vec& d) const {
        Vec g(p->dim_x, 0.0);
        if (p->dim_h > 0) {
            const Vec hd = p->jac_h(x, d);
            axpy(g, 2.0, p->jac_h_adjoint(x, hd));
        }
        const SymMatrix m = p->dG(x, d);
        const SymMatrix res = m - project_critical_cone(e, m);
        axpy(g, 2.0, p->dG_adjoint(x, res));
        return g;
    }

    // Approximate projection onto the cone via an increasing quadratic
    // penalty; the sets are desk-scale so plain gradient descent suffices.
    Vec project(Vec d) const {
        for (double mu : {1e2, 1e4, 1e6, 1e8, 1e10}) {
            const Vec anchor = d;
            for (int it = 0; it < 400; ++it) {
                Vec g = d - anchor;
                axpy(g, 0.5 * mu, violation_grad(d));
                const double gn = norm2(g);
                if (gn <= 1e-14 * (1.0 + norm2(d))) break;
                // Fixed conservative step for the mu-scaled smooth problem.
                axpy(d, -1.0 / (1.0 + mu * lips_), g);
            }
        }
        return d;
    }

    double lips_ = 1.0;  // bound on the curvature of `violation`

    void estimate_lipschitz() {
        // |dG| and |jac_h| estimated on coordinate directions.
        double s = 0.0;
        for (int i = 0; i < p->dim_x; ++i) {
            Vec ei(p->dim_x, 0.0);
            ei[i] = 1.0;
            const SymMatrix m = p->dG(x, ei);
            s += frobenius_inner(m, m);
            if (p->dim_h > 0) {
                const Vec hd = p->jac_h(x, ei);
                s += dot(hd, hd);
            }
        }
        lips_ = 2.0 * s + 1.0;
    }
};

}  // namespace

SoscReport sosc_certificate(const NlsdpProblem& p, const KktPoint& pt) {
    if (residual_R(p, pt) > 1e-8)
        throw std::invalid_argument("sosc_certificate: point is not KKT to tolerance");
    constexpr double kSoscTol = 1e-6;

    const SoscForm form = build_sosc_form(p, pt);
    ConeGeometry geom;
    geom.p = &p;
    geom.x = pt.x;
    geom.e = eig_sym(p.G(pt.x) + pt.gamma);
    geom.estimate_lipschitz();

    SoscReport report;
    if (geom.e.beta.empty()) {
        // The critical cone is a subspace: rows are jac_h plus the
        // gamma-gamma coordinates of d -> P^T dG[d] P. Reduce and take the
        // smallest eigenvalue of the restricted form.
        const int n = p.dim_x;
        std::vector<Vec> rows;
        if (p.dim_h > 0) {
            for (int r = 0; r < p.dim_h; ++r) {
                Vec row(n, 0.0);
                for (int i = 0; i < n; ++i) {
                    Vec ei(n, 0.0);
                    ei[i] = 1.0;
                    row[i] = p.jac_h(pt.x, ei)[r];
                }
                rows.push_back(row);
            }
        }
        const std::size_t g_count = geom.e.gamma.size();
        for (std::size_t a = 0; a < g_count; ++a)
            for (std::size_t c = a; c < g_count; ++c) {
                Vec row(n, 0.0);
                for (int i = 0; i < n; ++i) {
                    Vec ei(n, 0.0);
                    ei[i] = 1.0;
                    const SymMatrix mt = to_eigenbasis(geom.e, p.dG(pt.x, ei));
                    row[i] = mt(geom.e.gamma[a], geom.e.gamma[c]);
                }
                rows.push_back(row);
            }
        // Kernel of the stacked constraints via the spectral decomposition
        // of C^T C.
        SymMatrix ctc(n);
        for (const Vec& row : rows)
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) ctc.add(i, j, row[i] * row[j]);
        const EigenDecomposition ek = eig_sym(ctc, 0.0);
        const double thresh = 1e-10 * std::max(1.0, ek.lambda.front());
        std::vector<int> kernel;
        for (int k = 0; k < n; ++k)
            if (ek.lambda[k] <= thresh) kernel.push_back(k);
        report.exact = true;
        if (kernel.empty()) {
            report.min_value = std::numeric_limits<double>::infinity();
            report.holds = true;  // vacuous: the cone is {0}
            return report;
        }
        const int s = static_cast<int>(kernel.size());
        SymMatrix reduced(s);
        for (int a = 0; a < s; ++a) {
            Vec ba(n, 0.0);
            for (int i = 0; i < n; ++i) ba[i] = ek.vec(i, kernel[a]);
            Vec qb(n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    qb[i] += form.q[static_cast<std::size_t>(i) * n + j] * ba[j];
            for (int c = a; c < s; ++c) {
                Vec bc(n, 0.0);
                for (int i = 0; i < n; ++i) bc[i] = ek.vec(i, kernel[c]);
                reduced.set(a, c, dot(qb, bc));
            }
        }
        const EigenDecomposition er = eig_sym(reduced, 0.0);
        report.min_value = er.lambda.back();
        Vec dir(n, 0.0);
        for (int a = 0; a < s; ++a)
            for (int i = 0; i < n; ++i) dir[i] += er.vec(a, s - 1) * ek.vec(i, kernel[a]);
        report.certificate_direction = dir;
        report.holds = report.min_value > kSoscTol;
        return report;
    }

    // Multistart projected refinement on the sphere intersected with the cone.
    constexpr int kStarts = 64;
    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    Vec best_dir;
    report.multistarts = kStarts;
    for (int s = 0; s < kStarts; ++s) {
        Vec d(p.dim_x);
        for (double& v : d) v = gauss(rng);
        d = geom.project(d);
        double dn = norm2(d);
        if (dn <= 1e-10) continue;  // start projected to (near) zero
        for (double& v : d) v /= dn;
        double val = form.value(d);
        for (int it = 0; it < 200; ++it) {
            Vec g = form.grad(d);
            double step_len = 0.5;
            bool moved = false;
            for (int bt = 0; bt < 30; ++bt) {
                Vec cand = d;
                axpy(cand, -step_len, g);
                cand = geom.project(cand);
                const double cn = norm2(cand);
                if (cn > 1e-10) {
                    for (double& v : cand) v /= cn;
                    const double cv = form.value(cand);
                    if (cv < val - 1e-14) {
                        d = cand;
                        val = cv;
                        moved = true;
                        break;
                    }
                }
                step_len *= 0.5;
            }
            if (!moved) break;
        }
        if (geom.violation(d) <= 1e-12 && val < best) {
            best = val;
            best_dir = d;
        }
    }
    if (!std::isfinite(best)) {
        // Every start collapsed to the origin: the cone is {0}.
        report.min_value = std::numeric_limits<double>::infinity();
        report.holds = true;
        return report;
    }
    report.min_value = best;
    report.certificate_direction = best_dir;
    report.holds = best > kSoscTol;
    return report;
}

ExpansionReport expansion_residual_moreau(const SymMatrix& abar, const ExpansionSpec& spec) {
    const EigenDecomposition ebar = eig_sym(abar);
    const double group_tol = 10.0 * ebar.zero_tol;
    const double gap = min_eigen_gap(ebar, group_tol);
    const double radius = std::isfinite(gap) ? gap / 4.0 : 0.25;
    const PiSignature sig_bar = pi_signature(ebar, group_tol);

    // Split Abar into its PSD part (held fixed) and the normal-cone part we
    // sample around.
    const std::vector<int>& alpha = ebar.alpha;
    std::vector<int> rest;
    for (int i : ebar.beta) rest.push_back(i);
    for (int i : ebar.gamma) rest.push_back(i);

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    ExpansionReport report;
    report.radius = radius;
    report.base_points = spec.base_points;
    report.directions_per_scale = spec.directions_per_scale;
    report.seed = spec.seed;
    report.per_scale.assign(spec.scales.size(), ExpansionSample{});
    for (std::size_t si = 0; si < spec.scales.size(); ++si)
        report.per_scale[si].scale = spec.scales[si];

    int admissible = 0;
    for (int bp = 0; bp < spec.base_points && admissible < spec.base_points; ++bp) {
        // Sample A: keep the alpha eigenvalues of Abar, shift each distinct
        // nonpositive group by a small amount, and rotate inside the
        // complement of the PSD part. All such A satisfy
        // Gamma' in N(G) and, for shifts below half the radius, share the
        // pi-signature of Abar.
        Vec vals(ebar.lambda);
        // Per-group shifts on the beta/gamma part: beta stays exactly zero.
        for (const std::vector<int>& block : sig_bar.blocks) {
            const double base = ebar.lambda[block.front()];
            if (base > ebar.zero_tol) continue;  // alpha group fixed
            double shift = 0.0;
            if (base < -ebar.zero_tol) shift = 0.25 * radius * unif(rng);
            for (int i : block) vals[i] = (base < -ebar.zero_tol) ? base + shift : 0.0;
        }
        // Random small rotation acting on the complement coordinates,
        // assembled from Givens rotations so it is exactly orthogonal.
        const int nr = static_cast<int>(rest.size());
        std::vector<double> rot(static_cast<std::size_t>(nr) * nr, 0.0);  // row-major
        for (int i = 0; i < nr; ++i) rot[static_cast<std::size_t>(i) * nr + i] = 1.0;
        const double angle_scale = 0.2 * radius / std::max(1.0, abar.norm());
        for (int i = 0; i < nr; ++i)
            for (int j = i + 1; j < nr; ++j) {
                const double theta = angle_scale * unif(rng);
                const double c = std::cos(theta), s = std::sin(theta);
                for (int r = 0; r < nr; ++r) {
                    const double ri = rot[static_cast<std::size_t>(r) * nr + i];
                    const double rj = rot[static_cast<std::size_t>(r) * nr + j];
                    rot[static_cast<std::size_t>(r) * nr + i] = c * ri - s * rj;
                    rot[static_cast<std::size_t>(r) * nr + j] = s * ri + c * rj;
                }
            }
        // Assemble A in the eigenbasis of Abar: alpha block diagonal fixed,
        // complement block R Diag(vals_rest) R^T.
        SymMatrix in_basis(ebar.n);
        for (int i : alpha) in_basis.set(i, i, vals[i]);
        for (int a = 0; a < nr; ++a)
            for (int c = a; c < nr; ++c) {
                double s = 0.0;
                for (int k = 0; k < nr; ++k)
                    s += rot[static_cast<std::size_t>(a) * nr + k] * vals[rest[k]] *
                         rot[static_cast<std::size_t>(c) * nr + k];
                in_basis.set(rest[a], rest[c], s);
            }
        const SymMatrix a_sample = from_eigenbasis(ebar, in_basis);
        if ((a_sample - abar).norm() > radius) continue;
        const EigenDecomposition ea = eig_sym(a_sample);
        if (!(pi_signature(ea, group_tol) == sig_bar)) continue;
        ++admissible;

        const SymMatrix pi_minus = project_nsd(ea);
        const double env_a = moreau_env_indicator(a_sample);

        for (std::size_t si = 0; si < spec.scales.size(); ++si) {
            const double scale = spec.scales[si];
            for (int dir = 0; dir < spec.directions_per_scale; ++dir) {
                SymMatrix h(ebar.n);
                for (int i = 0; i < ebar.n; ++i)
                    for (int j = i; j < ebar.n; ++j) h.set(i, j, unif(rng));
                const double hn = h.norm();
                if (hn == 0.0) continue;
                h *= scale / hn;
                const double t0 = moreau_env_indicator(a_sample + h);
                const double t1 = moreau_env_indicator(a_sample);
                const double t2 = frobenius_inner(pi_minus, h);
                const double t3 = 0.5 * d2_moreau_envelope_mat(ea, 1.0, h);
                double lhs = std::fabs(t0 - t1 - t2 - t3);
                // Residuals below the cancellation noise of the summands are
                // numerically zero; keeping them would let pure roundoff be
                // amplified by 1/|H|^3.
                const double noise = 64.0 * 2.220446049250313e-16 *
                                     (std::fabs(t0) + std::fabs(t1) + std::fabs(t2) +
                                      std::fabs(t3) + 1.0);
                if (lhs <= noise) lhs = 0.0;
                const double ratio = lhs / (scale * scale * scale);
                report.per_scale[si].max_ratio = std::max(report.per_scale[si].max_ratio, ratio);
            }
        }
    }
    if (admissible == 0)
        throw std::invalid_argument("expansion_residual_moreau: no admissible sample produced");

    for (const ExpansionSample& s : report.per_scale)
        report.bound_constant = std::max(report.bound_constant, s.max_ratio);
    // Bounded-across-scales flag: the finest scale must not blow up past
    // three times the coarsest.
    const double coarse = report.per_scale.front().max_ratio;
    const double fine = report.per_scale.back().max_ratio;
    report.success = fine <= 3.0 * std::max(coarse, 1e-12);
    return report;
}

}  // namespace nlsdp
