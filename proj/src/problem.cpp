#include "nlsdp/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsdp {

double Perturbation::norm() const {
    double s = dot(a1, a1) + dot(a2, a2);
    return std::sqrt(s + frobenius_inner(b, b));
}

Perturbation Perturbation::zero(const NlsdpProblem& p) {
    return Perturbation{Vec(p.dim_x, 0.0), Vec(p.dim_h, 0.0), SymMatrix(p.dim_g)};
}

KElement phi(const NlsdpProblem& p, const Vec& x) {
    return KElement(p.dim_h > 0 ? p.h(x) : Vec{}, p.G(x));
}

double lagrangian_value(const NlsdpProblem& p, const KktPoint& pt) {
    double v = p.f(pt.x);
    if (p.dim_h > 0) v += dot(pt.y, p.h(pt.x));
    return v + frobenius_inner(pt.gamma, p.G(pt.x));
}

Vec lagrangian_grad_x(const NlsdpProblem& p, const KktPoint& pt) {
    Vec g = p.grad_f(pt.x);
    if (p.dim_h > 0) axpy(g, 1.0, p.jac_h_adjoint(pt.x, pt.y));
    axpy(g, 1.0, p.dG_adjoint(pt.x, pt.gamma));
    return g;
}

double residual_R(const NlsdpProblem& p, const KktPoint& pt) {
    const KElement ph = phi(p, pt.x);
    const KElement shifted = ph + pt.lambda();
    const KElement res = ph - project_K(shifted);
    return norm2(lagrangian_grad_x(p, pt)) + res.norm();
}

double perturbed_kkt_residual(const NlsdpProblem& p, const KktPoint& pt,
                              const Perturbation& pert) {
    Vec g = lagrangian_grad_x(p, pt);
    for (int i = 0; i < p.dim_x; ++i) g[i] -= pert.a1[i];
    double r = norm2(g);
    if (p.dim_h > 0) r += norm2(p.h(pt.x) - pert.a2);
    const SymMatrix gb = p.G(pt.x) - pert.b;
    const SymMatrix viol = gb - project_psd(gb + pt.gamma);
    return r + viol.norm();
}

NlsdpProblem perturbed_problem(const NlsdpProblem& p, const Perturbation& pert) {
    NlsdpProblem q = p;
    q.name = p.name + "+pert";
    const Perturbation pc = pert;
    q.f = [p, pc](const Vec& x) { return p.f(x) - dot(pc.a1, x); };
    q.grad_f = [p, pc](const Vec& x) {
        Vec g = p.grad_f(x);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= pc.a1[i];
        return g;
    };
    if (p.dim_h > 0) {
        q.h = [p, pc](const Vec& x) { return p.h(x) - pc.a2; };
    }
    q.G = [p, pc](const Vec& x) { return p.G(x) - pc.b; };
    return q;
}

namespace {

// Example fixture: min (1/2) x^3 subject to -x^2 E33 PSD (3x3).
// Optimum x = 0 with multiplier set all of S^3_-.
NlsdpProblem make_example_6_1() {
    NlsdpProblem p;
    p.name = "example-6.1";
    p.dim_x = 1;
    p.dim_h = 0;
    p.dim_g = 3;
    p.f = [](const Vec& x) { return 0.5 * x[0] * x[0] * x[0]; };
    p.grad_f = [](const Vec& x) { return Vec{1.5 * x[0] * x[0]}; };
    p.G = [](const Vec& x) {
        SymMatrix g(3);
        g.set(2, 2, -x[0] * x[0]);
        return g;
    };
    p.dG = [](const Vec& x, const Vec& d) {
        SymMatrix g(3);
        g.set(2, 2, -2.0 * x[0] * d[0]);
        return g;
    };
    p.dG_adjoint = [](const Vec& x, const SymMatrix& gamma) {
        return Vec{-2.0 * x[0] * gamma(2, 2)};
    };
    p.hess_lagrangian = [](const Vec& x, const Vec&, const SymMatrix& gamma, const Vec& d) {
        return Vec{(3.0 * x[0] - 2.0 * gamma(2, 2)) * d[0]};
    };
    return p;
}

// Example fixture: min (1/2) x^2 + 2t subject to tA - x^2 I_2 PSD and
// t >= 0, the scalar bound carried as a 1x1 block appended to G.
// Unique optimum (t, x) = (0, 0).
const double kA11 = 1.0, kA12 = -2.0, kA22 = 1.0;

SymMatrix example_6_2_A() {
    SymMatrix a(2);
    a.set(0, 0, kA11);
    a.set(0, 1, kA12);
    a.set(1, 1, kA22);
    return a;
}

NlsdpProblem make_example_6_2() {
    NlsdpProblem p;
    p.name = "example-6.2";
    p.dim_x = 2;  // x = (t, u)
    p.dim_h = 0;
    p.dim_g = 3;
    p.f = [](const Vec& x) { return 0.5 * x[1] * x[1] + 2.0 * x[0]; };
    p.grad_f = [](const Vec& x) { return Vec{2.0, x[1]}; };
    p.G = [](const Vec& x) {
        const double t = x[0], u = x[1];
        SymMatrix g(3);
        g.set(0, 0, t * kA11 - u * u);
        g.set(0, 1, t * kA12);
        g.set(1, 1, t * kA22 - u * u);
        g.set(2, 2, t);
        return g;
    };
    p.dG = [](const Vec& x, const Vec& d) {
        const double u = x[1];
        SymMatrix g(3);
        g.set(0, 0, d[0] * kA11 - 2.0 * u * d[1]);
        g.set(0, 1, d[0] * kA12);
        g.set(1, 1, d[0] * kA22 - 2.0 * u * d[1]);
        g.set(2, 2, d[0]);
        return g;
    };
    p.dG_adjoint = [](const Vec& x, const SymMatrix& m) {
        const double u = x[1];
        const double trace_tl = m(0, 0) + m(1, 1);
        const double a_dot = kA11 * m(0, 0) + 2.0 * kA12 * m(0, 1) + kA22 * m(1, 1);
        return Vec{a_dot + m(2, 2), -2.0 * u * trace_tl};
    };
    p.hess_lagrangian = [](const Vec&, const Vec&, const SymMatrix& gamma, const Vec& d) {
        const double trace_tl = gamma(0, 0) + gamma(1, 1);
        return Vec{0.0, (1.0 - 2.0 * trace_tl) * d[1]};
    };
    return p;
}

SymMatrix nsd_projection_dykstra_6_2(const SymMatrix& g0) {
    // Dykstra between S^2_- and the half-space <A, -Gamma> <= 2.
    const SymMatrix a = example_6_2_A();
    const double a_norm2 = frobenius_inner(a, a);
    SymMatrix g = g0;
    SymMatrix inc1(2), inc2(2);
    for (int it = 0; it < 10000; ++it) {
        const SymMatrix prev = g;
        SymMatrix y = g + inc1;
        SymMatrix py = project_nsd(y);
        inc1 = y - py;
        y = py + inc2;
        const double val = frobenius_inner(a, y);  // constraint: val >= -2
        SymMatrix pz = y;
        if (val < -2.0) pz += ((-2.0 - val) / a_norm2) * a;
        inc2 = y - pz;
        g = pz;
        if ((g - prev).norm() <= 1e-12) break;
    }
    return g;
}

MultiplierSetModel make_model_6_1() {
    MultiplierSetModel m;
    m.x_opt = Vec{0.0};
    m.lambda_ref = KElement(Vec{}, SymMatrix::diag({0.0, -1.0, -2.0}));
    m.project = [](const KElement& lam) { return KElement(Vec{}, project_nsd(lam.mat)); };
    m.contains = [](const KElement& lam, double tol) {
        const EigenDecomposition e = eig_sym(lam.mat, 0.0);
        return e.lambda.front() <= tol;
    };
    // The paper's hat construction: zero out the leading eigenvalue, keep the
    // remaining spectrum and eigenvectors.
    m.project_pi_restricted = [m](const KElement& lam) {
        if (m.contains(lam, 1e-12)) return m.project(lam);
        const EigenDecomposition e = eig_sym(lam.mat, 0.0);
        Vec vals(e.lambda);
        vals[0] = 0.0;
        for (std::size_t i = 1; i < vals.size(); ++i) vals[i] = std::min(vals[i], 0.0);
        return KElement(Vec{}, reconstruct(e, vals));
    };
    return m;
}

MultiplierSetModel make_model_6_2() {
    MultiplierSetModel m;
    m.x_opt = Vec{0.0, 0.0};
    // Gamma block Diag(0,-1); the (2,2) slot is forced to -1 by stationarity.
    SymMatrix lref(3);
    lref.set(1, 1, -1.0);
    lref.set(2, 2, -1.0);
    m.lambda_ref = KElement(Vec{}, lref);
    // Multiplier set as printed: Gamma in S^2_- with <A, -Gamma> <= 2, the
    // scalar slot unconstrained, cross entries zero.
    m.project = [](const KElement& lam) {
        const SymMatrix tl = submatrix(lam.mat, {0, 1});
        const SymMatrix ptl = nsd_projection_dykstra_6_2(tl);
        SymMatrix out(3);
        out.set(0, 0, ptl(0, 0));
        out.set(0, 1, ptl(0, 1));
        out.set(1, 1, ptl(1, 1));
        out.set(2, 2, lam.mat(2, 2));
        return KElement(Vec{}, out);
    };
    m.contains = [](const KElement& lam, double tol) {
        const SymMatrix tl = submatrix(lam.mat, {0, 1});
        const EigenDecomposition e = eig_sym(tl, 0.0);
        if (e.lambda.front() > tol) return false;
        const SymMatrix a = example_6_2_A();
        if (-frobenius_inner(a, tl) > 2.0 + tol) return false;
        const double off = std::hypot(lam.mat(0, 2), lam.mat(1, 2));
        return off <= tol;
    };
    m.project_pi_restricted = [m](const KElement& lam) {
        if (m.contains(lam, 1e-12)) return m.project(lam);
        const SymMatrix tl = submatrix(lam.mat, {0, 1});
        const EigenDecomposition e = eig_sym(tl, 0.0);
        Vec vals(e.lambda);
        vals[0] = 0.0;
        vals[1] = std::min(vals[1], 0.0);
        const SymMatrix ptl = reconstruct(e, vals);
        SymMatrix out(3);
        out.set(0, 0, ptl(0, 0));
        out.set(0, 1, ptl(0, 1));
        out.set(1, 1, ptl(1, 1));
        out.set(2, 2, lam.mat(2, 2));
        return KElement(Vec{}, out);
    };
    // Stationarity-exact set: Lambda NSD with <blkdiag(A,1), Lambda> = -2.
    m.project_kkt = [](const KElement& lam) {
        SymMatrix c(3);
        c.set(0, 0, kA11);
        c.set(0, 1, kA12);
        c.set(1, 1, kA22);
        c.set(2, 2, 1.0);
        const double c_norm2 = frobenius_inner(c, c);
        SymMatrix g = lam.mat;
        SymMatrix inc1(3), inc2(3);
        for (int it = 0; it < 20000; ++it) {
            const SymMatrix prev = g;
            SymMatrix y = g + inc1;
            SymMatrix py = project_nsd(y);
            inc1 = y - py;
            y = py + inc2;
            const double val = frobenius_inner(c, y);
            const SymMatrix pz = y + ((-2.0 - val) / c_norm2) * c;
            inc2 = y - pz;
            g = pz;
            if ((g - prev).norm() <= 1e-12) break;
        }
        return KElement(Vec{}, g);
    };
    return m;
}

struct Registry {
    NlsdpProblem ex61 = make_example_6_1();
    NlsdpProblem ex62 = make_example_6_2();
    MultiplierSetModel model61 = make_model_6_1();
    MultiplierSetModel model62 = make_model_6_2();
};

const Registry& registry() {
    static const Registry r;
    return r;
}

}  // namespace

const NlsdpProblem& find_problem(const std::string& name) {
    if (name == "example-6.1") return registry().ex61;
    if (name == "example-6.2") return registry().ex62;
    throw std::invalid_argument("unknown problem: " + name);
}

std::vector<std::string> problem_names() { return {"example-6.1", "example-6.2"}; }

const MultiplierSetModel& find_multiplier_model(const std::string& name) {
    if (name == "example-6.1") return registry().model61;
    if (name == "example-6.2") return registry().model62;
    throw std::invalid_argument("unknown problem: " + name);
}

KktPoint default_start(const std::string& name) {
    const MultiplierSetModel& m = find_multiplier_model(name);
    KktPoint pt;
    pt.x = m.x_opt;
    for (double& v : pt.x) v += 0.1;
    pt.y = m.lambda_ref.vec;
    pt.gamma = m.lambda_ref.mat;
    return pt;
}

}  // namespace nlsdp
