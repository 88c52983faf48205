#include "nlsdp/cone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsdp {

double KElement::norm() const {
    double s = 0.0;
    for (double v : vec) s += v * v;
    return std::sqrt(s + frobenius_inner(mat, mat));
}

KElement& KElement::operator+=(const KElement& o) {
    for (std::size_t i = 0; i < vec.size(); ++i) vec[i] += o.vec[i];
    mat += o.mat;
    return *this;
}

KElement& KElement::operator-=(const KElement& o) {
    for (std::size_t i = 0; i < vec.size(); ++i) vec[i] -= o.vec[i];
    mat -= o.mat;
    return *this;
}

KElement& KElement::operator*=(double s) {
    for (double& v : vec) v *= s;
    mat *= s;
    return *this;
}

double inner(const KElement& a, const KElement& b) {
    return dot(a.vec, b.vec) + frobenius_inner(a.mat, b.mat);
}

SymMatrix project_psd(const EigenDecomposition& e) {
    Vec clipped(e.lambda);
    for (double& v : clipped) v = std::max(v, 0.0);
    return reconstruct(e, clipped);
}

SymMatrix project_psd(const SymMatrix& a) { return project_psd(eig_sym(a)); }

SymMatrix project_nsd(const EigenDecomposition& e) {
    Vec clipped(e.lambda);
    for (double& v : clipped) v = std::min(v, 0.0);
    return reconstruct(e, clipped);
}

SymMatrix project_nsd(const SymMatrix& a) { return project_nsd(eig_sym(a)); }

KElement project_K(const KElement& z) {
    return KElement(Vec(z.vec.size(), 0.0), project_psd(z.mat));
}

double dist_K(const KElement& z) {
    double s = dot(z.vec, z.vec);
    const EigenDecomposition e = eig_sym(z.mat);
    for (double v : e.lambda) {
        const double neg = std::min(v, 0.0);
        s += neg * neg;
    }
    return std::sqrt(s);
}

double moreau_env_indicator(const SymMatrix& a) {
    const EigenDecomposition e = eig_sym(a);
    double s = 0.0;
    for (double v : e.lambda) {
        const double neg = std::min(v, 0.0);
        s += neg * neg;
    }
    return 0.5 * s;
}

SymMatrix dir_deriv_projection(const EigenDecomposition& e, const SymMatrix& h) {
    if (h.dim() != e.n) throw std::invalid_argument("dir_deriv_projection: dimension mismatch");
    const SymMatrix ht = to_eigenbasis(e, h);
    SymMatrix r(e.n);
    for (int i : e.alpha) {
        for (int j : e.alpha)
            if (j >= i) r.set(i, j, ht(i, j));
        for (int j : e.beta) r.set(i, j, ht(i, j));
        for (int j : e.gamma) {
            const double sigma = e.lambda[i] / (e.lambda[i] - e.lambda[j]);
            r.set(i, j, sigma * ht(i, j));
        }
    }
    if (!e.beta.empty()) {
        const SymMatrix inner_proj = project_psd(submatrix(ht, e.beta));
        for (std::size_t bi = 0; bi < e.beta.size(); ++bi)
            for (std::size_t bj = bi; bj < e.beta.size(); ++bj)
                r.set(e.beta[bi], e.beta[bj],
                      inner_proj(static_cast<int>(bi), static_cast<int>(bj)));
    }
    return from_eigenbasis(e, r);
}

SigmaMatrix sigma_matrix(const EigenDecomposition& e) {
    // Eigenvalues classified as zero enter with the exact value 0.
    Vec lam(e.lambda);
    for (int i : e.beta) lam[i] = 0.0;
    SymMatrix s(e.n);
    for (int i = 0; i < e.n; ++i)
        for (int j = i; j < e.n; ++j) {
            const double den = lam[i] - lam[j];
            double v;
            if (den == 0.0) {
                v = 1.0;
            } else {
                v = (std::max(lam[i], 0.0) - std::max(lam[j], 0.0)) / den;
                v = std::clamp(v, 0.0, 1.0);
            }
            s.set(i, j, v);
        }
    return SigmaMatrix{s};
}

bool critical_cone_membership(const EigenDecomposition& e, const SymMatrix& u, double tol) {
    if (u.dim() != e.n) throw std::invalid_argument("critical_cone_membership: dimension mismatch");
    const SymMatrix ut = to_eigenbasis(e, u);
    if (!e.beta.empty()) {
        const EigenDecomposition eb = eig_sym(submatrix(ut, e.beta), 0.0);
        if (eb.lambda.back() < -tol) return false;
    }
    double cross = 0.0;
    for (int i : e.beta)
        for (int j : e.gamma) cross += ut(i, j) * ut(i, j);
    if (std::sqrt(2.0 * cross) > tol) return false;
    double gg = 0.0;
    for (std::size_t a = 0; a < e.gamma.size(); ++a)
        for (std::size_t b = a; b < e.gamma.size(); ++b) {
            const double v = ut(e.gamma[a], e.gamma[b]);
            gg += (a == b ? 1.0 : 2.0) * v * v;
        }
    return std::sqrt(gg) <= tol;
}

SymMatrix project_critical_cone(const EigenDecomposition& e, const SymMatrix& m) {
    const SymMatrix mt = to_eigenbasis(e, m);
    SymMatrix r(e.n);
    for (int i : e.alpha) {
        for (int j : e.alpha)
            if (j >= i) r.set(i, j, mt(i, j));
        for (int j : e.beta) r.set(i, j, mt(i, j));
        for (int j : e.gamma) r.set(i, j, mt(i, j));
    }
    if (!e.beta.empty()) {
        const SymMatrix inner_proj = project_psd(submatrix(mt, e.beta));
        for (std::size_t bi = 0; bi < e.beta.size(); ++bi)
            for (std::size_t bj = bi; bj < e.beta.size(); ++bj)
                r.set(e.beta[bi], e.beta[bj],
                      inner_proj(static_cast<int>(bi), static_cast<int>(bj)));
    }
    return from_eigenbasis(e, r);
}

bool in_normal_cone(const SymMatrix& x, const SymMatrix& gamma, double tol) {
    if (x.dim() != gamma.dim()) throw std::invalid_argument("in_normal_cone: dimension mismatch");
    const EigenDecomposition ex = eig_sym(x, 0.0);
    if (ex.lambda.back() < -tol) return false;
    const EigenDecomposition eg = eig_sym(gamma, 0.0);
    if (eg.lambda.front() > tol) return false;
    const double ip = frobenius_inner(x, gamma);
    return std::fabs(ip) <= tol * std::max(1.0, x.norm() * gamma.norm());
}

}  // namespace nlsdp
