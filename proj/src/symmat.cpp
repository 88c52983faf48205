#include "nlsdp/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nlsdp {

bool solve_dense(std::vector<double> A, Vec b, int n, Vec& x) {
    std::vector<int> piv(n);
    std::iota(piv.begin(), piv.end(), 0);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::fabs(A[static_cast<std::size_t>(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            double v = std::fabs(A[static_cast<std::size_t>(i) * n + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best < 1e-300) return false;
        if (p != k) {
            for (int j = 0; j < n; ++j)
                std::swap(A[static_cast<std::size_t>(k) * n + j],
                          A[static_cast<std::size_t>(p) * n + j]);
            std::swap(b[k], b[p]);
        }
        const double pivot = A[static_cast<std::size_t>(k) * n + k];
        for (int i = k + 1; i < n; ++i) {
            const double m = A[static_cast<std::size_t>(i) * n + k] / pivot;
            if (m == 0.0) continue;
            A[static_cast<std::size_t>(i) * n + k] = 0.0;
            for (int j = k + 1; j < n; ++j)
                A[static_cast<std::size_t>(i) * n + j] -= m * A[static_cast<std::size_t>(k) * n + j];
            b[i] -= m * b[k];
        }
    }
    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A[static_cast<std::size_t>(i) * n + j] * x[j];
        x[i] = s / A[static_cast<std::size_t>(i) * n + i];
    }
    return true;
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diag(const Vec& d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[i]);
    return m;
}

SymMatrix SymMatrix::from_dense(int n, const double* dense) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, dense[static_cast<std::size_t>(i) * n + j]);
    return m;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
    if (other.n_ != n_) throw std::invalid_argument("SymMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
    if (other.n_ != n_) throw std::invalid_argument("SymMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

double SymMatrix::norm() const { return std::sqrt(frobenius_inner(*this, *this)); }

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
}

bool SymMatrix::is_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

Vec SymMatrix::matvec(const Vec& x) const {
    Vec y(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

std::vector<double> SymMatrix::dense() const {
    std::vector<double> d(static_cast<std::size_t>(n_) * n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) d[static_cast<std::size_t>(i) * n_ + j] = (*this)(i, j);
    return d;
}

double frobenius_inner(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("frobenius_inner: dimension mismatch");
    const int n = a.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        s += a(i, i) * b(i, i);
        for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * b(i, j);
    }
    return s;
}

double default_zero_tol(const SymMatrix& a) { return 1e-8 * std::max(1.0, a.norm()); }

namespace {

double off_diagonal_norm(const std::vector<double>& a, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = a[static_cast<std::size_t>(i) * n + j];
            s += 2.0 * v * v;
        }
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition eig_sym(const SymMatrix& a, double zero_tol) {
    if (!a.is_finite()) throw std::invalid_argument("eig_sym: non-finite input");
    if (zero_tol < 0.0) throw std::invalid_argument("eig_sym: zero_tol must be nonnegative");
    const int n = a.dim();
    std::vector<double> w = a.dense();
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

    const double threshold = 1e-12 * a.norm();
    constexpr int kMaxSweeps = 100;
    auto at = [&](int i, int j) -> double& { return w[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(w, n) > threshold; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                double t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = at(p, k) = c * akp - s * akq;
                    at(k, q) = at(q, k) = s * akp + c * akq;
                }
                at(p, p) = app - t * apq;
                at(q, q) = aqq + t * apq;
                at(p, q) = at(q, p) = 0.0;
                // Accumulate V <- V J on columns p and q (column-major storage).
                for (int i = 0; i < n; ++i) {
                    const double vip = v[static_cast<std::size_t>(p) * n + i];
                    const double viq = v[static_cast<std::size_t>(q) * n + i];
                    v[static_cast<std::size_t>(p) * n + i] = c * vip - s * viq;
                    v[static_cast<std::size_t>(q) * n + i] = s * vip + c * viq;
                }
            }
        }
    }

    Vec raw(n);
    for (int i = 0; i < n; ++i) raw[i] = w[static_cast<std::size_t>(i) * n + i];
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return raw[i] > raw[j]; });

    EigenDecomposition e;
    e.n = n;
    e.zero_tol = zero_tol;
    e.lambda.resize(n);
    e.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        const int src = order[k];
        e.lambda[k] = raw[src];
        double sign = 1.0;
        for (int i = 0; i < n; ++i) {
            const double c = v[static_cast<std::size_t>(src) * n + i];
            if (c != 0.0) {
                sign = c > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (int i = 0; i < n; ++i)
            e.vectors[static_cast<std::size_t>(k) * n + i] =
                sign * v[static_cast<std::size_t>(src) * n + i];
    }
    for (int k = 0; k < n; ++k) {
        if (e.lambda[k] > zero_tol)
            e.alpha.push_back(k);
        else if (e.lambda[k] < -zero_tol)
            e.gamma.push_back(k);
        else
            e.beta.push_back(k);
    }
    return e;
}

EigenDecomposition eig_sym(const SymMatrix& a) { return eig_sym(a, default_zero_tol(a)); }

PiSignature pi_signature(const EigenDecomposition& e, double group_tol) {
    PiSignature sig;
    if (e.n == 0) return sig;
    sig.blocks.push_back({0});
    for (int i = 1; i < e.n; ++i) {
        if (e.lambda[i - 1] - e.lambda[i] <= group_tol)
            sig.blocks.back().push_back(i);
        else
            sig.blocks.push_back({i});
    }
    return sig;
}

double min_eigen_gap(const EigenDecomposition& e, double group_tol) {
    const PiSignature sig = pi_signature(e, group_tol);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t b = 1; b < sig.blocks.size(); ++b) {
        const double prev = e.lambda[sig.blocks[b - 1].front()];
        const double cur = e.lambda[sig.blocks[b].front()];
        gap = std::min(gap, prev - cur);
    }
    return gap;
}

SymMatrix to_eigenbasis(const EigenDecomposition& e, const SymMatrix& h) {
    const int n = e.n;
    if (h.dim() != n) throw std::invalid_argument("to_eigenbasis: dimension mismatch");
    // tmp = H P
    std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += h(i, j) * e.vec(j, k);
            tmp[static_cast<std::size_t>(i) * n + k] = s;
        }
    SymMatrix r(n);
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += e.vec(i, k) * tmp[static_cast<std::size_t>(i) * n + l];
            r.set(k, l, s);
        }
    return r;
}

SymMatrix from_eigenbasis(const EigenDecomposition& e, const SymMatrix& m) {
    const int n = e.n;
    if (m.dim() != n) throw std::invalid_argument("from_eigenbasis: dimension mismatch");
    // tmp = P M
    std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += e.vec(i, k) * m(k, l);
            tmp[static_cast<std::size_t>(i) * n + l] = s;
        }
    SymMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < n; ++l) s += tmp[static_cast<std::size_t>(i) * n + l] * e.vec(j, l);
            r.set(i, j, s);
        }
    return r;
}

SymMatrix reconstruct(const EigenDecomposition& e, const Vec& values) {
    const int n = e.n;
    SymMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += values[k] * e.vec(i, k) * e.vec(j, k);
            r.set(i, j, s);
        }
    return r;
}

SymMatrix submatrix(const SymMatrix& m, const std::vector<int>& idx) {
    SymMatrix r(static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i; j < idx.size(); ++j)
            r.set(static_cast<int>(i), static_cast<int>(j), m(idx[i], idx[j]));
    return r;
}

Vec sym_to_coords(const SymMatrix& m) {
    const int n = m.dim();
    Vec c;
    c.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
    const double s2 = std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        c.push_back(m(i, i));
        for (int j = i + 1; j < n; ++j) c.push_back(s2 * m(i, j));
    }
    return c;
}

SymMatrix coords_to_sym(int n, const Vec& c) {
    SymMatrix m(n);
    const double inv_s2 = 1.0 / std::sqrt(2.0);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        m.set(i, i, c[k++]);
        for (int j = i + 1; j < n; ++j) m.set(i, j, c[k++] * inv_s2);
    }
    return m;
}

}  // namespace nlsdp
