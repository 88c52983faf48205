#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace nlsdp {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec& axpy(Vec& y, double alpha, const Vec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
    return y;
}

inline Vec scaled(const Vec& x, double alpha) {
    Vec r(x);
    for (double& v : r) v *= alpha;
    return r;
}

inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// Solves A x = b for a dense row-major N x N system by LU with partial
// pivoting. Returns false if a pivot falls below the degeneracy threshold.
bool solve_dense(std::vector<double> A, Vec b, int n, Vec& x);

}  // namespace nlsdp
