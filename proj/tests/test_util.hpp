#pragma once

#include <cmath>
#include <random>

#include "nlsdp/symmat.hpp"

namespace nlsdp::testing {

inline SymMatrix random_sym(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> unif(-scale, scale);
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, unif(rng));
    return m;
}

inline std::vector<double> random_rotation(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i) * n + i] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double th = angle(rng);
            const double c = std::cos(th), s = std::sin(th);
            for (int r = 0; r < n; ++r) {
                const double ri = q[static_cast<std::size_t>(r) * n + i];
                const double rj = q[static_cast<std::size_t>(r) * n + j];
                q[static_cast<std::size_t>(r) * n + i] = c * ri - s * rj;
                q[static_cast<std::size_t>(r) * n + j] = s * ri + c * rj;
            }
        }
    return q;
}

inline SymMatrix rotate_diag(const std::vector<double>& q, const Vec& d) {
    const int n = static_cast<int>(d.size());
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += q[static_cast<std::size_t>(i) * n + k] * d[k] *
                     q[static_cast<std::size_t>(j) * n + k];
            m.set(i, j, s);
        }
    return m;
}

/// Independent eigenvalue oracle: shifted power iteration with deflation.
/// Shifts by 1 + |A|_F so the iteration matrix is positive definite, peels
/// eigenvalues off largest-first.
inline Vec power_iteration_eigenvalues(const SymMatrix& a, std::mt19937_64& rng) {
    const int n = a.dim();
    const double shift = 1.0 + a.norm();
    std::vector<double> work = a.dense();
    for (int i = 0; i < n; ++i) work[static_cast<std::size_t>(i) * n + i] += shift;
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Vec out;
    for (int k = 0; k < n; ++k) {
        Vec v(n);
        for (double& x : v) x = unif(rng);
        double lam = 0.0;
        for (int it = 0; it < 2000000; ++it) {
            Vec w(n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) w[i] += work[static_cast<std::size_t>(i) * n + j] * v[j];
            const double wn = norm2(w);
            for (double& x : w) x /= wn;
            const double lam_new = [&] {
                Vec t(n, 0.0);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        t[i] += work[static_cast<std::size_t>(i) * n + j] * w[j];
                return dot(w, t);
            }();
            const bool settled = std::fabs(lam_new - lam) <= 1e-14 * std::max(1.0, std::fabs(lam_new));
            v = std::move(w);
            lam = lam_new;
            if (settled && it > 10) break;
        }
        out.push_back(lam - shift);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                work[static_cast<std::size_t>(i) * n + j] -= lam * v[i] * v[j];
    }
    return out;  // nonincreasing by construction
}

}  // namespace nlsdp::testing
