#pragma once

#include <string>
#include <vector>

#include "nlsdp/linalg.hpp"

namespace nlsdp {

/// Dense real symmetric matrix storing the upper triangle, row-major.
/// Values are immutable in spirit: all solver code treats SymMatrix as a
/// value type and builds new matrices instead of mutating shared ones.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0) {}

    static SymMatrix identity(int n);
    static SymMatrix diag(const Vec& d);
    /// Reads the upper triangle of a row-major dense n x n array.
    static SymMatrix from_dense(int n, const double* dense);

    int dim() const { return n_; }

    double operator()(int i, int j) const { return a_[index(i, j)]; }
    void set(int i, int j, double v) { a_[index(i, j)] = v; }
    void add(int i, int j, double v) { a_[index(i, j)] += v; }

    SymMatrix& operator+=(const SymMatrix& other);
    SymMatrix& operator-=(const SymMatrix& other);
    SymMatrix& operator*=(double s);

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

    double norm() const;  // Frobenius
    double max_abs() const;
    bool is_finite() const;

    Vec matvec(const Vec& x) const;
    std::vector<double> dense() const;  // row-major n x n

    const std::vector<double>& packed() const { return a_; }

private:
    std::size_t index(int i, int j) const {
        if (i > j) std::swap(i, j);
        return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
               (j - i);
    }

    int n_ = 0;
    std::vector<double> a_;
};

/// Frobenius inner product trace(AB); off-diagonal entries count twice.
double frobenius_inner(const SymMatrix& a, const SymMatrix& b);

/// Ordered spectral factorization A = P Diag(lambda) P^T with lambda
/// nonincreasing and the index partition alpha/beta/gamma of positive, zero
/// and negative eigenvalues under zero_tol. Ties at +-zero_tol land in beta.
struct EigenDecomposition {
    int n = 0;
    std::vector<double> vectors;  // column-major, column k is the k-th eigenvector
    Vec lambda;                   // nonincreasing
    std::vector<int> alpha, beta, gamma;
    double zero_tol = 0.0;

    double vec(int i, int k) const { return vectors[static_cast<std::size_t>(k) * n + i]; }
};

double default_zero_tol(const SymMatrix& a);

/// Cyclic Jacobi eigensolver. Deterministic: fixed sweep order, eigenvalues
/// stably sorted nonincreasing, each eigenvector's first nonzero component
/// made positive. Throws std::invalid_argument on non-finite input.
EigenDecomposition eig_sym(const SymMatrix& a, double zero_tol);
EigenDecomposition eig_sym(const SymMatrix& a);

/// Partition of {0..n-1} into maximal blocks of equal eigenvalues
/// (adjacent eigenvalues within group_tol share a block).
struct PiSignature {
    std::vector<std::vector<int>> blocks;
    bool operator==(const PiSignature& other) const { return blocks == other.blocks; }
};

PiSignature pi_signature(const EigenDecomposition& e, double group_tol);

/// Smallest gap between adjacent distinct eigenvalue groups; +inf if only
/// one group.
double min_eigen_gap(const EigenDecomposition& e, double group_tol);

// Basis-change helpers shared by the cone calculus.
SymMatrix to_eigenbasis(const EigenDecomposition& e, const SymMatrix& h);    // P^T H P
SymMatrix from_eigenbasis(const EigenDecomposition& e, const SymMatrix& m);  // P M P^T
SymMatrix reconstruct(const EigenDecomposition& e, const Vec& values);       // P Diag(v) P^T

/// Extracts the principal submatrix indexed by rows/cols of `idx`.
SymMatrix submatrix(const SymMatrix& m, const std::vector<int>& idx);

/// Orthonormal coordinates of S^n (diagonal as-is, off-diagonal scaled by
/// sqrt(2)) so that Euclidean and Frobenius norms agree.
Vec sym_to_coords(const SymMatrix& m);
SymMatrix coords_to_sym(int n, const Vec& c);

}  // namespace nlsdp
