#pragma once

#include "nlsdp/symmat.hpp"

namespace nlsdp {

/// Element of the product space Y x S^n carrying the equality block and the
/// SDP block. The cone K = {0} x S^n_+ acts blockwise on it.
struct KElement {
    Vec vec;
    SymMatrix mat;

    KElement() = default;
    KElement(Vec v, SymMatrix m) : vec(std::move(v)), mat(std::move(m)) {}

    double norm() const;
    KElement& operator+=(const KElement& o);
    KElement& operator-=(const KElement& o);
    KElement& operator*=(double s);
    friend KElement operator+(KElement a, const KElement& b) { return a += b; }
    friend KElement operator-(KElement a, const KElement& b) { return a -= b; }
    friend KElement operator*(KElement a, double s) { return a *= s; }
};

double inner(const KElement& a, const KElement& b);

SymMatrix project_psd(const SymMatrix& a);
SymMatrix project_psd(const EigenDecomposition& e);
SymMatrix project_nsd(const SymMatrix& a);
SymMatrix project_nsd(const EigenDecomposition& e);

/// Projection onto K: the vector block goes to zero, the matrix block to the
/// PSD cone.
KElement project_K(const KElement& z);
double dist_K(const KElement& z);

/// Moreau envelope of the PSD-cone indicator at unit parameter:
/// (1/2) dist^2(A, S^n_+).
double moreau_env_indicator(const SymMatrix& a);

/// Directional derivative of the PSD projection at the matrix underlying `e`
/// along H (blockwise formula with the inner projection on the beta block).
SymMatrix dir_deriv_projection(const EigenDecomposition& e, const SymMatrix& h);

/// Entrywise difference quotients of max(.,0) over eigenvalue pairs; 0/0 is 1
/// by convention and eigenvalues classified as zero are treated exactly.
struct SigmaMatrix {
    SymMatrix entries;
};

SigmaMatrix sigma_matrix(const EigenDecomposition& e);

/// Membership of U in the critical cone of S^n_+ described by the
/// eigendecomposition of X+Y for (X,Y) in gph N_{S^n_+}.
bool critical_cone_membership(const EigenDecomposition& e_x_plus_y, const SymMatrix& u, double tol);

/// Exact projection of M onto that critical cone (free alpha blocks, PSD
/// projection of the beta block, zero beta-gamma and gamma-gamma blocks).
SymMatrix project_critical_cone(const EigenDecomposition& e_x_plus_y, const SymMatrix& m);

/// True iff X is PSD, Gamma is NSD and <X, Gamma> vanishes, each to tol.
bool in_normal_cone(const SymMatrix& x, const SymMatrix& gamma, double tol);

}  // namespace nlsdp
