#pragma once

#include <stdexcept>

#include "nlsdp/problem.hpp"

namespace nlsdp {

/// Spectral data of A = G + Gamma for a pair (G, Gamma) in gph N_{S^n_+},
/// together with the penalty parameter of the envelope.
struct SecondOrderData {
    EigenDecomposition e;  // decomposition of G + Gamma
    double rho = 1.0;

    static SecondOrderData make(const SymMatrix& g, const SymMatrix& gamma, double rho);
};

class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sigma-term Upsilon = 2 <Gamma, Z G^dagger Z> in its entrywise form over
/// the alpha x gamma eigenvalue pairs of A = G + Gamma; always <= 0.
double sigma_term(const SymMatrix& g, const SymMatrix& gamma, const SymMatrix& z);

/// Closed form of the Moreau envelope of the second subderivative of the
/// indicator of K at ((h,G), (y,Gamma)) evaluated at (b, B).
double d2_moreau_envelope(const SecondOrderData& s, const Vec& b, const SymMatrix& B);

/// Matrix-block part only (no rho*|b|^2 term); the rho = 1 instance is the
/// quadratic term of the envelope's second-order expansion.
double d2_moreau_envelope_mat(const EigenDecomposition& e, double rho, const SymMatrix& B);

/// Independent verification of the closed form: projected gradient on the
/// defining minimization over the critical cone. Never uses the per-block
/// separable structure. Throws OracleFailure if the gap bound cannot be
/// certified within the iteration cap.
double d2_moreau_oracle(const SecondOrderData& s, const Vec& b, const SymMatrix& B);

struct SoscReport {
    double min_value = 0.0;
    Vec certificate_direction;
    bool holds = false;
    bool exact = false;  // true when the critical cone is a subspace (beta empty)
    int multistarts = 0;
};

/// Minimizes <hess_L d, d> - Upsilon(Gamma, dG[d]) over the unit sphere of
/// the critical cone at a KKT point. Exact reduction when the cone is a
/// subspace, multistart projected refinement otherwise.
SoscReport sosc_certificate(const NlsdpProblem& p, const KktPoint& pt);

struct ExpansionSample {
    double scale = 0.0;
    double max_ratio = 0.0;
};

struct ExpansionReport {
    std::vector<ExpansionSample> per_scale;
    double bound_constant = 0.0;  // max ratio over all scales and samples
    bool success = false;         // bounded across scales (no blow-up)
    double radius = 0.0;
    int base_points = 0;
    int directions_per_scale = 0;
    unsigned seed = 0;
};

struct ExpansionSpec {
    int base_points = 20;
    int directions_per_scale = 10;
    std::vector<double> scales = {1e-1, 1e-2, 1e-3, 1e-4};
    unsigned seed = 42;
};

/// Uniform second-order expansion check of the Moreau envelope around
/// Abar = G + Gamma with (G, Gamma) in gph N: samples A = G + Gamma' with
/// matching pi-signature and shrinking H, and reports the cubic-ratio
/// statistic |e(A+H) - e(A) - <Pi_-(A),H> - q(H)/2| / |H|^3.
ExpansionReport expansion_residual_moreau(const SymMatrix& abar, const ExpansionSpec& spec);

}  // namespace nlsdp
