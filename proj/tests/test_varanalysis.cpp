#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlsdp/varanalysis.hpp"
#include "test_util.hpp"

using namespace nlsdp;
using nlsdp::testing::random_rotation;
using nlsdp::testing::random_sym;
using nlsdp::testing::rotate_diag;

namespace {

// Admissible pair (G, Gamma) in gph N with prescribed positive/negative
// eigenvalues in a common random basis.
struct Pair {
    SymMatrix g;
    SymMatrix gamma;
};

Pair random_pair(std::mt19937_64& rng, int n, int n_pos, int n_zero) {
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    Vec dpos(n, 0.0), dneg(n, 0.0);
    for (int i = 0; i < n_pos; ++i) dpos[i] = unif(rng);
    for (int i = n_pos + n_zero; i < n; ++i) dneg[i] = -unif(rng);
    const std::vector<double> q = random_rotation(rng, n);
    return Pair{rotate_diag(q, dpos), rotate_diag(q, dneg)};
}

}  // namespace

TEST_CASE("sigma_term basics") {
    // Gamma = 0: gamma(A) empty.
    CHECK(sigma_term(SymMatrix::diag({1.0, 2.0}), SymMatrix(2), SymMatrix::identity(2)) ==
          doctest::Approx(0.0));
    // G = 0: alpha(A) empty.
    CHECK(sigma_term(SymMatrix(2), SymMatrix::diag({-1.0, -2.0}), SymMatrix::identity(2)) ==
          doctest::Approx(0.0));
    // Hand-computed single-pair case.
    SymMatrix z(2);
    z.set(0, 1, 1.0);
    CHECK(sigma_term(SymMatrix::diag({1.0, 0.0}), SymMatrix::diag({0.0, -1.0}), z) ==
          doctest::Approx(-2.0));
    // Invalid pair rejected.
    CHECK_THROWS_AS(
        sigma_term(SymMatrix::diag({1.0, 1.0}), SymMatrix::diag({-1.0, 0.0}), z),
        std::invalid_argument);
}

TEST_CASE("sigma_term equals the generalized-inverse form") {
    std::mt19937_64 rng(31);
    for (int inst = 0; inst < 40; ++inst) {
        const Pair pr = random_pair(rng, 4, 2, 1);
        const SymMatrix z = random_sym(rng, 4);
        const double entrywise = sigma_term(pr.g, pr.gamma, z);
        // 2 <Gamma, Z G^dagger Z> assembled from the spectral data of G.
        const EigenDecomposition eg = eig_sym(pr.g);
        Vec pinv(eg.lambda);
        for (double& v : pinv) v = (std::fabs(v) > 1e-8) ? 1.0 / v : 0.0;
        const SymMatrix gdag = reconstruct(eg, pinv);
        // Z G^dagger Z via dense products.
        const int n = 4;
        const auto zd = z.dense();
        const auto gd = gdag.dense();
        std::vector<double> tmp(16, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += zd[i * 4 + k] * gd[k * 4 + j];
                tmp[i * 4 + j] = s;
            }
        SymMatrix zgz(4);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += tmp[i * 4 + k] * zd[k * 4 + j];
                zgz.set(i, j, s);
            }
        const double direct = 2.0 * frobenius_inner(pr.gamma, zgz);
        CHECK(std::fabs(entrywise - direct) <= 1e-8 * std::max(1.0, std::fabs(direct)));
        CHECK(-entrywise >= -1e-12);  // -Upsilon is nonnegative
    }
}

TEST_CASE("d2_moreau_envelope reductions") {
    const Vec b{0.5, -0.25};
    const double bb = dot(b, b);

    // alpha = everything.
    const SecondOrderData s1 = SecondOrderData::make(SymMatrix::diag({2.0, 1.0}), SymMatrix(2), 3.0);
    std::mt19937_64 rng(32);
    const SymMatrix bmat2 = random_sym(rng, 2);
    CHECK(d2_moreau_envelope(s1, b, bmat2) == doctest::Approx(3.0 * bb));

    // gamma = everything.
    const SecondOrderData s2 =
        SecondOrderData::make(SymMatrix(2), SymMatrix::diag({-1.0, -2.0}), 3.0);
    CHECK(d2_moreau_envelope(s2, b, bmat2) ==
          doctest::Approx(3.0 * frobenius_inner(bmat2, bmat2) + 3.0 * bb));
}

TEST_CASE("closed form agrees with the oracle on a mixed instance") {
    const SecondOrderData s =
        SecondOrderData::make(SymMatrix::diag({2.0, 0.0, 0.0}), SymMatrix::diag({0.0, 0.0, -1.0}),
                              1.0);
    std::mt19937_64 rng(33);
    const SymMatrix bmat = random_sym(rng, 3);
    const Vec b{0.3};
    const double closed = d2_moreau_envelope(s, b, bmat);
    const double oracle = d2_moreau_oracle(s, b, bmat);
    CHECK(std::fabs(closed - oracle) <= 1e-6 * std::max(1.0, std::fabs(closed)));
}

TEST_CASE("oracle trivial cases") {
    const Vec b{1.0};
    const SecondOrderData s1 =
        SecondOrderData::make(SymMatrix::diag({1.0, 0.5}), SymMatrix(2), 2.0);
    std::mt19937_64 rng(34);
    CHECK(d2_moreau_oracle(s1, b, random_sym(rng, 2)) == doctest::Approx(2.0));

    // B in the critical cone with vanishing sigma-term: minimizer Z = B.
    const SecondOrderData s2 =
        SecondOrderData::make(SymMatrix::diag({1.0, 0.0}), SymMatrix(2), 2.0);
    SymMatrix bmat(2);
    bmat.set(0, 0, 0.7);
    bmat.set(0, 1, 0.2);
    bmat.set(1, 1, 0.4);  // beta block PSD
    CHECK(d2_moreau_oracle(s2, b, bmat) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("envelope properties: rho monotone, degree-2 homogeneous, nonnegative") {
    std::mt19937_64 rng(35);
    for (int inst = 0; inst < 60; ++inst) {
        const Pair pr = random_pair(rng, 4, 1, 1);
        const SymMatrix bmat = random_sym(rng, 4);
        Vec b{0.4, -0.1};
        const SecondOrderData s_lo = SecondOrderData::make(pr.g, pr.gamma, 0.5);
        const SecondOrderData s_mid = SecondOrderData::make(pr.g, pr.gamma, 1.0);
        const SecondOrderData s_hi = SecondOrderData::make(pr.g, pr.gamma, 10.0);
        const double v_lo = d2_moreau_envelope(s_lo, b, bmat);
        const double v_mid = d2_moreau_envelope(s_mid, b, bmat);
        const double v_hi = d2_moreau_envelope(s_hi, b, bmat);
        CHECK(v_lo >= -1e-12);
        CHECK(v_mid >= v_lo - 1e-10);
        CHECK(v_hi >= v_mid - 1e-10);
        const double t = 1.7;
        Vec tb = b;
        for (double& v : tb) v *= t;
        const double scaled = d2_moreau_envelope(s_mid, tb, bmat * t);
        CHECK(std::fabs(scaled - t * t * v_mid) <= 1e-10 * std::max(1.0, std::fabs(scaled)));
    }
}

TEST_CASE("closed form vs oracle on random admissible instances") {
    std::mt19937_64 rng(36);
    std::uniform_int_distribution<int> pick_n(2, 5);
    const double rhos[3] = {0.5, 1.0, 10.0};
    for (int inst = 0; inst < 40; ++inst) {
        const int n = pick_n(rng);
        std::uniform_int_distribution<int> pick_pos(0, n - 1);
        const int n_pos = pick_pos(rng);
        std::uniform_int_distribution<int> pick_zero(0, n - 1 - n_pos);
        const int n_zero = pick_zero(rng);
        const Pair pr = random_pair(rng, n, n_pos, n_zero);
        const SecondOrderData s = SecondOrderData::make(pr.g, pr.gamma, rhos[inst % 3]);
        const SymMatrix bmat = random_sym(rng, n);
        const Vec b{0.2, -0.6};
        const double closed = d2_moreau_envelope(s, b, bmat);
        const double oracle = d2_moreau_oracle(s, b, bmat);
        CHECK(std::fabs(closed - oracle) <= 1e-6 * std::max(1.0, std::fabs(closed)));
    }
}

TEST_CASE("sosc certificate on the fixtures and a convex quadratic") {
    const NlsdpProblem& p61 = find_problem("example-6.1");
    const MultiplierSetModel& m61 = find_multiplier_model("example-6.1");
    const KktPoint pt61{m61.x_opt, m61.lambda_ref.vec, m61.lambda_ref.mat};
    const SoscReport r61 = sosc_certificate(p61, pt61);
    CHECK(r61.holds);
    CHECK(r61.min_value > 0.0);

    const NlsdpProblem& p62 = find_problem("example-6.2");
    const MultiplierSetModel& m62 = find_multiplier_model("example-6.2");
    const KktPoint pt62{m62.x_opt, m62.lambda_ref.vec, m62.lambda_ref.mat};
    const SoscReport r62 = sosc_certificate(p62, pt62);
    CHECK(r62.holds);
    // Hessian Diag(0,3) restricted to the cone {w1 = 0}.
    CHECK(r62.min_value == doctest::Approx(3.0).epsilon(1e-4));

    // Unconstrained convex quadratic with a strictly feasible constant block.
    NlsdpProblem q;
    q.name = "quad";
    q.dim_x = 2;
    q.dim_h = 0;
    q.dim_g = 1;
    q.f = [](const Vec& x) { return 0.5 * dot(x, x); };
    q.grad_f = [](const Vec& x) { return x; };
    q.G = [](const Vec&) { return SymMatrix::identity(1); };
    q.dG = [](const Vec&, const Vec&) { return SymMatrix(1); };
    q.dG_adjoint = [](const Vec&, const SymMatrix&) { return Vec{0.0, 0.0}; };
    q.hess_lagrangian = [](const Vec&, const Vec&, const SymMatrix&, const Vec& d) { return d; };
    const KktPoint pt0{Vec{0.0, 0.0}, Vec{}, SymMatrix(1)};
    const SoscReport rq = sosc_certificate(q, pt0);
    CHECK(rq.holds);
    CHECK(rq.exact);
    CHECK(rq.min_value == doctest::Approx(1.0));

    // Precondition: the point must be KKT.
    const KktPoint bad{Vec{1.0, 0.0}, Vec{}, SymMatrix(1)};
    CHECK_THROWS_AS(sosc_certificate(q, bad), std::invalid_argument);
}

TEST_CASE("sosc certificate matches a dense grid on example 6.2") {
    const NlsdpProblem& p = find_problem("example-6.2");
    const MultiplierSetModel& m = find_multiplier_model("example-6.2");
    const KktPoint pt{m.x_opt, m.lambda_ref.vec, m.lambda_ref.mat};
    const SoscReport rep = sosc_certificate(p, pt);

    // Brute force over the unit circle with a loose feasibility band.
    const EigenDecomposition e = eig_sym(p.G(pt.x) + pt.gamma);
    double best = std::numeric_limits<double>::infinity();
    const int grid = 20000;
    for (int i = 0; i < grid; ++i) {
        const double th = 2.0 * 3.14159265358979 * i / grid;
        const Vec d{std::cos(th), std::sin(th)};
        const SymMatrix gd = p.dG(pt.x, d);
        const SymMatrix res = gd - project_critical_cone(e, gd);
        if (res.norm() > 1e-3) continue;
        const Vec hd = p.hess_lagrangian(pt.x, pt.y, pt.gamma, d);
        const double q = dot(hd, d) - sigma_term(p.G(pt.x), pt.gamma, gd);
        best = std::min(best, q);
    }
    CHECK(std::fabs(best - rep.min_value) <= 1e-4 * std::max(1.0, std::fabs(best)));
}

TEST_CASE("expansion residual trivial and bounded cases") {
    ExpansionSpec spec;
    spec.base_points = 8;
    spec.directions_per_scale = 5;

    // Strictly positive definite: locally zero envelope.
    const ExpansionReport pos = expansion_residual_moreau(SymMatrix::diag({2.0, 1.0}), spec);
    CHECK(pos.success);
    CHECK(pos.bound_constant <= 1e-8);

    // Strictly negative definite: the envelope is exactly quadratic.
    const ExpansionReport neg = expansion_residual_moreau(SymMatrix::diag({-1.0, -2.0}), spec);
    CHECK(neg.success);
    CHECK(neg.bound_constant <= 1e-6);

    // Mixed: ratio bounded across scales.
    const ExpansionReport mixed = expansion_residual_moreau(SymMatrix::diag({1.0, -1.0}), spec);
    CHECK(mixed.success);
    CHECK(std::isfinite(mixed.bound_constant));
}
