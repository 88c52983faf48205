#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlsdp/problem.hpp"
#include "test_util.hpp"

using namespace nlsdp;
using nlsdp::testing::random_sym;

namespace {

SymMatrix e33_scaled(double v) {
    SymMatrix m(3);
    m.set(2, 2, v);
    return m;
}

// Oracle consistency: adjoints against inner products, gradients against
// central differences.
void check_oracles(const NlsdpProblem& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    for (int probe = 0; probe < 20; ++probe) {
        Vec x(p.dim_x), d(p.dim_x);
        for (double& v : x) v = unif(rng);
        for (double& v : d) v = unif(rng);
        const SymMatrix gamma = random_sym(rng, p.dim_g);

        const double lhs = frobenius_inner(p.dG(x, d), gamma);
        const double rhs = dot(d, p.dG_adjoint(x, gamma));
        CHECK(std::fabs(lhs - rhs) <= 1e-9 * std::max(1.0, std::fabs(lhs)));

        const double step = 1e-5;
        const Vec g = p.grad_f(x);
        for (int i = 0; i < p.dim_x; ++i) {
            Vec xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            const double fd = (p.f(xp) - p.f(xm)) / (2.0 * step);
            CHECK(std::fabs(fd - g[i]) <= 1e-7 * std::max(1.0, std::fabs(g[i])));
        }
        // dG against differences of G.
        Vec xp = x, xm = x;
        axpy(xp, step, d);
        axpy(xm, -step, d);
        const SymMatrix fd_mat = (p.G(xp) - p.G(xm)) * (1.0 / (2.0 * step));
        CHECK((fd_mat - p.dG(x, d)).norm() <= 1e-7 * std::max(1.0, p.dG(x, d).norm()));

        // Hessian action against differences of the Lagrangian gradient.
        const Vec y(p.dim_h, 0.0);
        const KktPoint ptp{xp, y, gamma};
        const KktPoint ptm{xm, y, gamma};
        const Vec hd = p.hess_lagrangian(x, y, gamma, d);
        const Vec fd_h = lagrangian_grad_x(p, ptp) - lagrangian_grad_x(p, ptm);
        for (int i = 0; i < p.dim_x; ++i) {
            const double fd = fd_h[i] / (2.0 * step);
            CHECK(std::fabs(fd - hd[i]) <= 1e-6 * std::max(1.0, std::fabs(hd[i])));
        }
    }
}

}  // namespace

TEST_CASE("registry") {
    CHECK(problem_names() == std::vector<std::string>{"example-6.1", "example-6.2"});
    CHECK_THROWS_AS(find_problem("nosuch"), std::invalid_argument);
    CHECK(find_problem("example-6.1").dim_x == 1);
    CHECK(find_problem("example-6.2").dim_x == 2);
}

TEST_CASE("oracle consistency for both fixtures") {
    std::mt19937_64 rng(21);
    check_oracles(find_problem("example-6.1"), rng);
    check_oracles(find_problem("example-6.2"), rng);
}

TEST_CASE("lagrangian values on example 6.1") {
    const NlsdpProblem& p = find_problem("example-6.1");
    // Gamma = 0 reduces to f.
    KktPoint pt{Vec{0.7}, Vec{}, SymMatrix(3)};
    CHECK(lagrangian_value(p, pt) == doctest::Approx(p.f(pt.x)));
    // x = 1, Gamma = -E33: 0.5 + <-E33, -E33> = 1.5.
    pt = KktPoint{Vec{1.0}, Vec{}, e33_scaled(-1.0)};
    CHECK(lagrangian_value(p, pt) == doctest::Approx(1.5));
    // Gradient vanishes at x = 0 for any Gamma.
    std::mt19937_64 rng(22);
    pt = KktPoint{Vec{0.0}, Vec{}, random_sym(rng, 3)};
    CHECK(norm2(lagrangian_grad_x(p, pt)) == doctest::Approx(0.0));
}

TEST_CASE("lagrangian on a linear one-dimensional instance") {
    // f = 2x, G = diag(x + 1): symbolic L = 2x + g11 (x + 1).
    NlsdpProblem p;
    p.name = "linear-1d";
    p.dim_x = 1;
    p.dim_h = 0;
    p.dim_g = 1;
    p.f = [](const Vec& x) { return 2.0 * x[0]; };
    p.grad_f = [](const Vec&) { return Vec{2.0}; };
    p.G = [](const Vec& x) { return SymMatrix::diag({x[0] + 1.0}); };
    p.dG = [](const Vec&, const Vec& d) { return SymMatrix::diag({d[0]}); };
    p.dG_adjoint = [](const Vec&, const SymMatrix& g) { return Vec{g(0, 0)}; };
    p.hess_lagrangian = [](const Vec&, const Vec&, const SymMatrix&, const Vec&) {
        return Vec{0.0};
    };
    const KktPoint pt{Vec{0.3}, Vec{}, SymMatrix::diag({-0.25})};
    CHECK(lagrangian_value(p, pt) == doctest::Approx(2.0 * 0.3 - 0.25 * 1.3));
    CHECK(lagrangian_grad_x(p, pt)[0] == doctest::Approx(2.0 - 0.25));
}

TEST_CASE("residual_R on example 6.1") {
    const NlsdpProblem& p = find_problem("example-6.1");
    // Paper optimum with the picked multiplier.
    const KktPoint opt{Vec{0.0}, Vec{}, SymMatrix::diag({0.0, -1.0, -2.0})};
    CHECK(residual_R(p, opt) <= 1e-12);
    // x = 1, Gamma = 0: grad 1.5, infeasibility 1.
    const KktPoint off{Vec{1.0}, Vec{}, SymMatrix(3)};
    CHECK(residual_R(p, off) == doctest::Approx(2.5));
    // Strictly feasible stationary point of an interior instance.
    const KktPoint interior{Vec{0.0}, Vec{}, SymMatrix(3)};
    CHECK(residual_R(p, interior) <= 1e-12);
}

TEST_CASE("perturbed residual") {
    const NlsdpProblem& p = find_problem("example-6.1");
    const KktPoint opt{Vec{0.0}, Vec{}, SymMatrix::diag({0.0, -1.0, -2.0})};
    CHECK(perturbed_kkt_residual(p, opt, Perturbation::zero(p)) <= 1e-12);

    // A constructed point solves the system perturbed by its own residuals.
    const KktPoint pt{Vec{0.2}, Vec{}, SymMatrix::diag({0.0, -1.0, -2.0})};
    Perturbation pert = Perturbation::zero(p);
    pert.a1 = lagrangian_grad_x(p, pt);
    pert.b = p.G(pt.x);  // makes G - b = 0, paired with NSD Gamma
    CHECK(perturbed_kkt_residual(p, pt, pert) <= 1e-10);
}

TEST_CASE("multiplier set model for example 6.1") {
    const MultiplierSetModel& m = find_multiplier_model("example-6.1");
    std::mt19937_64 rng(23);
    for (int inst = 0; inst < 50; ++inst) {
        const SymMatrix g = random_sym(rng, 3);
        const KElement lam(Vec{}, g);
        const EigenDecomposition e = eig_sym(g, 0.0);
        CHECK(m.contains(lam, 1e-10) == (e.lambda.front() <= 1e-10));
        const KElement proj = m.project(lam);
        CHECK(m.contains(proj, 1e-8));
        CHECK((m.project(proj) - proj).norm() <= 1e-10);  // idempotent
    }
    // Restricted projection inside M returns the point itself.
    const KElement inside(Vec{}, SymMatrix::diag({-0.5, -1.0, -2.0}));
    CHECK((m.project_pi_restricted(inside) - inside).norm() <= 1e-10);
    // Outside, the leading eigenvalue is zeroed.
    const KElement outside(Vec{}, SymMatrix::diag({0.3, -1.0, -2.0}));
    const KElement hat = m.project_pi_restricted(outside);
    CHECK(hat.mat(0, 0) == doctest::Approx(0.0));
    CHECK(hat.mat(1, 1) == doctest::Approx(-1.0));
}

TEST_CASE("multiplier set model for example 6.2") {
    const MultiplierSetModel& m = find_multiplier_model("example-6.2");
    SymMatrix a(2);
    a.set(0, 0, 1.0);
    a.set(0, 1, -2.0);
    a.set(1, 1, 1.0);

    // The paper's printed membership: NSD block with <A, -Gamma> <= 2.
    SymMatrix ok(3);
    ok.set(1, 1, -1.0);
    CHECK(m.contains(KElement(Vec{}, ok), 1e-10));
    SymMatrix heavy(3);  // <A, -Gamma> = 3 > 2
    heavy.set(0, 0, -1.5);
    heavy.set(1, 1, -1.5);
    CHECK_FALSE(m.contains(KElement(Vec{}, heavy), 1e-10));
    SymMatrix indef(3);
    indef.set(0, 0, 0.5);
    CHECK_FALSE(m.contains(KElement(Vec{}, indef), 1e-10));

    std::mt19937_64 rng(24);
    for (int inst = 0; inst < 30; ++inst) {
        const KElement lam(Vec{}, random_sym(rng, 3));
        const KElement proj = m.project(lam);
        CHECK(m.contains(proj, 1e-7));
        CHECK((m.project(proj) - proj).norm() <= 1e-7);
        // Stationarity-exact projection satisfies the trace identity.
        const KElement kkt = m.kkt_project(lam);
        SymMatrix c(3);
        c.set(0, 0, 1.0);
        c.set(0, 1, -2.0);
        c.set(1, 1, 1.0);
        c.set(2, 2, 1.0);
        CHECK(frobenius_inner(c, kkt.mat) == doctest::Approx(-2.0).epsilon(1e-6));
        const EigenDecomposition e = eig_sym(kkt.mat, 0.0);
        CHECK(e.lambda.front() <= 1e-7);
    }
}
