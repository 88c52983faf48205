#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlsdp/cone.hpp"

namespace nlsdp {

/// Oracle bundle for min f(x) s.t. h(x) = 0, G(x) PSD. All oracles must be
/// pure; the library never caches their results across iterations.
struct NlsdpProblem {
    std::string name;
    int dim_x = 0;
    int dim_h = 0;  // may be zero
    int dim_g = 0;  // order of the SDP block

    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> grad_f;
    std::function<Vec(const Vec&)> h;                          // size dim_h
    std::function<Vec(const Vec&, const Vec&)> jac_h;          // J(x) d
    std::function<Vec(const Vec&, const Vec&)> jac_h_adjoint;  // J(x)^T y
    std::function<SymMatrix(const Vec&)> G;
    std::function<SymMatrix(const Vec&, const Vec&)> dG;          // dG(x)[d]
    std::function<Vec(const Vec&, const SymMatrix&)> dG_adjoint;  // dG(x)*[Gamma]
    // Action of the Lagrangian Hessian in x; needed by the SOSC certificate
    // and the perturbed-KKT Newton solves.
    std::function<Vec(const Vec&, const Vec&, const SymMatrix&, const Vec&)> hess_lagrangian;
};

struct KktPoint {
    Vec x;
    Vec y;
    SymMatrix gamma;

    KElement lambda() const { return KElement(y, gamma); }
};

struct Perturbation {
    Vec a1;       // objective tilt, size dim_x
    Vec a2;       // equality shift, size dim_h
    SymMatrix b;  // SDP shift

    double norm() const;
    static Perturbation zero(const NlsdpProblem& p);
};

/// Exact projection machinery for the multiplier set M(x_opt) of a fixture,
/// together with the reference optimum used by probes and trace distances.
struct MultiplierSetModel {
    Vec x_opt;
    KElement lambda_ref;  // stationarity-consistent multiplier at x_opt

    std::function<KElement(const KElement&)> project;
    std::function<bool(const KElement&, double)> contains;
    // Projection onto the subset sharing the pi-signature of lambda_ref's
    // matrix block; empty when the fixture does not support Assumption 1.
    std::function<KElement(const KElement&)> project_pi_restricted;
    // Projection onto the stationarity-exact multiplier set when it is
    // narrower than `project`'s target (Example 6.2); falls back to project.
    std::function<KElement(const KElement&)> project_kkt;

    double distance(const KElement& lambda) const { return (lambda - project(lambda)).norm(); }
    KElement kkt_project(const KElement& lambda) const {
        return project_kkt ? project_kkt(lambda) : project(lambda);
    }
};

KElement phi(const NlsdpProblem& p, const Vec& x);

double lagrangian_value(const NlsdpProblem& p, const KktPoint& pt);
Vec lagrangian_grad_x(const NlsdpProblem& p, const KktPoint& pt);

/// R(x, lambda) = |grad_x L| + |Phi(x) - Pi_K(Phi(x) + lambda)|.
double residual_R(const NlsdpProblem& p, const KktPoint& pt);

/// Residual of the canonically perturbed KKT system; zero exactly at
/// solutions of the perturbed system.
double perturbed_kkt_residual(const NlsdpProblem& p, const KktPoint& pt, const Perturbation& pert);

/// Shifted problem min f - <a1, x> s.t. h = a2, G - b PSD, sharing oracles
/// with the base problem.
NlsdpProblem perturbed_problem(const NlsdpProblem& p, const Perturbation& pert);

// Fixture registry.
const NlsdpProblem& find_problem(const std::string& name);
std::vector<std::string> problem_names();
const MultiplierSetModel& find_multiplier_model(const std::string& name);
KktPoint default_start(const std::string& name);

}  // namespace nlsdp
