#pragma once

#include "heatctl/domain.hpp"
#include "heatctl/linalg.hpp"

namespace heatctl {

/// alpha_ij = (1 - e^{(lambda_i+lambda_j) T}) / |lambda_i+lambda_j|
///            * <eta_i, eta_j>_{L2(omega)},  row-major m x m.
/// The lambda_i + lambda_j = 0 entry degenerates to T * <eta_i, eta_j>_omega.
std::vector<double> assemble_alpha(const SpectralDomain& domain, const SubdomainWindow& window,
                                   double T, int m);

/// beta_i = e^{lambda_i T} <u_0, eta_i>. Computed both directly and through
/// psi = e^{TP} u_0; throws if the two routes disagree beyond 1e-10
/// (signals quadrature inadequacy).
std::vector<double> assemble_beta(const SpectralDomain& domain, const Field& u0, double T, int m);

struct SubdomainControlSystem {
    SpectralDomain domain;
    SubdomainWindow window{0.0, 1.0};
    double horizon = 0.0;
    int m = 0;
    std::vector<double> alpha;       // m x m
    std::vector<double> beta;        // m
    std::vector<double> s;           // solution of alpha s = beta
    CholeskyFactor chol;
    double condition_estimate = 0.0;
    double solve_residual = 0.0;     // ||alpha s - beta||_inf / ||beta||_inf
    double energy = 0.0;             // sum_j beta_j s_j = ||g||_H^2
    double discarded_mass = 0.0;     // fraction of u_0 outside V_m
};

/// Assemble and solve the m-mode null-control system for initial value u0.
/// Components of u0 beyond V_m are projected away (fraction recorded).
SubdomainControlSystem solve_control(const SpectralDomain& domain, const SubdomainWindow& window,
                                     double T, int m, const Field& u0);

/// g(x, t) = sum_j e^{lambda_j (T - t)} s_j eta_j(x), t in [0, T].
double control_evaluate(const SubdomainControlSystem& system, double x, double t);

/// phi = sum_j s_j eta_j.
Field control_profile(const SubdomainControlSystem& system);

struct GalerkinReport {
    double closed_form_terminal_rel = 0.0;  // Duhamel route, reduces to ||beta - alpha s||
    double rk4_terminal_rel = 0.0;          // classical one-step integration, nt steps
};

/// Integrate the controlled m-mode system du_i/dt = lambda_i u_i
/// - sum_j <eta_i,eta_j>_omega e^{lambda_j(T-t)} s_j both ways and report
/// terminal norms relative to ||u_0||.
GalerkinReport galerkin_verify(const SubdomainControlSystem& system, const Field& u0, int nt);

/// sum_j beta_j s_j.
double control_energy(const SubdomainControlSystem& system);

/// Space-time Simpson quadrature of g^2 over omega x [0, T] (cross-check).
double control_energy_quadrature(const SubdomainControlSystem& system, int nt = 256);

} // namespace heatctl
