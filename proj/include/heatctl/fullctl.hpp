#pragma once

#include "heatctl/domain.hpp"
#include "heatctl/oracle.hpp"

#include <stdexcept>

namespace heatctl {

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Field built from a truncated power series, with how far the series ran
/// and a bound on what was dropped.
struct SeriesField {
    Field field;
    int terms_used = 0;       // max over modes
    double tail_bound = 0.0;  // largest per-mode remainder estimate
};

/// b = sum_j Laplacian^j z (-tau)^j / j!, per mode the scalar series for
/// e^{-lambda_j tau} z_j. Throws ConvergenceError when a mode's terms are
/// still growing at the cap (growth constant times tau >= 1 territory).
SeriesField compute_b(const SpectralDomain& domain, const Field& z, double tau,
                      int max_terms = 200, double eps = 1e-14);

/// Stationary control for the window [T0, T], tau = T - T0:
///   f_j = lambda_j * S(q_j) * (b_j - u_j(T0)),  q_j = e^{lambda_j tau},
/// with S the all-integers geometric sum q/(1-q) or the dyadic-as-printed
/// series sum_{k>=1} q^{2^k}. On the circle the zero mode is augmented so the
/// constant part of the target is hit: mean(f) = (mean(u_T0) - mean(z))/tau.
struct ControlField {
    Field field;
    int terms_used = 0;         // dyadic summation depth (0 for closed form)
    bool augmented = false;     // circle zero mode adjusted
    double augmentation = 0.0;  // mean(f) set by the augmentation
};

ControlField compute_f(const SpectralDomain& domain, const Field& z, const Field& u_T0,
                       double tau, SeriesVariant variant, double eps = 1e-14, int max_index = 200);

/// u(., t) = z + sum_{j>=1} (Laplacian^j z - Laplacian^{j-1} f) (t-T)^j / j!
/// for t in [T0, T]. Throws when the fitted convergence window is violated.
SeriesField control_solution_series(const SpectralDomain& domain, const Field& z, const Field& f,
                                    double t, double T, int max_terms = 200, double eps = 1e-14);

/// Fit of |Laplacian^j z| <= C A^j j!:  C = sup norm of z,
/// A = max_{1<=j<=j_max} (sup|Laplacian^j z| / (C j!))^{1/j}.
struct GrowthFit {
    double C = 0.0;
    double A = 0.0;
};

GrowthFit fit_growth_constant(const SpectralDomain& domain, const Field& z, int j_max);

/// delta = min{1/(2A), T/(1+2e)}; `reachable` is the branch that applies when
/// the target is itself a free-flow state.
struct DeltaWindow {
    double delta = 0.0;
    double reachable = 0.0;  // T/(1+2e)
};

DeltaWindow delta_window(double A, double T);

struct FullControlSpec {
    SpectralDomain domain;
    Field u0;
    Field z;
    double horizon = 1.0;              // T
    double switch_time = -1.0;         // T0; negative means pick T - 0.9 delta
    SeriesVariant variant = SeriesVariant::AllIntegers;
    double series_eps = 1e-14;
    int max_terms = 200;               // J (power series) and K (dyadic index) cap
    int growth_fit_terms = 20;
    int trajectory_samples = 9;
    bool run_cn_oracle = true;
    int cn_grid = 512;
    int cn_steps = 4096;
};

struct FullControlResult {
    Field f;
    Field b;
    Field u_T0;
    Field u_terminal;                  // exact per-mode propagation of (u_T0, f)
    double switch_time = 0.0;
    double delta = 0.0;
    double fitted_growth = 0.0;        // A from the target fit
    double spectral_residual = 0.0;    // ||u(T) - z||_2 / max(||z||_2, 1) per-mode route
    double cn_residual = -1.0;         // Crank-Nicolson route (-1 when skipped)
    double mode_ode_max_gap = 0.0;     // max_j |f_j - closed form|
    double mean_identity_gap = 0.0;    // circle: mean(f) tau - (mean(u_T0) - mean(z))
    bool augmented = false;
    int b_terms = 0;
    int f_terms = 0;
    std::vector<double> trajectory_times;
    std::vector<Field> trajectory;
};

/// Two-phase run: free flow on [0, T0], stationary control on [T0, T].
/// Verifies the terminal state by exact per-mode propagation and (optionally)
/// the Crank-Nicolson stepper.
FullControlResult run_full_control(const FullControlSpec& spec);

/// Least-squares stationary control supported in omega (source projected to
/// m modes), minimizing the terminal norm under exact mode propagation.
/// Reported, not asserted: Dirichlet targets outside omega keep it positive.
struct FeasibilityReport {
    double baseline_residual = 0.0;   // f == 0: free-flow terminal norm
    double optimal_residual = 0.0;
    std::vector<double> control_coeffs;
    int retained_rank = 0;            // modes kept in the normal-matrix eigensolve
};

FeasibilityReport stationary_subdomain_feasibility(const SpectralDomain& domain,
                                                   const SubdomainWindow& window, const Field& u0,
                                                   double T, int m);

} // namespace heatctl
