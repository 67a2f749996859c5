#pragma once

#include "heatctl/domain.hpp"

namespace heatctl {

/// Heat kernel G(x, t, y) = sum_j e^{lambda_j t} eta_j(x) eta_j(y), truncated
/// at the domain's N modes. Pair with kernel_tail_bound to control truncation.
double kernel_eval(const SpectralDomain& domain, double t, double x, double y);

/// Truncation-tail estimate e^{lambda_N t} * N for the N-mode kernel sum.
double kernel_tail_bound(const SpectralDomain& domain, double t);

/// e^{tP} applied coefficient-wise: c_j -> e^{lambda_j t} c_j. Requires t >= 0;
/// backward evolution lives in backinv.
Field semigroup_apply(const SpectralDomain& domain, double t, const Field& field);

/// integral of G(x, t, .) over the domain (quadrature over the grid).
double kernel_mass(const SpectralDomain& domain, double t, double x);

/// omega-Gram matrix <eta_i, eta_j>_{L2(omega)}, row-major m x m.
std::vector<double> window_gram(const SpectralDomain& domain, const SubdomainWindow& window, int m);

/// Composed kernel K(x,T,y) = int_0^T int_omega G(x,s,z) G(z,s,y) dz ds via
/// the eigen-form double sum over all N modes.
double k_kernel_eval(const SpectralDomain& domain, const SubdomainWindow& window, double T,
                     double x, double y);

/// Same quantity by direct Simpson time quadrature (cross-check route).
double k_kernel_eval_quadrature(const SpectralDomain& domain, const SubdomainWindow& window,
                                double T, double x, double y, int nt = 256);

/// L phi(x) = int_D K(x,T,y) phi(y) dy, computed in coefficient space.
Field l_operator_apply(const SpectralDomain& domain, const SubdomainWindow& window, double T,
                       const Field& phi);

/// ||phi||_H computed two ways: the alpha quadratic form and direct Simpson
/// time quadrature of the evolved field over omega.
struct HNorm {
    double via_alpha = 0.0;
    double via_quadrature = 0.0;
};

HNorm h_norm(const SpectralDomain& domain, const SubdomainWindow& window, double T,
             const Field& phi, int nt = 256);

} // namespace heatctl
