#pragma once

#include <functional>
#include <span>
#include <vector>

namespace heatctl {

/// Closed form for u' = lambda u - f over a window of length tau:
/// u_end = e^{lambda tau} u_start - f (e^{lambda tau} - 1)/lambda,
/// with the lambda -> 0 limit u_start - f tau.
double mode_ode_exact(double lambda, double u_start, double f_const, double tau);

enum class GridEnds { Dirichlet, Periodic };

struct CrankNicolsonGrid {
    GridEnds ends = GridEnds::Dirichlet;
    double length = 0.0;
    int points = 0;  // interior nodes (Dirichlet) or all nodes (periodic)

    std::vector<double> nodes() const;
    double spacing() const;
};

/// Crank-Nicolson trajectory for u_t = u_xx - source(x, t) on the given grid.
/// Source sampled at half steps; tridiagonal (or cyclic) solve per step.
/// Returns the terminal samples. Never shares the eigen machinery of the
/// spectral modules.
std::vector<double> crank_nicolson(const CrankNicolsonGrid& grid, std::vector<double> u0,
                                   const std::function<double(double, double)>& source,
                                   double T, int nt);

/// Classical fixed-step 4th-order integration of du/dt = rhs(t, u).
std::vector<double> rk4_linear_system(
    const std::function<void(double, std::span<const double>, std::span<double>)>& rhs,
    std::vector<double> u0, double T, int nt);

enum class SeriesVariant { AllIntegers, DyadicAsPrinted };

/// sum_{k>=1} q^k (all-integers) or sum_{k>=1} q^{2^k} (dyadic-as-printed),
/// summed term by term until the term drops below 1e-17. Requires q < 1.
double scalar_series(double q, SeriesVariant variant);

} // namespace heatctl
