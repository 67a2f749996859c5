#pragma once

#include "heatctl/domain.hpp"

namespace heatctl {

/// Convergence window ((1 - e^{-1}) T, T] for the one-shot series inversion.
struct InversionWindow {
    double lower = 0.0;  // open end
    double upper = 0.0;  // closed end
    bool contains(double t) const { return t > lower && t <= upper; }
};

InversionWindow inversion_window(double T);

/// Per-mode partial sums of sum_k ((t-T) lambda_j)^k / k! applied to the
/// coefficients of u_T. Converges to e^{(t-T) lambda_j} for every mode.
struct SpectralInvertResult {
    Field field;
    double max_tail = 0.0;  // largest first-omitted-term magnitude over modes
};

SpectralInvertResult invert_spectral(const SpectralDomain& domain, const Field& u_T, double t,
                                     double T, int max_terms);

/// Same series through repeated 3-point stencil application on the grid (no
/// eigenbasis). Records the relative L2 error of every partial sum against
/// the supplied reference; divergence is data, not failure.
struct GridInvertResult {
    Field best;
    int best_index = 0;
    std::vector<double> trace;  // trace[k] = error of the K=k partial sum
};

GridInvertResult invert_grid(const SpectralDomain& domain, const Field& u_T, double t, double T,
                             int max_terms, const Field& reference);

/// Chain spectral inversions through intermediate times T = t_0 > ... >
/// t_segments = t_target with every ratio t_{i+1}/t_i inside the window.
SpectralInvertResult invert_segmented(const SpectralDomain& domain, const Field& u_T,
                                      double t_target, double T, int segments, int max_terms);

} // namespace heatctl
