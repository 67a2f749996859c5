#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace heatctl {

class CholeskyError : public std::runtime_error {
public:
    CholeskyError(int pivot_index, double pivot_value);
    int pivot_index;
    double pivot_value;
};

/// Lower-triangular Cholesky factor of a dense SPD matrix (row-major n x n).
struct CholeskyFactor {
    int n = 0;
    std::vector<double> lower;  // row-major, strictly the lower triangle used
    double min_pivot = 0.0;     // smallest diagonal entry of L
    double max_pivot = 0.0;

    /// Condition estimate: (max_pivot / min_pivot)^2.
    double condition_estimate() const;
};

CholeskyFactor cholesky_factor(std::span<const double> matrix, int n);

std::vector<double> cholesky_solve(const CholeskyFactor& chol, std::span<const double> rhs);

/// Cholesky solve followed by one step of iterative refinement.
std::vector<double> solve_spd_refined(std::span<const double> matrix, int n,
                                      std::span<const double> rhs,
                                      const CholeskyFactor& chol);

/// Cyclic Jacobi eigen-decomposition of a small dense symmetric matrix.
/// values ascending; vectors column-major-compatible layout vectors[i*n+j].
struct DenseEigen {
    std::vector<double> values;
    std::vector<double> vectors;
};

DenseEigen jacobi_eigen(std::span<const double> matrix, int n);

} // namespace heatctl
