#pragma once

#include <vector>

namespace heatctl {

struct TridiagEigen {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // column j at vectors[i*n + j], orthonormal
};

/// Eigen-decomposition of a symmetric tridiagonal matrix (diag d, offdiag e,
/// e[k] couples rows k and k+1). Implicit-shift QL with Wilkinson shifts,
/// capped at 50 iterations per eigenvalue. Eigenvectors come out orthonormal
/// to roundoff; each column is signed so its first nonzero entry is positive.
TridiagEigen tridiag_eigen(std::vector<double> diag, std::vector<double> offdiag);

} // namespace heatctl
