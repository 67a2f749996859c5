#include "heatctl/linalg.hpp"

#include "heatctl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace heatctl {

CholeskyError::CholeskyError(int index, double value)
    : std::runtime_error("cholesky: nonpositive pivot " + std::to_string(value) +
                         " at index " + std::to_string(index)),
      pivot_index(index),
      pivot_value(value) {}

double CholeskyFactor::condition_estimate() const {
    if (min_pivot <= 0.0) return std::numeric_limits<double>::infinity();
    const double r = max_pivot / min_pivot;
    return r * r;
}

CholeskyFactor cholesky_factor(std::span<const double> a, int n) {
    if (static_cast<int>(a.size()) != n * n) throw std::invalid_argument("cholesky_factor: size mismatch");
    CholeskyFactor f;
    f.n = n;
    f.lower.assign(static_cast<std::size_t>(n) * n, 0.0);
    auto L = [&](int i, int j) -> double& { return f.lower[static_cast<std::size_t>(i) * n + j]; };
    for (int j = 0; j < n; ++j) {
        double diag = a[static_cast<std::size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
        if (!(diag > 0.0)) throw CholeskyError(j, diag);
        L(j, j) = std::sqrt(diag);
        for (int i = j + 1; i < n; ++i) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    f.min_pivot = f.max_pivot = L(0, 0);
    for (int j = 1; j < n; ++j) {
        f.min_pivot = std::min(f.min_pivot, L(j, j));
        f.max_pivot = std::max(f.max_pivot, L(j, j));
    }
    return f;
}

std::vector<double> cholesky_solve(const CholeskyFactor& f, std::span<const double> rhs) {
    const int n = f.n;
    if (static_cast<int>(rhs.size()) != n) throw std::invalid_argument("cholesky_solve: size mismatch");
    auto L = [&](int i, int j) { return f.lower[static_cast<std::size_t>(i) * n + j]; };
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = rhs[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= L(i, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= L(k, i) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    return x;
}

std::vector<double> solve_spd_refined(std::span<const double> a, int n,
                                      std::span<const double> rhs,
                                      const CholeskyFactor& chol) {
    std::vector<double> x = cholesky_solve(chol, rhs);
    // One refinement step: r = rhs - A x, x += A^{-1} r.
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> prod(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) prod[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(i) * n + j] * x[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i)] - pairwise_sum(prod);
    }
    const std::vector<double> dx = cholesky_solve(chol, r);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] += dx[static_cast<std::size_t>(i)];
    return x;
}

DenseEigen jacobi_eigen(std::span<const double> matrix, int n) {
    std::vector<double> a(matrix.begin(), matrix.end());
    if (static_cast<int>(a.size()) != n * n) throw std::invalid_argument("jacobi_eigen: size mismatch");
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    auto V = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(i) * n + j]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
        if (off < 1e-300) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return A(x, x) < A(y, y); });

    DenseEigen out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        const int src = order[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(j)] = A(src, src);
        for (int i = 0; i < n; ++i) out.vectors[static_cast<std::size_t>(i) * n + j] = V(i, src);
    }
    return out;
}

} // namespace heatctl
