#include "heatctl/tridiag_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace heatctl {

namespace {

double hypot2(double a, double b) { return std::hypot(a, b); }

} // namespace

TridiagEigen tridiag_eigen(std::vector<double> d, std::vector<double> e) {
    const int n = static_cast<int>(d.size());
    if (n == 0) throw std::invalid_argument("tridiag_eigen: empty matrix");
    if (static_cast<int>(e.size()) != n - 1 && !(n == 1 && e.empty()))
        throw std::invalid_argument("tridiag_eigen: offdiag must have n-1 entries");

    e.push_back(0.0); // sentinel

    std::vector<double> z(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i) * n + i] = 1.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= dd * 1e-16) break;
            }
            if (m != l) {
                if (++iter > 50) throw std::runtime_error("tridiag_eigen: no convergence in 50 iterations");
                // Wilkinson shift from the trailing 2x2 of the active block.
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z[static_cast<std::size_t>(k) * n + i + 1];
                        z[static_cast<std::size_t>(k) * n + i + 1] = s * z[static_cast<std::size_t>(k) * n + i] + c * f;
                        z[static_cast<std::size_t>(k) * n + i] = c * z[static_cast<std::size_t>(k) * n + i] - s * f;
                    }
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    // Sort ascending, permuting columns alongside.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

    TridiagEigen out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        const int src = order[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(j)] = d[src];
        double sign = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = z[static_cast<std::size_t>(i) * n + src];
            if (sign == 0.0 && std::abs(v) > 1e-14) sign = (v > 0.0) ? 1.0 : -1.0;
        }
        if (sign == 0.0) sign = 1.0;
        for (int i = 0; i < n; ++i)
            out.vectors[static_cast<std::size_t>(i) * n + j] = sign * z[static_cast<std::size_t>(i) * n + src];
    }
    return out;
}

} // namespace heatctl
