#include "heatctl/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace heatctl {

namespace {

// Base block folded as a binary tree as well, so sums of equal values stay
// exact whenever the total count is a power of two.
double pairwise_base(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    double buf[16];
    for (std::size_t i = 0; i < n; ++i) buf[i] = data[i];
    std::size_t len = n;
    while (len > 1) {
        std::size_t half = len / 2;
        for (std::size_t i = 0; i < half; ++i) buf[i] = buf[2 * i] + buf[2 * i + 1];
        if (len % 2) buf[half++] = buf[len - 1];
        len = half;
    }
    return buf[0];
}

double pairwise_sum_rec(const double* data, std::size_t n) {
    if (n <= 16) return pairwise_base(data, n);
    const std::size_t half = n / 2;
    return pairwise_sum_rec(data, half) + pairwise_sum_rec(data + half, n - half);
}

} // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_rec(values.data(), values.size());
}

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("pairwise_dot: length mismatch");
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
    return pairwise_sum(prod);
}

double one_minus_exp_over(double s, double t) {
    const double u = s * t;
    if (std::abs(u) < 1e-8) {
        // (1 - e^u)/|s| = t*(1 + u/2 + u^2/6) + O(u^3 t); covers s == 0.
        return t * (1.0 + 0.5 * u + u * u / 6.0);
    }
    return -std::expm1(u) / std::abs(s);
}

std::vector<double> simpson_weights(double len, int nt) {
    if (nt < 2 || nt % 2 != 0) throw std::invalid_argument("simpson_weights: nt must be even and >= 2");
    const double h = len / nt;
    std::vector<double> w(static_cast<std::size_t>(nt) + 1, 0.0);
    w.front() = h / 3.0;
    w.back() = h / 3.0;
    for (int i = 1; i < nt; ++i) w[static_cast<std::size_t>(i)] = (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
    return w;
}

} // namespace heatctl
