#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace heatctl {

/// Fixed-order pairwise (cascade) summation. All reductions in the library go
/// through this so results are bit-identical from run to run.
double pairwise_sum(std::span<const double> values);

/// Dot product a.b reduced with the same fixed summation tree.
double pairwise_dot(std::span<const double> a, std::span<const double> b);

/// (1 - e^{s*t}) / |s| for s <= 0, with the s -> 0 limit t.
/// Taylor fallback below |s*t| < 1e-8 keeps the circle's zero mode finite.
double one_minus_exp_over(double s, double t);

/// Composite Simpson weights on [0, len] with nt subintervals (nt even,
/// nt+1 nodes). Returns the per-node weights.
std::vector<double> simpson_weights(double len, int nt);

/// Deterministic 64-bit linear congruential generator (MMIX multiplier).
/// Used for every seeded random field so fixtures are portable.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

private:
    std::uint64_t state_;
};

} // namespace heatctl
