#include "heatctl/backinv.hpp"

#include "heatctl/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace heatctl {

InversionWindow inversion_window(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("inversion_window: T must be positive");
    InversionWindow w;
    w.lower = (1.0 - std::exp(-1.0)) * T;
    w.upper = T;
    return w;
}

SpectralInvertResult invert_spectral(const SpectralDomain& domain, const Field& u_T, double t,
                                     double T, int max_terms) {
    if (max_terms < 0) throw std::invalid_argument("invert_spectral: negative term cap");
    if (!(t > 0.0 && t <= T)) throw std::invalid_argument("invert_spectral: need 0 < t <= T");
    if (!u_T.domain().same_as(domain)) throw std::invalid_argument("invert_spectral: domain mismatch");

    std::vector<double> coeffs = coefficients_of(u_T);
    SpectralInvertResult out;
    for (int j = 0; j < domain.modes(); ++j) {
        double& c = coeffs[static_cast<std::size_t>(j)];
        if (c == 0.0) continue;
        const double x = (t - T) * domain.eigenvalue(j);  // >= 0
        double total = 1.0;
        double term = 1.0;
        for (int k = 1; k <= max_terms; ++k) {
            term *= x / k;
            total += term;
        }
        out.max_tail = std::max(out.max_tail, std::abs(term * x / (max_terms + 1) * c));
        c *= total;
    }
    out.field = synthesize(domain, coeffs);
    return out;
}

GridInvertResult invert_grid(const SpectralDomain& domain, const Field& u_T, double t, double T,
                             int max_terms, const Field& reference) {
    if (!(t > 0.0 && t <= T)) throw std::invalid_argument("invert_grid: need 0 < t <= T");
    if (!u_T.domain().same_as(domain) || !reference.domain().same_as(domain))
        throw std::invalid_argument("invert_grid: domain mismatch");

    const auto ref = reference.values();
    const auto w = domain.weights();
    std::vector<double> sq(ref.size());
    for (std::size_t m = 0; m < ref.size(); ++m) sq[m] = w[m] * ref[m] * ref[m];
    const double refnorm = std::sqrt(pairwise_sum(sq));

    Field partial = u_T;
    Field term = u_T;
    auto rel_error = [&](const Field& fld) {
        const auto v = fld.values();
        std::vector<double> dsq(v.size());
        for (std::size_t m = 0; m < v.size(); ++m) {
            const double d = v[m] - ref[m];
            dsq[m] = w[m] * d * d;
        }
        return std::sqrt(pairwise_sum(dsq)) / std::max(refnorm, 1e-300);
    };

    GridInvertResult out;
    out.trace.push_back(rel_error(partial));
    out.best = partial;
    for (int k = 1; k <= max_terms; ++k) {
        term = laplacian_power(term, 1, LaplacianBackend::Grid);
        std::vector<double> tv(term.values().begin(), term.values().end());
        const double scale = (t - T) / k;
        for (double& v : tv) v *= scale;
        term = Field::from_grid(domain, std::move(tv));
        std::vector<double> pv(partial.values().begin(), partial.values().end());
        const auto add = term.values();
        for (std::size_t m = 0; m < pv.size(); ++m) pv[m] += add[m];
        partial = Field::from_grid(domain, std::move(pv));
        out.trace.push_back(rel_error(partial));
        if (out.trace.back() < out.trace[static_cast<std::size_t>(out.best_index)]) {
            out.best_index = k;
            out.best = partial;
        }
    }
    return out;
}

SpectralInvertResult invert_segmented(const SpectralDomain& domain, const Field& u_T,
                                      double t_target, double T, int segments, int max_terms) {
    if (segments < 1) throw std::invalid_argument("invert_segmented: need at least one segment");
    if (!(t_target > 0.0 && t_target <= T))
        throw std::invalid_argument("invert_segmented: target time outside (0, T]");

    // Geometric intermediate times: equal ratio r = (t_target/T)^{1/segments};
    // every hop must stay inside the window r > 1 - e^{-1}.
    const double ratio = std::pow(t_target / T, 1.0 / segments);
    if (!(ratio > 1.0 - std::exp(-1.0)))
        throw std::invalid_argument(
            "invert_segmented: segment ratio outside the inversion window (more segments needed)");

    SpectralInvertResult out;
    out.field = u_T;
    double t_hi = T;
    for (int i = 1; i <= segments; ++i) {
        const double t_lo = (i == segments) ? t_target : t_hi * ratio;
        const SpectralInvertResult step = invert_spectral(domain, out.field, t_lo, t_hi, max_terms);
        out.field = step.field;
        out.max_tail = std::max(out.max_tail, step.max_tail);
        t_hi = t_lo;
    }
    return out;
}

} // namespace heatctl
