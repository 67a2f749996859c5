#include "heatctl/kernel.hpp"

#include "heatctl/numerics.hpp"
#include "heatctl/subctl.hpp"

#include <cmath>
#include <stdexcept>

namespace heatctl {

double kernel_eval(const SpectralDomain& domain, double t, double x, double y) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel_eval: t must be positive");
    const int N = domain.modes();
    std::vector<double> terms(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j)
        terms[static_cast<std::size_t>(j)] =
            std::exp(domain.eigenvalue(j) * t) * (domain.eigenfunction(j, x) * domain.eigenfunction(j, y));
    return pairwise_sum(terms);
}

double kernel_tail_bound(const SpectralDomain& domain, double t) {
    const int N = domain.modes();
    return std::exp(domain.eigenvalue(N - 1) * t) * N;
}

Field semigroup_apply(const SpectralDomain& domain, double t, const Field& field) {
    if (t < 0.0)
        throw std::invalid_argument("semigroup_apply: negative time (use the inversion routines)");
    if (!field.domain().same_as(domain)) throw std::invalid_argument("semigroup_apply: domain mismatch");
    std::vector<double> coeffs = coefficients_of(field);
    for (int j = 0; j < domain.modes(); ++j)
        coeffs[static_cast<std::size_t>(j)] *= std::exp(domain.eigenvalue(j) * t);
    return synthesize(domain, coeffs);
}

double kernel_mass(const SpectralDomain& domain, double t, double x) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel_mass: t must be positive");
    const auto nodes = domain.nodes();
    const auto w = domain.weights();
    std::vector<double> vals(nodes.size());
    for (std::size_t m = 0; m < nodes.size(); ++m)
        vals[m] = w[m] * kernel_eval(domain, t, x, nodes[m]);
    return pairwise_sum(vals);
}

std::vector<double> window_gram(const SpectralDomain& domain, const SubdomainWindow& window, int m) {
    if (m < 1 || m > domain.modes()) throw std::invalid_argument("window_gram: bad mode count");
    const std::vector<double> wc = window.clipped_weights(domain);
    std::vector<double> gram(static_cast<std::size_t>(m) * m);
    std::vector<double> prod(wc.size());
    for (int i = 0; i < m; ++i) {
        const auto ei = domain.eigenfunction_samples(i);
        for (int j = i; j < m; ++j) {
            const auto ej = domain.eigenfunction_samples(j);
            for (std::size_t k = 0; k < wc.size(); ++k) prod[k] = wc[k] * ei[k] * ej[k];
            const double v = pairwise_sum(prod);
            gram[static_cast<std::size_t>(i) * m + j] = v;
            gram[static_cast<std::size_t>(j) * m + i] = v;
        }
    }
    return gram;
}

double k_kernel_eval(const SpectralDomain& domain, const SubdomainWindow& window, double T,
                     double x, double y) {
    if (!(T > 0.0)) throw std::invalid_argument("k_kernel_eval: T must be positive");
    const int N = domain.modes();
    const std::vector<double> alpha = assemble_alpha(domain, window, T, N);
    std::vector<double> ex(static_cast<std::size_t>(N)), ey(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        ex[static_cast<std::size_t>(j)] = domain.eigenfunction(j, x);
        ey[static_cast<std::size_t>(j)] = domain.eigenfunction(j, y);
    }
    // Summed over i <= j with the symmetrized bracket so K(x,T,y) and
    // K(y,T,x) reduce over bitwise-identical terms.
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(N) * (N + 1) / 2);
    for (int i = 0; i < N; ++i) {
        terms.push_back(alpha[static_cast<std::size_t>(i) * N + i] *
                        (ex[static_cast<std::size_t>(i)] * ey[static_cast<std::size_t>(i)]));
        for (int j = i + 1; j < N; ++j)
            terms.push_back(alpha[static_cast<std::size_t>(i) * N + j] *
                            (ex[static_cast<std::size_t>(i)] * ey[static_cast<std::size_t>(j)] +
                             ex[static_cast<std::size_t>(j)] * ey[static_cast<std::size_t>(i)]));
    }
    return pairwise_sum(terms);
}

double k_kernel_eval_quadrature(const SpectralDomain& domain, const SubdomainWindow& window,
                                double T, double x, double y, int nt) {
    if (!(T > 0.0)) throw std::invalid_argument("k_kernel_eval_quadrature: T must be positive");
    const std::vector<double> sw = simpson_weights(T, nt);
    const std::vector<double> wc = window.clipped_weights(domain);
    const auto nodes = domain.nodes();
    std::vector<double> svals(sw.size());
    std::vector<double> zvals(nodes.size());
    for (std::size_t k = 0; k < sw.size(); ++k) {
        const double s = T * static_cast<double>(k) / nt;
        if (s == 0.0) {
            // continuous extension of the truncated product at s = 0
            for (std::size_t z = 0; z < nodes.size(); ++z) {
                double gx = 0.0, gy = 0.0;
                for (int j = 0; j < domain.modes(); ++j) {
                    gx += domain.eigenfunction(j, x) * domain.eigenfunction(j, nodes[z]);
                    gy += domain.eigenfunction(j, nodes[z]) * domain.eigenfunction(j, y);
                }
                zvals[z] = wc[z] * gx * gy;
            }
        } else {
            for (std::size_t z = 0; z < nodes.size(); ++z)
                zvals[z] = wc[z] * kernel_eval(domain, s, x, nodes[z]) * kernel_eval(domain, s, nodes[z], y);
        }
        svals[k] = sw[k] * pairwise_sum(zvals);
    }
    return pairwise_sum(svals);
}

Field l_operator_apply(const SpectralDomain& domain, const SubdomainWindow& window, double T,
                       const Field& phi) {
    if (!phi.domain().same_as(domain)) throw std::invalid_argument("l_operator_apply: domain mismatch");
    const int N = domain.modes();
    const std::vector<double> alpha = assemble_alpha(domain, window, T, N);
    const std::vector<double> c = coefficients_of(phi);
    std::vector<double> out(static_cast<std::size_t>(N));
    std::vector<double> row(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j)
            row[static_cast<std::size_t>(j)] = alpha[static_cast<std::size_t>(i) * N + j] * c[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = pairwise_sum(row);
    }
    return synthesize(domain, out);
}

HNorm h_norm(const SpectralDomain& domain, const SubdomainWindow& window, double T,
             const Field& phi, int nt) {
    if (!phi.domain().same_as(domain)) throw std::invalid_argument("h_norm: domain mismatch");
    const int N = domain.modes();
    const std::vector<double> c = coefficients_of(phi);

    HNorm out;
    {
        const std::vector<double> alpha = assemble_alpha(domain, window, T, N);
        std::vector<double> terms(static_cast<std::size_t>(N) * N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                terms[static_cast<std::size_t>(i) * N + j] =
                    alpha[static_cast<std::size_t>(i) * N + j] * c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)];
        out.via_alpha = std::sqrt(std::max(0.0, pairwise_sum(terms)));
    }
    {
        const std::vector<double> sw = simpson_weights(T, nt);
        const std::vector<double> wc = window.clipped_weights(domain);
        const int M = domain.grid_points();
        std::vector<double> svals(sw.size());
        std::vector<double> zvals(static_cast<std::size_t>(M));
        for (std::size_t k = 0; k < sw.size(); ++k) {
            const double s = T * static_cast<double>(k) / nt;
            std::vector<double> cs(c);
            for (int j = 0; j < N; ++j) cs[static_cast<std::size_t>(j)] *= std::exp(domain.eigenvalue(j) * s);
            const Field evolved = synthesize(domain, cs);
            const auto v = evolved.values();
            for (int m = 0; m < M; ++m)
                zvals[static_cast<std::size_t>(m)] = wc[static_cast<std::size_t>(m)] * v[static_cast<std::size_t>(m)] * v[static_cast<std::size_t>(m)];
            svals[k] = sw[k] * pairwise_sum(zvals);
        }
        out.via_quadrature = std::sqrt(std::max(0.0, pairwise_sum(svals)));
    }
    return out;
}

} // namespace heatctl
