#include "heatctl/domain.hpp"

#include "heatctl/numerics.hpp"
#include "heatctl/tridiag_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace heatctl {

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::IntervalDirichlet: return "interval";
        case DomainKind::Circle: return "circle";
        case DomainKind::SturmLiouville: return "sturm_liouville";
    }
    return "?";
}

struct SpectralDomain::Impl {
    DomainKind kind = DomainKind::IntervalDirichlet;
    double length = 0.0;
    double measure = 0.0;
    int modes = 0;
    int grid_points = 0;
    double spacing = 0.0;
    std::vector<double> eigenvalues;            // descending: lambda_1 >= lambda_2 >= ...
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<std::vector<double>> eigvecs;   // samples of eta_j on the grid
    std::vector<double> sl_midpoint_coeff;      // Sturm-Liouville only
};

const SpectralDomain::Impl& SpectralDomain::impl() const {
    if (!impl_) throw std::logic_error("SpectralDomain: empty handle");
    return *impl_;
}

DomainKind SpectralDomain::kind() const { return impl().kind; }
double SpectralDomain::length() const { return impl().length; }
double SpectralDomain::measure() const { return impl().measure; }
int SpectralDomain::modes() const { return impl().modes; }
int SpectralDomain::grid_points() const { return impl().grid_points; }
double SpectralDomain::node_spacing() const { return impl().spacing; }

double SpectralDomain::eigenvalue(int j) const {
    const auto& im = impl();
    if (j < 0 || j >= im.modes) throw std::out_of_range("eigenvalue: mode index");
    return im.eigenvalues[static_cast<std::size_t>(j)];
}

std::span<const double> SpectralDomain::eigenvalues() const { return impl().eigenvalues; }

std::span<const double> SpectralDomain::eigenfunction_samples(int j) const {
    const auto& im = impl();
    if (j < 0 || j >= im.modes) throw std::out_of_range("eigenfunction_samples: mode index");
    return im.eigvecs[static_cast<std::size_t>(j)];
}

std::span<const double> SpectralDomain::nodes() const { return impl().nodes; }
std::span<const double> SpectralDomain::weights() const { return impl().weights; }
std::span<const double> SpectralDomain::sl_midpoint_coefficients() const { return impl().sl_midpoint_coeff; }

double SpectralDomain::eigenfunction(int j, double x) const {
    const auto& im = impl();
    if (j < 0 || j >= im.modes) throw std::out_of_range("eigenfunction: mode index");
    const double L = im.length;
    switch (im.kind) {
        case DomainKind::IntervalDirichlet: {
            const int mode = j + 1;
            return std::sqrt(2.0 / L) * std::sin(mode * std::numbers::pi * x / L);
        }
        case DomainKind::Circle: {
            if (j == 0) return 1.0 / std::sqrt(L);
            const int pair = (j + 1) / 2;
            const double arg = 2.0 * std::numbers::pi * pair * x / L;
            const double amp = std::sqrt(2.0 / L);
            return (j % 2 == 1) ? amp * std::cos(arg) : amp * std::sin(arg);
        }
        case DomainKind::SturmLiouville: {
            // Piecewise-linear through the samples, zero at both ends.
            const auto& v = im.eigvecs[static_cast<std::size_t>(j)];
            const double h = im.spacing;
            if (x <= 0.0 || x >= L) return 0.0;
            const double pos = x / h;  // node m sits at (m+1)h
            const int cell = static_cast<int>(std::floor(pos));
            const double frac = pos - cell;
            const double left = (cell == 0) ? 0.0 : v[static_cast<std::size_t>(cell - 1)];
            const double right = (cell >= im.grid_points) ? 0.0 : v[static_cast<std::size_t>(cell)];
            return left + frac * (right - left);
        }
    }
    return 0.0;
}

SpectralDomain SpectralDomain::interval(double length, int modes, int grid_points) {
    if (!(length > 0.0)) throw std::invalid_argument("interval: length must be positive");
    if (modes < 1) throw std::invalid_argument("interval: need at least one mode");
    if (grid_points < 4 * modes)
        throw std::invalid_argument("interval: grid too coarse for mode count (aliasing), need M >= 4N");

    auto im = std::make_shared<Impl>();
    im->kind = DomainKind::IntervalDirichlet;
    im->length = length;
    im->measure = length;
    im->modes = modes;
    im->grid_points = grid_points;
    const double h = length / (grid_points + 1);
    im->spacing = h;
    im->nodes.resize(static_cast<std::size_t>(grid_points));
    im->weights.assign(static_cast<std::size_t>(grid_points), h);
    for (int m = 0; m < grid_points; ++m) im->nodes[static_cast<std::size_t>(m)] = h * (m + 1);
    im->eigenvalues.resize(static_cast<std::size_t>(modes));
    im->eigvecs.resize(static_cast<std::size_t>(modes));
    for (int j = 0; j < modes; ++j) {
        const double k = (j + 1) * std::numbers::pi / length;
        im->eigenvalues[static_cast<std::size_t>(j)] = -k * k;
        auto& v = im->eigvecs[static_cast<std::size_t>(j)];
        v.resize(static_cast<std::size_t>(grid_points));
        const double amp = std::sqrt(2.0 / length);
        for (int m = 0; m < grid_points; ++m) v[static_cast<std::size_t>(m)] = amp * std::sin(k * im->nodes[static_cast<std::size_t>(m)]);
    }
    return SpectralDomain(std::move(im));
}

SpectralDomain SpectralDomain::circle(double circumference, int modes, int grid_points) {
    if (!(circumference > 0.0)) throw std::invalid_argument("circle: circumference must be positive");
    if (modes < 1) throw std::invalid_argument("circle: need at least one mode");
    if (grid_points < 4 * modes)
        throw std::invalid_argument("circle: grid too coarse for mode count (aliasing), need M >= 4N");

    auto im = std::make_shared<Impl>();
    im->kind = DomainKind::Circle;
    im->length = circumference;
    im->measure = circumference;
    im->modes = modes;
    im->grid_points = grid_points;
    const double h = circumference / grid_points;
    im->spacing = h;
    im->nodes.resize(static_cast<std::size_t>(grid_points));
    im->weights.assign(static_cast<std::size_t>(grid_points), h);
    for (int m = 0; m < grid_points; ++m) im->nodes[static_cast<std::size_t>(m)] = h * m;
    im->eigenvalues.resize(static_cast<std::size_t>(modes));
    im->eigvecs.resize(static_cast<std::size_t>(modes));
    for (int j = 0; j < modes; ++j) {
        double lambda = 0.0;
        if (j > 0) {
            const int pair = (j + 1) / 2;
            const double k = 2.0 * std::numbers::pi * pair / circumference;
            lambda = -k * k;
        }
        im->eigenvalues[static_cast<std::size_t>(j)] = lambda;
        auto& v = im->eigvecs[static_cast<std::size_t>(j)];
        v.resize(static_cast<std::size_t>(grid_points));
        for (int m = 0; m < grid_points; ++m) {
            // reuse the closed form; impl() not ready yet, inline it
            const double x = im->nodes[static_cast<std::size_t>(m)];
            if (j == 0) {
                v[static_cast<std::size_t>(m)] = 1.0 / std::sqrt(circumference);
            } else {
                const int pair = (j + 1) / 2;
                const double arg = 2.0 * std::numbers::pi * pair * x / circumference;
                const double amp = std::sqrt(2.0 / circumference);
                v[static_cast<std::size_t>(m)] = (j % 2 == 1) ? amp * std::cos(arg) : amp * std::sin(arg);
            }
        }
    }
    return SpectralDomain(std::move(im));
}

SpectralDomain SpectralDomain::sturm_liouville(std::vector<double> midpoint_coeff, double length,
                                               double ellipticity_floor) {
    if (!(length > 0.0)) throw std::invalid_argument("sturm_liouville: length must be positive");
    if (midpoint_coeff.size() < 3) throw std::invalid_argument("sturm_liouville: too few coefficient samples");
    const int M = static_cast<int>(midpoint_coeff.size()) - 1;
    for (double a : midpoint_coeff)
        if (!(a >= ellipticity_floor))
            throw std::invalid_argument("sturm_liouville: ellipticity violated (coefficient below floor)");

    const double h = length / (M + 1);
    // Symmetric tridiagonal stencil of d/dx(a d/dx .) with Dirichlet ends:
    //   diag_m = -(a_{m-1/2} + a_{m+1/2})/h^2,  off_m = a_{m+1/2}/h^2.
    std::vector<double> diag(static_cast<std::size_t>(M));
    std::vector<double> off(static_cast<std::size_t>(M - 1));
    for (int m = 0; m < M; ++m)
        diag[static_cast<std::size_t>(m)] =
            -(midpoint_coeff[static_cast<std::size_t>(m)] + midpoint_coeff[static_cast<std::size_t>(m) + 1]) / (h * h);
    for (int m = 0; m + 1 < M; ++m)
        off[static_cast<std::size_t>(m)] = midpoint_coeff[static_cast<std::size_t>(m) + 1] / (h * h);

    TridiagEigen eig = tridiag_eigen(std::move(diag), std::move(off));

    auto im = std::make_shared<Impl>();
    im->kind = DomainKind::SturmLiouville;
    im->length = length;
    im->measure = length;
    im->modes = M;
    im->grid_points = M;
    im->spacing = h;
    im->sl_midpoint_coeff = std::move(midpoint_coeff);
    im->nodes.resize(static_cast<std::size_t>(M));
    im->weights.assign(static_cast<std::size_t>(M), h);
    for (int m = 0; m < M; ++m) im->nodes[static_cast<std::size_t>(m)] = h * (m + 1);
    // Descending eigenvalues (closest to zero first); tridiag_eigen sorts ascending.
    im->eigenvalues.resize(static_cast<std::size_t>(M));
    im->eigvecs.resize(static_cast<std::size_t>(M));
    const double scale = 1.0 / std::sqrt(h);  // unit weighted norm
    for (int j = 0; j < M; ++j) {
        const int src = M - 1 - j;
        im->eigenvalues[static_cast<std::size_t>(j)] = eig.values[static_cast<std::size_t>(src)];
        auto& v = im->eigvecs[static_cast<std::size_t>(j)];
        v.resize(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i)
            v[static_cast<std::size_t>(i)] = scale * eig.vectors[static_cast<std::size_t>(i) * M + src];
    }
    return SpectralDomain(std::move(im));
}

SpectralDomain SpectralDomain::sturm_liouville(const std::function<double(double)>& coeff,
                                               double length, int grid_points,
                                               double ellipticity_floor) {
    if (grid_points < 2) throw std::invalid_argument("sturm_liouville: grid too small");
    const double h = length / (grid_points + 1);
    std::vector<double> samples(static_cast<std::size_t>(grid_points) + 1);
    for (int m = 0; m <= grid_points; ++m) samples[static_cast<std::size_t>(m)] = coeff((m + 0.5) * h);
    return sturm_liouville(std::move(samples), length, ellipticity_floor);
}

// ---------------------------------------------------------------------------

SubdomainWindow::SubdomainWindow(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(hi > lo)) throw std::invalid_argument("SubdomainWindow: empty window");
}

SubdomainWindow SubdomainWindow::full(const SpectralDomain& domain) {
    return SubdomainWindow(0.0, domain.length());
}

std::vector<double> SubdomainWindow::clipped_weights(const SpectralDomain& domain) const {
    if (lo_ >= domain.length() || hi_ <= 0.0)
        throw std::invalid_argument("SubdomainWindow: window outside the domain");
    const auto nodes = domain.nodes();
    const auto weights = domain.weights();
    std::vector<double> out(nodes.size(), 0.0);
    for (std::size_t m = 0; m < nodes.size(); ++m) {
        const double half = weights[m] / 2.0;
        const double cell_lo = nodes[m] - half;
        const double cell_hi = nodes[m] + half;
        const double lo = std::max(cell_lo, lo_);
        const double hi = std::min(cell_hi, hi_);
        out[m] = std::max(0.0, hi - lo);
    }
    return out;
}

// ---------------------------------------------------------------------------

Field Field::from_grid(SpectralDomain domain, std::vector<double> values) {
    if (static_cast<int>(values.size()) != domain.grid_points())
        throw std::invalid_argument("Field::from_grid: length mismatch");
    Field f;
    f.domain_ = std::move(domain);
    f.values_ = std::move(values);
    return f;
}

Field Field::from_grid_with_coefficients(SpectralDomain domain, std::vector<double> values,
                                         std::vector<double> coefficients) {
    if (static_cast<int>(coefficients.size()) != domain.modes())
        throw std::invalid_argument("Field: coefficient length mismatch");
    Field f = from_grid(std::move(domain), std::move(values));
    f.coefficients_ = std::move(coefficients);
    return f;
}

Field Field::from_coefficients(SpectralDomain domain, std::vector<double> coefficients) {
    if (static_cast<int>(coefficients.size()) > domain.modes())
        throw std::invalid_argument("Field::from_coefficients: more coefficients than modes");
    coefficients.resize(static_cast<std::size_t>(domain.modes()), 0.0);
    return synthesize(domain, coefficients);
}

Field Field::zero(SpectralDomain domain) {
    return from_coefficients(std::move(domain), {});
}

std::span<const double> Field::coefficients() const {
    if (!coefficients_) throw std::logic_error("Field: coefficients not present");
    return *coefficients_;
}

std::vector<double> project(const Field& field) {
    const auto& d = field.domain();
    const auto w = d.weights();
    const auto v = field.values();
    std::vector<double> coeffs(static_cast<std::size_t>(d.modes()));
    std::vector<double> prod(v.size());
    for (int j = 0; j < d.modes(); ++j) {
        const auto eta = d.eigenfunction_samples(j);
        for (std::size_t m = 0; m < v.size(); ++m) prod[m] = w[m] * v[m] * eta[m];
        coeffs[static_cast<std::size_t>(j)] = pairwise_sum(prod);
    }
    return coeffs;
}

Field synthesize(const SpectralDomain& domain, std::span<const double> coefficients) {
    if (static_cast<int>(coefficients.size()) > domain.modes())
        throw std::invalid_argument("synthesize: more coefficients than modes");
    const int M = domain.grid_points();
    std::vector<double> values(static_cast<std::size_t>(M), 0.0);
    std::vector<double> contrib(coefficients.size());
    for (int m = 0; m < M; ++m) {
        for (std::size_t j = 0; j < coefficients.size(); ++j)
            contrib[j] = coefficients[j] * domain.eigenfunction_samples(static_cast<int>(j))[static_cast<std::size_t>(m)];
        values[static_cast<std::size_t>(m)] = pairwise_sum(contrib);
    }
    std::vector<double> full(coefficients.begin(), coefficients.end());
    full.resize(static_cast<std::size_t>(domain.modes()), 0.0);
    return Field::from_grid_with_coefficients(domain, std::move(values), std::move(full));
}

std::vector<double> coefficients_of(const Field& field) {
    if (field.has_coefficients()) {
        auto c = field.coefficients();
        return std::vector<double>(c.begin(), c.end());
    }
    return project(field);
}

namespace {

// One application of the grid operator: Dirichlet ghost zeros on the
// interval, periodic wrap on the circle, a-weighted stencil for
// Sturm-Liouville.
void apply_stencil(const SpectralDomain& d, const std::vector<double>& v, std::vector<double>& out) {
    const int M = d.grid_points();
    const double h = d.node_spacing();
    const double inv_h2 = 1.0 / (h * h);
    auto at = [&](int m) -> double {
        if (d.kind() == DomainKind::Circle) {
            const int wrapped = ((m % M) + M) % M;
            return v[static_cast<std::size_t>(wrapped)];
        }
        if (m < 0 || m >= M) return 0.0;
        return v[static_cast<std::size_t>(m)];
    };
    if (d.kind() == DomainKind::SturmLiouville) {
        const auto a = d.sl_midpoint_coefficients();
        for (int m = 0; m < M; ++m) {
            const double flux_r = a[static_cast<std::size_t>(m) + 1] * (at(m + 1) - at(m));
            const double flux_l = a[static_cast<std::size_t>(m)] * (at(m) - at(m - 1));
            out[static_cast<std::size_t>(m)] = (flux_r - flux_l) * inv_h2;
        }
        return;
    }
    for (int m = 0; m < M; ++m)
        out[static_cast<std::size_t>(m)] = (at(m - 1) - 2.0 * at(m) + at(m + 1)) * inv_h2;
}

} // namespace

Field laplacian_power(const Field& field, int power, LaplacianBackend backend) {
    if (power < 0) throw std::invalid_argument("laplacian_power: power must be >= 0");
    const auto& d = field.domain();
    if (backend == LaplacianBackend::Spectral) {
        std::vector<double> coeffs = coefficients_of(field);
        for (int j = 0; j < d.modes(); ++j) {
            double factor = 1.0;
            for (int p = 0; p < power; ++p) factor *= d.eigenvalue(j);
            coeffs[static_cast<std::size_t>(j)] *= factor;
        }
        return synthesize(d, coeffs);
    }
    std::vector<double> v(field.values().begin(), field.values().end());
    std::vector<double> next(v.size());
    for (int p = 0; p < power; ++p) {
        apply_stencil(d, v, next);
        v.swap(next);
    }
    return Field::from_grid(d, std::move(v));
}

double stencil_condition_estimate(const SpectralDomain& domain, int power) {
    const double h = domain.node_spacing();
    double radius = 4.0 / (h * h);
    if (domain.kind() == DomainKind::SturmLiouville) {
        // scaled by the largest coefficient
        double amax = 0.0;
        for (int j = 0; j < domain.modes(); ++j) amax = std::max(amax, -domain.eigenvalue(j));
        radius = amax;
    }
    double amp = 1.0;
    for (int p = 0; p < power; ++p) amp *= radius;
    return amp * 2.22e-16;
}

double inner_product(const Field& a, const Field& b) {
    if (!a.domain().same_as(b.domain())) throw std::invalid_argument("inner_product: domain mismatch");
    const auto w = a.domain().weights();
    const auto va = a.values();
    const auto vb = b.values();
    std::vector<double> prod(va.size());
    for (std::size_t m = 0; m < va.size(); ++m) prod[m] = w[m] * va[m] * vb[m];
    return pairwise_sum(prod);
}

double inner_product_on(const Field& a, const Field& b, const SubdomainWindow& window) {
    if (!a.domain().same_as(b.domain())) throw std::invalid_argument("inner_product_on: domain mismatch");
    const std::vector<double> w = window.clipped_weights(a.domain());
    const auto va = a.values();
    const auto vb = b.values();
    std::vector<double> prod(va.size());
    for (std::size_t m = 0; m < va.size(); ++m) prod[m] = w[m] * va[m] * vb[m];
    return pairwise_sum(prod);
}

double l2_norm(const Field& f) { return std::sqrt(std::max(0.0, inner_product(f, f))); }

double sup_norm(const Field& f) {
    double s = 0.0;
    for (double v : f.values()) s = std::max(s, std::abs(v));
    return s;
}

Field random_band_limited(const SpectralDomain& domain, int band, std::uint64_t seed) {
    if (band < 1 || band > domain.modes())
        throw std::invalid_argument("random_band_limited: band out of range");
    Lcg64 rng(seed);
    std::vector<double> c(static_cast<std::size_t>(domain.modes()), 0.0);
    for (int j = 0; j < band; ++j) {
        const double sign = (rng.next_u64() >> 63) ? 1.0 : -1.0;
        c[static_cast<std::size_t>(j)] = sign * (0.5 + 0.5 * rng.uniform());
    }
    return Field::from_coefficients(domain, std::move(c));
}

double mean_value(const Field& f) {
    const auto w = f.domain().weights();
    const auto v = f.values();
    std::vector<double> prod(v.size());
    for (std::size_t m = 0; m < v.size(); ++m) prod[m] = w[m] * v[m];
    return pairwise_sum(prod) / f.domain().measure();
}

} // namespace heatctl
