#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace heatctl {

enum class DomainKind { IntervalDirichlet, Circle, SturmLiouville };

std::string to_string(DomainKind kind);

/// Spectral representation of the Laplacian (or a 1-D Sturm-Liouville
/// operator) on a model domain: eigenvalues lambda_1 >= lambda_2 >= ... (all
/// <= 0), eigenfunction samples on a uniform quadrature grid, and trapezoid
/// weights. Immutable and cheap to copy; the eigen data is shared.
class SpectralDomain {
public:
    SpectralDomain() = default;

    /// Dirichlet interval (0, L): lambda_j = -(j pi / L)^2,
    /// eta_j = sqrt(2/L) sin(j pi x / L), uniform interior grid of M nodes.
    static SpectralDomain interval(double length, int modes, int grid_points);

    /// Circle of circumference L: lambda = 0 once (constant mode), then
    /// -(2 pi k / L)^2 doubled as cos/sin pairs; periodic grid, weights L/M.
    static SpectralDomain circle(double circumference, int modes, int grid_points);

    /// Dirichlet discretization of d/dx(a(x) d/dx .) on (0, L).
    /// `midpoint_coeff` holds a at the M+1 cell midpoints (x = (m+1/2)h).
    /// Eigenpairs of the symmetric tridiagonal stencil, vectors normalized in
    /// the weighted discrete inner product. Requires a >= ellipticity_floor.
    static SpectralDomain sturm_liouville(std::vector<double> midpoint_coeff, double length,
                                          double ellipticity_floor = 1e-12);
    static SpectralDomain sturm_liouville(const std::function<double(double)>& coeff,
                                          double length, int grid_points,
                                          double ellipticity_floor = 1e-12);

    bool valid() const { return impl_ != nullptr; }
    DomainKind kind() const;
    double length() const;
    double measure() const;   // |D|
    int modes() const;        // N
    int grid_points() const;  // M
    double node_spacing() const;

    double eigenvalue(int j) const;  // j in [0, N)
    std::span<const double> eigenvalues() const;

    /// eta_j at an arbitrary point: closed form for interval/circle, linear
    /// interpolation of the grid samples for Sturm-Liouville.
    double eigenfunction(int j, double x) const;
    std::span<const double> eigenfunction_samples(int j) const;

    std::span<const double> nodes() const;
    std::span<const double> weights() const;

    /// Coefficient samples at cell midpoints; empty unless Sturm-Liouville.
    std::span<const double> sl_midpoint_coefficients() const;

    bool same_as(const SpectralDomain& other) const { return impl_ == other.impl_; }

private:
    struct Impl;
    explicit SpectralDomain(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    const Impl& impl() const;
    std::shared_ptr<const Impl> impl_;
};

/// Control region omega as a subinterval of the domain.
class SubdomainWindow {
public:
    SubdomainWindow(double lo, double hi);
    static SubdomainWindow full(const SpectralDomain& domain);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double measure() const { return hi_ - lo_; }

    /// Quadrature weights restricted to omega. Each node owns the cell
    /// [x - w/2, x + w/2]; cells straddling the boundary of omega are clipped
    /// proportionally.
    std::vector<double> clipped_weights(const SpectralDomain& domain) const;

private:
    double lo_;
    double hi_;
};

/// Real-valued function on a domain: grid values plus, when available, the
/// eigen-coefficients c_j = <field, eta_j>.
class Field {
public:
    Field() = default;

    static Field from_grid(SpectralDomain domain, std::vector<double> values);
    static Field from_grid_with_coefficients(SpectralDomain domain, std::vector<double> values,
                                             std::vector<double> coefficients);
    static Field from_coefficients(SpectralDomain domain, std::vector<double> coefficients);
    static Field zero(SpectralDomain domain);

    const SpectralDomain& domain() const { return domain_; }
    std::span<const double> values() const { return values_; }
    bool has_coefficients() const { return coefficients_.has_value(); }
    std::span<const double> coefficients() const;

private:
    SpectralDomain domain_;
    std::vector<double> values_;
    std::optional<std::vector<double>> coefficients_;
};

/// c_j = sum_m w_m field(x_m) eta_j(x_m), j < N.
std::vector<double> project(const Field& field);

/// Finite eigen-sum of the given coefficients (length <= N, zero-padded).
Field synthesize(const SpectralDomain& domain, std::span<const double> coefficients);

/// Field's coefficients if cached, otherwise project.
std::vector<double> coefficients_of(const Field& field);

enum class LaplacianBackend { Spectral, Grid };

/// Apply the operator `power` times. Spectral backend multiplies coefficient
/// j by lambda_j^power; the grid backend repeats the 3-point stencil
/// (Dirichlet ghost zeros / periodic wrap; the a-weighted stencil for
/// Sturm-Liouville domains).
Field laplacian_power(const Field& field, int power,
                      LaplacianBackend backend = LaplacianBackend::Spectral);

/// Noise amplification estimate for the grid backend: (spectral radius of the
/// stencil)^power * machine epsilon. Large values mean the repeated stencil
/// output is dominated by roundoff.
double stencil_condition_estimate(const SpectralDomain& domain, int power);

double inner_product(const Field& a, const Field& b);
double inner_product_on(const Field& a, const Field& b, const SubdomainWindow& window);

/// Seeded random field, band-limited to the first `band` modes. Coefficients
/// are sign * [0.5, 1) draws from the shared LCG so no mode degenerates.
Field random_band_limited(const SpectralDomain& domain, int band, std::uint64_t seed);

double l2_norm(const Field& f);
double sup_norm(const Field& f);

/// mean over |D| with respect to the quadrature weights.
double mean_value(const Field& f);

} // namespace heatctl
