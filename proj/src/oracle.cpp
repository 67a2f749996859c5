#include "heatctl/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace heatctl {

double mode_ode_exact(double lambda, double u_start, double f_const, double tau) {
    if (std::abs(lambda * tau) < 1e-12)
        return u_start - f_const * tau + lambda * tau * (u_start - 0.5 * f_const * tau);
    const double growth = std::exp(lambda * tau);
    return growth * u_start - f_const * std::expm1(lambda * tau) / lambda;
}

std::vector<double> CrankNicolsonGrid::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(points));
    const double h = spacing();
    for (int m = 0; m < points; ++m)
        x[static_cast<std::size_t>(m)] = (ends == GridEnds::Dirichlet) ? h * (m + 1) : h * m;
    return x;
}

double CrankNicolsonGrid::spacing() const {
    return (ends == GridEnds::Dirichlet) ? length / (points + 1) : length / points;
}

namespace {

// Thomas algorithm for a constant-coefficient tridiagonal system
// (lo, di, up) x = rhs; overwrites rhs with the solution.
void thomas_solve(double lo, double di, double up, std::vector<double>& rhs) {
    const int n = static_cast<int>(rhs.size());
    std::vector<double> cp(static_cast<std::size_t>(n));
    cp[0] = up / di;
    rhs[0] /= di;
    for (int i = 1; i < n; ++i) {
        const double denom = di - lo * cp[static_cast<std::size_t>(i - 1)];
        cp[static_cast<std::size_t>(i)] = up / denom;
        rhs[static_cast<std::size_t>(i)] = (rhs[static_cast<std::size_t>(i)] - lo * rhs[static_cast<std::size_t>(i - 1)]) / denom;
    }
    for (int i = n - 2; i >= 0; --i)
        rhs[static_cast<std::size_t>(i)] -= cp[static_cast<std::size_t>(i)] * rhs[static_cast<std::size_t>(i + 1)];
}

// Cyclic variant via Sherman-Morrison with the standard corner correction.
void cyclic_thomas_solve(double lo, double di, double up, std::vector<double>& rhs) {
    const int n = static_cast<int>(rhs.size());
    if (n < 3) throw std::runtime_error("cyclic solve: grid too small");
    const double gamma = -di;
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    u[0] = gamma;
    u[static_cast<std::size_t>(n - 1)] = lo;  // rank-one factor (corner entries lo == up here)

    std::vector<double> y = rhs;
    // modified diagonal: d0 - gamma, d_{n-1} - lo*up/gamma
    std::vector<double> cp(static_cast<std::size_t>(n));
    auto solve_mod = [&](std::vector<double>& b) {
        const double d0 = di - gamma;
        const double dn = di - lo * up / gamma;
        cp[0] = up / d0;
        b[0] /= d0;
        for (int i = 1; i < n; ++i) {
            const double d = (i == n - 1) ? dn : di;
            const double denom = d - lo * cp[static_cast<std::size_t>(i - 1)];
            cp[static_cast<std::size_t>(i)] = up / denom;
            b[static_cast<std::size_t>(i)] = (b[static_cast<std::size_t>(i)] - lo * b[static_cast<std::size_t>(i - 1)]) / denom;
        }
        for (int i = n - 2; i >= 0; --i)
            b[static_cast<std::size_t>(i)] -= cp[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i + 1)];
    };
    solve_mod(y);
    std::vector<double> z = u;
    solve_mod(z);
    const double vy = y[0] + (up / gamma) * y[static_cast<std::size_t>(n - 1)];
    const double vz = 1.0 + z[0] + (up / gamma) * z[static_cast<std::size_t>(n - 1)];
    const double factor = vy / vz;
    for (int i = 0; i < n; ++i)
        rhs[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] - factor * z[static_cast<std::size_t>(i)];
}

} // namespace

std::vector<double> crank_nicolson(const CrankNicolsonGrid& grid, std::vector<double> u,
                                   const std::function<double(double, double)>& source,
                                   double T, int nt) {
    if (nt < 64) throw std::invalid_argument("crank_nicolson: nt must be >= 64");
    if (static_cast<int>(u.size()) != grid.points)
        throw std::invalid_argument("crank_nicolson: initial data length mismatch");
    const int M = grid.points;
    const double h = grid.spacing();
    const double dt = T / nt;
    const double r = dt / (2.0 * h * h);
    const std::vector<double> x = grid.nodes();

    std::vector<double> rhs(static_cast<std::size_t>(M));
    auto lap = [&](const std::vector<double>& v, int m) {
        if (grid.ends == GridEnds::Periodic) {
            const double left = v[static_cast<std::size_t>((m - 1 + M) % M)];
            const double right = v[static_cast<std::size_t>((m + 1) % M)];
            return left - 2.0 * v[static_cast<std::size_t>(m)] + right;
        }
        const double left = (m == 0) ? 0.0 : v[static_cast<std::size_t>(m - 1)];
        const double right = (m == M - 1) ? 0.0 : v[static_cast<std::size_t>(m + 1)];
        return left - 2.0 * v[static_cast<std::size_t>(m)] + right;
    };

    for (int step = 0; step < nt; ++step) {
        const double t_half = (step + 0.5) * dt;
        for (int m = 0; m < M; ++m)
            rhs[static_cast<std::size_t>(m)] = u[static_cast<std::size_t>(m)] + r * lap(u, m) -
                                               dt * source(x[static_cast<std::size_t>(m)], t_half);
        if (grid.ends == GridEnds::Periodic)
            cyclic_thomas_solve(-r, 1.0 + 2.0 * r, -r, rhs);
        else
            thomas_solve(-r, 1.0 + 2.0 * r, -r, rhs);
        u.swap(rhs);
    }
    return u;
}

std::vector<double> rk4_linear_system(
    const std::function<void(double, std::span<const double>, std::span<double>)>& rhs,
    std::vector<double> u, double T, int nt) {
    if (nt < 16) throw std::invalid_argument("rk4_linear_system: nt must be >= 16");
    const double dt = T / nt;
    const std::size_t n = u.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = 0.0;
    for (int step = 0; step < nt; ++step) {
        rhs(t, u, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        rhs(t + 0.5 * dt, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        rhs(t + 0.5 * dt, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
        rhs(t + dt, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += dt;
    }
    return u;
}

double scalar_series(double q, SeriesVariant variant) {
    if (q >= 1.0) throw std::invalid_argument("scalar_series: q must be < 1");
    if (q <= 0.0) return 0.0;
    double total = 0.0;
    if (variant == SeriesVariant::AllIntegers) {
        double term = q;
        for (long k = 0; k < 100000000L; ++k) {
            total += term;
            term *= q;
            if (term < 1e-17) return total;
        }
        throw std::runtime_error("scalar_series: no convergence (q too close to 1)");
    }
    double power = q * q;  // q^{2^1}
    for (int k = 1; k < 1100; ++k) {
        total += power;
        power *= power;  // q^{2^{k+1}}
        if (power < 1e-17) break;
    }
    return total;
}

} // namespace heatctl
