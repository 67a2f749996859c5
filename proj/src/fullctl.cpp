#include "heatctl/fullctl.hpp"

#include "heatctl/kernel.hpp"
#include "heatctl/linalg.hpp"
#include "heatctl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace heatctl {

namespace {

// Scalar series sum_{p=0}^{cap} x^p / p! with relative cutoff. Sets
// *terms/*tail and fails when terms are still growing at the cap.
double exp_series(double x, int cap, double eps, int* terms, double* tail) {
    double total = 1.0;
    double term = 1.0;
    int p = 0;
    while (p < cap) {
        ++p;
        term *= x / p;
        total += term;
        if (std::abs(term) <= eps * std::abs(total)) {
            if (terms) *terms = p;
            if (tail) *tail = std::abs(term);
            return total;
        }
    }
    throw ConvergenceError("power series did not settle within the term cap");
}

} // namespace

SeriesField compute_b(const SpectralDomain& domain, const Field& z, double tau,
                      int max_terms, double eps) {
    if (tau < 0.0) throw std::invalid_argument("compute_b: tau must be >= 0");
    if (!z.domain().same_as(domain)) throw std::invalid_argument("compute_b: domain mismatch");
    std::vector<double> coeffs = coefficients_of(z);
    SeriesField out;
    for (int j = 0; j < domain.modes(); ++j) {
        double& c = coeffs[static_cast<std::size_t>(j)];
        if (c == 0.0) continue;
        int terms = 0;
        double tail = 0.0;
        // sum_p (lambda_j (-tau))^p / p!  ==  e^{-lambda_j tau}
        c *= exp_series(-domain.eigenvalue(j) * tau, max_terms, eps, &terms, &tail);
        out.terms_used = std::max(out.terms_used, terms);
        out.tail_bound = std::max(out.tail_bound, tail * std::abs(c));
    }
    out.field = synthesize(domain, coeffs);
    return out;
}

ControlField compute_f(const SpectralDomain& domain, const Field& z, const Field& u_T0,
                       double tau, SeriesVariant variant, double eps, int max_index) {
    if (!(tau > 0.0)) throw std::invalid_argument("compute_f: tau must be positive");
    if (!z.domain().same_as(domain) || !u_T0.domain().same_as(domain))
        throw std::invalid_argument("compute_f: domain mismatch");

    const SeriesField b = compute_b(domain, z, tau);
    const std::vector<double> bc = coefficients_of(b.field);
    const std::vector<double> uc = coefficients_of(u_T0);
    const std::vector<double> zc = coefficients_of(z);

    ControlField out;
    std::vector<double> fc(static_cast<std::size_t>(domain.modes()), 0.0);
    for (int j = 0; j < domain.modes(); ++j) {
        const double lambda = domain.eigenvalue(j);
        const double diff = bc[static_cast<std::size_t>(j)] - uc[static_cast<std::size_t>(j)];
        if (lambda == 0.0) continue;  // zero mode handled by the augmentation
        const double q = std::exp(lambda * tau);
        if (q >= 1.0) throw std::runtime_error("compute_f: q >= 1 on a nonzero mode (corrupt domain)");
        double sum;
        if (variant == SeriesVariant::AllIntegers) {
            // the fixed-point iteration sums the full geometric series
            sum = q / (1.0 - q);
        } else {
            sum = 0.0;
            double power = q * q;
            int k = 1;
            for (;; ++k) {
                if (k > max_index) throw ConvergenceError("compute_f: dyadic series did not converge");
                sum += power;
                if (power <= eps * std::max(sum, 1e-300)) break;
                power *= power;
            }
            out.terms_used = std::max(out.terms_used, k);
        }
        fc[static_cast<std::size_t>(j)] = lambda * sum * diff;
    }

    if (domain.kind() == DomainKind::Circle) {
        // Constant-mode source: mode ODE u' = -f gives
        // f_0 = (u_0(T0) - z_0)/tau in eta_0 coefficients.
        const int j0 = 0;  // circle stores the constant mode first
        fc[static_cast<std::size_t>(j0)] = (uc[static_cast<std::size_t>(j0)] - zc[static_cast<std::size_t>(j0)]) / tau;
        out.augmented = true;
        out.augmentation = fc[static_cast<std::size_t>(j0)] / std::sqrt(domain.measure());
    }

    out.field = synthesize(domain, fc);
    return out;
}

SeriesField control_solution_series(const SpectralDomain& domain, const Field& z, const Field& f,
                                    double t, double T, int max_terms, double eps) {
    if (!z.domain().same_as(domain) || !f.domain().same_as(domain))
        throw std::invalid_argument("control_solution_series: domain mismatch");
    const double dt = t - T;  // <= 0 inside the control window

    // Window check with the fitted growth constants of z and f.
    const double a_z = fit_growth_constant(domain, z, 20).A;
    const double a_f = fit_growth_constant(domain, f, 20).A;
    const double c_star = std::max(a_z, a_f);
    if (c_star * std::abs(dt) >= 0.5)
        throw std::invalid_argument("control_solution_series: |t - T| outside the convergence window");

    const std::vector<double> zc = coefficients_of(z);
    const std::vector<double> fc = coefficients_of(f);
    std::vector<double> uc(static_cast<std::size_t>(domain.modes()), 0.0);
    SeriesField out;
    for (int j = 0; j < domain.modes(); ++j) {
        const double lambda = domain.eigenvalue(j);
        const double zj = zc[static_cast<std::size_t>(j)];
        const double fj = fc[static_cast<std::size_t>(j)];
        if (zj == 0.0 && fj == 0.0) continue;
        // per-mode: z_j sum_p (lambda dt)^p/p!  -  f_j sum_{p>=1} lambda^{p-1} dt^p/p!
        double total = zj;
        double zpow = zj;     // z_j lambda^p dt^p / p!
        double fpow = fj;     // f_j lambda^{p-1} dt^p / p!
        int p = 0;
        for (;;) {
            if (p >= max_terms) throw ConvergenceError("control_solution_series: term cap reached");
            ++p;
            zpow *= lambda * dt / p;
            fpow *= (p == 1) ? dt : lambda * dt / p;
            const double term = zpow - fpow;
            total += term;
            if (std::abs(term) <= eps * std::max(std::abs(total), 1e-300)) {
                out.terms_used = std::max(out.terms_used, p);
                out.tail_bound = std::max(out.tail_bound, std::abs(term));
                break;
            }
        }
        uc[static_cast<std::size_t>(j)] = total;
    }
    out.field = synthesize(domain, uc);
    return out;
}

GrowthFit fit_growth_constant(const SpectralDomain& domain, const Field& z, int j_max) {
    if (!z.domain().same_as(domain)) throw std::invalid_argument("fit_growth_constant: domain mismatch");
    GrowthFit fit;
    fit.C = sup_norm(z);
    if (fit.C == 0.0) return fit;
    Field power = z;
    double log_factorial = 0.0;
    for (int j = 1; j <= j_max; ++j) {
        power = laplacian_power(power, 1, LaplacianBackend::Spectral);
        log_factorial += std::log(static_cast<double>(j));
        const double sup = sup_norm(power);
        if (sup == 0.0) break;
        const double log_ratio = (std::log(sup) - std::log(fit.C) - log_factorial) / j;
        fit.A = std::max(fit.A, std::exp(log_ratio));
    }
    return fit;
}

DeltaWindow delta_window(double A, double T) {
    if (A < 0.0 || !(T > 0.0)) throw std::invalid_argument("delta_window: need A >= 0 and T > 0");
    DeltaWindow w;
    w.reachable = T / (1.0 + 2.0 * std::numbers::e);
    w.delta = (A == 0.0) ? w.reachable : std::min(1.0 / (2.0 * A), w.reachable);
    return w;
}

FullControlResult run_full_control(const FullControlSpec& spec) {
    const SpectralDomain& d = spec.domain;
    const double T = spec.horizon;
    if (!(T > 0.0)) throw std::invalid_argument("run_full_control: horizon must be positive");

    FullControlResult res;
    const GrowthFit fit = fit_growth_constant(d, spec.z, spec.growth_fit_terms);
    res.fitted_growth = fit.A;
    res.delta = delta_window(fit.A, T).delta;

    double T0 = spec.switch_time;
    if (T0 < 0.0) T0 = T - 0.9 * res.delta;
    if (!(T0 > 0.0 && T0 <= T)) throw std::invalid_argument("run_full_control: switch time outside (0, T]");
    if (T - T0 >= res.delta + 1e-12)
        throw std::invalid_argument("run_full_control: control phase longer than the delta window");
    res.switch_time = T0;
    const double tau = T - T0;

    res.u_T0 = semigroup_apply(d, T0, spec.u0);
    const SeriesField b = compute_b(d, spec.z, tau, spec.max_terms, spec.series_eps);
    res.b = b.field;
    res.b_terms = b.terms_used;

    const ControlField ctrl =
        compute_f(d, spec.z, res.u_T0, tau, spec.variant, spec.series_eps, spec.max_terms);
    res.f = ctrl.field;
    res.f_terms = ctrl.terms_used;
    res.augmented = ctrl.augmented;

    const std::vector<double> uc = coefficients_of(res.u_T0);
    const std::vector<double> zc = coefficients_of(spec.z);
    const std::vector<double> fc = coefficients_of(res.f);

    // Exact per-mode propagation of (u_T0, f) over [T0, T].
    std::vector<double> terminal(static_cast<std::size_t>(d.modes()));
    double max_gap = 0.0;
    for (int j = 0; j < d.modes(); ++j) {
        const double lambda = d.eigenvalue(j);
        terminal[static_cast<std::size_t>(j)] =
            mode_ode_exact(lambda, uc[static_cast<std::size_t>(j)], fc[static_cast<std::size_t>(j)], tau);
        if (lambda < 0.0) {
            const double q = std::exp(lambda * tau);
            if (q < 1.0 - 1e-6) {
                const double closed = lambda *
                    (zc[static_cast<std::size_t>(j)] - q * uc[static_cast<std::size_t>(j)]) / (1.0 - q);
                max_gap = std::max(max_gap, std::abs(fc[static_cast<std::size_t>(j)] - closed));
            }
        }
    }
    res.mode_ode_max_gap = max_gap;
    res.u_terminal = synthesize(d, terminal);

    {
        std::vector<double> diff(terminal.size()), sq(terminal.size()), zsq(terminal.size());
        for (std::size_t j = 0; j < terminal.size(); ++j) {
            diff[j] = terminal[j] - zc[j];
            sq[j] = diff[j] * diff[j];
            zsq[j] = zc[j] * zc[j];
        }
        const double znorm = std::sqrt(pairwise_sum(zsq));
        res.spectral_residual = std::sqrt(pairwise_sum(sq)) / std::max(znorm, 1.0);
    }

    if (d.kind() == DomainKind::Circle) {
        res.mean_identity_gap = mean_value(res.f) * tau -
                                (mean_value(res.u_T0) - mean_value(spec.z));
    }

    // Trajectory samples: free flow before T0, power series after.
    const int K = std::max(2, spec.trajectory_samples);
    for (int k = 0; k < K; ++k) {
        const double t = T * k / (K - 1);
        res.trajectory_times.push_back(t);
        if (t <= T0)
            res.trajectory.push_back(semigroup_apply(d, t, spec.u0));
        else
            res.trajectory.push_back(
                control_solution_series(d, spec.z, res.f, t, T, spec.max_terms, spec.series_eps).field);
    }

    if (spec.run_cn_oracle) {
        if (d.kind() == DomainKind::SturmLiouville)
            throw std::invalid_argument("run_full_control: CN oracle covers interval and circle only");
        CrankNicolsonGrid grid;
        grid.ends = (d.kind() == DomainKind::Circle) ? GridEnds::Periodic : GridEnds::Dirichlet;
        grid.length = d.length();
        grid.points = spec.cn_grid;
        const std::vector<double> x = grid.nodes();

        auto sample = [&](const std::vector<double>& coeffs) {
            std::vector<double> v(x.size(), 0.0);
            std::vector<double> contrib(coeffs.size());
            for (std::size_t m = 0; m < x.size(); ++m) {
                for (std::size_t j = 0; j < coeffs.size(); ++j)
                    contrib[j] = coeffs[j] * d.eigenfunction(static_cast<int>(j), x[m]);
                v[m] = pairwise_sum(contrib);
            }
            return v;
        };

        const std::vector<double> u0c = coefficients_of(spec.u0);
        std::vector<double> u = sample(u0c);
        const std::vector<double> fgrid = sample(fc);
        const std::vector<double> zgrid = sample(zc);

        // Split at T0 so the source switch lands exactly on a time node.
        const int n1 = std::max(64, static_cast<int>(std::lround(spec.cn_steps * T0 / T)));
        const int n2 = std::max(64, spec.cn_steps - n1);
        auto zero_src = [](double, double) { return 0.0; };
        u = crank_nicolson(grid, std::move(u), zero_src, T0, n1);
        auto const_src = [&](double xx, double) {
            const std::size_t idx = static_cast<std::size_t>(
                std::lround((grid.ends == GridEnds::Dirichlet ? xx / grid.spacing() - 1.0
                                                              : xx / grid.spacing())));
            return fgrid[idx];
        };
        u = crank_nicolson(grid, std::move(u), const_src, tau, n2);

        std::vector<double> sq(u.size()), zsq(u.size());
        for (std::size_t m = 0; m < u.size(); ++m) {
            const double dm = u[m] - zgrid[m];
            sq[m] = dm * dm;
            zsq[m] = zgrid[m] * zgrid[m];
        }
        const double h = grid.spacing();
        const double znorm = std::sqrt(h * pairwise_sum(zsq));
        res.cn_residual = std::sqrt(h * pairwise_sum(sq)) / std::max(znorm, 1.0);
    }
    return res;
}

FeasibilityReport stationary_subdomain_feasibility(const SpectralDomain& domain,
                                                   const SubdomainWindow& window, const Field& u0,
                                                   double T, int m) {
    if (m < 1 || m > domain.modes())
        throw std::invalid_argument("stationary_subdomain_feasibility: m out of range");
    const std::vector<double> gram = window_gram(domain, window, m);
    const std::vector<double> u0c = coefficients_of(u0);

    // Terminal map: u_i(T) = d_i - sum_j E_ij g_j with
    //   d_i = e^{lambda_i T} u0_i,  E_ij = (1 - e^{lambda_i T})/|lambda_i| W_ij.
    std::vector<double> d_vec(static_cast<std::size_t>(m));
    std::vector<double> E(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        const double lam = domain.eigenvalue(i);
        d_vec[static_cast<std::size_t>(i)] = std::exp(lam * T) * u0c[static_cast<std::size_t>(i)];
        const double mu = one_minus_exp_over(lam, T);
        for (int j = 0; j < m; ++j)
            E[static_cast<std::size_t>(i) * m + j] = mu * gram[static_cast<std::size_t>(i) * m + j];
    }

    FeasibilityReport rep;
    {
        std::vector<double> sq(d_vec.size());
        for (std::size_t i = 0; i < d_vec.size(); ++i) sq[i] = d_vec[i] * d_vec[i];
        rep.baseline_residual = std::sqrt(pairwise_sum(sq));
    }

    // Normal equations E^T E g = E^T d, solved through the eigen-decomposition
    // of the normal matrix; directions below the relative cut are dropped
    // (the matrix is numerically singular for modest m).
    std::vector<double> G(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            std::vector<double> prod(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k)
                prod[static_cast<std::size_t>(k)] =
                    E[static_cast<std::size_t>(k) * m + i] * E[static_cast<std::size_t>(k) * m + j];
            G[static_cast<std::size_t>(i) * m + j] = pairwise_sum(prod);
        }
        std::vector<double> prod(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k)
            prod[static_cast<std::size_t>(k)] = E[static_cast<std::size_t>(k) * m + i] * d_vec[static_cast<std::size_t>(k)];
        rhs[static_cast<std::size_t>(i)] = pairwise_sum(prod);
    }

    const DenseEigen eig = jacobi_eigen(G, m);
    const double cut = 1e-14 * std::max(0.0, eig.values.back());
    std::vector<double> g(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < m; ++k) {
        const double ev = eig.values[static_cast<std::size_t>(k)];
        if (!(ev > cut)) continue;
        ++rep.retained_rank;
        std::vector<double> prod(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            prod[static_cast<std::size_t>(i)] =
                eig.vectors[static_cast<std::size_t>(i) * m + k] * rhs[static_cast<std::size_t>(i)];
        const double coef = pairwise_sum(prod) / ev;
        for (int i = 0; i < m; ++i)
            g[static_cast<std::size_t>(i)] += coef * eig.vectors[static_cast<std::size_t>(i) * m + k];
    }
    rep.control_coeffs = g;

    std::vector<double> resid(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        std::vector<double> prod(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
            prod[static_cast<std::size_t>(j)] = E[static_cast<std::size_t>(i) * m + j] * g[static_cast<std::size_t>(j)];
        resid[static_cast<std::size_t>(i)] = d_vec[static_cast<std::size_t>(i)] - pairwise_sum(prod);
    }
    std::vector<double> sq(resid.size());
    for (std::size_t i = 0; i < resid.size(); ++i) sq[i] = resid[i] * resid[i];
    rep.optimal_residual = std::sqrt(pairwise_sum(sq));
    return rep;
}

} // namespace heatctl
