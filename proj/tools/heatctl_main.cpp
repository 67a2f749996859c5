// Batch front door: configure a domain and problem from one JSON document,
// run a computation, and emit CSV data plus a machine-readable summary.json.
// Exit codes: 0 success, 1 config/validation error, 2 convergence failure,
// 3 invariant-suite failure.

#include "heatctl/backinv.hpp"
#include "heatctl/domain.hpp"
#include "heatctl/fullctl.hpp"
#include "heatctl/io.hpp"
#include "heatctl/kernel.hpp"
#include "heatctl/linalg.hpp"
#include "heatctl/numerics.hpp"
#include "heatctl/oracle.hpp"
#include "heatctl/subctl.hpp"
#include "heatctl/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace heatctl;

namespace {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const json& require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ConfigError("config error at " + path + "." + key + ": missing");
    return j.at(key);
}

double require_number(const json& j, const std::string& path, const char* key) {
    const json& v = require(j, path, key);
    if (!v.is_number()) throw ConfigError("config error at " + path + "." + key + ": expected a number");
    return v.get<double>();
}

int require_int(const json& j, const std::string& path, const char* key) {
    const json& v = require(j, path, key);
    if (!v.is_number_integer()) throw ConfigError("config error at " + path + "." + key + ": expected an integer");
    return v.get<int>();
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

int int_or(const json& j, const char* key, int fallback) {
    return j.contains(key) ? j.at(key).get<int>() : fallback;
}

struct Overrides {
    std::optional<int> modes;
    std::optional<int> grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> variant;
};

SpectralDomain build_domain(const json& cfg, const Overrides& ov) {
    const json& dj = require(cfg, "config", "domain");
    const std::string kind = require(dj, "domain", "kind").get<std::string>();
    const double length = require_number(dj, "domain", "length");
    int modes = int_or(dj, "modes", 16);
    int grid = int_or(dj, "grid", 4 * modes);
    if (ov.modes) modes = *ov.modes;
    if (ov.grid) grid = *ov.grid;
    try {
        if (kind == "interval") return SpectralDomain::interval(length, modes, grid);
        if (kind == "circle") return SpectralDomain::circle(length, modes, grid);
        if (kind == "sturm_liouville") {
            if (dj.contains("coefficient_samples")) {
                auto samples = dj.at("coefficient_samples").get<std::vector<double>>();
                return SpectralDomain::sturm_liouville(std::move(samples), length);
            }
            throw ConfigError("config error at domain.coefficient_samples: required for sturm_liouville");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config error at domain: ") + e.what());
    }
    throw ConfigError("config error at domain.kind: unknown kind '" + kind + "'");
}

// Field spec: {"modes": [[j, c], ...]} (1-based j) or {"seed": n, "band": m},
// then optional "flow_time" (apply e^{tP}) and "scale".
Field build_field(const SpectralDomain& d, const json& fj, const std::string& path,
                  const Overrides& ov) {
    Field f;
    if (fj.contains("modes")) {
        std::vector<double> c(static_cast<std::size_t>(d.modes()), 0.0);
        for (const auto& entry : fj.at("modes")) {
            if (!entry.is_array() || entry.size() != 2)
                throw ConfigError("config error at " + path + ".modes: expected [index, value] pairs");
            const int idx = entry.at(0).get<int>();
            if (idx < 1 || idx > d.modes())
                throw ConfigError("config error at " + path + ".modes: index out of range");
            c[static_cast<std::size_t>(idx - 1)] = entry.at(1).get<double>();
        }
        f = Field::from_coefficients(d, std::move(c));
    } else if (fj.contains("seed")) {
        const int band = int_or(fj, "band", std::min(8, d.modes()));
        std::uint64_t seed = fj.at("seed").get<std::uint64_t>();
        if (ov.seed) seed = *ov.seed;
        f = random_band_limited(d, band, seed);
    } else {
        throw ConfigError("config error at " + path + ": need either 'modes' or 'seed'");
    }
    if (fj.contains("flow_time")) f = semigroup_apply(d, fj.at("flow_time").get<double>(), f);
    if (fj.contains("scale")) {
        std::vector<double> c = coefficients_of(f);
        const double a = fj.at("scale").get<double>();
        for (double& v : c) v *= a;
        f = Field::from_coefficients(d, std::move(c));
    }
    return f;
}

json tolerances_summary(const json& cfg) {
    json t = cfg.contains("tolerances") ? cfg.at("tolerances") : json::object();
    json out;
    out["series_eps"] = number_or(t, "series_eps", 1e-14);
    out["max_terms"] = int_or(t, "max_terms", 200);
    out["time_quadrature"] = int_or(t, "time_quadrature", 256);
    return out;
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

int cmd_kernel(const json& cfg, const fs::path& out, const Overrides& ov) {
    const SpectralDomain d = build_domain(cfg, ov);
    const json& pj = require(cfg, "config", "problem");
    const double t = require_number(pj, "problem", "time");
    if (!(t > 0.0)) throw ConfigError("config error at problem.time: must be positive");
    const int samples = int_or(pj, "samples", 33);

    const auto nodes = d.nodes();
    const std::size_t stride = std::max<std::size_t>(1, nodes.size() / static_cast<std::size_t>(samples));
    std::vector<double> pts;
    for (std::size_t m = 0; m < nodes.size(); m += stride) pts.push_back(nodes[m]);

    std::vector<double> slice(pts.size() * pts.size());
    double sym_gap = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            slice[i * pts.size() + j] = kernel_eval(d, t, pts[i], pts[j]);
            if (j < i) sym_gap = std::max(sym_gap, std::abs(slice[i * pts.size() + j] - slice[j * pts.size() + i]));
        }
    write_matrix_csv(out / "kernel_slice.csv", pts, pts, slice,
                     static_cast<int>(pts.size()), static_cast<int>(pts.size()));

    std::vector<double> mass(pts.size());
    double mass_min = 1e300, mass_max = -1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        mass[i] = kernel_mass(d, t, pts[i]);
        mass_min = std::min(mass_min, mass[i]);
        mass_max = std::max(mass_max, mass[i]);
    }
    write_columns_csv(out / "mass.csv", {"x", "mass"}, {pts, mass});

    json summary;
    summary["command"] = "kernel";
    summary["domain"] = domain_descriptor(d);
    summary["time"] = t;
    summary["tail_bound"] = kernel_tail_bound(d, t);
    summary["symmetry_gap"] = sym_gap;
    summary["mass_min"] = mass_min;
    summary["mass_max"] = mass_max;
    summary["tolerances"] = tolerances_summary(cfg);
    write_json(out / "summary.json", summary);
    return 0;
}

int cmd_flow(const json& cfg, const fs::path& out, const Overrides& ov) {
    const SpectralDomain d = build_domain(cfg, ov);
    const json& pj = require(cfg, "config", "problem");
    const Field u0 = build_field(d, require(pj, "problem", "initial"), "problem.initial", ov);
    const double T = require_number(pj, "problem", "horizon");
    if (!(T > 0.0)) throw ConfigError("config error at problem.horizon: must be positive");
    const int samples = std::max(2, int_or(pj, "samples", 9));

    std::vector<double> times;
    std::vector<Field> states;
    for (int k = 0; k < samples; ++k) {
        const double t = T * k / (samples - 1);
        times.push_back(t);
        states.push_back(semigroup_apply(d, t, u0));
    }
    write_trajectory_csv(out / "trajectory.csv", times, states);
    write_field_csv(out / "initial.csv", u0);
    write_field_csv(out / "terminal.csv", states.back());

    json summary;
    summary["command"] = "flow";
    summary["domain"] = domain_descriptor(d);
    summary["horizon"] = T;
    summary["initial_l2"] = l2_norm(u0);
    summary["terminal_l2"] = l2_norm(states.back());
    summary["tolerances"] = tolerances_summary(cfg);
    write_json(out / "summary.json", summary);
    return 0;
}

int cmd_control_full(const json& cfg, const fs::path& out, const Overrides& ov) {
    const SpectralDomain d = build_domain(cfg, ov);
    const json& pj = require(cfg, "config", "problem");
    FullControlSpec spec;
    spec.domain = d;
    spec.u0 = build_field(d, require(pj, "problem", "initial"), "problem.initial", ov);
    spec.z = build_field(d, require(pj, "problem", "target"), "problem.target", ov);
    spec.horizon = require_number(pj, "problem", "horizon");
    spec.switch_time = number_or(pj, "switch_time", -1.0);
    std::string variant = pj.contains("variant") ? pj.at("variant").get<std::string>() : "integers";
    if (ov.variant) variant = *ov.variant;
    if (variant == "integers") spec.variant = SeriesVariant::AllIntegers;
    else if (variant == "dyadic") spec.variant = SeriesVariant::DyadicAsPrinted;
    else throw ConfigError("config error at problem.variant: expected 'integers' or 'dyadic'");

    const json tol = tolerances_summary(cfg);
    spec.series_eps = tol.at("series_eps").get<double>();
    spec.max_terms = tol.at("max_terms").get<int>();
    spec.run_cn_oracle = pj.contains("cn_oracle") ? pj.at("cn_oracle").get<bool>() : true;
    spec.cn_grid = int_or(pj, "cn_grid", 512);
    spec.cn_steps = int_or(pj, "cn_steps", 4096);

    const FullControlResult res = run_full_control(spec);

    write_field_csv(out / "f.csv", res.f);
    write_field_csv(out / "b.csv", res.b);
    write_field_csv(out / "terminal.csv", res.u_terminal);
    write_trajectory_csv(out / "trajectory.csv", res.trajectory_times, res.trajectory);

    json summary;
    summary["command"] = "control_full";
    summary["domain"] = domain_descriptor(d);
    summary["horizon"] = spec.horizon;
    summary["switch_time"] = res.switch_time;
    summary["delta_window"] = res.delta;
    summary["fitted_growth"] = res.fitted_growth;
    summary["variant"] = variant;
    summary["terminal_residual"] = res.spectral_residual;
    summary["cn_residual"] = res.cn_residual;
    summary["mode_ode_max_gap"] = res.mode_ode_max_gap;
    summary["mean_identity_gap"] = res.mean_identity_gap;
    summary["augmented"] = res.augmented;
    summary["b_terms"] = res.b_terms;
    summary["f_terms"] = res.f_terms;
    summary["tolerances"] = tol;
    write_json(out / "summary.json", summary);
    return 0;
}

int cmd_control_sub(const json& cfg, const fs::path& out, const Overrides& ov) {
    const SpectralDomain d = build_domain(cfg, ov);
    const json& pj = require(cfg, "config", "problem");
    const Field u0 = build_field(d, require(pj, "problem", "initial"), "problem.initial", ov);
    const double T = require_number(pj, "problem", "horizon");
    const json& wj = require(pj, "problem", "window");
    if (!wj.is_array() || wj.size() != 2)
        throw ConfigError("config error at problem.window: expected [lo, hi]");
    const SubdomainWindow w(wj.at(0).get<double>(), wj.at(1).get<double>());
    const int m = require_int(pj, "problem", "modes_m");
    const int nt = int_or(pj, "galerkin_steps", 2000);

    const SubdomainControlSystem sys = solve_control(d, w, T, m, u0);
    const GalerkinReport rep = galerkin_verify(sys, u0, nt);
    const double energy_quad = control_energy_quadrature(sys, 4096);

    std::vector<double> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i + 1;
    write_matrix_csv(out / "alpha.csv", {}, {}, sys.alpha, m, m);
    write_columns_csv(out / "beta.csv", {"i", "beta"}, {idx, sys.beta});
    write_columns_csv(out / "s.csv", {"j", "s"}, {idx, sys.s});
    write_field_csv(out / "phi.csv", control_profile(sys));

    json summary;
    summary["command"] = "control_sub";
    summary["domain"] = domain_descriptor(d);
    summary["horizon"] = T;
    summary["window"] = {w.lo(), w.hi()};
    summary["modes_m"] = m;
    summary["condition_estimate"] = sys.condition_estimate;
    summary["solve_residual"] = sys.solve_residual;
    summary["discarded_mass"] = sys.discarded_mass;
    summary["energy"] = sys.energy;
    summary["energy_quadrature"] = energy_quad;
    summary["terminal_closed_form"] = rep.closed_form_terminal_rel;
    summary["terminal_rk4"] = rep.rk4_terminal_rel;
    summary["tolerances"] = tolerances_summary(cfg);
    write_json(out / "summary.json", summary);
    return 0;
}

int cmd_invert(const json& cfg, const fs::path& out, const Overrides& ov) {
    const SpectralDomain d = build_domain(cfg, ov);
    const json& pj = require(cfg, "config", "problem");
    const Field u0 = build_field(d, require(pj, "problem", "initial"), "problem.initial", ov);
    const double T = require_number(pj, "problem", "horizon");
    const double t = require_number(pj, "problem", "time");
    const int K = int_or(pj, "max_terms", 40);
    const int segments = int_or(pj, "segments", 1);
    const std::string backend = pj.contains("backend") ? pj.at("backend").get<std::string>() : "spectral";

    const Field u_T = semigroup_apply(d, T, u0);
    const Field reference = semigroup_apply(d, t, u0);
    const InversionWindow window = inversion_window(T);

    json summary;
    summary["command"] = "invert";
    summary["domain"] = domain_descriptor(d);
    summary["horizon"] = T;
    summary["time"] = t;
    summary["window_lower"] = window.lower;
    summary["inside_window"] = window.contains(t);
    summary["backend"] = backend;
    summary["tolerances"] = tolerances_summary(cfg);

    auto rel_gap = [&](const Field& a) {
        const auto va = a.values();
        const auto vb = reference.values();
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < va.size(); ++i) {
            num += (va[i] - vb[i]) * (va[i] - vb[i]);
            den += vb[i] * vb[i];
        }
        return std::sqrt(num / den);
    };

    if (backend == "spectral") {
        const SpectralInvertResult res = (segments > 1)
                                             ? invert_segmented(d, u_T, t, T, segments, K)
                                             : invert_spectral(d, u_T, t, T, K);
        write_field_csv(out / "inverted.csv", res.field);
        summary["segments"] = segments;
        summary["max_tail"] = res.max_tail;
        summary["error_vs_reference"] = rel_gap(res.field);
    } else if (backend == "grid") {
        const GridInvertResult res = invert_grid(d, u_T, t, T, K, reference);
        write_field_csv(out / "inverted.csv", res.best);
        std::vector<double> ks(res.trace.size());
        for (std::size_t k = 0; k < ks.size(); ++k) ks[k] = static_cast<double>(k);
        write_columns_csv(out / "trace.csv", {"K", "error"}, {ks, res.trace});
        summary["best_K"] = res.best_index;
        summary["min_error"] = res.trace[static_cast<std::size_t>(res.best_index)];
        summary["final_error"] = res.trace.back();
    } else {
        throw ConfigError("config error at problem.backend: expected 'spectral' or 'grid'");
    }
    write_field_csv(out / "reference.csv", reference);
    write_json(out / "summary.json", summary);
    return 0;
}

int cmd_verify(const fs::path& out, bool write_report) {
    const std::vector<CheckResult> results = run_invariant_suite();
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%-4s %-46s %s\n", r.passed ? "ok" : "FAIL", r.name.c_str(), r.detail.c_str());
        if (!r.passed) ++failed;
    }
    std::printf("%zu checks, %d failed\n", results.size(), failed);
    if (write_report) {
        json rep = json::array();
        for (const auto& r : results)
            rep.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        json summary;
        summary["command"] = "verify";
        summary["checks"] = rep;
        summary["failed"] = failed;
        write_json(out / "verify_report.json", summary);
    }
    return failed ? 3 : 0;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral control toolkit for 1-D heat problems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    Overrides ov;
    std::uint64_t seed_flag = 0;
    int modes_flag = 0, grid_flag = 0;
    std::string variant_flag;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed_flag, "override the field seed");
    auto* modes_opt = app.add_option("--modes", modes_flag, "override domain mode count");
    auto* grid_opt = app.add_option("--grid", grid_flag, "override domain grid count");
    auto* variant_opt =
        app.add_option("--variant", variant_flag, "series variant: integers | dyadic");

    auto* kernel_cmd = app.add_subcommand("kernel", "evaluate the heat kernel and its mass");
    auto* flow_cmd = app.add_subcommand("flow", "free heat flow trajectory");
    auto* cfull_cmd = app.add_subcommand("control-full", "stationary full-domain control");
    auto* csub_cmd = app.add_subcommand("control-sub", "subdomain null-control linear system");
    auto* invert_cmd = app.add_subcommand("invert", "backward series inversion");
    auto* verify_cmd = app.add_subcommand("verify", "run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*seed_opt) ov.seed = seed_flag;
    if (*modes_opt) ov.modes = modes_flag;
    if (*grid_opt) ov.grid = grid_flag;
    if (*variant_opt) ov.variant = variant_flag;

    try {
        const fs::path out = prepare_out_dir(out_dir);
        if (*verify_cmd) return cmd_verify(out, true);
        if (config_path.empty()) throw ConfigError("config error: --config is required");
        const json cfg = load_config(config_path);
        if (*kernel_cmd) return cmd_kernel(cfg, out, ov);
        if (*flow_cmd) return cmd_flow(cfg, out, ov);
        if (*cfull_cmd) return cmd_control_full(cfg, out, ov);
        if (*csub_cmd) return cmd_control_sub(cfg, out, ov);
        if (*invert_cmd) return cmd_invert(cfg, out, ov);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 2;
    } catch (const CholeskyError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
