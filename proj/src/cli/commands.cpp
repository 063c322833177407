#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "magflow/checks.hpp"
#include "magflow/cli.hpp"
#include "magflow/errors.hpp"
#include "magflow/evolve.hpp"

namespace magflow::cli {

namespace {

constexpr double pi = std::numbers::pi;

std::string key_at(const std::string& name, const char* var, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "[%s=%.17g]", var, v);
    return name + buf;
}

bool singular(const MagneticParams& p, double t, double guard) {
    return singular_distance(p.b0(), t) < guard;
}

void require_regular(const RunConfig& cfg, const std::vector<double>& ts) {
    const MagneticParams p = cfg.params();
    for (double t : ts)
        if (singular(p, t, cfg.trunc.time_guard))
            throw ConfigError("t = " + num(t) + " is a singular time (b0 t within time_guard of pi Z)");
}

}  // namespace

Report cmd_spectrum(const RunConfig& cfg) {
    cfg.validate();
    const MagneticParams p = cfg.params();
    struct Entry {
        double lambda;
        int k, m;
    };
    std::vector<Entry> entries;
    for (int k = -cfg.trunc.k_max; k <= cfg.trunc.k_max; ++k)
        for (int m = 0; m <= cfg.trunc.m_max; ++m) entries.push_back({eigenvalue(p, {k, m}), k, m});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.k != b.k) return a.k < b.k;
        return a.m < b.m;
    });
    Report r;
    r.table.columns = {"k", "m", "lambda", "multiplicity", "multiplicity_unbounded", "norm_squared"};
    for (const auto& e : entries) {
        const Multiplicity mult = multiplicity(p, e.lambda, cfg.trunc.k_max);
        r.table.rows.push_back({(long long)e.k, (long long)e.m, e.lambda, (long long)mult.count, mult.unbounded,
                                norm_squared(p, {e.k, e.m})});
    }
    return r;
}

Report cmd_verify(const RunConfig& cfg) {
    cfg.validate();
    const MagneticParams p = cfg.params();
    const TruncationConfig& tc = cfg.trunc;
    std::vector<CheckResult> checks;
    checks.push_back(check_laguerre_orthogonality({0.3, 0.5, 1.7, std::abs(cfg.alpha)}));
    checks.push_back(check_pkm_dual_route({0.3, 0.5, cfg.alpha}));
    checks.push_back(check_norm_formula({p}));
    checks.push_back(check_eigen_residual({p}));
    checks.push_back(check_poisson_identity(tc.m_max));
    checks.push_back(check_heat_kernel(p, tc));
    checks.push_back(check_bessel_bound());
    checks.push_back(check_kernel_diagonal(p, tc));
    checks.push_back(check_calibration(p, tc));
    checks.push_back(check_spectral_unitarity(p, tc));
    checks.push_back(check_kernel_unitarity(p, tc, cfg.jobs));
    checks.push_back(check_dual_route(p, tc, cfg.jobs));
    checks.push_back(check_chaining(p, pi / 4 / p.b0(), cfg.grid, tc, cfg.jobs));

    Report r;
    r.table.columns = {"check", "measured", "tolerance", "status", "detail"};
    long long failed = 0;
    for (const auto& c : checks) {
        r.table.rows.push_back({c.name, c.measured, c.tolerance, std::string(c.passed ? "pass" : "fail"), c.detail});
        failed += !c.passed;
    }
    try {
        const Calibration& cal = calibrate_prefactor(p, tc);
        r.summary.push_back({"calibration_rho_re", cal.rho.real()});
        r.summary.push_back({"calibration_rho_im", cal.rho.imag()});
        r.summary.push_back({"calibration_modulus_spread", cal.modulus_spread});
    } catch (const std::exception& e) {
        r.summary.push_back({"calibration_error", std::string(e.what())});
    }
    r.summary.push_back({"checks_failed", failed});
    r.exit_code = failed ? exit_verification_failed : exit_ok;
    return r;
}

Report cmd_decay_scan(const RunConfig& cfg) {
    cfg.validate();
    const MagneticParams p = cfg.params();
    const std::vector<double> ts = cfg.times({0.1, 0.3, pi / 4, 1.0, 2.0, pi - 0.15});
    const std::vector<double> sig = cfg.sigmas();
    Report r;
    r.table.columns = {"t", "sigma", "sup_weighted", "sin_factor", "product", "grid_points"};
    std::vector<double> cmax(sig.size(), 0.0);
    long long bad = 0;
    for (double t : ts) {
        if (singular(p, t, cfg.trunc.time_guard)) {
            const std::string mark = "error:singular_time";
            for (double s : sig) r.table.rows.push_back({t, s, mark, mark, mark, 0LL});
            ++bad;
            continue;
        }
        const auto rows = weighted_sup_multi(p, t, sig, cfg.grid, cfg.trunc, cfg.jobs);
        for (std::size_t s = 0; s < rows.size(); ++s) {
            const DecayScanRow& d = rows[s];
            r.table.rows.push_back({d.t, d.sigma, d.sup_weighted, d.sin_factor, d.product, d.grid_points});
            cmax[s] = std::max(cmax[s], d.product);
        }
    }
    for (std::size_t s = 0; s < sig.size(); ++s) r.summary.push_back({key_at("max_product", "sigma", sig[s]), cmax[s]});
    r.summary.push_back({"singular_rows", bad * (long long)sig.size()});
    return r;
}

Report cmd_evolve(const RunConfig& cfg) {
    cfg.validate();
    const MagneticParams p = cfg.params();
    const std::vector<double> ts = cfg.times({pi / 4});
    if (cfg.route == "kernel") require_regular(cfg, ts);
    const bool want_kernel = cfg.route != "spectral";
    const bool want_spectral = cfg.route != "kernel";

    const SampledFunction f = gaussian(cfg.gauss_a, {cfg.x0, cfg.y0});
    KernelQuadrature q;
    q.jobs = cfg.jobs;
    const double fn = l2_norm_squared(f, q);
    std::vector<PolarPoint> pts;
    for (int i = 1; i <= cfg.out_radii; ++i)
        for (int l = 0; l < cfg.out_angles; ++l) pts.push_back({cfg.out_r_max * i / cfg.out_radii, 2 * pi * l / cfg.out_angles});

    Report r;
    r.table.columns = {"t", "r", "theta", "route", "re_u", "im_u", "abs_u"};
    r.summary.push_back({"input_norm_squared", fn});

    std::optional<SpectralCoefficients> c0;
    if (want_spectral) {
        ExpandOptions eo;
        eo.parseval_tol = 1.0;  // reported below instead of enforced
        const Expansion e = expand_report(f, p, cfg.trunc, eo);
        c0 = e.coefficients;
        r.summary.push_back({"spectral_norm_squared", e.coefficients.norm_squared()});
        r.summary.push_back({"spectral_norm_defect", e.parseval_defect});
    }
    const auto emit = [&](double t, const char* route, const std::vector<std::complex<double>>& u) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            r.table.rows.push_back({t, pts[i].r, pts[i].theta, std::string(route), u[i].real(), u[i].imag(), std::abs(u[i])});
    };
    for (double t : ts) {
        std::vector<std::complex<double>> us, uk;
        if (want_spectral) {
            us = reconstruct(evolve_spectral(*c0, t), pts, SpectralFilter{});
            emit(t, "spectral", us);
        }
        if (want_kernel && singular(p, t, cfg.trunc.time_guard)) {
            r.summary.push_back({key_at("kernel_route", "t", t), std::string("skipped: singular time, spectral route only")});
            continue;
        }
        if (!want_kernel) continue;
        uk = evolve_kernel(f, p, t, pts, cfg.trunc, q);
        emit(t, "kernel", uk);
        const double l = 1 / std::sqrt(p.b0());
        Eigen::VectorXd rr, ww;
        output_rule(f.support_radius + 12 * l, 240, rr, ww);
        const AngularModes m =
            evolve_kernel_modes(f, p, t, cfg.trunc, q, calibrate_prefactor(p, cfg.trunc).rho, rr, ww);
        r.summary.push_back({key_at("kernel_norm_defect", "t", t), std::abs(m.norm_squared() / fn - 1)});
        if (want_spectral) {
            double gap = 0, mx = 0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                gap = std::max(gap, std::abs(uk[i] - us[i]));
                mx = std::max(mx, std::abs(uk[i]));
            }
            r.summary.push_back({key_at("max_route_discrepancy", "t", t), mx > 0 ? gap / mx : gap});
        }
    }
    return r;
}

Report cmd_kernel_eval(const RunConfig& cfg) {
    cfg.validate();
    const MagneticParams p = cfg.params();
    const std::vector<double> ts = cfg.times({pi / 4});
    require_regular(cfg, ts);
    Report r;
    r.table.columns = {"t", "x_r", "x_theta", "y_r", "y_theta", "re_k", "im_k", "abs_k", "est_tail", "k_terms_used"};
    for (double t : ts) {
        const KernelValue kv = kernel_series(p, t, cfg.x, cfg.y, cfg.trunc);
        r.table.rows.push_back({t, cfg.x.r, cfg.x.theta, cfg.y.r, cfg.y.theta, kv.value.real(), kv.value.imag(),
                                std::abs(kv.value), kv.est_tail, (long long)kv.k_terms_used});
    }
    const Calibration& cal = calibrate_prefactor(p, cfg.trunc);
    r.summary.push_back({"calibration_rho_re", cal.rho.real()});
    r.summary.push_back({"calibration_rho_im", cal.rho.imag()});
    return r;
}

Report cmd_poisson_check(const RunConfig& cfg) {
    cfg.validate();
    constexpr double tol = 1e-8;
    Report r;
    r.table.columns = {"nu", "a", "b", "c", "lhs", "rhs", "residual", "pass"};
    long long failed = 0;
    for (double nu : {0.3, 0.5, 1.5, 2.7})
        for (double a : {0.5, 1.0, 2.0})
            for (double b : {0.5, 1.0, 2.0})
                for (double c : {0.5, 1.0, 2.0}) {
                    const PoissonCheck pc = poisson_identity(nu, a, b, c, cfg.trunc.m_max);
                    const bool ok = pc.residual < tol;
                    failed += !ok;
                    r.table.rows.push_back({nu, a, b, c, pc.lhs, pc.rhs, pc.residual, ok});
                }
    r.summary.push_back({"m_max", (long long)cfg.trunc.m_max});
    r.summary.push_back({"tolerance", tol});
    r.summary.push_back({"failed", failed});
    r.exit_code = failed ? exit_verification_failed : exit_ok;
    return r;
}

// ---------------------------------------------------------------- driver

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"magflow: spectra, propagator kernels and decay scans for the Aharonov-Bohm plus constant field operator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    // flag name -> config key; values applied after the config file
    const std::vector<std::pair<std::string, std::string>> flags = {
        {"--alpha", "alpha"},         {"--b0", "b0"},
        {"--sigma", "sigma"},         {"--t", "t"},
        {"--kmax", "k_max"},          {"--mmax", "m_max"},
        {"--out", "out"},             {"--format", "format"},
        {"--jobs", "jobs"},           {"--tail-tol", "tail_tol"},
        {"--time-guard", "time_guard"}, {"--quad-nodes", "quad_nodes"},
        {"--n-radii", "n_radii"},     {"--r-min", "r_min"},
        {"--r-max", "r_max"},         {"--n-angles", "n_angles"},
        {"--route", "route"},         {"--gauss-a", "gauss_a"},
        {"--x0", "x0"},               {"--out-radii", "out_radii"},
        {"--out-angles", "out_angles"}, {"--out-r-max", "out_r_max"},
        {"--x", "x"},                 {"--y", "y"},
    };
    std::vector<std::string> values(flags.size());
    for (std::size_t i = 0; i < flags.size(); ++i)
        app.add_option(flags[i].first, values[i], "sets config key '" + flags[i].second + "'");
    app.add_option("--config", config_path, "flat JSON config; flags override its values");

    const std::vector<std::pair<std::string, Report (*)(const RunConfig&)>> commands = {
        {"spectrum", cmd_spectrum},   {"verify", cmd_verify},          {"decay-scan", cmd_decay_scan},
        {"evolve", cmd_evolve},       {"kernel-eval", cmd_kernel_eval}, {"poisson-check", cmd_poisson_check},
    };
    const std::vector<std::string> help = {
        "eigenvalue table sorted by lambda, k, m",
        "run every invariant suite; exit 1 on any failure",
        "weighted kernel suprema per (t, sigma)",
        "evolve a Gaussian by the spectral and/or kernel route",
        "evaluate the calibrated propagator kernel at (x, y)",
        "Laguerre Poisson-kernel identity on a fixed grid",
    };
    for (std::size_t i = 0; i < commands.size(); ++i) app.add_subcommand(commands[i].first, help[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path, std::ios::binary);
            if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            apply_json(cfg, ss.str());
        }
        for (std::size_t i = 0; i < flags.size(); ++i)
            if (app.count(flags[i].first)) apply_setting(cfg, flags[i].second, values[i]);
        cfg.validate();
    } catch (const std::exception& e) {
        err << "magflow: " << e.what() << '\n';
        return exit_usage;
    }

    Report report;
    try {
        for (const auto& [name, fn] : commands)
            if (app.got_subcommand(name)) report = fn(cfg);
    } catch (const std::invalid_argument& e) {  // includes ConfigError
        err << "magflow: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "magflow: " << e.what() << '\n';
        return exit_verification_failed;
    }

    if (cfg.out.empty()) {
        write_report(report, cfg.format, out);
    } else {
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file) {
            err << "magflow: cannot write '" << cfg.out << "'\n";
            return exit_usage;
        }
        write_report(report, cfg.format, file);
    }
    if (report.exit_code != exit_ok) err << "magflow: verification failed\n";
    return report.exit_code;
}

}  // namespace magflow::cli
