// Acceptance suite: one PASS/FAIL line per criterion 1-12.
//   acceptance                 run all
//   acceptance --criterion N   run one (what ctest does)
// Exit status is nonzero if any selected criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "magflow/checks.hpp"
#include "magflow/cli.hpp"

using namespace magflow;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> lines;  // one per sub-check

    void add(const CheckResult& c, const std::string& tag = "") {
        pass = pass && c.passed;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s%s%s: %s measured %.3e, tolerance %.1e", c.name.c_str(),
                      tag.empty() ? "" : " ", tag.c_str(), c.passed ? "ok" : "FAILED", c.measured, c.tolerance);
        lines.push_back(std::string(buf) + (c.detail.empty() ? "" : " (" + c.detail + ")"));
    }
    void note(const std::string& s) { lines.push_back(s); }
};

const std::vector<MagneticParams> decay_params = {{0.5, 1.0}, {0.3, 2.0}};

std::string tag(const MagneticParams& p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "[alpha=%g b0=%g]", p.alpha(), p.b0());
    return buf;
}

std::vector<double> sigmas(const MagneticParams& p) { return {0.0, p.mu() / 2, p.mu()}; }

Outcome laguerre_orthogonality() {
    Outcome o;
    o.add(check_laguerre_orthogonality({0.3, 0.5, 1.7}, 8, 1e-8));
    return o;
}

Outcome pkm_dual_route() {
    Outcome o;
    o.add(check_pkm_dual_route({0.3, 0.5}, 5, 10, 1e-12));
    return o;
}

Outcome norm_formula() {
    Outcome o;
    o.add(check_norm_formula({{0.3, 1.0}, {0.5, 1.0}, {0.3, 2.0}, {0.5, 2.0}}, 5, 5, 1e-8));
    return o;
}

Outcome eigen_residual() {
    Outcome o;
    o.add(check_eigen_residual({{0.5, 1.0}, {0.3, 2.0}}, 1e-8));
    return o;
}

Outcome poisson() {
    Outcome o;
    o.add(check_poisson_identity(200, 1e-8));
    return o;
}

Outcome heat_kernel() {
    Outcome o;
    const TruncationConfig cfg;
    for (const auto& p : decay_params) o.add(check_heat_kernel(p, cfg, 1e-8), tag(p));
    return o;
}

Outcome bessel_bound_check() {
    Outcome o;
    o.add(check_bessel_bound({0.3, 0.5, 1.7, 5.5}, {0.1, 1, 10, 25}));
    return o;
}

Outcome calibration_alpha0() {
    Outcome o;
    const TruncationConfig cfg;
    const MagneticParams p(1e-3, 1.0);
    o.add(check_alpha0_limit(1.0, 1e-3, cfg, 1e-3));
    o.add(check_calibration(p, cfg, 1e-6), tag(p));
    const Calibration& cal = calibrate_prefactor(p, cfg);
    char buf[200];
    std::snprintf(buf, sizeof buf, "measured calibration constant rho = %.12g %+.3ei, |rho| per t = {%.12g, %.12g, %.12g}",
                  cal.rho.real(), cal.rho.imag(), cal.moduli[0], cal.moduli[1], cal.moduli[2]);
    o.note(buf);
    // the gap closes linearly in alpha; recorded for context, not graded
    std::string trend = "alpha -> 0 gap:";
    for (double a : {1e-2, 1e-4}) {
        const CheckResult c = check_alpha0_limit(1.0, a, cfg, 1.0);
        std::snprintf(buf, sizeof buf, " %.0e -> %.3e;", a, c.measured);
        trend += buf;
    }
    o.note(trend);
    return o;
}

Outcome unitarity() {
    Outcome o;
    const TruncationConfig cfg;
    for (const auto& p : decay_params) {
        o.add(check_spectral_unitarity(p, cfg, 1e-12), tag(p));
        o.add(check_kernel_unitarity(p, cfg, 4, 1e-4), tag(p));
        o.add(check_dual_route(p, cfg, 4, 1e-4), tag(p));
    }
    return o;
}

Outcome decay_certificate_check() {
    Outcome o;
    const TruncationConfig cfg;
    const GridSpec grid;
    for (const auto& p : decay_params) {
        std::vector<double> ts;
        for (double tb : {0.1, 0.3, pi / 4, 1.0, 2.0, pi - 0.15}) ts.push_back(tb / p.b0());
        o.add(decay_certificate(p, sigmas(p), ts, grid, cfg, 4).result, tag(p));
    }
    return o;
}

Outcome small_time() {
    Outcome o;
    const TruncationConfig cfg;
    const GridSpec grid;
    for (const auto& p : decay_params) {
        std::vector<double> ts;
        for (double tb : {0.01, 0.05, 0.1, 0.3, 0.7, 1.2, 1.5, 1.57}) ts.push_back(tb / p.b0());
        o.add(check_small_time(p, sigmas(p), ts, grid, cfg, 4), tag(p));
    }
    return o;
}

Outcome cli_determinism() {
    Outcome o;
    cli::RunConfig cfg;
    cfg.alpha = 0.3;
    cfg.b0 = 2.0;
    cfg.grid = {24, 0.05, 8, 12};
    const auto render = [](const cli::Report& r, const std::string& fmt) {
        std::ostringstream s;
        cli::write_report(r, fmt, s);
        return s.str();
    };
    bool same = true;
    for (const std::string fmt : {"csv", "json"}) {
        const std::string s1 = render(cli::cmd_spectrum(cfg), fmt), s2 = render(cli::cmd_spectrum(cfg), fmt);
        cfg.jobs = 1;
        const std::string d1 = render(cli::cmd_decay_scan(cfg), fmt), d2 = render(cli::cmd_decay_scan(cfg), fmt);
        cfg.jobs = 4;
        const std::string d4 = render(cli::cmd_decay_scan(cfg), fmt);
        const bool ok = s1 == s2 && d1 == d2 && d1 == d4;
        same = same && ok;
        o.note(fmt + ": spectrum " + std::to_string(s1.size()) + " bytes, decay-scan " + std::to_string(d1.size()) +
               " bytes, repeated and jobs=4 runs " + (ok ? "identical" : "DIFFER"));
    }
    o.pass = same;
    return o;
}

struct Criterion {
    const char* title;
    std::function<Outcome()> run;
};

const std::vector<Criterion> criteria = {
    {"Laguerre orthogonality", laguerre_orthogonality},
    {"P_{k,m} explicit sum vs Laguerre form", pkm_dual_route},
    {"norm formula vs radial quadrature", norm_formula},
    {"eigen-equation residual", eigen_residual},
    {"Poisson-kernel identity", poisson},
    {"heat-kernel dual route", heat_kernel},
    {"Bessel majorant", bessel_bound_check},
    {"calibration and alpha -> 0 limit", calibration_alpha0},
    {"unitarity and dual route", unitarity},
    {"decay certificate", decay_certificate_check},
    {"small-time consistency", small_time},
    {"CLI determinism", cli_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc == 3 && std::string(argv[1]) == "--criterion") only = std::atoi(argv[2]);
    if ((argc != 1 && argc != 3) || only < 0 || only > int(criteria.size())) {
        std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
        return 2;
    }
    int failed = 0;
    for (int i = 1; i <= int(criteria.size()); ++i) {
        if (only && i != only) continue;
        Outcome o;
        try {
            o = criteria[i - 1].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note(std::string("error: ") + e.what());
        }
        std::printf("criterion %2d %s  %s\n", i, o.pass ? "PASS" : "FAIL", criteria[i - 1].title);
        for (const auto& l : o.lines) std::printf("    %s\n", l.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
