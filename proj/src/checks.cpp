#include "magflow/checks.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>

#include "magflow/evolve.hpp"
#include "magflow/quadrature.hpp"
#include "magflow/specfun.hpp"

namespace magflow {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
}

// Runs body(result); a thrown exception becomes a failed check.
CheckResult guarded(const std::string& name, double tol, const std::function<void(CheckResult&)>& body,
                    bool upper = true) {
    CheckResult c;
    c.name = name;
    c.tolerance = tol;
    try {
        body(c);
        if (upper) c.passed = std::isfinite(c.measured) && c.measured <= tol;
    } catch (const std::exception& e) {
        c.measured = NAN;
        c.passed = false;
        c.detail = std::string("error: ") + e.what();
    }
    return c;
}

}  // namespace

CheckResult check_laguerre_orthogonality(const std::vector<double>& alphas, int n_max, double tol) {
    return guarded("laguerre_orthogonality", tol, [&](CheckResult& c) {
        // exact for degree <= 2*40-1
        for (double a : alphas) {
            const GaussRule<double> g = gauss_laguerre<double>(40, a);
            Eigen::MatrixXd L(n_max + 1, g.nodes.size());
            for (Eigen::Index i = 0; i < g.nodes.size(); ++i) L.col(i) = laguerre_table(a, n_max, g.nodes[i]);
            const Eigen::MatrixXd G = L * g.weights.asDiagonal() * L.transpose();
            for (int m = 0; m <= n_max; ++m)
                for (int n = 0; n <= n_max; ++n) {
                    const double hn = std::exp(log_gamma(n + a + 1.0) - std::lgamma(n + 1.0));
                    const double hm = std::exp(log_gamma(m + a + 1.0) - std::lgamma(m + 1.0));
                    const double err = m == n ? std::abs(G(m, n) / hn - 1) : std::abs(G(m, n)) / std::sqrt(hm * hn);
                    c.measured = std::max(c.measured, err);
                }
        }
        c.detail = "m, n <= " + std::to_string(n_max) + ", " + std::to_string(alphas.size()) + " alphas";
    });
}

CheckResult check_pkm_dual_route(const std::vector<double>& alphas, int k_abs, int m_max, double tol) {
    return guarded("pkm_dual_route", tol, [&](CheckResult& c) {
        for (double a : alphas)
            for (int k = -k_abs; k <= k_abs; ++k)
                for (int m = 0; m <= m_max; ++m)
                    for (double rho : {0.1, 0.9, 2.5, 6.0}) {
                        const double s = pkm(k, m, a, rho), l = pkm_via_laguerre(k, m, a, rho);
                        // sum of term magnitudes; keeps the measure finite at roots
                        const double scale = std::abs(pkm(k, m, a, -rho));
                        c.measured = std::max(c.measured, std::abs(s - l) / scale);
                    }
        c.detail = "|k| <= " + std::to_string(k_abs) + ", m <= " + std::to_string(m_max);
    });
}

CheckResult check_norm_formula(const std::vector<MagneticParams>& ps, int k_abs, int m_max, double tol) {
    return guarded("norm_formula", tol, [&](CheckResult& c) {
        for (const auto& p : ps)
            for (int k = -k_abs; k <= k_abs; ++k)
                for (int m = 0; m <= m_max; ++m) {
                    const double f = norm_squared(p, {k, m});
                    c.measured = std::max(c.measured, std::abs(norm_squared_quadrature(p, {k, m}) / f - 1));
                }
    });
}

CheckResult check_eigen_residual(const std::vector<MagneticParams>& ps, double tol) {
    return guarded("eigen_residual", tol, [&](CheckResult& c) {
        const ModeIndex modes[8] = {{0, 0}, {1, 0}, {-1, 0}, {2, 3}, {-2, 1}, {-3, 4}, {4, 2}, {5, 5}};
        for (const auto& p : ps)
            for (const auto& md : modes)
                for (int i = 0; i <= 56; ++i)
                    c.measured = std::max(c.measured, eigen_residual(p, md, 0.2 + 0.05 * i).relative());
        c.detail = "8 modes, r in [0.2, 3]";
    });
}

CheckResult check_poisson_identity(int m_max, double tol) {
    return guarded("poisson_identity", tol, [&](CheckResult& c) {
        int n = 0;
        for (double nu : {0.3, 0.5, 1.5, 2.7})
            for (double a : {0.5, 1.0, 2.0})
                for (double b : {0.5, 1.0, 2.0})
                    for (double cc : {0.5, 1.0, 2.0}) {
                        c.measured = std::max(c.measured, poisson_identity_residual(nu, a, b, cc, m_max));
                        ++n;
                    }
        c.detail = std::to_string(n) + " points, m_max = " + std::to_string(m_max);
    });
}

CheckResult check_heat_kernel(const MagneticParams& p, const TruncationConfig& cfg, double tol) {
    return guarded("heat_kernel_dual_route", tol, [&](CheckResult& c) {
        const PolarPoint pts[4] = {{0.3, 0.0}, {0.8, 1.1}, {1.4, -2.0}, {2.1, 2.9}};
        for (double tb : {0.25, 0.5, 1.0})
            for (const auto& x : pts)
                for (const auto& y : pts)
                    c.measured = std::max(c.measured, heat_kernel_pair(p, tb / p.b0(), x, y, cfg).relative_gap());
        c.detail = "tau in {0.25, 0.5, 1}/b0, 16 point pairs";
    });
}

CheckResult check_bessel_bound(const std::vector<double>& nus, const std::vector<double>& zs) {
    return guarded("bessel_bound", 1.0, [&](CheckResult& c) {
        for (double nu : nus)
            for (double z : zs)
                c.measured = std::max(c.measured,
                                      std::abs(bessel_i_complex(nu, std::complex<double>(0, z))) / bessel_bound(nu, z));
        c.detail = "max |I_nu(iz)| / majorant";
    });
}

CheckResult check_kernel_diagonal(const MagneticParams& p, const TruncationConfig& cfg) {
    return guarded("kernel_diagonal_tail", cfg.tail_tol, [&](CheckResult& c) {
        double worst = 0;
        const double l = 1 / std::sqrt(p.b0());
        for (double tb : {0.3, pi / 4, 1.0})
            for (int i = 0; i <= 39; ++i) {
                const double r = (0.1 + 0.1 * i) * l;
                const double t = tb / p.b0();
                const KernelValue kv = kernel_series(p, t, {r, 0}, {r, 0}, cfg);
                c.measured = std::max(c.measured, kv.est_tail);
                worst = std::max(worst, std::abs(kv.value) * std::abs(std::sin(p.b0() * t)));
            }
        c.detail = "max |K(x,x)| |sin| = " + fmt(worst);
    });
}

CheckResult check_calibration(const MagneticParams& p, const TruncationConfig& cfg, double tol) {
    return guarded("calibration", tol, [&](CheckResult& c) {
        const Calibration& cal = calibrate_prefactor(p, cfg);
        c.measured = cal.modulus_spread;
        c.detail = "rho = " + fmt(cal.rho.real()) + (cal.rho.imag() < 0 ? " - " : " + ") +
                   fmt(std::abs(cal.rho.imag())) + "i, |rho|/(2 pi) - 1 = " + fmt(std::abs(cal.rho) / (2 * pi) - 1) +
                   ", phase spread " + fmt(cal.phase_spread);
    });
}

CheckResult check_alpha0_limit(double b0, double alpha, const TruncationConfig& cfg, double tol) {
    return guarded("alpha0_limit", tol, [&](CheckResult& c) {
        const MagneticParams p(alpha, b0);
        const MehlerConvention mc = mehler_convention_probe(b0, cfg);
        const double l = 1 / std::sqrt(b0);
        const PolarPoint xs[5] = {{0.5 * l, 0.3}, {0.9 * l, 1.2}, {1.3 * l, -0.8}, {1.7 * l, 2.5}, {2.2 * l, -2.0}};
        const PolarPoint ys[5] = {{0.6 * l, -0.4}, {1.0 * l, 2.0}, {1.4 * l, 0.7}, {1.9 * l, -1.6}, {2.4 * l, 3.0}};
        for (double tb : {0.4, 0.8, 1.2})
            for (const auto& x : xs)
                for (const auto& y : ys) {
                    const double t = tb / b0;
                    const auto K = kernel_series(p, t, x, y, cfg).value;
                    const auto M = mehler_with_convention(mc, b0, t, to_cartesian(x), to_cartesian(y), cfg.time_guard);
                    c.measured = std::max(c.measured, std::abs(K - M) / std::abs(M));
                }
        c.detail = "alpha = " + fmt(alpha) + ", 5x5x3 grid, gap / alpha = " + fmt(c.measured / alpha);
    });
}

CheckResult check_spectral_unitarity(const MagneticParams& p, const TruncationConfig& cfg, double tol) {
    return guarded("spectral_unitarity", tol, [&](CheckResult& c) {
        ExpandOptions eo;
        eo.parseval_tol = 1.0;  // only the coefficient norm matters here
        const double l = 1 / std::sqrt(p.b0());
        const SpectralCoefficients c0 = expand(gaussian(2 * p.b0(), {l, 0}), p, cfg, eo);
        const double n0 = c0.norm_squared();
        for (double tb : {0.3, pi / 4, 1.0})
            c.measured = std::max(c.measured, std::abs(evolve_spectral(c0, tb / p.b0()).norm_squared() / n0 - 1));
    });
}

CheckResult check_kernel_unitarity(const MagneticParams& p, const TruncationConfig& cfg, int jobs, double tol) {
    return guarded("kernel_unitarity", tol, [&](CheckResult& c) {
        const double l = 1 / std::sqrt(p.b0());
        const SampledFunction f = gaussian(p.b0(), {0.0, 3 * l});
        KernelQuadrature q;
        q.jobs = jobs;
        const double fn = l2_norm_squared(f, q);
        const std::complex<double> rho = calibrate_prefactor(p, cfg).rho;
        Eigen::VectorXd r, w;
        output_rule(f.support_radius + 12 * l, 240, r, w);
        for (double tb : {0.3, pi / 4, 1.0}) {
            const AngularModes u = evolve_kernel_modes(f, p, tb / p.b0(), cfg, q, rho, r, w);
            c.measured = std::max(c.measured, std::abs(u.norm_squared() / fn - 1));
        }
        c.detail = "Gaussian a = b0, x0 = (0, 3/sqrt(b0))";
    });
}

CheckResult check_dual_route(const MagneticParams& p, const TruncationConfig& cfg, int jobs, double tol) {
    return guarded("dual_route", tol, [&](CheckResult& c) {
        std::vector<PolarPoint> pts;
        for (int i = 0; i < 10; ++i) pts.push_back({0.25 + 0.25 * i, 0.6 * i});
        ExpandOptions eo;
        eo.parseval_tol = 1.0;  // non-form-domain data; the filter handles the tail
        KernelQuadrature q;
        q.jobs = jobs;
        for (const auto& [a, x0] : {std::pair{1.0, Point2(0, 0)}, std::pair{2.0, Point2(1, 0)}}) {
            const SampledFunction f = gaussian(a, x0);
            const SpectralCoefficients c0 = expand(f, p, cfg, eo);
            for (double tb : {0.3, pi / 4, 1.0}) {
                const double t = tb / p.b0();
                const auto ker = evolve_kernel(f, p, t, pts, cfg, q);
                const auto spec = reconstruct(evolve_spectral(c0, t), pts, SpectralFilter{});
                double err = 0, mx = 0;
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    err = std::max(err, std::abs(ker[i] - spec[i]));
                    mx = std::max(mx, std::abs(ker[i]));
                }
                c.measured = std::max(c.measured, err / mx);
            }
        }
        c.detail = "10 points, t in {0.3, pi/4, 1}/b0, relative to max |u|";
    });
}

CheckResult check_chaining(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg,
                           int jobs) {
    return guarded("chaining_bound", 0.0, [&](CheckResult& c) {
        const ChainingCheck ch = chaining_check(p, t, grid, cfg, jobs);
        c.measured = double(ch.violations);
        c.detail = "K1 = " + fmt(ch.k1) + ", K2 = " + fmt(ch.k2) + ", bound = " + fmt(ch.bound) +
                   ", sup = " + fmt(ch.sup_series) + ", Omega1/Omega2 points " + std::to_string(ch.omega1_points) +
                   "/" + std::to_string(ch.omega2_points);
        if (ch.omega1_points + ch.omega2_points != grid.points()) c.measured = INFINITY;
    });
}

DecayCertificate decay_certificate(const MagneticParams& p, const std::vector<double>& sigmas,
                                   const std::vector<double>& t_grid, const GridSpec& grid,
                                   const TruncationConfig& cfg, int jobs) {
    DecayCertificate d;
    d.result = guarded("decay_certificate", 0.05, [&](CheckResult& c) {
        const double b0 = p.b0();
        d.constants.assign(sigmas.size(), 0.0);
        bool finite = true;
        for (double t : t_grid) {
            const auto rows = weighted_sup_multi(p, t, sigmas, grid, cfg, jobs);
            const auto fine = weighted_sup_multi(p, t, sigmas, grid.refined(), cfg, jobs);
            for (std::size_t s = 0; s < sigmas.size(); ++s) {
                finite = finite && std::isfinite(rows[s].product) && std::isfinite(fine[s].product);
                c.measured = std::max(c.measured, std::abs(fine[s].sup_weighted / rows[s].sup_weighted - 1));
                d.constants[s] = std::max(d.constants[s], rows[s].product);
                d.rows.push_back(rows[s]);
                d.refined.push_back(fine[s]);
            }
        }
        // near-singular approach t -> pi/b0
        bool growth = true;
        double band = 1;
        for (std::size_t s = 0; s < sigmas.size(); ++s) {
            double prev = 0, lo = INFINITY, hi = 0;
            for (double tb : {pi - 0.6, pi - 0.3, pi - 0.15, pi - 0.08}) {
                const DecayScanRow row = weighted_sup(p, tb / b0, sigmas[s], grid, cfg, jobs);
                growth = growth && row.sup_weighted > prev;
                prev = row.sup_weighted;
                lo = std::min(lo, row.product);
                hi = std::max(hi, row.product);
                d.near_singular.push_back(row);
            }
            band = std::max(band, hi / lo);
        }
        std::string cs;
        for (std::size_t s = 0; s < sigmas.size(); ++s)
            cs += (s ? ", " : "") + std::string("C(") + fmt(sigmas[s]) + ") = " + fmt(d.constants[s]);
        c.detail = "max refinement change; " + cs + "; near-singular band " + fmt(band) +
                   (growth ? ", sup grows" : ", sup does not grow");
        if (!finite || !growth || !(band < 2)) c.measured = INFINITY;
    });
    return d;
}

CheckResult check_small_time(const MagneticParams& p, const std::vector<double>& sigmas,
                             const std::vector<double>& t_grid, const GridSpec& grid, const TruncationConfig& cfg,
                             int jobs) {
    return guarded("small_time", 0.0, [&](CheckResult& c) {
        std::string cs;
        for (double s : sigmas) {
            const SmallTimeTable tab = small_time_check(p, s, t_grid, grid, cfg, jobs);
            const double upper = std::pow(pi / 2, 1 + s);
            for (const auto& row : tab.rows) {
                // distance outside [1, (pi/2)^{1+sigma}]
                c.measured = std::max({c.measured, 1 - row.sine_ratio, row.sine_ratio - upper});
                if (row.sup_weighted > tab.constant * std::pow(row.t, -1 - s) * (1 + 1e-14)) c.measured = INFINITY;
            }
            cs += (cs.empty() ? "" : ", ") + std::string("C(") + fmt(s) + ") = " + fmt(tab.constant);
        }
        c.detail = "sandwich excess; " + cs;
    });
}

}  // namespace magflow
