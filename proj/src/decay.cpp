#include "magflow/decay.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "magflow/errors.hpp"
#include "magflow/parallel.hpp"
#include "magflow/specfun.hpp"

namespace magflow {

namespace {
constexpr double pi = std::numbers::pi;
}

void GridSpec::validate() const {
    if (n_radii < 2 || n_angles < 1) throw ConfigError("grid: need at least 2 radii and 1 angle");
    if (!(r_max > r_min)) throw ConfigError("grid: r_max must exceed r_min");
}

Eigen::VectorXd GridSpec::radii() const {
    Eigen::VectorXd r(n_radii);
    const double lr = std::log(r_max / r_min);
    for (int i = 0; i < n_radii; ++i) r[i] = r_min * std::exp(lr * i / (n_radii - 1));
    r[n_radii - 1] = r_max;
    return r;
}

Eigen::VectorXd GridSpec::angles() const {
    Eigen::VectorXd a(n_angles);
    for (int l = 0; l < n_angles; ++l) a[l] = 2 * pi * l / n_angles;
    return a;
}

GridSpec GridSpec::refined() const { return {2 * n_radii, r_min, r_max, 2 * n_angles}; }

long long GridSpec::points() const {
    return (long long)n_radii * n_radii * n_angles * n_angles;
}

OmegaRegion classify(const MagneticParams& p, double t, double r1, double r2) {
    const double thr = 2 * std::abs(std::sin(p.b0() * t)) / p.b0();
    return {r1 * r2 >= thr ? OmegaTag::Omega1 : OmegaTag::Omega2, thr};
}

namespace {

void check_inputs(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg) {
    cfg.validate();
    grid.validate();
    check_time(p.b0(), t, cfg.time_guard);
}

// max over angle differences of |S(x, dtheta - b0 t)| for every radius pair
// i <= j (symmetric fill). The angle differences of a uniform grid are the
// grid angles themselves.
Eigen::MatrixXd pair_series_max(const MagneticParams& p, double t, const GridSpec& grid,
                                const TruncationConfig& cfg, int jobs) {
    const Eigen::VectorXd r = grid.radii();
    const Eigen::VectorXd ang = grid.angles();
    const int n = grid.n_radii;
    Eigen::MatrixXd out(n, n);
    parallel_for(n, jobs, [&](int i) {
        for (int j = i; j < n; ++j) {
            const double x = kernel_argument(p, t, r[i], r[j]);
            const int K = std::max(cfg.k_max, required_k_max(p, x, cfg.tail_tol));
            const Eigen::VectorXcd terms = angular_bessel_terms(p, x, K);
            double best = 0;
            for (Eigen::Index d = 0; d < ang.size(); ++d) {
                const double phi = ang[d] - p.b0() * t;
                const std::complex<double> step = std::polar(1.0, phi);
                std::complex<double> e = std::polar(1.0, -K * phi), s = 0;
                for (int k = -K; k <= K; ++k) {
                    s += e * terms[k + K];
                    e *= step;
                }
                best = std::max(best, std::abs(s));
            }
            out(i, j) = out(j, i) = best;
        }
    });
    return out;
}

}  // namespace

std::vector<DecayScanRow> weighted_sup_multi(const MagneticParams& p, double t, const std::vector<double>& sigmas,
                                             const GridSpec& grid, const TruncationConfig& cfg, int jobs) {
    check_inputs(p, t, grid, cfg);
    for (double s : sigmas)
        if (!(s >= 0) || s > p.mu() + 1e-12)
            throw std::domain_error("weighted_sup: sigma must lie in [0, mu]");
    if (!(grid.r_min > 0)) throw std::domain_error("weighted_sup: grid must stay away from r = 0");
    const Eigen::MatrixXd smax = pair_series_max(p, t, grid, cfg, jobs);
    const Eigen::VectorXd r = grid.radii();
    const double sn = std::abs(std::sin(p.b0() * t));
    const double pref = std::abs(calibrate_prefactor(p, cfg).rho) * p.b0() / (8 * pi * pi * sn);
    std::vector<DecayScanRow> rows;
    for (double s : sigmas) {
        double sup = 0;
        for (int i = 0; i < grid.n_radii; ++i)
            for (int j = i; j < grid.n_radii; ++j)
                sup = std::max(sup, std::pow(r[i] * r[j], -s) * pref * smax(i, j));
        DecayScanRow row;
        row.t = t;
        row.sigma = s;
        row.sup_weighted = sup;
        row.sin_factor = std::pow(sn, 1 + s);
        row.product = sup * row.sin_factor;
        row.grid_points = grid.points();
        rows.push_back(row);
    }
    return rows;
}

DecayScanRow weighted_sup(const MagneticParams& p, double t, double sigma, const GridSpec& grid,
                          const TruncationConfig& cfg, int jobs) {
    return weighted_sup_multi(p, t, {sigma}, grid, cfg, jobs).front();
}

double k2_series(const MagneticParams& p, double X, int k_max) {
    const double mu = p.mu();
    double s = 0;
    for (int k = -k_max; k <= k_max; ++k) {
        const double nu = p.order(k);
        const double e = nu - mu;  // >= 0
        const double lx = e == 0 ? 0.0 : (X == 0 ? -INFINITY : e * std::log(X));
        s += std::exp(lx - nu * std::log(2.0) - log_gamma(0.5 + nu));
    }
    return s;
}

double k1_estimate(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg,
                   double inner_scale, int jobs) {
    check_inputs(p, t, grid, cfg);
    if (!(inner_scale >= 1)) throw std::domain_error("k1_estimate: inner_scale must be >= 1");
    const Eigen::MatrixXd smax = pair_series_max(p, t, grid, cfg, jobs);
    const Eigen::VectorXd r = grid.radii();
    double best = 0;
    for (int i = 0; i < grid.n_radii; ++i)
        for (int j = i; j < grid.n_radii; ++j) {
            if (classify(p, t, r[i], r[j]).tag != OmegaTag::Omega1) continue;
            const double X = std::abs(kernel_argument(p, t, r[i], r[j]));
            if (X < inner_scale) continue;  // X = inner_scale exactly at the moved boundary
            best = std::max(best, std::pow(X, -p.mu()) * smax(i, j));
        }
    return best;
}

double k2_estimate(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg) {
    check_inputs(p, t, grid, cfg);
    const Eigen::VectorXd r = grid.radii();
    double best = 0;
    for (int i = 0; i < grid.n_radii; ++i)
        for (int j = i; j < grid.n_radii; ++j) {
            if (classify(p, t, r[i], r[j]).tag != OmegaTag::Omega2) continue;
            const double X = std::abs(kernel_argument(p, t, r[i], r[j]));
            best = std::max(best, k2_series(p, X, cfg.k_max));
        }
    return best;
}

ChainingCheck chaining_check(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg,
                             int jobs) {
    check_inputs(p, t, grid, cfg);
    const Eigen::MatrixXd smax = pair_series_max(p, t, grid, cfg, jobs);
    const Eigen::VectorXd r = grid.radii();
    const double mu = p.mu();
    const double sn = std::abs(std::sin(p.b0() * t));
    ChainingCheck c;
    c.k1 = k1_estimate(p, t, grid, cfg, 1.0, jobs);
    c.k2 = k2_estimate(p, t, grid, cfg);
    c.bound = std::max(c.k1, c.k2) * std::pow(p.b0() / 2, mu) * std::pow(sn, -mu);
    const long long per_pair = (long long)grid.n_angles * grid.n_angles;
    for (int i = 0; i < grid.n_radii; ++i)
        for (int j = 0; j < grid.n_radii; ++j) {
            const double w = std::pow(r[i] * r[j], -mu) * smax(i, j);
            c.sup_series = std::max(c.sup_series, w);
            if (w > c.bound * (1 + 1e-12)) c.violations += per_pair;
            if (classify(p, t, r[i], r[j]).tag == OmegaTag::Omega1)
                c.omega1_points += per_pair;
            else
                c.omega2_points += per_pair;
        }
    return c;
}

SmallTimeTable small_time_check(const MagneticParams& p, double sigma, const std::vector<double>& t_grid,
                                const GridSpec& grid, const TruncationConfig& cfg, int jobs) {
    const double b0 = p.b0();
    for (double t : t_grid)
        if (!(b0 * t > cfg.time_guard) || !(b0 * t < pi / 2))
            throw std::domain_error("small_time_check: t must lie in (time_guard/b0, pi/(2 b0))");
    SmallTimeTable tab;
    tab.sigma = sigma;
    tab.ok = true;
    const double upper = std::pow(pi / 2, 1 + sigma);
    for (double t : t_grid) {
        const DecayScanRow row = weighted_sup(p, t, sigma, grid, cfg, jobs);
        SmallTimeRow s;
        s.t = t;
        s.sup_weighted = row.sup_weighted;
        s.scaled = row.sup_weighted * std::pow(t, 1 + sigma);
        s.sine_ratio = std::pow(b0 * t / std::abs(std::sin(b0 * t)), 1 + sigma);
        s.sandwich_ok = s.sine_ratio >= 1.0 && s.sine_ratio <= upper;
        tab.ok = tab.ok && s.sandwich_ok;
        tab.constant = std::max(tab.constant, s.scaled);
        tab.rows.push_back(s);
    }
    return tab;
}

}  // namespace magflow
