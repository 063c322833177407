#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "magflow/decay.hpp"
#include "magflow/errors.hpp"

using namespace magflow;
constexpr double pi = std::numbers::pi;

namespace {
double rel_change(double a, double b) { return std::abs(b / a - 1); }
}  // namespace

TEST_CASE("grid: log-spaced radii and uniform angles") {
    const GridSpec g;
    const auto r = g.radii();
    CHECK(r.size() == 48);
    CHECK(r[0] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(r[47] == 8.0);
    CHECK(r[1] / r[0] == doctest::Approx(r[47] / r[46]).epsilon(1e-12));
    CHECK(g.angles()[1] == doctest::Approx(2 * pi / 24));
    CHECK(g.points() == 48LL * 48 * 24 * 24);
    CHECK(g.refined().points() == 16 * g.points());
    CHECK_THROWS_AS((GridSpec{1, 0.05, 8, 24}.validate()), ConfigError);
    CHECK_THROWS_AS((GridSpec{4, 2, 1, 24}.validate()), ConfigError);
}

TEST_CASE("weighted_sup equals a brute-force scan of kernel_series") {
    const MagneticParams p(0.5, 1.0);
    const TruncationConfig cfg;
    const GridSpec g{6, 0.2, 2.5, 6};
    const double t = 0.7, sigma = 0.3;
    const auto r = g.radii();
    const auto a = g.angles();
    double brute = 0;
    for (int i = 0; i < g.n_radii; ++i)
        for (int j = 0; j < g.n_radii; ++j)
            for (int u = 0; u < g.n_angles; ++u)
                for (int v = 0; v < g.n_angles; ++v) {
                    const auto K = kernel_series(p, t, {r[i], a[u]}, {r[j], a[v]}, cfg);
                    brute = std::max(brute, std::pow(r[i] * r[j], -sigma) * std::abs(K.value));
                }
    const DecayScanRow row = weighted_sup(p, t, sigma, g, cfg);
    CHECK(row.sup_weighted == doctest::Approx(brute).epsilon(1e-12));
    CHECK(row.sin_factor == doctest::Approx(std::pow(std::sin(t), 1.3)).epsilon(1e-15));
    CHECK(row.product == doctest::Approx(row.sup_weighted * row.sin_factor).epsilon(1e-15));
    CHECK(row.grid_points == 6 * 6 * 6 * 6);
}

TEST_CASE("weighted_sup: preconditions") {
    const MagneticParams p(0.3, 2.0);
    const TruncationConfig cfg;
    const GridSpec g{8, 0.1, 3, 8};
    CHECK_THROWS_AS(weighted_sup(p, 0.4, 0.31, g, cfg), std::domain_error);
    CHECK_THROWS_AS(weighted_sup(p, 0.4, -0.1, g, cfg), std::domain_error);
    CHECK_THROWS_AS(weighted_sup(p, pi / 2, 0.1, g, cfg), SingularTimeError);
    CHECK_THROWS_AS(weighted_sup(p, 0.4, 0.1, GridSpec{8, 0.0, 3, 8}, cfg), std::domain_error);
    CHECK_NOTHROW(weighted_sup(p, 0.4, 0.3, g, cfg));
}

TEST_CASE("weighted_sup: product is flat in t and refinement-stable") {
    const MagneticParams p(0.5, 1.0);
    const TruncationConfig cfg;
    const GridSpec g;
    const double mu = p.mu();
    const std::vector<double> sig{0, mu};
    double lo = INFINITY, hi = 0;
    for (double t : {pi / 4, pi / 3, 2 * pi / 5}) {
        const auto rows = weighted_sup_multi(p, t, sig, g, cfg, 4);
        const auto fine = weighted_sup_multi(p, t, sig, g.refined(), cfg, 4);
        for (std::size_t s = 0; s < sig.size(); ++s) {
            CHECK(std::isfinite(rows[s].product));
            CHECK(rel_change(rows[s].sup_weighted, fine[s].sup_weighted) < 0.05);
        }
        lo = std::min(lo, rows[1].product);
        hi = std::max(hi, rows[1].product);
    }
    CHECK(hi / lo < 1.05);
}

TEST_CASE("weighted_sup: shrinking r_min does not move the supremum") {
    const MagneticParams p(0.3, 2.0);
    const TruncationConfig cfg;
    GridSpec g;
    GridSpec half = g;
    half.r_min = g.r_min / 2;
    half.n_radii = g.n_radii + 6;  // keeps the log spacing
    for (double sigma : {0.0, 0.15, 0.3}) {
        const double a = weighted_sup(p, 0.4, sigma, g, cfg).sup_weighted;
        const double b = weighted_sup(p, 0.4, sigma, half, cfg).sup_weighted;
        CHECK(rel_change(a, b) < 0.05);
    }
}

TEST_CASE("weighted_sup: near-singular rows grow while the product stays banded") {
    const MagneticParams p(0.5, 1.0);
    const TruncationConfig cfg;
    const GridSpec g;
    double prev = 0, lo = INFINITY, hi = 0;
    for (double t : {pi - 0.6, pi - 0.3, pi - 0.15, pi - 0.08}) {
        const DecayScanRow row = weighted_sup(p, t, p.mu(), g, cfg);
        CHECK(row.sup_weighted > prev);
        prev = row.sup_weighted;
        lo = std::min(lo, row.product);
        hi = std::max(hi, row.product);
    }
    CHECK(hi / lo < 2.0);
}

TEST_CASE("weighted_sup: bit-identical for any job count") {
    const MagneticParams p(0.3, 2.0);
    const TruncationConfig cfg;
    const GridSpec g{20, 0.05, 8, 12};
    const auto one = weighted_sup_multi(p, 0.6, {0, 0.15, 0.3}, g, cfg, 1);
    for (int jobs : {2, 3, 8}) {
        const auto many = weighted_sup_multi(p, 0.6, {0, 0.15, 0.3}, g, cfg, jobs);
        for (std::size_t s = 0; s < one.size(); ++s) CHECK(one[s].sup_weighted == many[s].sup_weighted);
    }
}

TEST_CASE("classify: threshold and exclusive regions") {
    const MagneticParams p(0.5, 1.0);
    const double t = pi / 4;
    const double thr = 2 * std::sin(t);
    const OmegaRegion at = classify(p, t, 1.0, thr);
    CHECK(at.threshold == doctest::Approx(thr));
    CHECK(at.tag == OmegaTag::Omega1);
    CHECK(classify(p, t, 1.0, thr * 0.999).tag == OmegaTag::Omega2);
    const GridSpec g;
    const ChainingCheck c = chaining_check(p, t, g, TruncationConfig{});
    CHECK(c.omega1_points + c.omega2_points == g.points());
    CHECK(c.omega1_points > 0);
    CHECK(c.omega2_points > 0);
}

TEST_CASE("k1: weight one on the boundary, monotone in the inner boundary, refinement-stable") {
    const MagneticParams p(0.5, 1.0);
    const TruncationConfig cfg;
    const GridSpec g;
    const double t = pi / 4;
    // on the boundary X = 1, so X^{-mu} = 1
    const double thr = classify(p, t, 1.0, 1.0).threshold;
    CHECK(std::abs(kernel_argument(p, t, 1.0, thr)) == doctest::Approx(1.0).epsilon(1e-14));
    const double k1 = k1_estimate(p, t, g, cfg);
    CHECK(std::isfinite(k1));
    CHECK(k1 > 0);
    double prev = k1;
    for (double s : {1.5, 3.0, 10.0, 100.0}) {
        const double k = k1_estimate(p, t, g, cfg, s);
        CHECK(k <= prev);
        prev = k;
    }
    CHECK(rel_change(k1, k1_estimate(p, t, g.refined(), cfg, 1.0, 4)) < 0.05);
}

TEST_CASE("k2: limit at the origin, nonnegative exponents, refinement-stable") {
    const MagneticParams p(0.3, 2.0);
    const double mu = p.mu();
    const double limit = 1 / (std::pow(2.0, mu) * std::tgamma(0.5 + mu));
    CHECK(k2_series(p, 0.0, 64) == doctest::Approx(limit).epsilon(1e-13));
    // next exponent is 1 - 2 mu = 0.4, so the approach is slow
    CHECK(k2_series(p, 1e-40, 64) == doctest::Approx(limit).epsilon(1e-13));
    CHECK(k2_series(p, 1e-12, 64) - limit == doctest::Approx(std::pow(1e-12, 0.4) / (std::pow(2.0, 0.7) * std::tgamma(1.2))).epsilon(1e-3));
    double emin = INFINITY;
    for (int k = -64; k <= 64; ++k) emin = std::min(emin, p.order(k) - mu);
    CHECK(emin == 0.0);
    // nondecreasing in X, so the sup sits at the outer boundary
    CHECK(k2_series(p, 0.5, 64) <= k2_series(p, 1.0, 64));
    const TruncationConfig cfg;
    const GridSpec g;
    const double k2 = k2_estimate(p, 0.4, g, cfg);
    CHECK(std::isfinite(k2));
    CHECK(k2 <= k2_series(p, 1.0, 64));
    CHECK(rel_change(k2, k2_estimate(p, 0.4, g.refined(), cfg)) < 0.05);
}

TEST_CASE("chaining: max(K1, K2) bound dominates the weighted series pointwise") {
    const TruncationConfig cfg;
    const GridSpec g;
    for (auto [alpha, b0] : {std::pair{0.5, 1.0}, std::pair{0.3, 2.0}})
        for (double tb : {0.1, 0.3, pi / 4, 1.0, 2.0, pi - 0.15}) {
            const MagneticParams p(alpha, b0);
            const ChainingCheck c = chaining_check(p, tb / b0, g, cfg, 4);
            CHECK(c.violations == 0);
            CHECK(c.sup_series <= c.bound);
        }
}

TEST_CASE("small_time_check: sandwich, shared constant, sigma = 0 cross-check") {
    const MagneticParams p(0.5, 1.0);
    const TruncationConfig cfg;
    const GridSpec g;
    const std::vector<double> ts{0.05, 0.1, 0.3, 0.7, 1.2, 1.5};
    for (double sigma : {0.0, 0.25, 0.5}) {
        const SmallTimeTable tab = small_time_check(p, sigma, ts, g, cfg, 4);
        CHECK(tab.ok);
        for (const auto& row : tab.rows) {
            CHECK(row.sine_ratio >= 1.0);
            CHECK(row.sine_ratio <= std::pow(pi / 2, 1 + sigma));
            CHECK(row.sup_weighted <= tab.constant * std::pow(row.t, -1 - sigma) * (1 + 1e-14));
        }
        if (sigma == 0.0) {
            // C is the dispersive constant times at most the sine ratio at the top of the range
            const double c0 = weighted_sup(p, pi / 4, 0.0, g, cfg).product;
            CHECK(tab.constant >= c0 * 0.99);
            CHECK(tab.constant <= c0 * std::pow(pi / 2, 1.0) * 1.01);
        }
    }
    const SmallTimeTable top = small_time_check(p, 0.5, {pi / 2 - 1e-3}, g, cfg);
    CHECK(top.rows[0].sine_ratio == doctest::Approx(std::pow(pi / 2, 1.5)).epsilon(1e-3));
    CHECK_THROWS_AS(small_time_check(p, 0.5, {1.6}, g, cfg), std::domain_error);
    CHECK_THROWS_AS(small_time_check(p, 0.5, {0.0}, g, cfg), std::domain_error);
}
