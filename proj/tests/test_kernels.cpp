#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "magflow/errors.hpp"
#include "magflow/kernels.hpp"
#include "magflow/specfun.hpp"
#include "oracles.hpp"

using namespace magflow;
using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

TEST_CASE("TruncationConfig validation") {
    TruncationConfig c;
    CHECK_NOTHROW(c.validate());
    c.k_max = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.time_guard = 2.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.tail_tol = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("singular times are rejected") {
    CHECK_THROWS_AS(check_time(1.0, pi, 1e-3), SingularTimeError);
    CHECK_THROWS_AS(check_time(2.0, pi / 2 + 1e-4, 1e-3), SingularTimeError);
    CHECK_THROWS_AS(mehler_alpha0(1.0, 0.0, {1, 0}, {0, 1}), SingularTimeError);
    CHECK_NOTHROW(check_time(1.0, pi - 0.08, 1e-3));
    try {
        check_time(1.0, 2 * pi + 5e-4, 1e-3);
    } catch (const SingularTimeError& e) {
        CHECK(e.distance() == doctest::Approx(5e-4).epsilon(1e-6));
    }
}

TEST_CASE("mehler_alpha0 examples") {
    const double b0 = 1.3, t = 0.9;
    const Point2 x(0.4, -1.1), y(2.0, 0.3);
    CHECK(std::abs(mehler_alpha0(b0, t, x, x)) == doctest::Approx(b0 / (4 * pi * std::abs(std::sin(b0 * t)))));
    CHECK(std::abs(mehler_alpha0(b0, t, x, y)) == doctest::Approx(std::abs(mehler_alpha0(b0, t, y, x))));
    // b0 = 1, t = pi/2: cot = 0, x^y = 1, exponent (1/4i)(-2) = i/2
    const cd v = mehler_alpha0(1.0, pi / 2, {1, 0}, {0, 1});
    const cd ref = std::exp(cd(0, 0.5)) / (4 * pi);
    CHECK(std::abs(v - ref) < 1e-15);
}

TEST_CASE("rotated Mehler form") {
    CHECK(rotation(0.0).isApprox(Eigen::Matrix2d::Identity()));
    CHECK(std::abs(mehler_alpha0_rotform(1.0, pi / 4, {1, 0}, {1, 0})) ==
          doctest::Approx(1.0 / (4 * pi * std::sin(pi / 4))));
    double worst = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int n = 0; n < 5; ++n) {
                const Point2 x(0.3 * i - 0.5, 0.2 * i + 0.1), y(-0.4 * j + 0.7, 0.5 * j - 1.0);
                const double t = 0.2 + 0.55 * n;
                const cd a = mehler_alpha0(1.7, t, x, y), b = mehler_alpha0_rotform(1.7, t, x, y);
                CHECK(std::abs(std::abs(a) - std::abs(b)) < 1e-14);
                worst = std::max(worst, std::abs(a - b) / std::abs(a));
            }
    // the two expressions are the same function at equal t
    CHECK(worst < 1e-12);
}

TEST_CASE("Mehler convention relative to the flux propagator") {
    const MehlerConvention c = mehler_convention_probe(1.0);
    CHECK(c.time_sign == -1);
    CHECK_FALSE(c.conjugate);
    CHECK(std::abs(c.factor - cd(0, 1)) < 1e-4);
    CHECK(c.spread < 1e-4);
}

TEST_CASE("kernel_series example and heat-kernel continuation") {
    const MagneticParams p(0.5, 1.0);
    TruncationConfig cfg;
    cfg.k_max = 40;
    const double t = pi / 4;
    const KernelValue kv = kernel_series(p, t, {1, 0}, {1, 0}, cfg);
    CHECK(kv.est_tail < 1e-10);
    CHECK(kv.k_terms_used == 81);
    // continuation tau = i t of the closed heat kernel
    //   b0/(4 pi sinh(b0 tau)) e^{-b0 (r1^2+r2^2) coth(b0 tau)/4} sum e^{-tau b0 (k+a)} I_|k+a|(b0 r1 r2/(2 sinh))
    const cd tau(0, t);
    const cd sh = std::sinh(tau), ch = std::cosh(tau);
    cd sum = 0;
    for (int k = -40; k <= 40; ++k)
        sum += std::exp(-tau * (k + 0.5)) * oracle::bessel_i_series(std::abs(k + 0.5), 1.0 / (2.0 * sh));
    const cd ref = 1.0 / (4 * pi * sh) * std::exp(-2.0 * ch / sh / 4.0) * sum;
    CHECK(std::abs(kv.value - ref) / std::abs(ref) < 1e-9);
}

TEST_CASE("kernel_series at the origin and under common rotation") {
    const MagneticParams p(0.3, 2.0);
    const TruncationConfig cfg;
    CHECK(std::abs(kernel_series(p, 0.4, {0.0, 0.0}, {1.2, 0.7}, cfg).value) == 0.0);
    const cd a = kernel_series(p, 0.4, {0.8, 0.3}, {1.2, 1.9}, cfg).value;
    const cd b = kernel_series(p, 0.4, {0.8, 0.3 + 1.234}, {1.2, 1.9 + 1.234}, cfg).value;
    CHECK(std::abs(a - b) < 1e-13 * std::abs(a));
}

TEST_CASE("truncation error carries the tail estimate") {
    const MagneticParams p(0.5, 1.0);
    TruncationConfig cfg;
    cfg.k_max = 3;
    cfg.tail_tol = 1e-30;
    try {
        kernel_series_raw(p, 1.0, {3.0, 0}, {3.0, 0}, cfg);
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.est_tail() > 1e-30);
    }
}

TEST_CASE("tail soundness: doubling k_max moves the series by at most twice est_tail") {
    const MagneticParams p(0.3, 1.0);
    for (double r : {0.5, 1.5, 3.0})
        for (int K : {4, 8, 12}) {
            TruncationConfig c1, c2;
            c1.k_max = K;
            c2.k_max = 2 * K;
            c1.tail_tol = c2.tail_tol = 1e300;
            const double t = 0.7;
            const KernelValue a = kernel_series_raw(p, t, {r, 0.2}, {r, -1.0}, c1);
            const KernelValue b = kernel_series_raw(p, t, {r, 0.2}, {r, -1.0}, c2);
            // strip the prefactor and Gaussian, both unimodular up to |pref|
            const double pref = p.b0() / (8 * pi * pi * std::abs(std::sin(p.b0() * t)));
            // plus the rounding floor of the summed series
            const double floor = 1e-14 * std::abs(b.value) / pref;
            CHECK(std::abs(a.value - b.value) / pref <= 2 * a.est_tail + floor);
        }
}

TEST_CASE("required_k_max meets the tolerance") {
    const MagneticParams p(0.5, 1.0);
    for (double x : {0.1, 5.0, 80.0, 700.0}) {
        const int K = required_k_max(p, x, 1e-10);
        CHECK(angular_tail_bound(p, x, K) <= 1e-10);
        if (K > 0) CHECK(angular_tail_bound(p, x, K - 1) > 1e-10);
    }
}

TEST_CASE("angular_bessel_terms against the quadrature representation") {
    for (double a : {0.5, 0.3, -1.7, 3.25}) {
        const MagneticParams p(a, 1.0);
        for (double x : {0.3, -2.0, 9.0}) {
            const auto v = angular_bessel_terms(p, x, 6);
            for (int k = -6; k <= 6; ++k) {
                const cd ref = bessel_i_complex(p.order(k), cd(0, -x));
                CHECK(std::abs(v[k + 6] - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
            }
        }
    }
}

TEST_CASE("Poisson kernel identity") {
    CHECK(poisson_identity_residual(0.5, 1, 1, 1, 200) < 1e-8);
    CHECK(poisson_identity_residual(1.5, 0.5, 2, 2, 200) < 1e-8);
    double worst = 0;
    for (double nu : {0.3, 0.5, 1.5, 2.7})
        for (double a : {0.5, 1.0, 2.0})
            for (double b : {0.5, 1.0, 2.0})
                for (double c : {0.5, 1.0, 2.0}) worst = std::max(worst, poisson_identity_residual(nu, a, b, c, 200));
    CHECK(worst < 1e-8);
    // beyond the crossover the residual decreases with m_max
    double prev = poisson_identity_residual(0.5, 2, 2, 0.5, 5);
    for (int m = 10; m <= 60; m += 5) {
        const double r = poisson_identity_residual(0.5, 2, 2, 0.5, m);
        if (prev > 1e-13) CHECK(r < prev);
        prev = r;
    }
    CHECK_THROWS_AS(poisson_identity_residual(0.0, 1, 1, 1, 10), std::domain_error);
}

TEST_CASE("heat kernel: spectral sum vs closed form") {
    const MagneticParams p(0.5, 1.0);
    const TruncationConfig cfg;
    const HeatKernelPair h = heat_kernel_pair(p, 0.5, {1, 0}, {1, 0}, cfg);
    CHECK(h.relative_gap() < 1e-8);
    CHECK(h.spectral.real() > 0);
    CHECK(std::abs(h.spectral.imag()) < 1e-15);
    CHECK_THROWS_AS(heat_kernel_pair(p, 0.0, {1, 0}, {1, 0}, cfg), std::domain_error);
}

TEST_CASE("heat kernel: ground mode dominates at large tau") {
    const MagneticParams p(0.3, 1.0);
    TruncationConfig cfg;
    const double tau = 60.0;  // next level 1.6 b0 is e^{-36} below
    const PolarPoint x{0.9, 0.2}, y{1.4, -0.5};
    const HeatKernelPair h = heat_kernel_pair(p, tau, x, y, cfg);
    // lambda = b0 for every k <= -1, m = 0 (Landau level): sum those modes alone
    cd ground = 0;
    for (int k = -cfg.k_max; k <= -1; ++k) {
        const ModeIndex md{k, 0};
        ground += std::exp(-tau * eigenvalue(p, md)) * eigenfunction(p, md, x) *
                  std::conj(eigenfunction(p, md, y)) / norm_squared(p, md);
    }
    CHECK(std::abs(h.spectral - ground) / std::abs(ground) < 1e-12);
    CHECK(std::abs(h.closed - ground) / std::abs(ground) < 1e-8);
}

TEST_CASE("diagonal modulus times |sin| stays bounded") {
    const MagneticParams p(0.5, 1.0);
    TruncationConfig cfg;
    double worst = 0;
    for (double t : {0.3, 1.0, 2.5})
        for (double r = 0.1; r < 6.0; r += 0.5) {
            cfg.k_max = std::max(64, required_k_max(p, kernel_argument(p, t, r, r), cfg.tail_tol));
            worst = std::max(worst, std::abs(kernel_series(p, t, {r, 0}, {r, 0}, cfg).value) * std::abs(std::sin(t)));
        }
    MESSAGE("max |K(x,x)| |sin| = " << worst);
    CHECK(worst < 0.2);
}

TEST_CASE("alpha -> 0: calibrated series approaches the Mehler kernel linearly (Cauchy in alpha)") {
    const MehlerConvention mc = mehler_convention_probe(1.0);
    const TruncationConfig cfg;
    const PolarPoint x{0.9, 0.4}, y{1.3, -0.8};
    const double t = 0.8;
    const cd M = mehler_with_convention(mc, 1.0, t, to_cartesian(x), to_cartesian(y));
    double prev_gap = INFINITY;
    cd prev = 0;
    double prev_step = INFINITY;
    for (double a : {1e-2, 1e-3, 1e-4}) {
        const cd K = kernel_series(MagneticParams(a, 1.0), t, x, y, cfg).value;
        const double gap = std::abs(K - M) / std::abs(M);
        CHECK(gap < prev_gap);
        if (prev != 0.0) {
            const double step = std::abs(K - prev);
            CHECK(step < prev_step);
            prev_step = step;
        }
        prev = K;
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}
