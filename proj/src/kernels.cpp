#include "magflow/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "magflow/errors.hpp"
#include "magflow/specfun.hpp"

namespace magflow {

namespace {
constexpr double pi = std::numbers::pi;
constexpr std::complex<double> I(0.0, 1.0);
}  // namespace

void TruncationConfig::validate() const {
    if (k_max < 1) throw ConfigError("k_max must be positive");
    if (m_max < 1) throw ConfigError("m_max must be positive");
    if (quad_nodes < 2) throw ConfigError("quad_nodes must be at least 2");
    if (!(tail_tol > 0)) throw ConfigError("tail_tol must be positive");
    if (!(time_guard > 0) || !(time_guard < pi / 2)) throw ConfigError("time_guard must lie in (0, pi/2)");
}

Point2 to_cartesian(PolarPoint p) { return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)}; }

PolarPoint to_polar(const Point2& x) { return {x.norm(), std::atan2(x.y(), x.x())}; }

double singular_distance(double b0, double t) {
    const double s = b0 * t;
    return std::abs(s - pi * std::nearbyint(s / pi));
}

void check_time(double b0, double t, double guard) {
    const double d = singular_distance(b0, t);
    if (!(d >= guard))
        throw SingularTimeError("singular time: b0*t = " + std::to_string(b0 * t) +
                                    " is within " + std::to_string(guard) + " of pi*Z",
                                d);
}

std::complex<double> mehler_alpha0(double b0, double t, const Point2& x, const Point2& y, double time_guard) {
    check_time(b0, t, time_guard);
    const double s = std::sin(b0 * t), c = std::cos(b0 * t);
    const double wedge = x.x() * y.y() - x.y() * y.x();
    const double phase = -(b0 / 4.0) * ((c / s) * (x - y).squaredNorm() - 2.0 * wedge);  // (b0/4i)(.) = -i(b0/4)(.)
    return b0 / (4.0 * pi * s) * std::polar(1.0, phase);
}

Eigen::Matrix2d rotation(double phi) {
    Eigen::Matrix2d R;
    R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return R;
}

std::complex<double> mehler_alpha0_rotform(double b0, double t, const Point2& x, const Point2& y,
                                           double time_guard) {
    check_time(b0, t, time_guard);
    const double s = std::sin(b0 * t), c = std::cos(b0 * t);
    const double phase1 = -(b0 / 4.0) * (c / s) * (x.squaredNorm() + y.squaredNorm());
    const double phase2 = b0 * y.dot(rotation(b0 * t) * x) / (2.0 * s);
    return b0 / (4.0 * pi * s) * std::polar(1.0, phase1 + phase2);
}

std::complex<double> mehler_with_convention(const MehlerConvention& c, double b0, double t, const Point2& x,
                                            const Point2& y, double time_guard) {
    std::complex<double> v = mehler_alpha0(b0, c.time_sign * t, x, y, time_guard);
    if (c.conjugate) v = std::conj(v);
    return c.factor * v;
}

MehlerConvention mehler_convention_probe(double b0, const TruncationConfig& cfg) {
    const MagneticParams p(1e-6, b0);
    std::vector<std::complex<double>> truth;
    std::vector<std::array<Point2, 2>> pts;
    std::vector<double> times;
    for (double tb : {0.4, 1.3, 2.2})
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const Point2 x = to_cartesian({0.4 + 0.5 * i, 0.3 + 1.1 * i});
                const Point2 y = to_cartesian({0.6 + 0.4 * j, -0.7 + 0.9 * j});
                pts.push_back({x, y});
                times.push_back(tb / b0);
                truth.push_back(kernel_series(p, tb / b0, to_polar(x), to_polar(y), cfg).value);
            }
    MehlerConvention best;
    best.spread = INFINITY;
    for (int ts : {1, -1})
        for (bool conj : {false, true}) {
            MehlerConvention c{ts, conj, 1.0, 0.0};
            std::vector<std::complex<double>> ratio;
            std::complex<double> mean = 0;
            for (std::size_t n = 0; n < truth.size(); ++n) {
                ratio.push_back(truth[n] / mehler_with_convention(c, b0, times[n], pts[n][0], pts[n][1],
                                                                  cfg.time_guard));
                mean += ratio.back();
            }
            mean /= double(ratio.size());
            double spread = 0;
            for (auto r : ratio) spread = std::max(spread, std::abs(r - mean) / std::abs(mean));
            if (spread < best.spread) best = {ts, conj, mean, spread};
        }
    return best;
}

// ---------------------------------------------------------------- series

Eigen::VectorXcd angular_bessel_terms(const MagneticParams& p, double x, int K) {
    if (K < 0) throw std::domain_error("angular_bessel_terms: K must be nonnegative");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(2 * K + 1);
    if (x == 0) return out;  // every order is positive
    const double a = p.alpha();
    const double fl = std::floor(a);
    const double frac = a - fl;  // in (0, 1)
    const int k0 = -int(fl);     // k0 + alpha = frac
    // k = k0 + n, order frac + n
    {
        const int n_lo = std::max(0, -K - k0), n_hi = K - k0;
        if (n_hi >= n_lo) {
            const auto v = bessel_i_imag_ladder(frac, n_hi + 1, x);
            for (int n = n_lo; n <= n_hi; ++n) out[k0 + n + K] = v[n];
        }
    }
    // k = k0 - 1 - n, order 1 - frac + n
    {
        const int n_lo = std::max(0, k0 - 1 - K), n_hi = k0 - 1 + K;
        if (n_hi >= n_lo) {
            const auto v = bessel_i_imag_ladder(1.0 - frac, n_hi + 1, x);
            for (int n = n_lo; n <= n_hi; ++n) out[k0 - 1 - n + K] = v[n];
        }
    }
    return out;
}

namespace {

double term_bound(const MagneticParams& p, double ax, int k) {
    return std::min(1.0, bessel_bound(p.order(k), ax));
}

// Bounds for |k| = K+1, K+2, ... paired (k and -k), until negligible.
std::vector<double> tail_terms(const MagneticParams& p, double ax, int K) {
    std::vector<double> t;
    for (int j = K + 1;; ++j) {
        const double v = term_bound(p, ax, j) + term_bound(p, ax, -j);
        t.push_back(v);
        const double nu_min = std::min(p.order(j), p.order(-j));
        if (nu_min > ax && v < 1e-300) break;
        if (nu_min > ax + 10 && !t.empty() && v < 1e-40 * t.front()) break;
        if (j > K + 10000000) break;
    }
    return t;
}

}  // namespace

double angular_tail_bound(const MagneticParams& p, double x, int K) {
    const double ax = std::abs(x);
    if (ax == 0) return 0;
    double s = 0;
    const auto t = tail_terms(p, ax, K);
    for (auto it = t.rbegin(); it != t.rend(); ++it) s += *it;
    return s;
}

int required_k_max(const MagneticParams& p, double x, double tol) {
    const double ax = std::abs(x);
    if (ax == 0) return 0;
    const auto t = tail_terms(p, ax, 0);  // t[i] covers |k| = i+1
    double s = 0;
    for (int i = int(t.size()) - 1; i >= 0; --i) {
        s += t[i];
        if (s > tol) return i + 1;
    }
    return 0;
}

double kernel_argument(const MagneticParams& p, double t, double r1, double r2) {
    return p.b0() * r1 * r2 / (2.0 * std::sin(p.b0() * t));
}

KernelValue kernel_series_raw(const MagneticParams& p, double t, PolarPoint x, PolarPoint y,
                              const TruncationConfig& cfg) {
    cfg.validate();
    if (x.r < 0 || y.r < 0) throw std::domain_error("kernel_series: radii must be nonnegative");
    const double b0 = p.b0();
    check_time(b0, t, cfg.time_guard);
    const double s = std::sin(b0 * t);
    const double arg = kernel_argument(p, t, x.r, y.r);
    const int K = cfg.k_max;
    KernelValue kv;
    kv.k_terms_used = 2 * K + 1;
    kv.est_tail = angular_tail_bound(p, arg, K);
    if (kv.est_tail > cfg.tail_tol)
        throw TruncationError("kernel_series: tail bound " + num(kv.est_tail) +
                                  " exceeds tail_tol with k_max = " + std::to_string(K),
                              kv.est_tail);
    const Eigen::VectorXcd terms = angular_bessel_terms(p, arg, K);
    const double phi = std::remainder(x.theta - y.theta - b0 * t, 2 * pi);
    std::complex<double> sum = 0;
    for (int k = -K; k <= K; ++k) sum += std::polar(1.0, k * phi) * terms[k + K];
    const std::complex<double> pref =
        b0 * std::polar(1.0, -t * b0 * p.alpha()) / (8.0 * pi * pi * I * s);
    const double gauss = b0 * (x.r * x.r + y.r * y.r) / (4.0 * std::tan(b0 * t));
    kv.value = pref * std::polar(1.0, gauss) * sum;
    return kv;
}

KernelValue kernel_series(const MagneticParams& p, double t, PolarPoint x, PolarPoint y,
                          const TruncationConfig& cfg) {
    KernelValue kv = kernel_series_raw(p, t, x, y, cfg);
    kv.value *= calibrate_prefactor(p, cfg).rho;
    return kv;
}

// --------------------------------------------------------------- Poisson

PoissonCheck poisson_identity(double nu, double a, double b, double c, int m_max) {
    if (!(nu > 0) || !(a > 0) || !(b > 0) || !(c > 0))
        throw std::domain_error("poisson_identity: all arguments must be positive");
    if (m_max < 0) throw std::domain_error("poisson_identity: m_max must be nonnegative");
    const auto La = laguerre_table(nu, m_max, a);
    const auto Lb = laguerre_table(nu, m_max, b);
    const double lg = log_gamma(nu + 1.0);
    double lhs = 0;
    for (int m = m_max; m >= 0; --m)
        lhs += std::exp(-c * m - lg - log_binomial(nu, m)) * La[m] * Lb[m];
    const double q = std::exp(-c);
    const double X = 2.0 * std::sqrt(a * b) * std::exp(-c / 2) / (1.0 - q);
    const double log_rhs = nu * c / 2 - (nu / 2) * std::log(a * b) - std::log1p(-q) -
                           (a + b) * q / (1.0 - q) + log_bessel_i(nu, X);
    PoissonCheck pc;
    pc.lhs = lhs;
    pc.rhs = std::exp(log_rhs);
    pc.residual = std::abs(pc.lhs - pc.rhs) / std::abs(pc.rhs);
    return pc;
}

double poisson_identity_residual(double nu, double a, double b, double c, int m_max) {
    return poisson_identity(nu, a, b, c, m_max).residual;
}

// ------------------------------------------------------------ heat kernel

double HeatKernelPair::relative_gap() const { return std::abs(spectral - closed) / std::abs(closed); }

HeatKernelPair heat_kernel_pair(const MagneticParams& p, double tau, PolarPoint x, PolarPoint y,
                                const TruncationConfig& cfg) {
    if (!(tau > 0)) throw std::domain_error("heat_kernel_pair: tau must be positive");
    cfg.validate();
    if (x.r < 0 || y.r < 0) throw std::domain_error("heat_kernel_pair: radii must be nonnegative");
    HeatKernelPair out{0.0, 0.0};
    if (x.r == 0 || y.r == 0) return out;  // every eigenfunction vanishes at the origin
    const double b0 = p.b0();
    const double a = b0 * x.r * x.r / 2, b = b0 * y.r * y.r / 2;
    const double c = 2 * b0 * tau;
    const int K = cfg.k_max, M = cfg.m_max;
    const double dtheta = x.theta - y.theta;
    const double q = std::exp(-c);
    const double X = 2.0 * std::sqrt(a * b) * std::exp(-c / 2) / (1.0 - q);
    for (int k = -K; k <= K; ++k) {
        const double s = k + p.alpha();
        const double nu = std::abs(s);
        const std::complex<double> ang = std::polar(1.0, k * dtheta);
        // common factor (r1 r2)^nu e^{-(a+b)/2} / (pi (2/b0)^{1+nu}) e^{-tau b0 (1+nu+s)},
        // with m!/Gamma(m+nu+1) = 1/(Gamma(nu+1) binom(m+nu, m)) per mode
        const double log_common = nu * std::log(x.r * y.r) - (a + b) / 2 - std::log(pi) -
                                  (1 + nu) * std::log(2 / b0) - tau * b0 * (1 + nu + s);
        // spectral: V(x) conj V(y) / ||V||^2 summed over m, P = L / binom
        const auto La = laguerre_table(nu, M, a);
        const auto Lb = laguerre_table(nu, M, b);
        const double lg = log_gamma(nu + 1);
        double spec = 0;
        for (int m = M; m >= 0; --m)
            spec += std::exp(-c * m - lg - log_binomial(nu, m)) * La[m] * Lb[m];
        out.spectral += ang * std::exp(log_common) * spec;
        // closed: Poisson-kernel right-hand side
        const double log_rhs = nu * c / 2 - (nu / 2) * std::log(a * b) - std::log1p(-q) -
                               (a + b) * q / (1.0 - q) + log_bessel_i(nu, X, cfg.quad_nodes);
        out.closed += ang * std::exp(log_common + log_rhs);
    }
    return out;
}

}  // namespace magflow
