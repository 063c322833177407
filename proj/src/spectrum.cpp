#include "magflow/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "magflow/errors.hpp"
#include "magflow/specfun.hpp"

namespace magflow {

double flux_distance(double alpha) { return std::abs(alpha - std::nearbyint(alpha)); }

MagneticParams::MagneticParams(double alpha, double b0) : alpha_(alpha), b0_(b0), mu_(flux_distance(alpha)) {
    if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
    if (mu_ < 1e-12)
        throw ConfigError("non-integer flux required: alpha = " + std::to_string(alpha) +
                          " is an integer (tolerance 1e-12)");
    if (!(b0 > 0) || !std::isfinite(b0)) throw ConfigError("b0 must be a positive finite number");
}

double MagneticParams::order(int k) const noexcept { return std::abs(k + alpha_); }

namespace {
void check_mode(ModeIndex mode) {
    if (mode.m < 0) throw std::domain_error("mode index m must be nonnegative");
}
}  // namespace

double eigenvalue(const MagneticParams& p, ModeIndex mode) {
    check_mode(mode);
    const double s = mode.k + p.alpha();
    return (2.0 * mode.m + 1.0 + std::abs(s) + s) * p.b0();
}

Multiplicity multiplicity(const MagneticParams& p, double lambda, int k_window) {
    if (k_window < 1) throw std::domain_error("multiplicity: k_window must be >= 1");
    constexpr double tol = 1e-9;
    const auto in_naturals = [](double q) {
        return q >= -tol && std::abs(q - std::nearbyint(q)) <= tol;
    };
    const double b0 = p.b0();
    Multiplicity out;
    for (int j = -k_window; j <= k_window; ++j) {
        const double s = j + p.alpha();
        const double q = (lambda - s * b0) / (2.0 * b0) - (std::abs(s) + 1.0) / 2.0;
        if (in_naturals(q)) ++out.count;
    }
    // For j + alpha < 0 the condition no longer depends on j.
    out.unbounded = in_naturals((lambda / b0 - 1.0) / 2.0);
    return out;
}

namespace {

// P and its first two derivatives in u from the explicit sum.
struct PolyJet {
    double p = 0, dp = 0, d2p = 0;
};

PolyJet pkm_jet(int m, double nu, double u) {
    // coefficients c_n = (-m)_n / ((1+nu)_n n!)
    PolyJet j;
    double c = 1.0;
    double un2 = 0, un1 = 0, un = 1;  // u^{n-2}, u^{n-1}, u^n
    for (int n = 0; n <= m; ++n) {
        j.p += c * un;
        if (n >= 1) j.dp += n * c * un1;
        if (n >= 2) j.d2p += n * (n - 1.0) * c * un2;
        c *= (n - m) / ((1.0 + nu + n) * (n + 1.0));
        un2 = un1;
        un1 = un;
        un *= u;
    }
    return j;
}

}  // namespace

double radial_profile(const MagneticParams& p, ModeIndex mode, double r) {
    check_mode(mode);
    if (r < 0) throw std::domain_error("radial_profile: r must be nonnegative");
    const double nu = p.order(mode.k);
    if (r == 0) return 0.0;  // nu > 0 for non-integer flux
    const double u = p.b0() * r * r / 2.0;
    return std::exp(nu * std::log(r) - u / 2.0) * pkm(mode.k, mode.m, p.alpha(), u);
}

std::complex<double> eigenfunction(const MagneticParams& p, ModeIndex mode, PolarPoint x) {
    return std::polar(1.0, mode.k * std::remainder(x.theta, 2 * std::numbers::pi)) *
           radial_profile(p, mode, x.r);
}

double norm_squared(const MagneticParams& p, ModeIndex mode) {
    check_mode(mode);
    const double nu = p.order(mode.k);
    return std::exp(std::log(std::numbers::pi) + (1.0 + nu) * std::log(2.0 / p.b0()) +
                    log_gamma(1.0 + nu) - log_binomial(nu, mode.m));
}

double norm_squared_quadrature(const MagneticParams& p, ModeIndex mode, int nodes) {
    check_mode(mode);
    // r = sqrt(2u/b0): |f|^2 r dr = (2u/b0)^nu e^{-u} P(u)^2 du / b0
    const double nu = p.order(mode.k);
    const GaussRule<double>& rule = cached_gauss_laguerre(nodes, nu);
    double s = 0;
    for (Eigen::Index j = 0; j < rule.size(); ++j) {
        const double P = pkm(mode.k, mode.m, p.alpha(), rule.nodes[j]);
        s += rule.weights[j] * P * P;
    }
    return 2.0 * std::numbers::pi * std::pow(2.0 / p.b0(), nu) / p.b0() * s;
}

RadialJet radial_jet(const MagneticParams& p, ModeIndex mode, double r) {
    check_mode(mode);
    if (!(r > 0)) throw std::domain_error("radial_jet: r must be positive");
    const double b0 = p.b0();
    const double nu = p.order(mode.k);
    // f = g(r) Q(u(r)) with g = r^nu e^{-b0 r^2/4}, u = b0 r^2 / 2
    const double g = std::exp(nu * std::log(r) - b0 * r * r / 4.0);
    const double lg1 = nu / r - b0 * r / 2.0;          // g'/g
    const double lg2 = -nu / (r * r) - b0 / 2.0;       // (g'/g)'
    const double dg = g * lg1;
    const double d2g = g * (lg1 * lg1 + lg2);
    const double u = b0 * r * r / 2.0;
    const PolyJet q = pkm_jet(mode.m, nu, u);
    const double du = b0 * r, d2u = b0;
    const double Q = q.p, dQ = q.dp * du, d2Q = q.d2p * du * du + q.dp * d2u;
    return {g * Q, dg * Q + g * dQ, d2g * Q + 2 * dg * dQ + g * d2Q};
}

Residual eigen_residual(const MagneticParams& p, ModeIndex mode, double r) {
    if (!(r > 0)) throw std::domain_error("eigen_residual: r must be positive");
    const RadialJet j = radial_jet(p, mode, r);
    const double s = mode.k + p.alpha();
    const double b0 = p.b0();
    const double lambda = eigenvalue(p, mode);
    const double t1 = -j.d2f, t2 = -j.df / r;
    const double t3 = (s * s / (r * r) + b0 * b0 * r * r / 4.0) * j.f;
    const double t4 = s * b0 * j.f;
    const double t5 = -lambda * j.f;
    Residual res;
    res.absolute = std::abs(t1 + t2 + t3 + t4 + t5);
    res.scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) + std::abs(t5);
    return res;
}

}  // namespace magflow
