#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <type_traits>

#include <Eigen/Core>

#include "magflow/gamma.hpp"
#include "magflow/quadrature.hpp"

namespace magflow {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------- Laguerre

/// L^alpha_m(t) from the explicit finite sum
///   sum_n (-1)^n binom(m+alpha, m-n) t^n / n!.
template <typename Scalar>
Scalar laguerre_explicit(Scalar alpha, int m, Scalar t) {
    if (m < 0) throw std::domain_error("laguerre: m must be nonnegative");
    if (!(alpha > Scalar(-1))) throw std::domain_error("laguerre: alpha must exceed -1");
    Scalar term(1);  // binom(m+alpha, m)
    for (int j = 1; j <= m; ++j) term *= (alpha + Scalar(j)) / Scalar(j);
    Scalar sum = term;
    for (int n = 0; n < m; ++n) {
        term *= -Scalar(m - n) * t / ((alpha + Scalar(n + 1)) * Scalar(n + 1));
        sum += term;
    }
    return sum;
}

/// L^alpha_0..L^alpha_m at t by the three-term recurrence.
template <typename Scalar>
VectorX<Scalar> laguerre_table(Scalar alpha, int m, Scalar t) {
    if (m < 0) throw std::domain_error("laguerre: m must be nonnegative");
    if (!(alpha > Scalar(-1))) throw std::domain_error("laguerre: alpha must exceed -1");
    VectorX<Scalar> L(m + 1);
    L[0] = Scalar(1);
    if (m >= 1) L[1] = Scalar(1) + alpha - t;
    for (int n = 1; n < m; ++n)
        L[n + 1] = ((Scalar(2 * n + 1) + alpha - t) * L[n] - (Scalar(n) + alpha) * L[n - 1]) /
                   Scalar(n + 1);
    return L;
}

/// L^alpha_m(t). The explicit sum is the definition; the recurrence is used
/// from m = 2 on (agreement is a tested property).
template <typename Scalar>
Scalar laguerre(Scalar alpha, int m, Scalar t) {
    if (m < 2) return laguerre_explicit(alpha, m, t);
    return laguerre_table(alpha, m, t)[m];
}

// --------------------------------------------------------------- P_{k,m}

/// P_{k,m}(rho) = sum_{n<=m} (-m)_n / (1+|k+alpha|)_n rho^n / n!.
template <typename Scalar>
Scalar pkm(int k, int m, Scalar alpha, Scalar rho) {
    if (m < 0) throw std::domain_error("pkm: m must be nonnegative");
    const Scalar nu = std::abs(Scalar(k) + alpha);
    Scalar term(1), sum(1);
    for (int n = 0; n < m; ++n) {
        term *= Scalar(n - m) / (Scalar(1) + nu + Scalar(n)) * rho / Scalar(n + 1);
        sum += term;
    }
    return sum;
}

/// P_{k,m}(rho) via binom(m+nu, m)^{-1} L^nu_m(rho), nu = |k+alpha|.
template <typename Scalar>
Scalar pkm_via_laguerre(int k, int m, Scalar alpha, Scalar rho) {
    const Scalar nu = std::abs(Scalar(k) + alpha);
    return laguerre_explicit(nu, m, rho) * std::exp(-log_binomial(nu, m));
}

// ----------------------------------------------------------------- Bessel

/// Explicit majorant (|z|/2)^nu / Gamma(nu+1) for |I_nu(i z)| = |J_nu(z)|, z real.
/// Obtained by bounding e^{i z cos phi} by 1 in the sine-power integral
/// representation; note the constant is sqrt(pi) Gamma(nu+1/2) in that
/// representation, which cancels the Beta integral exactly.
template <typename Scalar>
Scalar bessel_bound(Scalar nu, Scalar z) {
    if (!(nu >= Scalar(0))) throw std::domain_error("bessel_bound: nu must be nonnegative");
    const Scalar az = std::abs(z);
    if (az == Scalar(0)) return nu == Scalar(0) ? Scalar(1) : Scalar(0);
    return std::exp(nu * std::log(az / Scalar(2)) - log_gamma(nu + Scalar(1)));
}

namespace detail {

template <typename Scalar>
GaussRule<Scalar> bessel_rule(int nodes) {
    if constexpr (std::is_same_v<Scalar, double>)
        return cached_graded_legendre_0pi(nodes);
    else
        return graded_legendre<Scalar>(nodes, Scalar(0), std::numbers::pi_v<Scalar>);
}

}  // namespace detail

/// exp(-|Re z|) I_nu(z) by quadrature of
///   I_nu(z) = (z/2)^nu / (sqrt(pi) Gamma(nu+1/2)) int_0^pi e^{z cos phi} sin^{2nu} phi dphi
/// (principal branch of (z/2)^nu). The graded rule keeps the fractional
/// power of sin at the endpoints from limiting accuracy.
template <typename Scalar>
std::complex<Scalar> bessel_i_scaled(Scalar nu, std::complex<Scalar> z, int nodes = 200) {
    using C = std::complex<Scalar>;
    if (!(nu >= Scalar(0))) throw std::domain_error("bessel_i_complex: nu must be nonnegative");
    if (nodes < 2) throw std::domain_error("bessel_i_complex: need at least 2 nodes");
    if (z == C(0)) return nu == Scalar(0) ? C(1) : C(0);
    const GaussRule<Scalar> rule = detail::bessel_rule<Scalar>(nodes);
    const Scalar shift = std::abs(z.real());
    C integral(0);
    for (Eigen::Index j = 0; j < rule.size(); ++j) {
        const Scalar phi = rule.nodes[j];
        const Scalar s = std::sin(phi);
        const Scalar w = nu == Scalar(0) ? rule.weights[j] : rule.weights[j] * std::pow(s, 2 * nu);
        integral += w * std::exp(z * std::cos(phi) - shift);
    }
    if (integral == C(0)) return C(0);
    const C log_pref = nu * std::log(z / Scalar(2)) - log_gamma(nu + Scalar(0.5)) -
                       Scalar(0.5) * std::log(std::numbers::pi_v<Scalar>);
    return std::exp(log_pref + std::log(integral));
}

/// log I_nu(x) for real x > 0, without forming I_nu (no over/underflow).
template <typename Scalar>
Scalar log_bessel_i(Scalar nu, Scalar x, int nodes = 200) {
    if (!(nu >= Scalar(0))) throw std::domain_error("log_bessel_i: nu must be nonnegative");
    if (!(x > Scalar(0))) throw std::domain_error("log_bessel_i: x must be positive");
    const GaussRule<Scalar> rule = detail::bessel_rule<Scalar>(nodes);
    Scalar integral(0);
    for (Eigen::Index j = 0; j < rule.size(); ++j) {
        const Scalar phi = rule.nodes[j];
        const Scalar w = nu == Scalar(0) ? rule.weights[j] : rule.weights[j] * std::pow(std::sin(phi), 2 * nu);
        integral += w * std::exp(x * (std::cos(phi) - Scalar(1)));
    }
    return x + nu * std::log(x / Scalar(2)) - log_gamma(nu + Scalar(0.5)) -
           Scalar(0.5) * std::log(std::numbers::pi_v<Scalar>) + std::log(integral);
}

/// I_nu(z) for complex z. Overflows to inf only when I_nu itself does.
template <typename Scalar>
std::complex<Scalar> bessel_i_complex(Scalar nu, std::complex<Scalar> z, int nodes = 200) {
    return bessel_i_scaled(nu, z, nodes) * std::exp(std::abs(z.real()));
}

/// J_{nu0+n}(x) for n = 0..count-1, x >= 0, nu0 >= 0.
/// Miller's backward recurrence, normalized with Neumann's series
///   (x/2)^nu0 = sum_k (nu0+2k) Gamma(nu0+k)/k! J_{nu0+2k}(x).
/// Stable for any x and order range; used where the integral
/// representation is ill-conditioned (large order, large imaginary argument).
template <typename Scalar>
VectorX<Scalar> bessel_j_ladder(Scalar nu0, int count, Scalar x) {
    if (!(nu0 >= Scalar(0))) throw std::domain_error("bessel_j_ladder: nu0 must be nonnegative");
    if (!(x >= Scalar(0))) throw std::domain_error("bessel_j_ladder: x must be nonnegative");
    VectorX<Scalar> out = VectorX<Scalar>::Zero(std::max(count, 0));
    if (count <= 0) return out;
    if (x == Scalar(0)) {
        if (nu0 == Scalar(0)) out[0] = Scalar(1);
        return out;
    }
    if (x < Scalar(1e-8)) {
        // Two-term power series is exact to rounding here and avoids the
        // enormous growth of the backward recurrence.
        const Scalar lx = std::log(x / Scalar(2));
        for (int n = 0; n < count; ++n) {
            const Scalar nu = nu0 + Scalar(n);
            out[n] = std::exp(nu * lx - log_gamma(nu + Scalar(1))) *
                     (Scalar(1) - x * x / (Scalar(4) * (nu + Scalar(1))));
        }
        return out;
    }
    const Scalar big = std::max(Scalar(count), x);
    const int N = int(big + Scalar(40) + Scalar(2) * std::sqrt(Scalar(40) * big)) + 1;
    VectorX<Scalar> j(N + 2);
    j[N + 1] = Scalar(0);
    j[N] = Scalar(1e-300);
    const Scalar huge(1e250), tiny(1e-250);
    // Neumann weights c_k = (nu0+2k) g_k, g_k = Gamma(nu0+k)/k!, with c_0 = Gamma(nu0+1).
    const int kmax = N / 2;
    VectorX<Scalar> c(kmax + 1);
    c[0] = std::exp(log_gamma(nu0 + Scalar(1)));
    Scalar g = c[0];  // g_1
    for (int k = 1; k <= kmax; ++k) {
        c[k] = (nu0 + Scalar(2 * k)) * g;
        g *= (nu0 + Scalar(k)) / Scalar(k + 1);
    }
    Scalar norm(0);
    if (N % 2 == 0) norm += c[N / 2] * j[N];
    for (int n = N; n >= 1; --n) {
        j[n - 1] = Scalar(2) * (nu0 + Scalar(n)) / x * j[n] - j[n + 1];
        if ((n - 1) % 2 == 0) norm += c[(n - 1) / 2] * j[n - 1];
        if (std::abs(j[n - 1]) > huge) {
            j.segment(n - 1, N + 3 - n) *= tiny;
            norm *= tiny;
        }
    }
    const Scalar scale = std::pow(x / Scalar(2), nu0) / norm;
    for (int n = 0; n < count; ++n) out[n] = j[n] * scale;
    return out;
}

/// I_{nu0+n}(-i x) for n = 0..count-1 and real x of either sign:
/// I_nu(-i x) = e^{-i sgn(x) pi nu/2} J_nu(|x|).
template <typename Scalar>
VectorX<std::complex<Scalar>> bessel_i_imag_ladder(Scalar nu0, int count, Scalar x) {
    const VectorX<Scalar> J = bessel_j_ladder(nu0, count, std::abs(x));
    VectorX<std::complex<Scalar>> out(J.size());
    const Scalar sgn = x < Scalar(0) ? Scalar(1) : Scalar(-1);
    const Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);
    for (Eigen::Index n = 0; n < J.size(); ++n)
        out[n] = std::polar(J[n], sgn * half_pi * (nu0 + Scalar(n)));
    return out;
}

}  // namespace magflow
