#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace magflow {

/// Rising factorial (a)_n = a(a+1)...(a+n-1), (a)_0 = 1.
template <typename Scalar>
Scalar pochhammer(Scalar a, int n) {
    if (n < 0) throw std::domain_error("pochhammer: n must be nonnegative");
    Scalar p(1);
    for (int j = 0; j < n; ++j) p *= a + Scalar(j);
    return p;
}

namespace detail {

// zeta(k) - 1 for k = 0..kZetaTerms-1 (entries 0 and 1 unused), by direct
// summation to N-1 and an Euler-Maclaurin tail from N.
inline constexpr int kZetaTerms = 48;

template <typename Scalar>
std::array<Scalar, kZetaTerms> make_zeta_minus_one() {
    using std::pow;
    constexpr int N = 16;
    // B_{2j}/(2j)!
    const long double b2j_over_fact[] = {
        1.0L / 12.0L,
        -1.0L / 720.0L,
        1.0L / 30240.0L,
        -1.0L / 1209600.0L,
        1.0L / 47900160.0L,
        -691.0L / 1307674368000.0L,
        1.0L / 74724249600.0L,
    };
    std::array<Scalar, kZetaTerms> z{};
    for (int k = 2; k < kZetaTerms; ++k) {
        long double s = 0;
        for (int n = N - 1; n >= 2; --n) s += std::pow((long double)n, -(long double)k);
        const long double nk = std::pow((long double)N, -(long double)k);
        s += nk * N / (k - 1) + nk / 2;
        // rising product k(k+1)...(k+2j-2) times N^{-k-2j+1}
        long double rise = k;
        long double npow = nk / N;
        for (int j = 0; j < 7; ++j) {
            s += b2j_over_fact[j] * rise * npow;
            rise *= (long double)(k + 2 * j + 1) * (k + 2 * j + 2);
            npow /= (long double)N * N;
        }
        z[k] = Scalar(s);
    }
    return z;
}

template <typename Scalar>
const std::array<Scalar, kZetaTerms>& zeta_minus_one() {
    static const std::array<Scalar, kZetaTerms> table = make_zeta_minus_one<Scalar>();
    return table;
}

// log Gamma(1+z) for |z| <= 1/2 from the Taylor series of log Gamma about 1.
template <typename Scalar>
Scalar log_gamma_1p(Scalar z) {
    using std::log1p;
    const Scalar euler_gamma = Scalar(0.577215664901532860606512090082402431L);
    const auto& zm1 = zeta_minus_one<Scalar>();
    Scalar series(0);
    Scalar p = -z;
    for (int k = 2; k < kZetaTerms; ++k) {
        p *= -z;  // (-z)^k
        series += zm1[k] * p / Scalar(k);
    }
    return -euler_gamma * z + (z - log1p(z)) + series;
}

template <typename Scalar>
Scalar log_gamma_stirling(Scalar y) {
    using std::log;
    const Scalar half_log_2pi = Scalar(0.918938533204672741780329736405617639L);
    // B_{2j} / (2j(2j-1))
    const long double c[] = {
        1.0L / 12.0L,         -1.0L / 360.0L,   1.0L / 1260.0L,
        -1.0L / 1680.0L,      1.0L / 1188.0L,   -691.0L / 360360.0L,
        1.0L / 156.0L,        -3617.0L / 122400.0L,
    };
    const Scalar inv = Scalar(1) / y;
    const Scalar inv2 = inv * inv;
    Scalar corr(0);
    Scalar p = inv;
    for (long double cj : c) {
        corr += Scalar(cj) * p;
        p *= inv2;
    }
    return (y - Scalar(0.5)) * log(y) - y + half_log_2pi + corr;
}

}  // namespace detail

/// log Gamma(x) for x > 0. Taylor series of log Gamma near 1 and 2, Stirling
/// series (after an upward shift) elsewhere.
template <typename Scalar>
Scalar log_gamma(Scalar x) {
    using std::isfinite;
    using std::log;
    using std::log1p;
    if (!(x > Scalar(0))) throw std::domain_error("log_gamma: argument must be positive");
    if (!isfinite(x)) return x;
    if (x < Scalar(0.5)) return detail::log_gamma_1p(x) - log(x);
    if (x < Scalar(1.5)) return detail::log_gamma_1p(x - Scalar(1));
    if (x <= Scalar(2.5)) {
        const Scalar z = x - Scalar(2);
        return detail::log_gamma_1p(z) + log1p(z);
    }
    if (x >= Scalar(15)) return detail::log_gamma_stirling(x);
    Scalar prod(1);
    Scalar y = x;
    while (y < Scalar(15)) {
        prod *= y;
        y += Scalar(1);
    }
    return detail::log_gamma_stirling(y) - log(prod);
}

/// log of binom(n + nu, n) = Gamma(n+nu+1) / (n! Gamma(nu+1)).
template <typename Scalar>
Scalar log_binomial(Scalar nu, int n) {
    if (n < 0) throw std::domain_error("log_binomial: n must be nonnegative");
    if (n <= 64) {
        // Direct product is exact enough and cheaper for the small n used here.
        Scalar s(0);
        for (int j = 1; j <= n; ++j) s += std::log1p(nu / Scalar(j));
        return s;
    }
    return log_gamma(Scalar(n) + nu + Scalar(1)) - log_gamma(Scalar(n) + Scalar(1)) -
           log_gamma(nu + Scalar(1));
}

}  // namespace magflow
