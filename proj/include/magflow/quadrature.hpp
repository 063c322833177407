#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "magflow/gamma.hpp"

namespace magflow {

template <typename Scalar>
struct GaussRule {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

    Eigen::Index size() const { return nodes.size(); }
};

namespace detail {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights mu0 * v0^2.
template <typename Scalar>
GaussRule<Scalar> golub_welsch(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& offdiag, Scalar mu0) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::SelfAdjointEigenSolver<Mat> es;
    es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("golub_welsch: eigensolver failed");
    GaussRule<Scalar> rule;
    rule.nodes = es.eigenvalues();
    rule.weights = mu0 * es.eigenvectors().row(0).transpose().array().square();
    return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]. Golub-Welsch start, Newton polish on P_n.
template <typename Scalar>
GaussRule<Scalar> gauss_legendre(int n) {
    if (n < 1) throw std::domain_error("gauss_legendre: n must be positive");
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vec diag = Vec::Zero(n);
    Vec off(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) off[k - 1] = Scalar(k) / std::sqrt(Scalar(4 * k * k - 1));
    GaussRule<Scalar> rule = detail::golub_welsch<Scalar>(diag, off, Scalar(2));
    for (int i = 0; i < n; ++i) {
        Scalar x = rule.nodes[i];
        Scalar dp(0);
        for (int it = 0; it < 3; ++it) {
            Scalar p0(1), p1 = x;
            for (int k = 2; k <= n; ++k) {
                Scalar p2 = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = Scalar(1);
            dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
            x -= p1 / dp;
        }
        rule.nodes[i] = x;
        rule.weights[i] = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    }
    return rule;
}

/// Gauss-Legendre mapped to [a, b].
template <typename Scalar>
GaussRule<Scalar> gauss_legendre(int n, Scalar a, Scalar b) {
    GaussRule<Scalar> rule = gauss_legendre<Scalar>(n);
    const Scalar h = (b - a) / Scalar(2), c = (b + a) / Scalar(2);
    rule.nodes = (rule.nodes.array() * h + c).matrix();
    rule.weights *= h;
    return rule;
}

/// Gauss-Legendre on [a, b] after the periodizing substitution
/// s = u - sin(2 pi u)/(2 pi), u in [0,1]. Endpoint singularities of the form
/// (s - a)^p are pushed to (u - a)^{3p+2}, so algebraic endpoint behaviour
/// no longer limits the convergence rate.
template <typename Scalar>
GaussRule<Scalar> graded_legendre(int n, Scalar a, Scalar b) {
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    GaussRule<Scalar> base = gauss_legendre<Scalar>(n, Scalar(0), Scalar(1));
    GaussRule<Scalar> rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const Scalar u = base.nodes[i];
        const Scalar s = u - std::sin(two_pi * u) / two_pi;
        const Scalar ds = Scalar(1) - std::cos(two_pi * u);
        rule.nodes[i] = a + (b - a) * s;
        rule.weights[i] = base.weights[i] * (b - a) * ds;
    }
    return rule;
}

/// n-point generalized Gauss-Laguerre rule for the weight u^lambda e^{-u} on (0, inf).
template <typename Scalar>
GaussRule<Scalar> gauss_laguerre(int n, Scalar lambda) {
    if (n < 1) throw std::domain_error("gauss_laguerre: n must be positive");
    if (!(lambda > Scalar(-1))) throw std::domain_error("gauss_laguerre: lambda must exceed -1");
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vec diag(n);
    Vec off(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) diag[k] = Scalar(2 * k + 1) + lambda;
    for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(Scalar(k) * (Scalar(k) + lambda));
    const Scalar mu0 = std::exp(log_gamma(lambda + Scalar(1)));
    GaussRule<Scalar> rule = detail::golub_welsch<Scalar>(diag, off, mu0);
    // Eigenvector weights are accurate only relative to the largest weight, so
    // the tiny weights at large nodes are recomputed as Christoffel numbers
    // 1 / sum_k q_k(x)^2 of the orthonormal polynomials, after a Newton polish
    // of the node on q_n. Values are rescaled to stay in range.
    const Scalar big(1e100);
    for (int i = 0; i < n; ++i) {
        Scalar x = rule.nodes[i];
        for (int it = 0;; ++it) {
            // q_k stored divided by big^rescales; sum likewise by big^(2 rescales)
            Scalar q0(0), q1(1), d0(0), d1(0), sum(1);
            int rescales = 0;
            for (int k = 0; k < n; ++k) {
                const Scalar bk = std::sqrt(Scalar(k) * (Scalar(k) + lambda));
                const Scalar bk1 = std::sqrt(Scalar(k + 1) * (Scalar(k + 1) + lambda));
                const Scalar ak = Scalar(2 * k + 1) + lambda;
                const Scalar q2 = ((x - ak) * q1 - bk * q0) / bk1;
                const Scalar d2 = ((x - ak) * d1 + q1 - bk * d0) / bk1;
                q0 = q1, q1 = q2, d0 = d1, d1 = d2;
                if (k + 1 < n) sum += q1 * q1;
                if (std::abs(q1) > big || std::abs(d1) > big) {
                    q0 /= big, q1 /= big, d0 /= big, d1 /= big;
                    sum /= big * big;
                    ++rescales;
                }
            }
            if (it == 3) {
                Scalar w = mu0 / sum;
                for (int r = 0; r < rescales; ++r) w /= big * big;
                rule.weights[i] = w;
                break;
            }
            const Scalar step = q1 / d1;
            if (std::isfinite(step)) x -= step;
            rule.nodes[i] = x;
        }
    }
    return rule;
}

// Process-wide caches for the double rules used in hot loops. Thread-safe;
// returned references stay valid for the life of the process.
const GaussRule<double>& cached_gauss_legendre(int n);
const GaussRule<double>& cached_graded_legendre_0pi(int n);
const GaussRule<double>& cached_gauss_laguerre(int n, double lambda);

}  // namespace magflow
