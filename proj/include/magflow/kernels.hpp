#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>

#include "magflow/spectrum.hpp"

namespace magflow {

/// Series and quadrature cutoffs.
struct TruncationConfig {
    int k_max = 64;           // angular series runs over |k| <= k_max
    int m_max = 128;          // radial cutoff for eigenfunction sums
    int quad_nodes = 200;     // nodes for the Bessel integral representation
    double tail_tol = 1e-10;  // admissible bound on the dropped angular tail
    double time_guard = 1e-3; // minimal distance of b0 t from pi Z

    /// Throws ConfigError unless all knobs are positive and time_guard < pi/2.
    void validate() const;
};

struct KernelValue {
    std::complex<double> value;
    int k_terms_used = 0;
    double est_tail = 0;
};

using Point2 = Eigen::Vector2d;

Point2 to_cartesian(PolarPoint p);
PolarPoint to_polar(const Point2& x);

/// Distance of b0 t from pi Z.
double singular_distance(double b0, double t);
/// Throws SingularTimeError if singular_distance(b0, t) < guard.
void check_time(double b0, double t, double guard);

/// Mehler kernel for alpha = 0:
///   b0/(4 pi sin(b0 t)) exp{(b0/4i)(cot(b0 t)|x-y|^2 - 2 x^y)}.
std::complex<double> mehler_alpha0(double b0, double t, const Point2& x, const Point2& y,
                                   double time_guard = 1e-3);

/// R(phi), counter-clockwise rotation.
Eigen::Matrix2d rotation(double phi);

/// Rotated form
///   b0/(4 pi sin(b0 t)) exp{(b0/4i) cot(b0 t)(|x|^2+|y|^2)} exp{i b0 y.R(b0 t)x / (2 sin(b0 t))}.
/// Algebraically the same function as mehler_alpha0 at equal t.
std::complex<double> mehler_alpha0_rotform(double b0, double t, const Point2& x, const Point2& y,
                                           double time_guard = 1e-3);

/// Convention relating the Mehler expressions to the true propagator:
/// K(t, x, y) = factor * M(time_sign * t, x, y), conjugated if `conjugate`.
struct MehlerConvention {
    int time_sign = 1;
    bool conjugate = false;
    std::complex<double> factor;
    double spread = 0;  // max relative deviation of the fitted ratio over the probe grid
};

/// Fits the relation numerically: the calibrated series at a tiny flux is
/// compared with the four (time sign, conjugation) variants of mehler_alpha0
/// on a small grid; the variant with the most nearly constant ratio wins.
MehlerConvention mehler_convention_probe(double b0, const TruncationConfig& cfg = {});

/// Evaluates mehler_alpha0 under a convention.
std::complex<double> mehler_with_convention(const MehlerConvention& c, double b0, double t,
                                            const Point2& x, const Point2& y, double time_guard = 1e-3);

/// I_{|k+alpha|}(-i x) for k = -K..K (entry k+K), real x of either sign.
Eigen::VectorXcd angular_bessel_terms(const MagneticParams& p, double x, int K);

/// Rigorous bound on sum_{|k|>K} |I_{|k+alpha|}(-i x)|, using min(1, bessel_bound).
double angular_tail_bound(const MagneticParams& p, double x, int K);

/// Smallest K whose angular_tail_bound is <= tol.
int required_k_max(const MagneticParams& p, double x, double tol);

/// Bessel argument b0 r1 r2 / (2 sin(b0 t)); the series argument is -i times this.
double kernel_argument(const MagneticParams& p, double t, double r1, double r2);

/// Uncalibrated kernel: prefactor b0 e^{-i t b0 alpha} / (8 pi^2 i sin(b0 t)).
/// The two Gaussian forms e^{-b0(.)/(4i tan)} and e^{i b0(.)/(4 tan)} are the
/// same number; the second is used. Throws SingularTimeError or TruncationError.
KernelValue kernel_series_raw(const MagneticParams& p, double t, PolarPoint x, PolarPoint y,
                              const TruncationConfig& cfg);

/// kernel_series_raw scaled by calibrate_prefactor(p, cfg).rho.
KernelValue kernel_series(const MagneticParams& p, double t, PolarPoint x, PolarPoint y,
                          const TruncationConfig& cfg);

struct PoissonCheck {
    double lhs = 0;
    double rhs = 0;
    double residual = 0;  // |lhs - rhs| / |rhs|
};

/// Laguerre Poisson-kernel identity
///   sum_m e^{-cm} m!/Gamma(m+nu+1) L_m(a) L_m(b)
///     = e^{nu c/2} / ((ab)^{nu/2} (1-e^{-c})) exp(-(a+b) e^{-c}/(1-e^{-c}))
///       I_nu(2 sqrt(ab) e^{-c/2}/(1-e^{-c})),
/// both sides computed independently.
PoissonCheck poisson_identity(double nu, double a, double b, double c, int m_max);
double poisson_identity_residual(double nu, double a, double b, double c, int m_max);

struct HeatKernelPair {
    std::complex<double> spectral;
    std::complex<double> closed;
    double relative_gap() const;
};

/// e^{-tau H}(x, y) two ways: the eigenfunction sum over |k| <= k_max,
/// m <= m_max, and per k the Poisson-kernel closed form with c = 2 b0 tau.
HeatKernelPair heat_kernel_pair(const MagneticParams& p, double tau, PolarPoint x, PolarPoint y,
                                const TruncationConfig& cfg);

struct Calibration {
    std::complex<double> rho;            // K = rho * raw series
    std::array<double, 3> times{};       // {0.3, 0.7, 1.1}/b0
    std::array<double, 3> moduli{};      // |rho| measured at each time
    std::array<double, 3> phases{};      // arg(rho) measured at each time
    double modulus_spread = 0;           // max |moduli - |rho|| / |rho|
    double unitarity_defect = 0;         // worst | |rho|^2 ||u_raw||^2 / ||f||^2 - 1 |
    double phase_spread = 0;
};

/// Measures the constant rho making rho * raw series unitary: |rho| from
/// norm preservation of a reference Gaussian under the kernel-route flow, the
/// phase from projecting onto the spectral-route flow. Computed once per
/// (alpha, b0) and cached. Throws CalibrationError if the modulus is not
/// constant in t to 1e-6.
const Calibration& calibrate_prefactor(const MagneticParams& p, const TruncationConfig& cfg = {});

}  // namespace magflow
