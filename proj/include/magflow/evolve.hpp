#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "magflow/kernels.hpp"
#include "magflow/spectrum.hpp"

namespace magflow {

enum class OriginBehavior {
    smooth,        // f(0) may be nonzero (Gaussians)
    flux_adapted,  // f vanishes at 0 like r^{|k+alpha|} per angular mode (eigenfunctions)
};

/// Initial data: an evaluation rule plus the radius beyond which it is negligible.
struct SampledFunction {
    std::function<std::complex<double>(PolarPoint)> eval;
    double support_radius = 0;
    OriginBehavior origin = OriginBehavior::smooth;
};

/// e^{-a |x - x0|^2}. Support radius where the envelope drops below 1e-17.
SampledFunction gaussian(double a, const Point2& center);

/// V_{k,m} / ||V_{k,m}||.
SampledFunction normalized_eigenfunction(const MagneticParams& p, ModeIndex mode);

/// Coefficients c_{k,m} for |k| <= k_max, m <= m_max; f ~ sum c V_{k,m}.
struct SpectralCoefficients {
    MagneticParams params;
    int k_max = 0;
    int m_max = 0;
    Eigen::MatrixXcd c;  // (2 k_max + 1) x (m_max + 1), row k + k_max

    SpectralCoefficients(const MagneticParams& p, int k_max, int m_max);

    std::complex<double>& operator()(ModeIndex mode) { return c(mode.k + k_max, mode.m); }
    std::complex<double> operator()(ModeIndex mode) const { return c(mode.k + k_max, mode.m); }
    /// sum |c|^2 ||V||^2.
    double norm_squared() const;
};

struct ExpandOptions {
    int radial_nodes = 160;   // generalized Gauss-Laguerre nodes in u = b0 r^2 / 2
    int angular_nodes = 160;  // trapezoid nodes in theta, must exceed 2 k_max
    double parseval_tol = 1e-6;  // relative; CutoffError above it
};

struct Expansion {
    SpectralCoefficients coefficients;
    double input_norm_squared = 0;  // ||f||^2 by the same polar quadrature
    double parseval_defect = 0;     // | ||f||^2 - sum |c|^2 ||V||^2 | / ||f||^2
};

/// Projection c_{k,m} = <f, V_{k,m}> / ||V||^2 by polar quadrature. The radial
/// rule carries the weight u^{nu_k} (flux-adapted data) or u^{nu_k/2}
/// (smooth data) so the singular factor of V at the origin is integrated exactly.
Expansion expand_report(const SampledFunction& f, const MagneticParams& p, const TruncationConfig& cfg,
                        const ExpandOptions& opt = {});

/// As expand_report, returning the coefficients only.
SpectralCoefficients expand(const SampledFunction& f, const MagneticParams& p, const TruncationConfig& cfg,
                            const ExpandOptions& opt = {});

/// Multiplies each coefficient by e^{-i t lambda_{k,m}}. Valid for every t.
SpectralCoefficients evolve_spectral(const SpectralCoefficients& c, double t);

/// Exponential filter sigma(m) = exp(-strength (m / m_max)^order) on the
/// radial index. Damps the Gibbs-like tail of non-form-domain data.
struct SpectralFilter {
    double strength = 36.0;
    int order = 8;
};

/// sum c_{k,m} V_{k,m}(x), optionally filtered.
std::complex<double> reconstruct(const SpectralCoefficients& c, PolarPoint x,
                                 std::optional<SpectralFilter> filter = std::nullopt);
std::vector<std::complex<double>> reconstruct(const SpectralCoefficients& c, const std::vector<PolarPoint>& xs,
                                              std::optional<SpectralFilter> filter = std::nullopt);

struct KernelQuadrature {
    int radial_nodes = 160;   // Gauss-Legendre in r on [0, support radius], graded at 0;
                              // raised automatically for strongly oscillating kernels
    int angular_nodes = 160;  // trapezoid in theta, must exceed 2 k_max
    int jobs = 1;
};

/// Kernel-route solution on a polar tensor grid, stored as angular modes
///   u(r, theta) = sum_k U_k(r) e^{i k theta}.
struct AngularModes {
    int k_max = 0;
    Eigen::VectorXd r;        // radial nodes
    Eigen::VectorXd weights;  // radial weights for int .. r dr (r included)
    Eigen::MatrixXcd modes;   // (2 k_max + 1) x r.size()

    /// ||u||^2 = 2 pi sum_k sum_i w_i |U_k(r_i)|^2.
    double norm_squared() const;
    std::complex<double> at(std::size_t radial_index, double theta) const;
};

/// Angular Fourier modes f_k(r) = (1/2 pi) int f(r, theta) e^{-i k theta} dtheta
/// on the input rule, and the input norm.
struct InputModes {
    Eigen::VectorXd r, weights;
    Eigen::MatrixXcd fk;  // (2 k_max + 1) x r.size()
    double norm_squared = 0;
};
/// radial_nodes may exceed q.radial_nodes (see radial_nodes_needed).
InputModes sample_input(const SampledFunction& f, int k_max, const KernelQuadrature& q, int radial_nodes);

/// Input radial nodes needed to resolve the kernel's oscillation for outputs
/// up to r_out_max; never below q.radial_nodes.
int radial_nodes_needed(const SampledFunction& f, const MagneticParams& p, double t, double r_out_max,
                        const KernelQuadrature& q);

/// Kernel-route flow scale * raw series applied to f and evaluated on the
/// radial output rule; raw = uncalibrated prefactor.
AngularModes evolve_kernel_modes(const SampledFunction& f, const MagneticParams& p, double t,
                                 const TruncationConfig& cfg, const KernelQuadrature& q,
                                 std::complex<double> scale, const Eigen::VectorXd& r_out,
                                 const Eigen::VectorXd& w_out);

/// Radial output rule [0, R] matching the input rule.
void output_rule(double R, int n, Eigen::VectorXd& r, Eigen::VectorXd& w);

/// Pointwise kernel-route flow using the calibrated series.
/// Throws SingularTimeError, TruncationError, or AccuracyError (angular
/// content of f not resolved at k_max).
std::vector<std::complex<double>> evolve_kernel(const SampledFunction& f, const MagneticParams& p, double t,
                                                const std::vector<PolarPoint>& out_points,
                                                const TruncationConfig& cfg, const KernelQuadrature& q = {});

/// Same with an explicit prefactor scale (raw series times scale).
std::vector<std::complex<double>> evolve_kernel_scaled(const SampledFunction& f, const MagneticParams& p,
                                                       double t, const std::vector<PolarPoint>& out_points,
                                                       const TruncationConfig& cfg, const KernelQuadrature& q,
                                                       std::complex<double> scale);

/// ||f||^2 by polar quadrature on the rule of q.
double l2_norm_squared(const SampledFunction& f, const KernelQuadrature& q = {});

}  // namespace magflow
