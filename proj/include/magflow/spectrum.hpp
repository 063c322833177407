#pragma once

#include <complex>

namespace magflow {

/// dist(alpha, Z).
double flux_distance(double alpha);

/// Flux alpha (non-integer) and field strength b0 > 0. Immutable.
class MagneticParams {
public:
    /// Throws ConfigError if alpha is within 1e-12 of an integer or b0 is not
    /// a positive finite number.
    MagneticParams(double alpha, double b0);

    double alpha() const noexcept { return alpha_; }
    double b0() const noexcept { return b0_; }
    /// dist(alpha, Z), in (0, 1/2].
    double mu() const noexcept { return mu_; }
    /// Bessel order |k + alpha| of angular mode k.
    double order(int k) const noexcept;

    friend bool operator==(const MagneticParams&, const MagneticParams&) = default;

private:
    double alpha_;
    double b0_;
    double mu_;
};

struct ModeIndex {
    int k = 0;
    int m = 0;  // >= 0
};

struct PolarPoint {
    double r = 0;
    double theta = 0;
};

/// lambda_{k,m} = (2m + 1 + |k+alpha| + k + alpha) b0.
double eigenvalue(const MagneticParams& p, ModeIndex mode);

struct Multiplicity {
    long count = 0;         // matching j in [-k_window, k_window]
    bool unbounded = false; // lambda is a Landau level (2m+1) b0 shared by every k+alpha < 0
};

/// Counts j in [-k_window, k_window] with
/// (lambda - (j+alpha) b0)/(2 b0) - (|j+alpha|+1)/2 a nonnegative integer
/// (tolerance 1e-9). Levels (2m+1) b0 are hit by every j < -alpha, so their
/// count grows with the window; `unbounded` flags that case.
Multiplicity multiplicity(const MagneticParams& p, double lambda, int k_window);

/// Radial part r^nu e^{-b0 r^2/4} P_{k,m}(b0 r^2/2), nu = |k+alpha|.
double radial_profile(const MagneticParams& p, ModeIndex mode, double r);

/// V_{k,m}(r, theta) = radial_profile * e^{i k theta}.
std::complex<double> eigenfunction(const MagneticParams& p, ModeIndex mode, PolarPoint x);

/// ||V_{k,m}||^2 = pi (2/b0)^{1+nu} Gamma(1+nu) / binom(m+nu, m), in log space.
double norm_squared(const MagneticParams& p, ModeIndex mode);

/// 2 pi int_0^inf |radial_profile|^2 r dr by generalized Gauss-Laguerre in u = b0 r^2/2.
double norm_squared_quadrature(const MagneticParams& p, ModeIndex mode, int nodes = 128);

struct RadialJet {
    double f = 0, df = 0, d2f = 0;
};

/// Profile and its first two r-derivatives in closed form.
RadialJet radial_jet(const MagneticParams& p, ModeIndex mode, double r);

struct Residual {
    double absolute = 0;  // |L f - lambda f|
    double scale = 0;     // |f''| + |f'|/r + |V_eff f| + |(k+alpha) b0 f| + |lambda f|
    double relative() const { return scale > 0 ? absolute / scale : 0.0; }
};

/// Radial eigen-equation
///   -(f'' + f'/r) + [(k+alpha)^2/r^2 + b0^2 r^2/4] f + (k+alpha) b0 f = lambda f
/// evaluated with analytic derivatives. Throws std::domain_error for r <= 0.
Residual eigen_residual(const MagneticParams& p, ModeIndex mode, double r);

}  // namespace magflow
