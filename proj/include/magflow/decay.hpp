#pragma once

#include <vector>

#include <Eigen/Core>

#include "magflow/kernels.hpp"
#include "magflow/spectrum.hpp"

namespace magflow {

/// Sample space (r1, theta1, r2, theta2): radii log-spaced in [r_min, r_max],
/// angles uniform in [0, 2 pi).
struct GridSpec {
    int n_radii = 48;
    double r_min = 0.05;
    double r_max = 8.0;
    int n_angles = 24;

    void validate() const;  // ConfigError
    Eigen::VectorXd radii() const;
    Eigen::VectorXd angles() const;
    /// Twice the points along every axis, same range.
    GridSpec refined() const;
    /// n_radii^2 * n_angles^2.
    long long points() const;
};

struct DecayScanRow {
    double t = 0;
    double sigma = 0;
    double sup_weighted = 0;  // max |x|^{-sigma} |K(t,x,y)| |y|^{-sigma}
    double sin_factor = 0;    // |sin(b0 t)|^{1+sigma}
    double product = 0;       // sup_weighted * sin_factor
    long long grid_points = 0;
};

enum class OmegaTag { Omega1, Omega2 };

struct OmegaRegion {
    OmegaTag tag;
    double threshold;  // 2 |sin(b0 t)| / b0
};

/// Omega1 if r1 r2 >= 2|sin(b0 t)|/b0, else Omega2.
OmegaRegion classify(const MagneticParams& p, double t, double r1, double r2);

/// Grid supremum of the weighted calibrated kernel. |K| depends only on r1 r2
/// and theta1 - theta2, so each radius pair is summed once per angle
/// difference. k_max is raised per pair to meet tail_tol. Order-independent
/// max reduction: identical results for any `jobs`.
DecayScanRow weighted_sup(const MagneticParams& p, double t, double sigma, const GridSpec& grid,
                          const TruncationConfig& cfg, int jobs = 1);

/// Several sigma in one pass over the grid (the kernel does not depend on sigma).
std::vector<DecayScanRow> weighted_sup_multi(const MagneticParams& p, double t, const std::vector<double>& sigmas,
                                             const GridSpec& grid, const TruncationConfig& cfg, int jobs = 1);

/// sup over Omega1 grid points of X^{-mu} |S(X, dtheta)|, X = b0 r1 r2 / (2|sin(b0 t)|),
/// S the angular Bessel series. `inner_scale` >= 1 moves the inner boundary
/// of Omega1 out to inner_scale * threshold.
double k1_estimate(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg,
                   double inner_scale = 1.0, int jobs = 1);

/// sup over Omega2 grid points of sum_{|k|<=k_max} X^{|k+alpha|-mu} / (2^{|k+alpha|} Gamma(1/2+|k+alpha|)).
double k2_estimate(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg);

/// The K2 summand sum at a given X (X -> 0 gives 1/(2^mu Gamma(1/2+mu)) per minimizing k).
double k2_series(const MagneticParams& p, double X, int k_max);

struct ChainingCheck {
    double k1 = 0;
    double k2 = 0;
    double bound = 0;          // max(K1, K2) (b0/2)^mu |sin(b0 t)|^{-mu}
    double sup_series = 0;     // max (r1 r2)^{-mu} |S|
    long long violations = 0;  // grid points where the weighted series exceeds the bound
    long long omega1_points = 0;
    long long omega2_points = 0;
};

/// Pointwise check of (r1 r2)^{-mu} |S| <= max(K1, K2) (b0/2)^mu |sin|^{-mu} on the grid.
ChainingCheck chaining_check(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg,
                             int jobs = 1);

struct SmallTimeRow {
    double t = 0;
    double sup_weighted = 0;
    double scaled = 0;        // sup_weighted * t^{1+sigma}
    double sine_ratio = 0;    // (b0 t / |sin(b0 t)|)^{1+sigma}, in [1, (pi/2)^{1+sigma}]
    bool sandwich_ok = false;
};

struct SmallTimeTable {
    double sigma = 0;
    std::vector<SmallTimeRow> rows;
    double constant = 0;  // C = max scaled: sup_weighted <= C t^{-1-sigma} on the grid
    bool ok = false;      // every sandwich holds
};

/// t must lie in (time_guard/b0, pi/(2 b0)); otherwise std::domain_error.
SmallTimeTable small_time_check(const MagneticParams& p, double sigma, const std::vector<double>& t_grid,
                                const GridSpec& grid, const TruncationConfig& cfg, int jobs = 1);

}  // namespace magflow
