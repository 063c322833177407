#pragma once

// Invariant suites shared by `magflow verify` and the acceptance binary.
// Each returns a measured error next to its tolerance. Exceptions raised by
// the numerics are caught and reported as failed checks.

#include <complex>
#include <string>
#include <vector>

#include "magflow/decay.hpp"
#include "magflow/kernels.hpp"
#include "magflow/spectrum.hpp"

namespace magflow {

struct CheckResult {
    std::string name;
    double measured = 0;
    double tolerance = 0;
    bool passed = false;
    std::string detail;
};

/// int t^a e^{-t} L_m L_n dt = Gamma(n+a+1)/n! delta_{mn}, m, n <= n_max.
CheckResult check_laguerre_orthogonality(const std::vector<double>& alphas = {0.3, 0.5, 1.7}, int n_max = 8,
                                         double tol = 1e-8);

/// P_{k,m} explicit sum vs the normalized Laguerre form.
CheckResult check_pkm_dual_route(const std::vector<double>& alphas = {0.3, 0.5}, int k_abs = 5, int m_max = 10,
                                 double tol = 1e-12);

/// Closed-form norm vs Gauss-Laguerre radial quadrature.
CheckResult check_norm_formula(const std::vector<MagneticParams>& ps, int k_abs = 5, int m_max = 5,
                               double tol = 1e-8);

/// Radial eigen-equation residual on r in [0.2, 3] for a fixed set of 8 modes.
CheckResult check_eigen_residual(const std::vector<MagneticParams>& ps, double tol = 1e-8);

/// Laguerre Poisson-kernel identity on nu x a x b x c.
CheckResult check_poisson_identity(int m_max = 200, double tol = 1e-8);

/// Heat kernel, eigen-sum vs closed form, tau in {0.25, 0.5, 1}/b0.
CheckResult check_heat_kernel(const MagneticParams& p, const TruncationConfig& cfg, double tol = 1e-8);

/// max |I_nu(iz)| / bessel_bound(nu, z); passes when <= 1.
CheckResult check_bessel_bound(const std::vector<double>& nus = {0.3, 0.5, 1.7, 5.5},
                               const std::vector<double>& zs = {0.1, 1, 10, 25});

/// Diagonal |K(t,x,x)| |sin(b0 t)| at the configured k_max for r in [0.1, 4]/sqrt(b0);
/// measured is the largest series tail estimate, tolerance cfg.tail_tol.
CheckResult check_kernel_diagonal(const MagneticParams& p, const TruncationConfig& cfg);

/// Calibration constant: t-independence of |rho| to tol.
CheckResult check_calibration(const MagneticParams& p, const TruncationConfig& cfg, double tol = 1e-6);

/// Calibrated kernel_series at a small flux vs the alpha = 0 Mehler kernel,
/// pointwise relative on a 5 x 5 x 3 (x, y, t) grid.
CheckResult check_alpha0_limit(double b0, double alpha, const TruncationConfig& cfg, double tol = 1e-3);

/// Spectral evolution preserves the coefficient norm at t in {0.3, pi/4, 1}/b0.
CheckResult check_spectral_unitarity(const MagneticParams& p, const TruncationConfig& cfg, double tol = 1e-12);

/// Kernel-route L2 norm of an off-origin Gaussian at t in {0.3, pi/4, 1}/b0.
CheckResult check_kernel_unitarity(const MagneticParams& p, const TruncationConfig& cfg, int jobs = 1,
                                   double tol = 1e-4);

/// Kernel route vs filtered spectral route at 10 points, both test Gaussians.
CheckResult check_dual_route(const MagneticParams& p, const TruncationConfig& cfg, int jobs = 1,
                             double tol = 1e-4);

/// Pointwise chaining inequality at t.
CheckResult check_chaining(const MagneticParams& p, double t, const GridSpec& grid, const TruncationConfig& cfg,
                           int jobs = 1);

struct DecayCertificate {
    std::vector<DecayScanRow> rows;     // base grid
    std::vector<DecayScanRow> refined;  // doubled grid, same order
    std::vector<double> constants;      // per sigma: max product over the t-grid
    std::vector<DecayScanRow> near_singular;
    CheckResult result;
};

/// Decay certificate: finite products, < 5% change under grid doubling, and
/// near-singular rows t -> pi/b0 with growing sup and products within a
/// factor-2 band.
DecayCertificate decay_certificate(const MagneticParams& p, const std::vector<double>& sigmas,
                                   const std::vector<double>& t_grid, const GridSpec& grid,
                                   const TruncationConfig& cfg, int jobs = 1);

/// Sine sandwich on t in (0, pi/(2 b0)) plus the shared constant C.
CheckResult check_small_time(const MagneticParams& p, const std::vector<double>& sigmas,
                             const std::vector<double>& t_grid, const GridSpec& grid, const TruncationConfig& cfg,
                             int jobs = 1);

}  // namespace magflow
