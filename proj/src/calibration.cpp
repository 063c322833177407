#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "magflow/errors.hpp"
#include "magflow/evolve.hpp"
#include "magflow/kernels.hpp"

namespace magflow {

namespace {

struct Slot {
    std::once_flag once;
    Calibration value;
};

Calibration measure(const MagneticParams& p, const TruncationConfig& cfg) {
    // Reference datum away from the origin: Gaussians with f(0) != 0 are not
    // in the form domain for non-integer flux and leak mass algebraically.
    const double b0 = p.b0();
    const double ell = 1.0 / std::sqrt(b0);  // magnetic length scale
    const SampledFunction f = gaussian(2.0 / (ell * ell), Point2(2.0 * ell, 0.0));
    KernelQuadrature q;
    q.angular_nodes = std::max(q.angular_nodes, 2 * cfg.k_max + 32);
    Eigen::VectorXd r_out, w_out;
    output_rule(f.support_radius + 12.0 * ell, 240, r_out, w_out);

    ExpandOptions eo;
    eo.angular_nodes = q.angular_nodes;
    eo.parseval_tol = 1e-3;
    const SpectralCoefficients c0 = expand(f, p, cfg, eo);
    const double fnorm = l2_norm_squared(f, q);

    Calibration cal;
    cal.times = {0.3 / b0, 0.7 / b0, 1.1 / b0};
    for (int i = 0; i < 3; ++i) {
        const double t = cal.times[i];
        const AngularModes u = evolve_kernel_modes(f, p, t, cfg, q, 1.0, r_out, w_out);
        cal.moduli[i] = std::sqrt(fnorm / u.norm_squared());
        // phase: project the raw kernel flow onto the spectral flow on a ring of samples
        const SpectralCoefficients ct = evolve_spectral(c0, t);
        std::complex<double> num = 0;
        double den = 0;
        for (Eigen::Index j = 0; j < r_out.size(); j += 8)
            for (int l = 0; l < 16; ++l) {
                const double th = 2 * std::numbers::pi * l / 16;
                const std::complex<double> raw = u.at(std::size_t(j), th);
                num += std::conj(raw) * reconstruct(ct, {r_out[j], th}, SpectralFilter{});
                den += std::norm(raw);
            }
        cal.phases[i] = std::arg(num / den);
    }
    const double mod = (cal.moduli[0] + cal.moduli[1] + cal.moduli[2]) / 3.0;
    // average phases on the circle
    std::complex<double> ph = 0;
    for (double a : cal.phases) ph += std::polar(1.0, a);
    const double phase = std::arg(ph);
    cal.rho = std::polar(mod, phase);
    for (int i = 0; i < 3; ++i) {
        cal.modulus_spread = std::max(cal.modulus_spread, std::abs(cal.moduli[i] - mod) / mod);
        cal.phase_spread = std::max(cal.phase_spread, std::abs(std::remainder(cal.phases[i] - phase, 2 * std::numbers::pi)));
        const double ratio = mod * mod / (cal.moduli[i] * cal.moduli[i]);
        cal.unitarity_defect = std::max(cal.unitarity_defect, std::abs(ratio - 1.0));
    }
    if (!(cal.modulus_spread <= 1e-6) || !(cal.phase_spread <= 1e-4))
        throw CalibrationError("calibrate_prefactor: no constant reaches unitarity; |rho| = {" +
                               num(cal.moduli[0]) + ", " + num(cal.moduli[1]) + ", " +
                               num(cal.moduli[2]) + "}, phases = {" + num(cal.phases[0]) +
                               ", " + num(cal.phases[1]) + ", " + num(cal.phases[2]) + "}");
    return cal;
}

}  // namespace

const Calibration& calibrate_prefactor(const MagneticParams& p, const TruncationConfig& cfg) {
    static std::mutex mu;
    static std::map<std::tuple<double, double, int, int>, std::unique_ptr<Slot>> cache;
    Slot* slot;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto& s = cache[{p.alpha(), p.b0(), cfg.k_max, cfg.m_max}];
        if (!s) s = std::make_unique<Slot>();
        slot = s.get();
    }
    // A failed measurement propagates its exception; call_once then lets the
    // next caller retry.
    std::call_once(slot->once, [&] { slot->value = measure(p, cfg); });
    return slot->value;
}

}  // namespace magflow
