#include "magflow/evolve.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "magflow/errors.hpp"
#include "magflow/parallel.hpp"
#include "magflow/quadrature.hpp"
#include "magflow/specfun.hpp"

namespace magflow {

namespace {
constexpr double pi = std::numbers::pi;
constexpr std::complex<double> I(0.0, 1.0);

// 1 / binom(m + nu, m) for m = 0..M
Eigen::VectorXd inverse_binomials(double nu, int M) {
    Eigen::VectorXd v(M + 1);
    v[0] = 1.0;
    for (int m = 1; m <= M; ++m) v[m] = v[m - 1] * m / (m + nu);
    return v;
}
}  // namespace

SampledFunction gaussian(double a, const Point2& center) {
    if (!(a > 0)) throw std::domain_error("gaussian: a must be positive");
    SampledFunction f;
    const Point2 c = center;
    f.eval = [a, c](PolarPoint p) -> std::complex<double> {
        return std::exp(-a * (to_cartesian(p) - c).squaredNorm());
    };
    f.support_radius = c.norm() + std::sqrt(39.2 / a);  // e^{-39.2} < 1e-17
    f.origin = OriginBehavior::smooth;
    return f;
}

SampledFunction normalized_eigenfunction(const MagneticParams& p, ModeIndex mode) {
    SampledFunction f;
    const double inv = 1.0 / std::sqrt(norm_squared(p, mode));
    f.eval = [p, mode, inv](PolarPoint x) { return inv * eigenfunction(p, mode, x); };
    // envelope r^nu e^{-b0 r^2/4} u^m: generous radius where it is below 1e-17
    const double nu = p.order(mode.k);
    double R = 1.0;
    while (std::exp((nu + 2.0 * mode.m) * std::log(R) - p.b0() * R * R / 4.0) > 1e-17 * inv || R < 2.0) R += 0.25;
    f.support_radius = R;
    f.origin = OriginBehavior::flux_adapted;
    return f;
}

// ----------------------------------------------------- SpectralCoefficients

SpectralCoefficients::SpectralCoefficients(const MagneticParams& p, int k_max_, int m_max_)
    : params(p), k_max(k_max_), m_max(m_max_), c(Eigen::MatrixXcd::Zero(2 * k_max_ + 1, m_max_ + 1)) {
    if (k_max_ < 0 || m_max_ < 0) throw std::domain_error("SpectralCoefficients: negative cutoff");
}

double SpectralCoefficients::norm_squared() const {
    double s = 0;
    for (int k = -k_max; k <= k_max; ++k)
        for (int m = 0; m <= m_max; ++m) s += std::norm(c(k + k_max, m)) * magflow::norm_squared(params, {k, m});
    return s;
}

// ------------------------------------------------------------------ expand

namespace {

// Angular Fourier coefficient (1/N) sum_l f(r, theta_l) e^{-i k theta_l}.
std::complex<double> angular_coefficient(const SampledFunction& f, double r, int k, int n_theta) {
    std::complex<double> s = 0;
    for (int l = 0; l < n_theta; ++l) {
        const double th = 2 * pi * l / n_theta;
        s += f.eval({r, th}) * std::polar(1.0, -k * th);
    }
    return s / double(n_theta);
}

}  // namespace

double l2_norm_squared(const SampledFunction& f, const KernelQuadrature& q) {
    const auto rule = graded_legendre<double>(q.radial_nodes, 0.0, f.support_radius);
    double s = 0;
    for (int j = 0; j < rule.size(); ++j) {
        double ang = 0;
        for (int l = 0; l < q.angular_nodes; ++l)
            ang += std::norm(f.eval({rule.nodes[j], 2 * pi * l / q.angular_nodes}));
        s += rule.weights[j] * rule.nodes[j] * ang * (2 * pi / q.angular_nodes);
    }
    return s;
}

Expansion expand_report(const SampledFunction& f, const MagneticParams& p, const TruncationConfig& cfg,
                        const ExpandOptions& opt) {
    cfg.validate();
    const int K = cfg.k_max, M = cfg.m_max;
    if (opt.angular_nodes <= 2 * K) throw ConfigError("expand: angular_nodes must exceed 2 k_max");
    if (opt.radial_nodes < 2) throw ConfigError("expand: radial_nodes must be at least 2");
    const double b0 = p.b0();
    Expansion out{SpectralCoefficients(p, K, M), 0.0, 0.0};
    for (int k = -K; k <= K; ++k) {
        const double nu = p.order(k);
        // radial factor of f pulled into the weight: r^{|k|} (smooth) or r^{nu}
        const double pw = f.origin == OriginBehavior::smooth ? std::abs(k) : nu;
        const double lam = (nu + pw) / 2.0;
        const GaussRule<double>& rule = cached_gauss_laguerre(opt.radial_nodes, lam);
        const Eigen::VectorXd ib = inverse_binomials(nu, M);
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(M + 1);
        for (Eigen::Index j = 0; j < rule.size(); ++j) {
            const double u = rule.nodes[j];
            const double r = std::sqrt(2.0 * u / b0);
            if (r > f.support_radius) continue;
            const std::complex<double> fk = angular_coefficient(f, r, k, opt.angular_nodes);
            if (fk == 0.0) continue;
            // g = e^{u/2} (f_k / r^pw), P_m = L_m / binom
            const std::complex<double> g = fk * std::exp(u / 2.0 - pw * std::log(r));
            const Eigen::VectorXd L = laguerre_table(nu, M, u);
            acc += (rule.weights[j] * g) * (L.array() * ib.array()).matrix();
        }
        // int f_k R r dr = (1/b0)(2/b0)^{lam} int u^lam e^{-u} [...] du ; c = 2 pi (.) / ||V||^2
        const double pref = 2 * pi / b0 * std::pow(2.0 / b0, lam);
        for (int m = 0; m <= M; ++m) out.coefficients.c(k + K, m) = pref * acc[m] / norm_squared(p, {k, m});
    }
    KernelQuadrature q;
    q.radial_nodes = std::max(opt.radial_nodes, 200);
    q.angular_nodes = opt.angular_nodes;
    out.input_norm_squared = l2_norm_squared(f, q);
    out.parseval_defect =
        std::abs(out.input_norm_squared - out.coefficients.norm_squared()) / out.input_norm_squared;
    if (out.parseval_defect > opt.parseval_tol)
        throw CutoffError("expand: Parseval defect " + num(out.parseval_defect) +
                              " exceeds tolerance; raise k_max/m_max",
                          out.parseval_defect);
    return out;
}

SpectralCoefficients expand(const SampledFunction& f, const MagneticParams& p, const TruncationConfig& cfg,
                            const ExpandOptions& opt) {
    return expand_report(f, p, cfg, opt).coefficients;
}

SpectralCoefficients evolve_spectral(const SpectralCoefficients& c, double t) {
    SpectralCoefficients out = c;
    for (int k = -c.k_max; k <= c.k_max; ++k)
        for (int m = 0; m <= c.m_max; ++m)
            out.c(k + c.k_max, m) *= std::polar(1.0, -t * eigenvalue(c.params, {k, m}));
    return out;
}

std::complex<double> reconstruct(const SpectralCoefficients& c, PolarPoint x, std::optional<SpectralFilter> filter) {
    if (x.r == 0) return 0.0;
    const MagneticParams& p = c.params;
    const int K = c.k_max, M = c.m_max;
    const double u = p.b0() * x.r * x.r / 2;
    Eigen::VectorXd sigma = Eigen::VectorXd::Ones(M + 1);
    if (filter && M > 0)
        for (int m = 0; m <= M; ++m) sigma[m] = std::exp(-filter->strength * std::pow(double(m) / M, filter->order));
    std::complex<double> s = 0;
    for (int k = -K; k <= K; ++k) {
        const double nu = p.order(k);
        const double env = std::exp(nu * std::log(x.r) - u / 2);
        if (env == 0) continue;
        const Eigen::VectorXd L = laguerre_table(nu, M, u);
        const Eigen::VectorXd ib = inverse_binomials(nu, M);
        std::complex<double> radial = 0;
        for (int m = 0; m <= M; ++m) radial += c.c(k + K, m) * (sigma[m] * L[m] * ib[m]);
        s += std::polar(1.0, k * x.theta) * env * radial;
    }
    return s;
}

std::vector<std::complex<double>> reconstruct(const SpectralCoefficients& c, const std::vector<PolarPoint>& xs,
                                              std::optional<SpectralFilter> filter) {
    std::vector<std::complex<double>> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(reconstruct(c, x, filter));
    return out;
}

// ----------------------------------------------------------- kernel route

double AngularModes::norm_squared() const {
    double s = 0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += weights[i] * modes.col(i).squaredNorm();
    return 2 * pi * s;
}

std::complex<double> AngularModes::at(std::size_t i, double theta) const {
    std::complex<double> s = 0;
    for (int k = -k_max; k <= k_max; ++k) s += modes(k + k_max, Eigen::Index(i)) * std::polar(1.0, k * theta);
    return s;
}

void output_rule(double R, int n, Eigen::VectorXd& r, Eigen::VectorXd& w) {
    const auto rule = graded_legendre<double>(n, 0.0, R);
    r = rule.nodes;
    w = (rule.weights.array() * rule.nodes.array()).matrix();
}

int radial_nodes_needed(const SampledFunction& f, const MagneticParams& p, double t, double r_out_max,
                        const KernelQuadrature& q) {
    // Total phase swept over the input radius by e^{i beta r^2} and by the
    // Bessel factor (frequency r1 b0 / (2|sin|) in r2). The graded mapping
    // thins the interior nodes, so about one node per radian is needed.
    const double b0 = p.b0(), R = f.support_radius;
    const double s = std::abs(std::sin(b0 * t));
    const double phase = R * r_out_max * b0 / (2 * s) + b0 * R * R / (4 * std::abs(std::tan(b0 * t)));
    return std::max(q.radial_nodes, int(std::ceil(0.9 * phase)) + 60);
}

InputModes sample_input(const SampledFunction& f, int K, const KernelQuadrature& q, int radial_nodes) {
    if (q.angular_nodes <= 2 * K) throw ConfigError("kernel quadrature: angular_nodes must exceed 2 k_max");
    InputModes in;
    output_rule(f.support_radius, std::max(radial_nodes, q.radial_nodes), in.r, in.weights);
    const int n = int(in.r.size()), nt = q.angular_nodes;
    in.fk = Eigen::MatrixXcd::Zero(2 * K + 1, n);
    double total = 0, kept = 0;
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd samples(nt);
        for (int l = 0; l < nt; ++l) samples[l] = f.eval({in.r[j], 2 * pi * l / nt});
        total += in.weights[j] * samples.squaredNorm() * (2 * pi / nt);
        for (int k = -K; k <= K; ++k) {
            std::complex<double> s = 0;
            for (int l = 0; l < nt; ++l) s += samples[l] * std::polar(1.0, -k * 2 * pi * l / nt);
            in.fk(k + K, j) = s / double(nt);
        }
        kept += in.weights[j] * in.fk.col(j).squaredNorm() * 2 * pi;
    }
    in.norm_squared = total;
    // The angular series is exact once f has no content beyond k_max, so the
    // Bessel tail never enters; what must be checked is that content.
    if (total > 0 && std::abs(total - kept) > 1e-10 * total)
        throw AccuracyError("kernel quadrature: angular content of the data beyond k_max (lost fraction " +
                            num(std::abs(total - kept) / total) + ")");
    return in;
}

namespace {

// U_k(r1) for all k, given input modes; scale multiplies the raw prefactor.
Eigen::VectorXcd output_modes_at(const InputModes& in, const MagneticParams& p, double t, int K, double r1,
                                 std::complex<double> scale) {
    const double b0 = p.b0();
    const double s = std::sin(b0 * t);
    const double beta = b0 / (4.0 * std::tan(b0 * t));
    const std::complex<double> pref =
        scale * b0 * std::polar(1.0, -t * b0 * p.alpha()) / (8.0 * pi * pi * I * s);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(2 * K + 1);
    for (Eigen::Index j = 0; j < in.r.size(); ++j) {
        const double r2 = in.r[j];
        const double x = b0 * r1 * r2 / (2.0 * s);
        const Eigen::VectorXcd terms = angular_bessel_terms(p, x, K);
        const std::complex<double> wj = in.weights[j] * std::polar(1.0, beta * r2 * r2);
        acc.array() += wj * terms.array() * in.fk.col(j).array();
    }
    Eigen::VectorXcd U(2 * K + 1);
    const std::complex<double> outer = 2 * pi * pref * std::polar(1.0, beta * r1 * r1);
    for (int k = -K; k <= K; ++k) U[k + K] = outer * std::polar(1.0, -k * b0 * t) * acc[k + K];
    return U;
}

}  // namespace

AngularModes evolve_kernel_modes(const SampledFunction& f, const MagneticParams& p, double t,
                                 const TruncationConfig& cfg, const KernelQuadrature& q, std::complex<double> scale,
                                 const Eigen::VectorXd& r_out, const Eigen::VectorXd& w_out) {
    cfg.validate();
    check_time(p.b0(), t, cfg.time_guard);
    const int K = cfg.k_max;
    const InputModes in = sample_input(f, K, q, radial_nodes_needed(f, p, t, r_out.maxCoeff(), q));
    AngularModes out;
    out.k_max = K;
    out.r = r_out;
    out.weights = w_out;
    out.modes.resize(2 * K + 1, r_out.size());
    parallel_for(int(r_out.size()), q.jobs,
                 [&](int i) { out.modes.col(i) = output_modes_at(in, p, t, K, r_out[i], scale); });
    return out;
}

std::vector<std::complex<double>> evolve_kernel_scaled(const SampledFunction& f, const MagneticParams& p, double t,
                                                       const std::vector<PolarPoint>& out_points,
                                                       const TruncationConfig& cfg, const KernelQuadrature& q,
                                                       std::complex<double> scale) {
    cfg.validate();
    check_time(p.b0(), t, cfg.time_guard);
    const int K = cfg.k_max;
    double r_max = 0;
    for (const auto& x : out_points) r_max = std::max(r_max, x.r);
    const InputModes in = sample_input(f, K, q, radial_nodes_needed(f, p, t, r_max, q));
    std::vector<std::complex<double>> out(out_points.size());
    parallel_for(int(out_points.size()), q.jobs, [&](int i) {
        const Eigen::VectorXcd U = output_modes_at(in, p, t, K, out_points[i].r, scale);
        std::complex<double> s = 0;
        for (int k = -K; k <= K; ++k) s += U[k + K] * std::polar(1.0, k * out_points[i].theta);
        out[i] = s;
    });
    return out;
}

std::vector<std::complex<double>> evolve_kernel(const SampledFunction& f, const MagneticParams& p, double t,
                                                const std::vector<PolarPoint>& out_points,
                                                const TruncationConfig& cfg, const KernelQuadrature& q) {
    const std::complex<double> rho = calibrate_prefactor(p, cfg).rho;
    return evolve_kernel_scaled(f, p, t, out_points, cfg, q, rho);
}

}  // namespace magflow
