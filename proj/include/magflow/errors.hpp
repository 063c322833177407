#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace magflow {

/// Short %g rendering for error messages (std::to_string prints 1e-17 as 0.000000).
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Domain violations (nu < 0, x <= 0 for log_gamma, r <= 0 for residuals, ...)
// are reported as std::domain_error. The types below cover the
// numerical failure modes that callers are expected to handle.

/// B0*t lies within time_guard of a multiple of pi.
class SingularTimeError : public std::runtime_error {
public:
    SingularTimeError(const std::string& what, double distance)
        : std::runtime_error(what), distance_(distance) {}
    /// Distance of B0*t from pi*Z.
    double distance() const noexcept { return distance_; }

private:
    double distance_;
};

/// The angular series tail cannot be brought under tail_tol with the given k_max.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double est_tail)
        : std::runtime_error(what), est_tail_(est_tail) {}
    double est_tail() const noexcept { return est_tail_; }

private:
    double est_tail_;
};

/// No constant makes the raw kernel unitary within tolerance.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The eigenbasis cutoff loses more mass than the Parseval tolerance allows.
class CutoffError : public std::runtime_error {
public:
    CutoffError(const std::string& what, double defect)
        : std::runtime_error(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

/// A quadrature did not resolve its integrand.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameters (integer flux, b0 <= 0, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace magflow
