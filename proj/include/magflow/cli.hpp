#pragma once

// Command layer behind the `magflow` executable. Commands take a validated
// RunConfig and return a Report; the executable only parses flags, prints,
// and maps exceptions to exit codes.

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "magflow/decay.hpp"
#include "magflow/kernels.hpp"
#include "magflow/spectrum.hpp"

namespace magflow::cli {

enum ExitCode : int { exit_ok = 0, exit_verification_failed = 1, exit_usage = 2 };

/// Arithmetic on numbers and `pi`: + - * / parentheses, unary sign.
/// "pi/4", "3*pi/2 - 0.1", "1e-3". ConfigError on anything else.
double parse_expr(const std::string& text);

/// Comma-separated list of parse_expr items.
std::vector<double> parse_list(const std::string& text);

struct RunConfig {
    double alpha = 0.5;
    double b0 = 1.0;
    TruncationConfig trunc;
    GridSpec grid;
    std::vector<double> t_list;      // empty: command default
    std::vector<double> sigma_list;  // empty: {0, mu/2, mu}
    std::string out;                 // empty: stdout
    std::string format = "csv";
    int jobs = 1;

    // evolve
    std::string route = "both";  // spectral | kernel | both
    double gauss_a = 2.0;
    double x0 = 2.5, y0 = 0.0;  // Gaussian centre; off-origin so both routes are L2-accurate
    int out_radii = 8;
    int out_angles = 4;
    double out_r_max = 4.0;

    // kernel-eval
    PolarPoint x{1.0, 0.0};
    PolarPoint y{1.5, 0.7};

    MagneticParams params() const;  // ConfigError for integer flux etc.
    void validate() const;          // ConfigError

    std::vector<double> sigmas() const;
    std::vector<double> times(const std::vector<double>& default_times_b0) const;  // defaults scaled by 1/b0
};

/// Applies a flat JSON object (file contents) to cfg. Unknown keys, wrong
/// types and malformed JSON raise ConfigError.
void apply_json(RunConfig& cfg, const std::string& json_text);

/// Key/value override from the command line, same keys as the JSON file.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Report {
    Table table;
    std::vector<std::pair<std::string, Cell>> summary;
    int exit_code = exit_ok;
};

/// CSV: header row, 17 significant digits, summary as trailing `# key=value` lines.
void write_csv(const Report& r, std::ostream& os);
/// JSON: {"columns": [...], "rows": [{...}], "summary": {...}}; doubles round-trip.
void write_json(const Report& r, std::ostream& os);
void write_report(const Report& r, const std::string& format, std::ostream& os);

Report cmd_spectrum(const RunConfig& cfg);
Report cmd_verify(const RunConfig& cfg);
Report cmd_decay_scan(const RunConfig& cfg);
Report cmd_evolve(const RunConfig& cfg);
Report cmd_kernel_eval(const RunConfig& cfg);
Report cmd_poisson_check(const RunConfig& cfg);

/// Full entry point: argv parsing, config file, dispatch, output. Returns
/// the process exit code. Diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace magflow::cli
