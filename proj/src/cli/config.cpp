#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "magflow/cli.hpp"
#include "magflow/errors.hpp"

namespace magflow::cli {

MagneticParams RunConfig::params() const { return MagneticParams(alpha, b0); }

std::vector<double> RunConfig::sigmas() const {
    if (!sigma_list.empty()) return sigma_list;
    const double mu = params().mu();
    return {0.0, mu / 2, mu};
}

std::vector<double> RunConfig::times(const std::vector<double>& default_times_b0) const {
    if (!t_list.empty()) return t_list;
    std::vector<double> t;
    for (double v : default_times_b0) t.push_back(v / b0);
    return t;
}

void RunConfig::validate() const {
    const MagneticParams p = params();
    trunc.validate();
    grid.validate();
    if (!(grid.r_min > 0)) throw ConfigError("r_min must be positive");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (route != "spectral" && route != "kernel" && route != "both")
        throw ConfigError("route must be spectral, kernel or both");
    for (double s : sigma_list)
        if (!(s >= 0) || s > p.mu() + 1e-12)
            throw ConfigError("sigma " + num(s) + " outside [0, mu] with mu = " + num(p.mu()));
    for (double t : t_list)
        if (!std::isfinite(t)) throw ConfigError("t values must be finite");
    if (!(gauss_a > 0)) throw ConfigError("gauss_a must be positive");
    if (out_radii < 1 || out_angles < 1 || !(out_r_max > 0)) throw ConfigError("output grid must be nonempty");
    if (!(x.r >= 0) || !(y.r >= 0)) throw ConfigError("kernel points need nonnegative radii");
}

namespace {

int as_int(const std::string& key, const std::string& v) {
    const double d = parse_expr(v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(key + " must be an integer");
    return int(d);
}

std::pair<double, double> as_pair(const std::string& key, const std::string& v) {
    const auto l = parse_list(v);
    if (l.size() != 2) throw ConfigError(key + " needs two comma-separated values");
    return {l[0], l[1]};
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"alpha", [](RunConfig& c, const std::string& v) { c.alpha = parse_expr(v); }},
        {"b0", [](RunConfig& c, const std::string& v) { c.b0 = parse_expr(v); }},
        {"k_max", [](RunConfig& c, const std::string& v) { c.trunc.k_max = as_int("k_max", v); }},
        {"m_max", [](RunConfig& c, const std::string& v) { c.trunc.m_max = as_int("m_max", v); }},
        {"quad_nodes", [](RunConfig& c, const std::string& v) { c.trunc.quad_nodes = as_int("quad_nodes", v); }},
        {"tail_tol", [](RunConfig& c, const std::string& v) { c.trunc.tail_tol = parse_expr(v); }},
        {"time_guard", [](RunConfig& c, const std::string& v) { c.trunc.time_guard = parse_expr(v); }},
        {"n_radii", [](RunConfig& c, const std::string& v) { c.grid.n_radii = as_int("n_radii", v); }},
        {"r_min", [](RunConfig& c, const std::string& v) { c.grid.r_min = parse_expr(v); }},
        {"r_max", [](RunConfig& c, const std::string& v) { c.grid.r_max = parse_expr(v); }},
        {"n_angles", [](RunConfig& c, const std::string& v) { c.grid.n_angles = as_int("n_angles", v); }},
        {"t", [](RunConfig& c, const std::string& v) { c.t_list = parse_list(v); }},
        {"sigma", [](RunConfig& c, const std::string& v) { c.sigma_list = parse_list(v); }},
        {"out", [](RunConfig& c, const std::string& v) { c.out = v; }},
        {"format", [](RunConfig& c, const std::string& v) { c.format = v; }},
        {"jobs", [](RunConfig& c, const std::string& v) { c.jobs = as_int("jobs", v); }},
        {"route", [](RunConfig& c, const std::string& v) { c.route = v; }},
        {"gauss_a", [](RunConfig& c, const std::string& v) { c.gauss_a = parse_expr(v); }},
        {"x0", [](RunConfig& c, const std::string& v) { std::tie(c.x0, c.y0) = as_pair("x0", v); }},
        {"out_radii", [](RunConfig& c, const std::string& v) { c.out_radii = as_int("out_radii", v); }},
        {"out_angles", [](RunConfig& c, const std::string& v) { c.out_angles = as_int("out_angles", v); }},
        {"out_r_max", [](RunConfig& c, const std::string& v) { c.out_r_max = parse_expr(v); }},
        {"x", [](RunConfig& c, const std::string& v) { std::tie(c.x.r, c.x.theta) = as_pair("x", v); }},
        {"y", [](RunConfig& c, const std::string& v) { std::tie(c.y.r, c.y.theta) = as_pair("y", v); }},
    };
    return m;
}

// JSON scalar -> the text form accepted by the setters.
std::string scalar_text(const std::string& key, const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw ConfigError("config key '" + key + "': expected a number or string");
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, value);
}

void apply_json(RunConfig& cfg, const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");
    for (const auto& [key, v] : doc.items()) {
        std::string text;
        if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i].is_array() || v[i].is_object()) throw ConfigError("config key '" + key + "': nested value");
                text += (i ? "," : "") + scalar_text(key, v[i]);
            }
        } else {
            text = scalar_text(key, v);
        }
        apply_setting(cfg, key, text);
    }
}

}  // namespace magflow::cli
