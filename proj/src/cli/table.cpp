#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "magflow/cli.hpp"
#include "magflow/errors.hpp"

namespace magflow::cli {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string csv_cell(const Cell& c) {
    char buf[40];
    if (const double* d = std::get_if<double>(&c)) {
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    if (const long long* i = std::get_if<long long>(&c)) {
        std::snprintf(buf, sizeof buf, "%lld", *i);
        return buf;
    }
    if (const bool* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    return csv_field(std::get<std::string>(c));
}

nlohmann::ordered_json json_cell(const Cell& c) {
    return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

}  // namespace

void write_csv(const Report& r, std::ostream& os) {
    for (std::size_t j = 0; j < r.table.columns.size(); ++j) os << (j ? "," : "") << csv_field(r.table.columns[j]);
    os << '\n';
    for (const auto& row : r.table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << csv_cell(row[j]);
        os << '\n';
    }
    for (const auto& [key, value] : r.summary) os << "# " << key << '=' << csv_cell(value) << '\n';
}

void write_json(const Report& r, std::ostream& os) {
    nlohmann::ordered_json doc;
    doc["columns"] = r.table.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t j = 0; j < row.size(); ++j) obj[r.table.columns[j]] = json_cell(row[j]);
        doc["rows"].push_back(std::move(obj));
    }
    doc["summary"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : r.summary) doc["summary"][key] = json_cell(value);
    os << doc.dump(2) << '\n';
}

void write_report(const Report& r, const std::string& format, std::ostream& os) {
    if (format == "csv")
        write_csv(r, os);
    else if (format == "json")
        write_json(r, os);
    else
        throw ConfigError("format must be csv or json");
}

}  // namespace magflow::cli
