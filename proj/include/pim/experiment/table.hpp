#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pim/core/config.hpp"

namespace pim::exp {

using Json = nlohmann::ordered_json;
using Value = std::variant<std::int64_t, double, std::string, bool>;

// One row per grid point. `extra` holds JSON-only fields (per-launch cycles, benchmark details).
struct Table {
    std::string experiment;
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
    std::vector<Json> extra;

    void add(std::vector<Value> row, Json more = Json::object()) {
        if (row.size() != columns.size())
            throw std::logic_error(experiment + ": row has " + std::to_string(row.size()) + " cells for " +
                                   std::to_string(columns.size()) + " columns");
        rows.push_back(std::move(row));
        extra.push_back(std::move(more));
    }
};

// Shortest text that reads back to the same double.
inline std::string format_value(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string format_value(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::string>) return x;
            else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
            else if constexpr (std::is_same_v<T, double>) return format_value(x);
            else return std::to_string(x);
        },
        v);
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_field(t.columns[i]);
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(format_value(row[i]));
        out += "\n";
    }
    return out;
}

inline Json to_json(const Value& v) {
    return std::visit([](const auto& x) { return Json(x); }, v);
}

// Everything in the CSV plus the system configuration, run parameters and per-row extras.
inline Json to_json(const Table& t, const SystemConfig& sys, const Json& params, const std::string& generated_at) {
    Json j;
    j["experiment"] = t.experiment;
    j["generated_at"] = generated_at;
    j["parameters"] = params;
    Json cfg = Json::object();
    std::istringstream in(serialize(sys));
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = std::move(cfg);
    j["columns"] = t.columns;
    Json rows = Json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        Json row = Json::object();
        for (std::size_t c = 0; c < t.columns.size(); ++c) row[t.columns[c]] = to_json(t.rows[r][c]);
        for (const auto& [k, v] : t.extra[r].items()) row[k] = v;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// Writes <dir>/<experiment>.csv and <dir>/<experiment>.json.
inline void write_outputs(const std::filesystem::path& dir, const Table& t, const SystemConfig& sys, const Json& params,
                          const std::string& generated_at) {
    write_file(dir / (t.experiment + ".csv"), to_csv(t));
    write_file(dir / (t.experiment + ".json"), to_json(t, sys, params, generated_at).dump(2) + "\n");
}

}  // namespace pim::exp
