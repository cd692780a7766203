#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "bubble/errors.hpp"
#include "bubble/io.hpp"
#include "bubble/version.hpp"
#include "json.hpp"

namespace bubbletk {

/// Effective settings of one command invocation. The hash makes runs
/// comparable: equal hash means equal configuration means byte-identical
/// output files.
struct RunMeta {
    std::string command;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> params;

    void set(const std::string& key, const std::string& value) { params[key] = value; }
    void set(const std::string& key, double value) { params[key] = bubble::format_double(value); }
    void set(const std::string& key, int value) { params[key] = std::to_string(value); }
    void set(const std::string& key, std::uint64_t value) { params[key] = std::to_string(value); }

    std::string config_hash() const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](const std::string& s) {
            for (unsigned char c : s) {
                h ^= c;
                h *= 1099511628211ull;
            }
        };
        mix(command);
        for (const auto& [k, v] : params) {
            mix("|");
            mix(k);
            mix("=");
            mix(v);
        }
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
        return hex;
    }

    std::vector<std::string> header_lines() const {
        std::vector<std::string> lines;
        lines.push_back(std::string("# bubbletk ") + bubble::kVersion);
        lines.push_back("# command: " + command);
        lines.push_back("# seed: " + std::to_string(seed));
        lines.push_back("# config: " + config_hash());
        for (const auto& [k, v] : params) lines.push_back("# " + k + " = " + v);
        return lines;
    }

    nlohmann::json to_json() const {
        nlohmann::json meta;
        meta["version"] = bubble::kVersion;
        meta["command"] = command;
        meta["seed"] = seed;
        meta["config_hash"] = config_hash();
        meta["params"] = params;
        return meta;
    }
};

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw bubble::io_error("cannot create directory: " + dir);
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw bubble::io_error("cannot write file: " + path);
    return out;
}

/// CSV with the metadata comment header.
inline void write_csv(const std::string& path, const RunMeta& meta,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
    auto out = open_output(path);
    for (const auto& line : meta.header_lines()) out << line << "\n";
    for (std::size_t j = 0; j < columns.size(); ++j)
        out << (j ? "," : "") << columns[j];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << "\n";
    }
}

inline void write_json(const std::string& path, const RunMeta& meta,
                       nlohmann::json body) {
    body["meta"] = meta.to_json();
    auto out = open_output(path);
    out << body.dump(2) << "\n";
}

}  // namespace bubbletk
