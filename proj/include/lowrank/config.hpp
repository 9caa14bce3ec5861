#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace detail {

inline std::string trim_ws(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace detail

// Config file loader. Two formats, auto-detected: if the first
// non-whitespace character is '{' the file is parsed as a flat JSON object,
// otherwise as "key = value" lines ('#' starts a comment). Values are kept
// as strings; the CLI layer does the typed conversion so that its
// flag-precedence logic is uniform.
inline std::map<std::string, std::string> parse_config_file(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::map<std::string, std::string> out;
    const std::string lead = detail::trim_ws(text);
    if (!lead.empty() && lead.front() == '{') {
        nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw parameter_error("config file " + path.string() +
                                  " is not a JSON object");
        for (const auto& [key, val] : j.items()) {
            if (val.is_string())
                out[key] = val.get<std::string>();
            else if (val.is_boolean())
                out[key] = val.get<bool>() ? "true" : "false";
            else if (val.is_number() || val.is_null())
                out[key] = val.is_null() ? "" : val.dump();
            else
                throw parameter_error("config key '" + key + "' in " + path.string() +
                                      " has a non-scalar value");
        }
        return out;
    }

    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim_ws(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parameter_error("config file " + path.string() + " line " +
                                  std::to_string(lineno) + ": expected key=value");
        const std::string key = detail::trim_ws(line.substr(0, eq));
        const std::string val = detail::trim_ws(line.substr(eq + 1));
        if (key.empty())
            throw parameter_error("config file " + path.string() + " line " +
                                  std::to_string(lineno) + ": empty key");
        out[key] = val;
    }
    return out;
}

} // namespace lowrank
