#pragma once
// Flat key-value configuration documents: `key = value` lines, optional
// `[section]` headers flattening to "section.key", '#' or ';' comments.
// Typed accessors parse scalars and comma-separated number lists and raise
// ConfigError with the offending key in the message.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbm {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace detail

struct ConfigDoc {
    std::map<std::string, std::string> kv; // "section.key" or bare "key"
    std::vector<std::string> order;        // first-seen key order

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    }

    void set(const std::string& key, const std::string& value) {
        if (!kv.count(key)) order.push_back(key);
        kv[key] = value;
    }
};

inline ConfigDoc parse_config_text(const std::string& text) {
    ConfigDoc doc;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty section name");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = detail::trim(s.substr(0, eq));
        std::string value = detail::trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        if (!section.empty()) key = section + "." + key;
        if (doc.has(key))
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        doc.set(key, value);
    }
    return doc;
}

inline double config_parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v +
                          "' as a real number");
    }
}

inline std::int64_t config_parse_int(const std::string& key,
                                     const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v +
                          "' as an integer");
    }
}

inline std::uint64_t config_parse_u64(const std::string& key,
                                      const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size() || v.find('-') != std::string::npos)
            throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + v +
                          "' as an unsigned integer");
    }
}

inline bool config_parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as a boolean");
}

inline std::vector<double> config_parse_list(const std::string& key,
                                             const std::string& v) {
    std::vector<double> out;
    std::string cell;
    std::istringstream in(v);
    while (std::getline(in, cell, ',')) {
        cell = detail::trim(cell);
        if (cell.empty())
            throw ConfigError("config key '" + key + "': empty list entry");
        out.push_back(config_parse_double(key, cell));
    }
    if (out.empty())
        throw ConfigError("config key '" + key + "': empty list");
    return out;
}

} // namespace sbm
