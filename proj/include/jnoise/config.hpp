#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "jnoise/core.hpp"

namespace jnoise {

// Flat `key = value` config (a TOML-compatible subset: one scalar per line,
// '#' comments). Calibrated thresholds persist between a calibrate run and
// the runs that apply them.
class KvConfig {
public:
    KvConfig() = default;

    static KvConfig parse(std::istream& in) {
        KvConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                if (b == std::string::npos) return std::string();
                const auto e = s.find_last_not_of(" \t\r");
                return s.substr(b, e - b + 1);
            };
            const std::string t = trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ParseError("config: line " + std::to_string(lineno) + " has no '='");
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (key.empty()) throw ParseError("config: empty key on line " + std::to_string(lineno));
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                value = value.substr(1, value.size() - 2);
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static KvConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open " + path.string());
        try {
            return parse(in);
        } catch (const ParseError& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key) const {
        const std::string s = get_string(key);
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ConfigError("config: key '" + key + "' is not a number");
        return v;
    }

    long long get_int(const std::string& key) const {
        const std::string s = get_string(key);
        long long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ConfigError("config: key '" + key + "' is not an integer");
        return v;
    }

    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }
    long long get_int_or(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }
    std::string get_string_or(const std::string& key, std::string fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set(const std::string& key, double value) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, value);
        values_[key] = std::string(buf, res.ptr);
    }
    void set(const std::string& key, long long value) { values_[key] = std::to_string(value); }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("config: cannot open " + path.string() + " for writing");
        for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
        if (!out) throw ConfigError("config: write failed for " + path.string());
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace jnoise
