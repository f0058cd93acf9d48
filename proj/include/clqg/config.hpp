#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "clqg/gauge.hpp"
#include "clqg/lattice.hpp"

// Flat key=value experiment configuration with typed access and a stable
// content hash. '#' starts a comment; keys are free-form dotted names.

namespace clqg::harness {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class Config {
  public:
    static Config from_string(const std::string& text) {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": expected key = value");
                continue;
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) +
                                               ": empty key");
            if (cfg.values_.count(key))
                throw ConfigError("config: duplicate key '" + key + "'");
            cfg.values_[key] = value;
        }
        if (cfg.get_int("version", 1) != 1)
            throw ConfigError("config: unsupported version (expected 1)");
        return cfg;
    }

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str());
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
        return it->second;
    }
    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_real(const std::string& key) const { return parse_real(key, get_string(key)); }
    double get_real(const std::string& key, double fallback) const {
        return has(key) ? get_real(key) : fallback;
    }

    long long get_int(const std::string& key) const {
        const auto s = get_string(key);
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' is not an integer: " + s);
        }
    }
    long long get_int(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    std::uint64_t get_u64(const std::string& key) const {
        const auto s = get_string(key);
        try {
            std::size_t pos = 0;
            const std::uint64_t v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' is not a 64-bit seed: " + s);
        }
    }
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? get_u64(key) : fallback;
    }

    std::vector<double> get_real_list(const std::string& key) const {
        std::vector<double> out;
        std::istringstream in(get_string(key));
        std::string tok;
        while (std::getline(in, tok, ',')) out.push_back(parse_real(key, trim(tok)));
        if (out.empty()) throw ConfigError("config: key '" + key + "' is an empty list");
        return out;
    }
    std::vector<double> get_real_list(const std::string& key,
                                      const std::vector<double>& fallback) const {
        return has(key) ? get_real_list(key) : fallback;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    // Canonical serialization (sorted keys) and its FNV-1a hash.
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
        return out;
    }
    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const char c : canonical()) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    // "rect x0 y0 w h" or "rect ... + rect ..." for polyomino unions.
    lattice::Shape domain_shape() const {
        const std::string spec = get_string("domain", "rect 0 0 1 1");
        lattice::Shape shape;
        std::istringstream in(spec);
        std::string word;
        while (in >> word) {
            if (word == "+") continue;
            if (word != "rect")
                throw ConfigError("config: domain pieces must start with 'rect': " + spec);
            double x0, y0, w, h;
            if (!(in >> x0 >> y0 >> w >> h) || w <= 0.0 || h <= 0.0)
                throw ConfigError("config: malformed rect in domain: " + spec);
            shape.boxes.push_back(lattice::Rect{x0, y0, w, h});
        }
        if (shape.boxes.empty()) throw ConfigError("config: empty domain: " + spec);
        return shape;
    }

    // Gauge record {kind, theta, c, gamma_scale} or inline knots
    // "t1:psi1, t2:psi2, ...". `prefix` is "gauge" or "gauge2".
    gauge::GaugeTriple gauge_spec(const std::string& prefix) const {
        const std::string kind = get_string(prefix + ".kind", "parametric");
        const double scale = get_real(prefix + ".gamma_scale", 1.0);
        const double t_min = get_real(prefix + ".t_min_monotone", 0.0);
        const bool force = get_int(prefix + ".force", 0) != 0;
        if (kind == "parametric") {
            gauge::ParametricPsi psi{get_real(prefix + ".theta"), get_real(prefix + ".c", 1.0)};
            return gauge::GaugeTriple(psi, scale, t_min, force);
        }
        if (kind == "tabulated") {
            gauge::TabulatedPsi tab;
            std::istringstream in(get_string(prefix + ".knots"));
            std::string tok;
            while (std::getline(in, tok, ',')) {
                const auto colon = tok.find(':');
                if (colon == std::string::npos)
                    throw ConfigError("config: knot entries must be t:psi pairs");
                tab.t.push_back(parse_real(prefix, trim(tok.substr(0, colon))));
                tab.psi.push_back(parse_real(prefix, trim(tok.substr(colon + 1))));
            }
            return gauge::GaugeTriple(tab, scale, t_min, force);
        }
        throw ConfigError("config: unknown gauge kind '" + kind + "'");
    }

  private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }
    static double parse_real(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' is not a number: " + s);
        }
    }

    std::map<std::string, std::string> values_;
};

} // namespace clqg::harness
