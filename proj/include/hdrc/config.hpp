#pragma once

// Run configuration for the command-line tool: a flat key = value file
// ('#' starts a comment) and/or the matching --flags. Unknown keys are
// rejected, values are validated where they land.

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdrc/allocation.hpp"
#include "hdrc/fading.hpp"

namespace hdrc {

enum class ProtocolChoice { df, cf, hybrid, all };

struct RunConfig {
    PowerBudget budget;
    FadingModel fading;  // all links default to fixed amplitude 1
    IntegratorSpec integrator;
    double grid_s2_max = 10.0;
    int grid_points = 101;
    ProtocolChoice protocol = ProtocolChoice::all;
};

class config_error : public std::runtime_error {
  public:
    config_error(const std::string& key, const std::string& why)
        : std::runtime_error("config key '" + key + "': " + why), key(key) {}
    std::string key;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error(key, "expected a number, got '" + value + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error(key, "expected an integer, got '" + value + "'");
    }
}

/// Empirical support syntax: "amp:prob,amp:prob,..."
inline std::vector<std::pair<double, double>> parse_atoms(const std::string& key,
                                                          const std::string& value) {
    std::vector<std::pair<double, double>> atoms;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw config_error(key, "expected amp:prob pairs, got '" + item + "'");
        atoms.emplace_back(parse_double(key, trim(item.substr(0, colon))),
                           parse_double(key, trim(item.substr(colon + 1))));
    }
    if (atoms.empty()) throw config_error(key, "empty empirical support");
    return atoms;
}

inline void apply_link_key(LinkFading& link, const std::string& key, const std::string& field,
                           const std::string& value) {
    if (field == "kind") {
        if (value == "rayleigh") link.kind = FadingKind::rayleigh;
        else if (value == "fixed") link.kind = FadingKind::fixed;
        else if (value == "empirical") link.kind = FadingKind::empirical;
        else throw config_error(key, "expected rayleigh|fixed|empirical, got '" + value + "'");
    } else if (field == "param") {
        if (value.find(':') != std::string::npos) {
            link.atoms = parse_atoms(key, value);
        } else {
            link.param = parse_double(key, value);
        }
    } else {
        throw config_error(key, "unknown key");
    }
}

}  // namespace detail

/// Apply one key = value setting; throws config_error naming the key.
inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;
    if (key == "p1_bar") {
        cfg.budget.p1_bar = parse_double(key, value);
        if (!(cfg.budget.p1_bar > 0.0)) throw config_error(key, "must be positive");
    } else if (key == "p2_bar") {
        cfg.budget.p2_bar = parse_double(key, value);
        if (!(cfg.budget.p2_bar > 0.0)) throw config_error(key, "must be positive");
    } else if (key.rfind("fading.", 0) == 0) {
        const auto rest = key.substr(7);
        const auto dot = rest.find('.');
        if (dot == std::string::npos) throw config_error(key, "unknown key");
        const auto link = rest.substr(0, dot), field = rest.substr(dot + 1);
        if (link == "a31") detail::apply_link_key(cfg.fading.a31, key, field, value);
        else if (link == "a21") detail::apply_link_key(cfg.fading.a21, key, field, value);
        else if (link == "a32") detail::apply_link_key(cfg.fading.a32, key, field, value);
        else throw config_error(key, "unknown link (use a31, a21 or a32)");
    } else if (key == "integrator.kind") {
        if (value == "mc") cfg.integrator.kind = IntegratorSpec::Kind::monte_carlo;
        else if (value == "quad") cfg.integrator.kind = IntegratorSpec::Kind::quadrature;
        else if (value == "exact") cfg.integrator.kind = IntegratorSpec::Kind::exact;
        else throw config_error(key, "expected mc|quad|exact, got '" + value + "'");
    } else if (key == "integrator.samples") {
        const long long v = parse_int(key, value);
        if (v < 1 || v > 100000000) throw config_error(key, "out of range");
        cfg.integrator.samples = static_cast<int>(v);
    } else if (key == "integrator.seed") {
        cfg.integrator.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "grid.s2_max") {
        cfg.grid_s2_max = parse_double(key, value);
        if (!(cfg.grid_s2_max > 0.0)) throw config_error(key, "must be positive");
    } else if (key == "grid.points") {
        const long long v = parse_int(key, value);
        if (v < 2 || v > 10000000) throw config_error(key, "need 2..10000000");
        cfg.grid_points = static_cast<int>(v);
    } else if (key == "protocol") {
        if (value == "df") cfg.protocol = ProtocolChoice::df;
        else if (value == "cf") cfg.protocol = ProtocolChoice::cf;
        else if (value == "hybrid") cfg.protocol = ProtocolChoice::hybrid;
        else if (value == "all") cfg.protocol = ProtocolChoice::all;
        else throw config_error(key, "expected df|cf|hybrid|all, got '" + value + "'");
    } else {
        throw config_error(key, "unknown key");
    }
}

/// Load a flat key = value config file into cfg.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        apply_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
}

/// Final cross-field validation; throws config_error on the offending key.
inline void validate(const RunConfig& cfg) {
    try {
        check_link(cfg.fading.a31, "fading.a31");
    } catch (const std::exception& e) {
        throw config_error("fading.a31.param", e.what());
    }
    try {
        check_link(cfg.fading.a21, "fading.a21");
    } catch (const std::exception& e) {
        throw config_error("fading.a21.param", e.what());
    }
    try {
        check_link(cfg.fading.a32, "fading.a32");
    } catch (const std::exception& e) {
        throw config_error("fading.a32.param", e.what());
    }
}

}  // namespace hdrc
