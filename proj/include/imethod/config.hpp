#pragma once

// Flat "key = value" experiment configuration. '#' starts a comment; lists are
// comma-separated. Missing keys keep their defaults, unknown keys are errors.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "imethod/exponents.hpp"
#include "imethod/functionals.hpp"
#include "imethod/integrator.hpp"
#include "imethod/spectral.hpp"

namespace imethod {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    EquationParams params{1, 3.0, Sign::defocusing};
    double s = 0.9;
    BoxGrid grid{1, 50.0, 512};
    SolverConfig solver{};
    std::vector<double> N_list{8, 16, 32, 64};
    std::vector<double> sigma_list{0.02, 0.01, 0.005, 0.0025};
    double lambda = 1.0;
    double a = 0.5;  // N = sigma^-a
    std::uint64_t seed = 1;
    double radius_R = 0.0;  // 0: twice the initial H^s norm
    std::string output_path;
    /// power as written in the file, for exact rational use
    std::string power_text = "3";

    void validate() const {
        params.validate();
        grid.validate();
        solver.validate(grid);
        if (!(s > 0.0 && s <= 1.0)) throw ConfigError("s must lie in (0, 1]");
        if (N_list.empty()) throw ConfigError("N_list must be nonempty");
        if (sigma_list.empty()) throw ConfigError("sigma_list must be nonempty");
        for (double N : N_list)
            if (!(N >= 1.0)) throw ConfigError("N_list entries must be >= 1");
        for (double sg : sigma_list)
            if (!(sg >= 0.0)) throw ConfigError("sigma_list entries must be >= 0");
        if (!(lambda >= 1.0)) throw ConfigError("lambda must be >= 1");
        if (!(a > 0.0) || !(a * (1.0 - s) < 1.0)) throw ConfigError("a must satisfy 0 < a and a (1 - s) < 1");
        if (!(radius_R >= 0.0)) throw ConfigError("radius_R must be >= 0");
    }
};

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{"dim",     "power",      "sign",  "s",    "box_length",
                                               "points",  "dt",         "t_end", "sample_every",
                                               "N_list",  "sigma_list", "lambda", "a",   "seed",
                                               "radius_R"};
    return keys;
}

namespace detail {

inline std::string trim(const std::string& v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = v.find_last_not_of(" \t\r");
    return v.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
    }
}

inline long long parse_integer(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: '" + text + "'");
    }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

/// Shortest text that reads back to the same double.
inline std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + shortest(values[i]);
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>") {
    ExperimentConfig cfg;
    std::map<std::string, std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        bool known = false;
        for (const auto& k : config_keys()) known = known || k == key;
        if (!known) throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (seen.count(key)) throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        seen[key] = val;
    }
    auto get = [&](const char* key) -> const std::string* {
        auto it = seen.find(key);
        return it == seen.end() ? nullptr : &it->second;
    };
    if (auto v = get("dim")) cfg.params.dim = static_cast<int>(detail::parse_integer("dim", *v));
    if (auto v = get("power")) {
        try {
            cfg.params.power = to_double(parse_rational(*v));  // "2.5" or "7/3"
        } catch (const std::invalid_argument&) {
            cfg.params.power = detail::parse_double("power", *v);
        }
        cfg.power_text = *v;
    }
    if (auto v = get("sign")) {
        try {
            cfg.params.sign = parse_sign(*v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config key 'sign': ") + e.what());
        }
    }
    if (auto v = get("s")) cfg.s = detail::parse_double("s", *v);
    cfg.grid.dim = cfg.params.dim;
    if (auto v = get("box_length")) cfg.grid.length = detail::parse_double("box_length", *v);
    if (auto v = get("points")) cfg.grid.points = static_cast<int>(detail::parse_integer("points", *v));
    if (auto v = get("dt")) cfg.solver.dt = detail::parse_double("dt", *v);
    if (auto v = get("t_end")) cfg.solver.t_end = detail::parse_double("t_end", *v);
    if (auto v = get("sample_every"))
        cfg.solver.sample_every = static_cast<int>(detail::parse_integer("sample_every", *v));
    if (auto v = get("N_list")) cfg.N_list = detail::parse_list("N_list", *v);
    if (auto v = get("sigma_list")) cfg.sigma_list = detail::parse_list("sigma_list", *v);
    if (auto v = get("lambda")) cfg.lambda = detail::parse_double("lambda", *v);
    if (auto v = get("a")) cfg.a = detail::parse_double("a", *v);
    if (auto v = get("seed")) {
        const long long seed = detail::parse_integer("seed", *v);
        if (seed < 0) throw ConfigError("config key 'seed': must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (auto v = get("radius_R")) cfg.radius_R = detail::parse_double("radius_R", *v);
    try {
        cfg.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(source + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in, path);
}

/// The power as an exact rational: the text from the file when it still matches
/// params.power, otherwise the binary value of the double.
inline Rational exact_power(const ExperimentConfig& cfg) {
    try {
        const Rational p = parse_rational(cfg.power_text);
        if (to_double(p) == cfg.params.power) return p;
    } catch (const std::invalid_argument&) {
    }
    return Rational(cfg.params.power);
}

/// The config as "key = value" lines, in the canonical key order.
inline std::vector<std::string> config_lines(const ExperimentConfig& cfg) {
    std::vector<std::string> out;
    auto put = [&](const std::string& key, const auto& value) {
        std::ostringstream line;
        if constexpr (std::is_same_v<std::decay_t<decltype(value)>, double>)
            line << key << " = " << detail::shortest(value);
        else
            line << key << " = " << value;
        out.push_back(line.str());
    };
    put("dim", cfg.params.dim);
    put("power", to_string(exact_power(cfg)));
    put("sign", to_string(cfg.params.sign));
    put("s", cfg.s);
    put("box_length", cfg.grid.length);
    put("points", cfg.grid.points);
    put("dt", cfg.solver.dt);
    put("t_end", cfg.solver.t_end);
    put("sample_every", cfg.solver.sample_every);
    put("N_list", detail::format_list(cfg.N_list));
    put("sigma_list", detail::format_list(cfg.sigma_list));
    put("lambda", cfg.lambda);
    put("a", cfg.a);
    put("seed", cfg.seed);
    put("radius_R", cfg.radius_R);
    return out;
}

}  // namespace imethod
