#pragma once

// Experiment configuration: a sectioned key = value text format.
//
//   [system]
//   omega = 1 GHz
//   g = 80 MHz
//   detuning_preset = delta_eq_omega
//
// Frequencies need a GHz/MHz/kHz/Hz suffix and times an ns/us/ps suffix;
// bare numbers are only accepted for counts and dimensionless keys.
// Everything is normalized to GHz and ns.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eit/error.hpp"
#include "eit/params.hpp"
#include "eit/semiclassical.hpp"

namespace eit {

enum class DetuningPreset { delta_eq_omega, delta_eq_omega_minus_shift, explicit_value };
enum class OutputFormat { csv, json, both };

inline std::string_view to_string(DetuningPreset p) {
    switch (p) {
        case DetuningPreset::delta_eq_omega: return "delta_eq_omega";
        case DetuningPreset::delta_eq_omega_minus_shift: return "delta_eq_omega_minus_shift";
        case DetuningPreset::explicit_value: return "explicit";
    }
    return "?";
}

inline std::string_view to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::csv: return "csv";
        case OutputFormat::json: return "json";
        case OutputFormat::both: return "both";
    }
    return "?";
}

struct Grid {
    double start = 0.8;
    double stop = 1.2;
    std::size_t points = 801;

    double at(std::size_t i) const {
        if (points < 2) return start;
        return start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
};

struct DynamicsConfig {
    double t_end = 400.0;
    std::optional<double> dt;
    double stride = 0.5;
    std::size_t fock_cutoff = 5;
    bool damped = false;
    double dephasing_rate = 0.0;
    bool truncation_check = true;
};

struct OracleConfig {
    double dt = 0.02;
    std::optional<double> settle;
    std::optional<double> window;
    std::size_t sample_stride = 5;
    std::size_t grid_stride = 1;  // evaluate every k-th grid point
};

struct SweepConfig {
    SystemParams params;
    Grid grid;
    std::vector<Route> routes{Route::full_eq7};
    SteadyMode steady_mode = SteadyMode::corrected_omega;
    Numerator numerator = Numerator::gamma_f;
    DetuningPreset detuning_preset = DetuningPreset::delta_eq_omega;
    OutputFormat format = OutputFormat::csv;
    DynamicsConfig dynamics;
    OracleConfig oracle;
};

struct ConfigIssue {
    int line = 0;  // 0 when the problem is not tied to one line
    std::string key;
    std::string message;

    std::string str() const {
        std::ostringstream os;
        if (line > 0) os << "line " << line << ": ";
        if (!key.empty()) os << key << ": ";
        os << message;
        return os.str();
    }
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues) : Error(join(issues)), issues_(std::move(issues)) {}
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<ConfigIssue>& issues) {
        std::string s;
        for (const auto& i : issues) s += (s.empty() ? "" : "\n") + i.str();
        return s;
    }
    std::vector<ConfigIssue> issues_;
};

struct ValidationResult {
    std::optional<SweepConfig> config;
    std::vector<ConfigIssue> errors;

    bool ok() const { return config.has_value(); }
};

inline std::optional<Route> parse_route(std::string_view s) {
    for (Route r : {Route::full_eq7, Route::effective_eq12, Route::resonant_simplified, Route::ode_oracle})
        if (s == to_string(r)) return r;
    return std::nullopt;
}

namespace config_detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Entry {
    std::string value;
    int line;
    bool used = false;
};

using Table = std::map<std::string, Entry>;  // "section.key"

inline std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

enum class Dim { frequency, time };

// "80 MHz" -> 0.08 (GHz); "0.5 ns" -> 0.5
inline std::optional<double> parse_quantity(const std::string& raw, Dim dim, std::string& why) {
    std::size_t split = raw.size();
    while (split > 0 && std::isalpha(static_cast<unsigned char>(raw[split - 1]))) --split;
    const std::string number = trim(std::string_view(raw).substr(0, split));
    const std::string unit = raw.substr(split);
    if (unit.empty()) {
        why = dim == Dim::frequency ? "needs a unit suffix (GHz, MHz, kHz, Hz)" : "needs a unit suffix (ns, us, ps)";
        return std::nullopt;
    }
    double scale = 0.0;
    if (dim == Dim::frequency) {
        if (unit == "GHz") scale = 1.0;
        else if (unit == "MHz") scale = 1e-3;
        else if (unit == "kHz") scale = 1e-6;
        else if (unit == "Hz") scale = 1e-9;
    } else {
        if (unit == "ns") scale = 1.0;
        else if (unit == "us") scale = 1e3;
        else if (unit == "ps") scale = 1e-3;
    }
    if (scale == 0.0) {
        why = "unknown unit '" + unit + "'";
        return std::nullopt;
    }
    const auto v = parse_number(number);
    if (!v) {
        why = "not a number: '" + number + "'";
        return std::nullopt;
    }
    return *v * scale;
}

class Reader {
public:
    Reader(Table& t, std::vector<ConfigIssue>& errors) : table_(t), errors_(errors) {}

    const Entry* find(const std::string& key) {
        auto it = table_.find(key);
        if (it == table_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    std::optional<double> quantity(const std::string& key, Dim dim) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        std::string why;
        auto v = parse_quantity(e->value, dim, why);
        if (!v) errors_.push_back({e->line, key, why});
        return v;
    }

    std::optional<double> number(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        auto v = parse_number(e->value);
        if (!v) errors_.push_back({e->line, key, "not a number: '" + e->value + "'"});
        return v;
    }

    std::optional<std::size_t> count(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        std::size_t v = 0;
        const auto* end = e->value.data() + e->value.size();
        auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
        if (ec != std::errc{} || ptr != end) {
            errors_.push_back({e->line, key, "expected a non-negative integer, got '" + e->value + "'"});
            return std::nullopt;
        }
        return v;
    }

    std::optional<bool> flag(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        if (e->value == "true" || e->value == "yes" || e->value == "on") return true;
        if (e->value == "false" || e->value == "no" || e->value == "off") return false;
        errors_.push_back({e->line, key, "expected true/false, got '" + e->value + "'"});
        return std::nullopt;
    }

    template <typename Enum>
    std::optional<Enum> choice(const std::string& key, std::initializer_list<Enum> options) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        std::string allowed;
        for (Enum o : options) {
            if (e->value == to_string(o)) return o;
            allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(o));
        }
        errors_.push_back({e->line, key, "'" + e->value + "' is not one of: " + allowed});
        return std::nullopt;
    }

    int line_of(const std::string& key) const {
        auto it = table_.find(key);
        return it == table_.end() ? 0 : it->second.line;
    }

private:
    Table& table_;
    std::vector<ConfigIssue>& errors_;
};

}  // namespace config_detail

// Parses and validates a configuration. All problems are reported together.
inline ValidationResult validate_config(std::string_view text) {
    using namespace config_detail;
    ValidationResult result;
    auto& errors = result.errors;
    Table table;

    static const std::map<std::string, std::vector<std::string>> known{
        {"system",
         {"delta", "detuning_preset", "omega", "g", "omega_pu", "omega_pr", "gamma_d", "gamma_f", "gamma_r",
          "q_factor", "mu"}},
        {"sweep", {"start", "stop", "points", "routes", "steady_mode", "numerator"}},
        {"oracle", {"dt", "settle", "window", "sample_stride", "grid_stride"}},
        {"dynamics", {"t_end", "dt", "stride", "fock_cutoff", "damped", "dephasing", "truncation_check"}},
        {"output", {"format"}},
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(std::string_view(raw).substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back({line_no, "", "malformed section header"});
                continue;
            }
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!known.contains(section)) errors.push_back({line_no, section, "unknown section"});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back({line_no, "", "expected key = value"});
            continue;
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (section.empty()) {
            errors.push_back({line_no, key, "key outside any section"});
            continue;
        }
        const std::string full = section + "." + key;
        const auto sec = known.find(section);
        if (sec == known.end()) continue;
        if (std::find(sec->second.begin(), sec->second.end(), key) == sec->second.end()) {
            errors.push_back({line_no, full, "unknown key"});
            continue;
        }
        if (table.contains(full)) {
            errors.push_back({line_no, full, "duplicate key (first on line " + std::to_string(table[full].line) + ")"});
            continue;
        }
        if (value.empty()) {
            errors.push_back({line_no, full, "empty value"});
            continue;
        }
        table[full] = {value, line_no};
    }

    Reader r(table, errors);
    SweepConfig cfg;
    SystemParams& p = cfg.params;

    auto required_freq = [&](const std::string& key, double& slot) {
        if (!table.contains(key)) {
            errors.push_back({0, key, "missing"});
            return;
        }
        if (auto v = r.quantity(key, Dim::frequency)) slot = *v;
    };
    auto rate_nonneg = [&](const std::string& key, double v) {
        if (v < 0.0) errors.push_back({r.line_of(key), key, "must be >= 0"});
    };

    required_freq("system.omega", p.omega);
    required_freq("system.g", p.g);
    required_freq("system.omega_pu", p.omega_pu);
    required_freq("system.gamma_d", p.gamma_d);
    required_freq("system.gamma_f", p.gamma_f);
    if (p.omega <= 0.0) errors.push_back({r.line_of("system.omega"), "system.omega", "must be > 0"});
    rate_nonneg("system.g", p.g);
    rate_nonneg("system.omega_pu", p.omega_pu);
    rate_nonneg("system.gamma_d", p.gamma_d);
    rate_nonneg("system.gamma_f", p.gamma_f);

    p.omega_pr = r.quantity("system.omega_pr", Dim::frequency).value_or(p.omega_pu / 100.0);
    rate_nonneg("system.omega_pr", p.omega_pr);

    const auto gamma_r = r.quantity("system.gamma_r", Dim::frequency);
    p.q_factor = r.number("system.q_factor");
    if (p.q_factor && *p.q_factor <= 0.0) {
        errors.push_back({r.line_of("system.q_factor"), "system.q_factor", "must be > 0"});
        p.q_factor.reset();
    }
    if (gamma_r) {
        p.gamma_r = *gamma_r;
        rate_nonneg("system.gamma_r", p.gamma_r);
        if (p.q_factor && p.omega > 0.0) {
            const double expect = p.omega / *p.q_factor;
            if (p.gamma_r == 0.0 || std::abs(p.gamma_r - expect) / p.gamma_r > 1e-6)
                errors.push_back({r.line_of("system.gamma_r"), "system.gamma_r / system.q_factor",
                                  "gamma_r = " + std::to_string(p.gamma_r) + " GHz but omega/q_factor = " +
                                      std::to_string(expect) + " GHz"});
        }
    } else if (p.q_factor) {
        p.gamma_r = p.omega / *p.q_factor;
    } else {
        errors.push_back({0, "system.gamma_r", "missing (give gamma_r or q_factor)"});
    }
    p.mu = r.number("system.mu");

    const auto explicit_delta = r.quantity("system.delta", Dim::frequency);
    const auto preset = r.choice<DetuningPreset>(
        "system.detuning_preset",
        {DetuningPreset::delta_eq_omega, DetuningPreset::delta_eq_omega_minus_shift, DetuningPreset::explicit_value});
    const bool delta_given = table.contains("system.delta");
    if (preset) {
        cfg.detuning_preset = *preset;
        if (*preset != DetuningPreset::explicit_value && delta_given)
            errors.push_back({r.line_of("system.delta"), "system.delta",
                              "conflicts with detuning_preset = " + std::string(to_string(*preset))});
        if (*preset == DetuningPreset::explicit_value && !delta_given)
            errors.push_back({r.line_of("system.detuning_preset"), "system.delta",
                              "missing (required by detuning_preset = explicit)"});
    } else if (!table.contains("system.detuning_preset")) {
        cfg.detuning_preset = delta_given ? DetuningPreset::explicit_value : DetuningPreset::delta_eq_omega;
    }
    if (explicit_delta) p.delta = *explicit_delta;

    if (auto v = r.quantity("sweep.start", Dim::frequency)) cfg.grid.start = *v;
    if (auto v = r.quantity("sweep.stop", Dim::frequency)) cfg.grid.stop = *v;
    if (auto v = r.count("sweep.points")) cfg.grid.points = *v;
    if (cfg.grid.points < 2) errors.push_back({r.line_of("sweep.points"), "sweep.points", "must be >= 2"});
    if (!(cfg.grid.start < cfg.grid.stop))
        errors.push_back({r.line_of("sweep.stop"), "sweep.start / sweep.stop", "start must be < stop"});
    if (const Entry* e = r.find("sweep.routes")) {
        cfg.routes.clear();
        std::istringstream list(e->value);
        std::string item;
        while (std::getline(list, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            if (auto route = parse_route(item)) {
                if (std::find(cfg.routes.begin(), cfg.routes.end(), *route) == cfg.routes.end())
                    cfg.routes.push_back(*route);
            } else {
                errors.push_back({e->line, "sweep.routes", "unknown route '" + item + "'"});
            }
        }
        if (cfg.routes.empty()) errors.push_back({e->line, "sweep.routes", "no routes selected"});
    }
    if (auto v = r.choice<SteadyMode>("sweep.steady_mode", {SteadyMode::corrected_omega, SteadyMode::paper_literal}))
        cfg.steady_mode = *v;
    if (auto v = r.choice<Numerator>("sweep.numerator", {Numerator::gamma_f, Numerator::gamma_d})) cfg.numerator = *v;

    auto positive_time = [&](const std::string& key, auto& slot) {
        if (auto v = r.quantity(key, Dim::time)) {
            if (*v <= 0.0) errors.push_back({r.line_of(key), key, "must be > 0"});
            slot = *v;
        }
    };
    positive_time("oracle.dt", cfg.oracle.dt);
    positive_time("oracle.settle", cfg.oracle.settle);
    positive_time("oracle.window", cfg.oracle.window);
    if (auto v = r.count("oracle.sample_stride")) cfg.oracle.sample_stride = *v;
    if (auto v = r.count("oracle.grid_stride")) cfg.oracle.grid_stride = *v;
    if (cfg.oracle.sample_stride == 0)
        errors.push_back({r.line_of("oracle.sample_stride"), "oracle.sample_stride", "must be >= 1"});
    if (cfg.oracle.grid_stride == 0)
        errors.push_back({r.line_of("oracle.grid_stride"), "oracle.grid_stride", "must be >= 1"});

    if (auto v = r.quantity("dynamics.t_end", Dim::time)) {
        if (*v < 0.0) errors.push_back({r.line_of("dynamics.t_end"), "dynamics.t_end", "must be >= 0"});
        cfg.dynamics.t_end = *v;
    }
    positive_time("dynamics.dt", cfg.dynamics.dt);
    positive_time("dynamics.stride", cfg.dynamics.stride);
    if (auto v = r.count("dynamics.fock_cutoff")) cfg.dynamics.fock_cutoff = *v;
    if (cfg.dynamics.fock_cutoff < 1)
        errors.push_back({r.line_of("dynamics.fock_cutoff"), "dynamics.fock_cutoff", "must be >= 1"});
    if (auto v = r.flag("dynamics.damped")) cfg.dynamics.damped = *v;
    if (auto v = r.quantity("dynamics.dephasing", Dim::frequency)) {
        rate_nonneg("dynamics.dephasing", *v);
        cfg.dynamics.dephasing_rate = *v;
    }
    if (auto v = r.flag("dynamics.truncation_check")) cfg.dynamics.truncation_check = *v;

    if (auto v = r.choice<OutputFormat>("output.format", {OutputFormat::csv, OutputFormat::json, OutputFormat::both}))
        cfg.format = *v;

    if (errors.empty()) {
        switch (cfg.detuning_preset) {
            case DetuningPreset::delta_eq_omega: p.delta = p.omega; break;
            case DetuningPreset::delta_eq_omega_minus_shift:
                try {
                    p.delta = resonant_detuning(p);
                } catch (const Error& e) {
                    errors.push_back({r.line_of("system.detuning_preset"), "system.detuning_preset", e.what()});
                }
                break;
            case DetuningPreset::explicit_value: break;
        }
    }

    std::stable_sort(errors.begin(), errors.end(),
              [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
    if (errors.empty()) result.config = cfg;
    return result;
}

inline SweepConfig parse_config_or_throw(std::string_view text) {
    auto r = validate_config(text);
    if (!r.ok()) throw ConfigError(std::move(r.errors));
    return *r.config;
}

}  // namespace eit
