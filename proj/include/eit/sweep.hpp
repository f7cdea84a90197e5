#pragma once

// Detuning sweeps and population dynamics driven by a SweepConfig, plus the
// CSV / JSON writers behind the eit-sim command line.

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "eit/bloch_oracle.hpp"
#include "eit/config.hpp"
#include "eit/lindblad.hpp"
#include "eit/semiclassical.hpp"

namespace eit {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kThreadsEnv = "EIT_SIM_THREADS";

struct SpectrumRow {
    double delta_sig = 0.0;
    std::array<std::optional<complex>, 4> chi;  // indexed by Route
    std::optional<double> oracle_residual;
    std::string error;
};

struct SpectrumTable {
    std::vector<Route> routes;
    std::vector<SpectrumRow> rows;
};

inline std::size_t route_index(Route r) { return static_cast<std::size_t>(r); }

// Default worker count: $EIT_SIM_THREADS, else hardware concurrency.
inline std::size_t default_threads() {
    if (const char* env = std::getenv(kThreadsEnv)) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

// Runs job(i) for i in [0, n) on at most `threads` workers.
template <typename Job>
void parallel_for(std::size_t n, std::size_t threads, const Job& job) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) job(i);
        });
}

inline SpectrumRow evaluate_point(const SweepConfig& cfg, std::size_t index, bool strict) {
    SpectrumRow row;
    row.delta_sig = cfg.grid.at(index);
    Diagnostics diag;
    diag.strict = strict;
    for (Route r : cfg.routes) {
        try {
            switch (r) {
                case Route::full_eq7:
                    row.chi[route_index(r)] = chi1_full(cfg.params, row.delta_sig, cfg.steady_mode, &diag).chi;
                    break;
                case Route::effective_eq12:
                    row.chi[route_index(r)] = chi1_eff(cfg.params, row.delta_sig, cfg.numerator, &diag).chi;
                    break;
                case Route::resonant_simplified:
                    row.chi[route_index(r)] = chi1_eff_resonant(cfg.params, row.delta_sig, &diag).chi;
                    break;
                case Route::ode_oracle: {
                    if (index % cfg.oracle.grid_stride != 0) break;
                    cfg.params.check_weak_probe(&diag, "ode_oracle");
                    OracleOptions o;
                    o.dt = cfg.oracle.dt;
                    o.settle = cfg.oracle.settle;
                    o.window = cfg.oracle.window;
                    o.sample_stride = cfg.oracle.sample_stride;
                    const DemodResult d = oracle_chi(cfg.params, row.delta_sig, o);
                    row.chi[route_index(r)] = d.chi_numeric;
                    row.oracle_residual = d.residual;
                    break;
                }
            }
        } catch (const Error& e) {
            row.error += (row.error.empty() ? "" : "; ") + std::string(to_string(r)) + ": " + e.what();
        }
    }
    return row;
}

// Evaluates every selected route on every grid point. Rows come back in grid
// order whatever the thread count.
inline SpectrumTable run_spectrum(const SweepConfig& cfg, std::size_t threads = 1, bool strict = false) {
    if (cfg.routes.empty()) throw ConfigError({{0, "sweep.routes", "no routes selected"}});
    if (cfg.grid.points < 2 || !(cfg.grid.start < cfg.grid.stop))
        throw ConfigError({{0, "sweep", "grid needs points >= 2 and start < stop"}});
    cfg.params.validate();
    SpectrumTable table;
    table.routes = cfg.routes;
    table.rows.resize(cfg.grid.points);
    parallel_for(cfg.grid.points, threads, [&](std::size_t i) { table.rows[i] = evaluate_point(cfg, i, strict); });
    return table;
}

inline Comparison run_dynamics(const SweepConfig& cfg, bool strict = false) {
    CompareOptions o;
    o.fock_cutoff = cfg.dynamics.fock_cutoff;
    o.dt = cfg.dynamics.dt;
    o.stride = cfg.dynamics.stride;
    o.dephasing_rate = cfg.dynamics.dephasing_rate;
    o.truncation_check = cfg.dynamics.truncation_check;
    o.strict = strict;
    return compare_full_vs_effective(cfg.params, cfg.dynamics.damped, cfg.dynamics.t_end, o);
}

// ---------------------------------------------------------------- output

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Resolved parameters as ordered key/value pairs (GHz, ns).
inline std::vector<std::pair<std::string, std::string>> resolved_parameters(const SweepConfig& cfg) {
    const SystemParams& p = cfg.params;
    std::vector<std::pair<std::string, std::string>> kv{
        {"delta_GHz", fmt_double(p.delta)},
        {"detuning_preset", std::string(to_string(cfg.detuning_preset))},
        {"omega_GHz", fmt_double(p.omega)},
        {"g_GHz", fmt_double(p.g)},
        {"omega_pu_GHz", fmt_double(p.omega_pu)},
        {"omega_pr_GHz", fmt_double(p.omega_pr)},
        {"gamma_d_GHz", fmt_double(p.gamma_d)},
        {"gamma_f_GHz", fmt_double(p.gamma_f)},
        {"gamma_r_GHz", fmt_double(p.gamma_r)},
    };
    if (p.q_factor) kv.emplace_back("q_factor", fmt_double(*p.q_factor));
    if (p.mu) kv.emplace_back("mu", fmt_double(*p.mu));
    if (p.delta != 0.0 && p.omega != 0.0) {
        kv.emplace_back("effective_coupling_GHz", fmt_double(p.effective_coupling()));
        kv.emplace_back("energy_shift_GHz", fmt_double(p.energy_shift()));
    }
    kv.emplace_back("steady_mode", std::string(to_string(cfg.steady_mode)));
    kv.emplace_back("numerator", std::string(to_string(cfg.numerator)));
    return kv;
}

inline nlohmann::ordered_json parameters_json(const SweepConfig& cfg) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : resolved_parameters(cfg)) j[k] = v;
    return j;
}

inline void write_header(std::ostream& os, const SweepConfig& cfg, const std::string& kind) {
    os << "# eit-sim " << kind << "\n";
    for (const auto& [k, v] : resolved_parameters(cfg)) os << "# " << k << " = " << v << "\n";
}

inline void write_spectrum_csv(std::ostream& os, const SweepConfig& cfg, const SpectrumTable& t) {
    write_header(os, cfg, "spectrum");
    os << "# grid = " << fmt_double(cfg.grid.start) << " .. " << fmt_double(cfg.grid.stop) << " GHz, "
       << cfg.grid.points << " points\n";
    const bool oracle = std::find(t.routes.begin(), t.routes.end(), Route::ode_oracle) != t.routes.end();
    os << "delta_sig_GHz";
    for (Route r : t.routes) os << ",re_" << to_string(r) << ",im_" << to_string(r);
    if (oracle) os << ",oracle_residual";
    os << ",error\n";
    for (const auto& row : t.rows) {
        os << fmt_double(row.delta_sig);
        for (Route r : t.routes) {
            const auto& c = row.chi[route_index(r)];
            if (c) os << ',' << fmt_double(c->real()) << ',' << fmt_double(c->imag());
            else os << ",,";
        }
        if (oracle) os << ',' << (row.oracle_residual ? fmt_double(*row.oracle_residual) : "");
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << ',' << err << '\n';
    }
}

inline nlohmann::ordered_json spectrum_json(const SweepConfig& cfg, const SpectrumTable& t) {
    nlohmann::ordered_json j;
    j["kind"] = "spectrum";
    j["parameters"] = parameters_json(cfg);
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r;
        r["delta_sig_GHz"] = row.delta_sig;
        for (Route route : t.routes) {
            const auto& c = row.chi[route_index(route)];
            r[std::string(to_string(route))] =
                c ? nlohmann::ordered_json::array({c->real(), c->imag()}) : nlohmann::ordered_json(nullptr);
        }
        if (row.oracle_residual) r["oracle_residual"] = *row.oracle_residual;
        if (!row.error.empty()) r["error"] = row.error;
        rows.push_back(std::move(r));
    }
    return j;
}

inline void write_dynamics_csv(std::ostream& os, const SweepConfig& cfg, const Comparison& c) {
    write_header(os, cfg, "dynamics");
    os << "# damped = " << (cfg.dynamics.damped ? "true" : "false") << ", fock_cutoff = " << cfg.dynamics.fock_cutoff
       << ", dt_ns = " << fmt_double(c.full.dt) << "\n";
    os << "# max_deviation P_e0 = " << fmt_double(c.max_deviation[0]) << ", P_g1 = " << fmt_double(c.max_deviation[1])
       << ", P_g0 = " << fmt_double(c.max_deviation[2]) << "\n";
    os << "t_ns,P_e0_full,P_g1_full,P_g0_full,P_e0_eff,P_g1_eff,P_g0_eff\n";
    const std::array<const char*, 3> names{"P_e0", "P_g1", "P_g0"};
    for (std::size_t i = 0; i < c.full.times.size(); ++i) {
        os << fmt_double(c.full.times[i]);
        for (const char* n : names) os << ',' << fmt_double(c.full.series(n)[i]);
        for (const char* n : names) os << ',' << fmt_double(c.effective.series(n)[i]);
        os << '\n';
    }
}

inline nlohmann::ordered_json trajectory_json(const Trajectory& t) {
    nlohmann::ordered_json j;
    j["times_ns"] = t.times;
    for (std::size_t k = 0; k < t.names.size(); ++k) j["series"][t.names[k]] = t.values[k];
    j["dt_ns"] = t.dt;
    j["trace_drift"] = t.trace_drift;
    j["hermiticity_error"] = t.hermiticity_error;
    j["min_eigenvalue"] = t.min_eigenvalue;
    j["top_fock_population"] = t.top_fock_population;
    j["truncation_flag"] = t.truncation_flag;
    return j;
}

inline nlohmann::ordered_json dynamics_summary_json(const Comparison& c) {
    nlohmann::ordered_json j;
    j["max_deviation"] = {{"P_e0", c.max_deviation[0]}, {"P_g1", c.max_deviation[1]}, {"P_g0", c.max_deviation[2]}};
    if (c.truncation_delta) j["truncation_delta"] = *c.truncation_delta;
    j["warnings"] = c.warnings;
    return j;
}

inline nlohmann::ordered_json dynamics_json(const SweepConfig& cfg, const Comparison& c) {
    nlohmann::ordered_json j;
    j["kind"] = "dynamics";
    j["parameters"] = parameters_json(cfg);
    j["summary"] = dynamics_summary_json(c);
    j["full"] = trajectory_json(c.full);
    j["effective"] = trajectory_json(c.effective);
    return j;
}

struct SteadyReport {
    SteadyState state;
    double effective_coupling = 0.0;
    double energy_shift = 0.0;
    double evaluated_at = 0.0;  // delta_sig used by paper_literal mode
};

inline SteadyReport steady_report(const SweepConfig& cfg, Diagnostics* diag = nullptr) {
    SteadyReport r;
    r.evaluated_at = cfg.params.omega;
    r.state = steady_state(cfg.params, r.evaluated_at, cfg.steady_mode, diag);
    r.effective_coupling = cfg.params.effective_coupling();
    r.energy_shift = cfg.params.energy_shift();
    return r;
}

inline void write_steady(std::ostream& os, const SteadyReport& r) {
    os << "sigma_z0 = " << fmt_double(r.state.sigma_z0) << "\n";
    os << "x0 = " << fmt_double(r.state.x0) << "\n";
    os << "sigma_m0 = " << fmt_double(r.state.sigma_m0.real()) << (r.state.sigma_m0.imag() < 0 ? " - " : " + ")
       << fmt_double(std::abs(r.state.sigma_m0.imag())) << "i\n";
    os << "effective_coupling_GHz = " << fmt_double(r.effective_coupling) << "\n";
    os << "energy_shift_GHz = " << fmt_double(r.energy_shift) << "\n";
}

inline nlohmann::ordered_json meta_json(const SweepConfig& cfg, const std::string& subcommand, std::size_t threads) {
    nlohmann::ordered_json j;
    j["tool"] = "eit-sim";
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["parameters"] = parameters_json(cfg);
    std::vector<std::string> routes;
    for (Route r : cfg.routes) routes.emplace_back(to_string(r));
    j["grid"] = {{"start_GHz", cfg.grid.start}, {"stop_GHz", cfg.grid.stop}, {"points", cfg.grid.points}};
    j["routes"] = routes;
    j["threads"] = threads;
    j["format"] = std::string(to_string(cfg.format));
    return j;
}

}  // namespace eit
