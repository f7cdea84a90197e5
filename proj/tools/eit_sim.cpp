// eit-sim: probe susceptibility spectra and population dynamics of a driven
// qubit coupled to an LC resonator.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "eit/sweep.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

struct Args {
    std::string config;
    std::string out;
    std::string routes;
    bool strict = false;
    std::size_t threads = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw eit::ConfigError({{0, path, "cannot open config file"}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

eit::SweepConfig load(const Args& a) {
    eit::SweepConfig cfg = eit::parse_config_or_throw(read_file(a.config));
    if (!a.routes.empty()) {
        cfg.routes.clear();
        std::istringstream list(a.routes);
        std::string item;
        while (std::getline(list, item, ',')) {
            auto r = eit::parse_route(item);
            if (!r) throw eit::ConfigError({{0, "--routes", "unknown route '" + item + "'"}});
            cfg.routes.push_back(*r);
        }
        if (cfg.routes.empty()) throw eit::ConfigError({{0, "--routes", "no routes selected"}});
    }
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw eit::ConfigError({{0, path, "cannot open output file"}});
    out << text;
}

// CSV to --out (or stdout), JSON mirror and sidecar metadata next to it.
void emit(const Args& a, const eit::SweepConfig& cfg, const std::string& sub, const std::string& csv,
          const nlohmann::ordered_json& json, std::size_t threads) {
    if (a.out.empty()) {
        if (cfg.format == eit::OutputFormat::json) std::cout << json.dump(2) << "\n";
        else std::cout << csv;
        return;
    }
    switch (cfg.format) {
        case eit::OutputFormat::csv: write_text(a.out, csv); break;
        case eit::OutputFormat::json: write_text(a.out, json.dump(2) + "\n"); break;
        case eit::OutputFormat::both:
            write_text(a.out, csv);
            write_text(a.out + ".json", json.dump(2) + "\n");
            break;
    }
    write_text(a.out + ".meta.json", eit::meta_json(cfg, sub, threads).dump(2) + "\n");
}

int run_spectrum(const Args& a, bool oracle_only) {
    eit::SweepConfig cfg = load(a);
    if (oracle_only) cfg.routes = {eit::Route::ode_oracle};
    const std::size_t threads = a.threads ? a.threads : eit::default_threads();
    const auto table = eit::run_spectrum(cfg, threads, a.strict);
    std::ostringstream csv;
    eit::write_spectrum_csv(csv, cfg, table);
    emit(a, cfg, oracle_only ? "oracle" : "spectrum", csv.str(), eit::spectrum_json(cfg, table), threads);
    std::size_t failed = 0;
    for (const auto& row : table.rows) failed += row.error.empty() ? 0 : 1;
    if (failed) std::cerr << "eit-sim: " << failed << " grid point(s) reported errors (see error column)\n";
    return 0;
}

int run_dynamics(const Args& a) {
    const eit::SweepConfig cfg = load(a);
    const auto cmp = eit::run_dynamics(cfg, a.strict);
    std::ostringstream csv;
    eit::write_dynamics_csv(csv, cfg, cmp);
    emit(a, cfg, "dynamics", csv.str(), eit::dynamics_json(cfg, cmp), 1);
    std::cerr << "max |P_full - P_eff|: P_e0 " << cmp.max_deviation[0] << ", P_g1 " << cmp.max_deviation[1]
              << ", P_g0 " << cmp.max_deviation[2] << "\n";
    if (cmp.truncation_delta) std::cerr << "truncation delta (N -> 2N): " << *cmp.truncation_delta << "\n";
    for (const auto& w : cmp.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int run_steady(const Args& a) {
    const eit::SweepConfig cfg = load(a);
    eit::Diagnostics diag;
    diag.strict = a.strict;
    const auto report = eit::steady_report(cfg, &diag);
    std::ostringstream text;
    eit::write_steady(text, report);
    if (a.out.empty()) std::cout << text.str();
    else write_text(a.out, text.str());
    for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probe susceptibility and population dynamics of a driven qubit-resonator system", "eit-sim"};
    app.require_subcommand(1);
    Args args;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config, "Experiment configuration file")->required();
        sub->add_option("--out", args.out, "Output path (stdout when omitted)");
        sub->add_option("--routes", args.routes, "Comma-separated routes, overrides the config");
        sub->add_flag("--strict", args.strict, "Turn warnings into errors");
        sub->add_option("--threads", args.threads, "Worker threads (default $EIT_SIM_THREADS or all cores)");
    };
    auto* spectrum = app.add_subcommand("spectrum", "Susceptibility over the detuning grid");
    auto* dynamics = app.add_subcommand("dynamics", "Master-equation populations, full vs effective Hamiltonian");
    auto* oracle = app.add_subcommand("oracle", "Susceptibility from the time-domain Bloch equations only");
    auto* steady = app.add_subcommand("steady", "Steady state, effective coupling and energy shift");
    for (auto* s : {spectrum, dynamics, oracle, steady}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (spectrum->parsed()) return run_spectrum(args, false);
        if (oracle->parsed()) return run_spectrum(args, true);
        if (dynamics->parsed()) return run_dynamics(args);
        if (steady->parsed()) return run_steady(args);
    } catch (const eit::ConfigError& e) {
        std::cerr << "configuration error:\n" << e.what() << "\n";
        return kConfigError;
    } catch (const eit::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    }
    return 0;
}
