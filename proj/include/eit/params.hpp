#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "eit/error.hpp"

namespace eit {

// Soft warnings raised by the numerics. In strict mode a warning becomes a
// PreconditionError at the point it is raised.
struct Diagnostics {
    bool strict = false;
    std::vector<std::string> warnings;

    void warn(const std::string& msg) {
        if (strict) throw PreconditionError(msg);
        warnings.push_back(msg);
    }
};

inline void warn(Diagnostics* diag, const std::string& msg) {
    if (diag) diag->warn(msg);
}

// Rotating-frame parameters. Frequencies and rates are angular, in GHz
// (hbar = 1, time in ns).
struct SystemParams {
    double delta = 1.0;       // pump-qubit detuning Delta = upsilon - omega_pu
    double omega = 1.0;       // resonator frequency
    double g = 0.08;          // sigma_z coupling
    double omega_pu = 0.05;   // pump Rabi frequency
    double omega_pr = 0.0005; // probe Rabi frequency
    double gamma_d = 0.06;    // qubit energy decay
    double gamma_f = 0.03;    // qubit dephasing / sigma^- rate
    double gamma_r = 1e-4;    // resonator decay gamma = omega / Q
    std::optional<double> q_factor;
    std::optional<double> mu;

    // Reference parameter set: Delta = omega = 1 GHz, Q = 1e4.
    static SystemParams reference() {
        SystemParams p;
        p.q_factor = 1e4;
        return p;
    }

    // Omega_c = 2 g Omega_pu / Delta
    double effective_coupling() const {
        if (delta == 0.0) throw PreconditionError("effective_coupling: Delta = 0");
        return 2.0 * g * omega_pu / delta;
    }

    // Delta_s = 4 g^2 / omega + 2 Omega_pu^2 / Delta
    double energy_shift() const {
        if (delta == 0.0 || omega == 0.0) throw PreconditionError("energy_shift: Delta or omega is 0");
        return 4.0 * g * g / omega + 2.0 * omega_pu * omega_pu / delta;
    }

    std::vector<std::string> violations() const {
        std::vector<std::string> out;
        auto nonneg = [&](double v, const char* name) {
            if (!(v >= 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be a finite rate >= 0");
        };
        if (!std::isfinite(delta)) out.push_back("delta must be finite");
        if (!(omega > 0.0) || !std::isfinite(omega)) out.push_back("omega must be > 0");
        nonneg(g, "g");
        nonneg(omega_pu, "omega_pu");
        nonneg(omega_pr, "omega_pr");
        nonneg(gamma_d, "gamma_d");
        nonneg(gamma_f, "gamma_f");
        nonneg(gamma_r, "gamma_r");
        if (q_factor) {
            if (!(*q_factor > 0.0)) {
                out.push_back("q_factor must be > 0");
            } else if (omega > 0.0) {
                const double expect = omega / *q_factor;
                const double rel = gamma_r > 0.0 ? std::abs(gamma_r - expect) / gamma_r : 1.0;
                if (rel > 1e-6)
                    out.push_back("gamma_r (" + std::to_string(gamma_r) + ") inconsistent with omega/q_factor (" +
                                  std::to_string(expect) + ")");
            }
        }
        return out;
    }

    void validate() const {
        const auto v = violations();
        if (v.empty()) return;
        std::string msg = "invalid SystemParams:";
        for (const auto& s : v) msg += " " + s + ";";
        throw PreconditionError(msg);
    }

    // Perturbative routes want omega_pr << omega_pu.
    void check_weak_probe(Diagnostics* diag, const char* route) const {
        if (omega_pr > 0.1 * omega_pu)
            warn(diag, std::string(route) + ": probe not weak (omega_pr > 0.1 omega_pu)");
    }
};

// Delta that puts the two-photon resonance on the resonator, i.e. the
// positive root of Delta + 4g^2/omega + 2 Omega_pu^2 / Delta = omega.
inline double resonant_detuning(const SystemParams& p) {
    const double b = p.omega - 4.0 * p.g * p.g / p.omega;
    const double disc = b * b - 8.0 * p.omega_pu * p.omega_pu;
    if (disc < 0.0 || b <= 0.0)
        throw DomainError("resonant_detuning: no real Delta compensates the shift for these parameters");
    return 0.5 * (b + std::sqrt(disc));
}

}  // namespace eit
