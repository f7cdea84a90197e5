#pragma once

// Time-domain check of the closed-form susceptibility: integrate the
// semiclassical equations of motion under pump + probe, then read the
// probe-frequency component of <sigma^-> off the settled signal.
//
//   d sz/dt = -(sz + 1) Gd + 2i Opu (s+ - s-) + 2i Opr (s+ e^{-i d t} - s- e^{i d t})
//   d s-/dt = [-Gf - i(Delta + 2 g X)] s- - i Opu sz - i Opr sz e^{-i d t}
//   X'' + gamma X' + omega^2 X = -2 omega g sz
//
// with s+ = conj(s-) and <X sz> factorized.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "eit/error.hpp"
#include "eit/operators.hpp"
#include "eit/params.hpp"
#include "eit/rk4.hpp"
#include "eit/semiclassical.hpp"

namespace eit {

struct BlochState {
    double sigma_z = -1.0;
    complex sigma_m{0.0, 0.0};
    double x = 0.0;
    double x_dot = 0.0;

    // Undriven ground state with the resonator at its displaced equilibrium.
    static BlochState ground(const SystemParams& p) { return {-1.0, {0.0, 0.0}, 2.0 * p.g / p.omega, 0.0}; }

    friend BlochState operator+(const BlochState& a, const BlochState& b) {
        return {a.sigma_z + b.sigma_z, a.sigma_m + b.sigma_m, a.x + b.x, a.x_dot + b.x_dot};
    }
    friend BlochState operator*(double h, const BlochState& a) {
        return {h * a.sigma_z, h * a.sigma_m, h * a.x, h * a.x_dot};
    }

    bool finite() const {
        return std::isfinite(sigma_z) && std::isfinite(sigma_m.real()) && std::isfinite(sigma_m.imag()) &&
               std::isfinite(x) && std::isfinite(x_dot);
    }
};

inline BlochState bloch_rhs(const BlochState& s, double t, const SystemParams& p, double delta_sig) {
    const complex sp = std::conj(s.sigma_m);
    const complex probe = std::polar(1.0, -delta_sig * t);  // e^{-i d t}
    const complex dsz = -(s.sigma_z + 1.0) * p.gamma_d + 2.0 * I * p.omega_pu * (sp - s.sigma_m) +
                        2.0 * I * p.omega_pr * (sp * probe - s.sigma_m * std::conj(probe));
    const complex dsm = complex{-p.gamma_f, -(p.delta + 2.0 * p.g * s.x)} * s.sigma_m -
                        I * p.omega_pu * s.sigma_z - I * p.omega_pr * s.sigma_z * probe;
    const double ddx = -p.gamma_r * s.x_dot - p.omega * p.omega * s.x - 2.0 * p.omega * p.g * s.sigma_z;
    return {dsz.real(), dsm, s.x_dot, ddx};
}

struct BlochSeries {
    std::vector<double> times;
    std::vector<BlochState> states;
};

struct BlochSampling {
    double record_from = 0.0;  // ns; earlier samples are not stored
    std::size_t stride = 1;    // store every stride-th step
    std::optional<BlochState> initial;  // default BlochState::ground
};

inline double slowest_qubit_rate(const SystemParams& p) { return std::min(p.gamma_d, p.gamma_f); }

inline BlochSeries integrate_bloch(const SystemParams& p, double delta_sig, double t_end, double dt,
                                   const BlochSampling& sampling = {}) {
    p.validate();
    const double slow = slowest_qubit_rate(p);
    if (!(slow > 0.0) || t_end < 10.0 / slow * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "integrate_bloch: t_end=" << t_end << " ns shorter than 10/min(gamma_d, gamma_f)";
        throw PreconditionError(os.str());
    }
    if (!(dt > 0.0)) throw PreconditionError("integrate_bloch: dt must be > 0");
    if (sampling.stride == 0) throw PreconditionError("integrate_bloch: stride must be >= 1");

    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const std::size_t first = static_cast<std::size_t>(std::ceil(std::max(0.0, sampling.record_from) / dt - 1e-9));
    BlochSeries out;
    if (first <= steps) {
        const std::size_t n = (steps - first) / sampling.stride + 1;
        out.times.reserve(n);
        out.states.reserve(n);
    }

    const auto rhs = [&](const BlochState& s, double t) { return bloch_rhs(s, t, p, delta_sig); };
    BlochState s = sampling.initial.value_or(BlochState::ground(p));
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (i >= first && (i - first) % sampling.stride == 0) {
            out.times.push_back(t);
            out.states.push_back(s);
        }
        if (i == steps) break;
        s = rk4_step(rhs, s, t, dt);
        if (!s.finite()) {
            std::ostringstream os;
            os << "integrate_bloch: state blew up at t=" << t + dt << " ns";
            throw NumericalError(os.str());
        }
    }
    return out;
}

struct DemodResult {
    complex coefficient_zero{0.0, 0.0};   // c0
    complex coefficient_plus{0.0, 0.0};   // amplitude of e^{-i d t}
    complex coefficient_minus{0.0, 0.0};  // amplitude of e^{+i d t}
    complex chi_numeric{0.0, 0.0};        // Gf c+ / Opr
    double residual = 0.0;                // rms fit residual
};

// Least-squares fit of sigma^-(t) = c0 + c+ e^{-i d t} + c- e^{i d t} over
// the trailing `window` ns of the series.
inline DemodResult demodulate_chi(const BlochSeries& series, const SystemParams& p, double delta_sig, double window) {
    if (series.times.empty()) throw PreconditionError("demodulate_chi: empty series");
    const double periods = window * std::abs(delta_sig) / (2.0 * std::numbers::pi);
    if (!(periods >= 20.0)) {
        std::ostringstream os;
        os << "demodulate_chi: window covers " << periods << " probe-beat periods, need >= 20";
        throw PreconditionError(os.str());
    }
    const double t_last = series.times.back();
    const double span = t_last - series.times.front();
    if (window > span * (1.0 + 1e-12)) throw PreconditionError("demodulate_chi: window longer than the recorded tail");

    const auto begin = std::lower_bound(series.times.begin(), series.times.end(), t_last - window - 1e-9);
    const auto offset = static_cast<std::size_t>(begin - series.times.begin());
    const auto n = static_cast<Eigen::Index>(series.times.size() - offset);
    ComplexMatrix basis(n, 3);
    ComplexVector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = offset + static_cast<std::size_t>(i);
        const double t = series.times[k];
        basis(i, 0) = 1.0;
        basis(i, 1) = std::polar(1.0, -delta_sig * t);
        basis(i, 2) = std::polar(1.0, delta_sig * t);
        y(i) = series.states[k].sigma_m;
    }
    const ComplexVector c = basis.colPivHouseholderQr().solve(y);

    DemodResult r;
    r.coefficient_zero = c(0);
    r.coefficient_plus = c(1);
    r.coefficient_minus = c(2);
    r.residual = (basis * c - y).norm() / std::sqrt(static_cast<double>(n));
    r.chi_numeric = p.omega_pr == 0.0 ? complex{0.0, 0.0} : p.gamma_f * c(1) / p.omega_pr;
    return r;
}

struct OracleOptions {
    double dt = 0.02;                 // ns
    std::optional<double> settle;     // default: see default_settle_time
    std::optional<double> window;     // default: max(2000 ns, 20 beat periods)
    std::size_t sample_stride = 5;
};

// Transient to discard before fitting: 8/min(Gd, Gf) for the qubit, extended
// to 4/gamma when the resonator is coupled since its ring-down is the slowest
// process. Capped at 1e5 ns.
inline double default_settle_time(const SystemParams& p) {
    double t = 8.0 / slowest_qubit_rate(p);
    if (p.g != 0.0) t = std::max(t, p.gamma_r > 0.0 ? 4.0 / p.gamma_r : 1e5);
    return std::min(t, 1e5);
}

inline double default_window(double delta_sig) {
    return std::max(2000.0, 20.0 * 2.0 * std::numbers::pi / std::max(std::abs(delta_sig), 1e-300) * 1.01);
}

// Full oracle: integrate from the ground state, settle, demodulate.
inline DemodResult oracle_chi(const SystemParams& p, double delta_sig, const OracleOptions& o = {}) {
    const double settle = o.settle.value_or(default_settle_time(p));
    const double window = o.window.value_or(default_window(delta_sig));
    const double t_end = std::max(settle + window, 10.0 / slowest_qubit_rate(p));
    BlochSampling sampling;
    sampling.record_from = t_end - window;
    sampling.stride = o.sample_stride;
    const BlochSeries series = integrate_bloch(p, delta_sig, t_end, o.dt, sampling);
    return demodulate_chi(series, p, delta_sig, series.times.back() - series.times.front());
}

inline SusceptibilityPoint chi1_oracle(const SystemParams& p, double delta_sig, const OracleOptions& o = {}) {
    return {delta_sig, oracle_chi(p, delta_sig, o).chi_numeric, Route::ode_oracle};
}

}  // namespace eit
