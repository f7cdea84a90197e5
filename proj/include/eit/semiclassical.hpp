#pragma once

// Closed-form steady state and linear probe susceptibility of the driven,
// sigma_z-coupled qubit-resonator system.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eit/error.hpp"
#include "eit/operators.hpp"
#include "eit/params.hpp"

namespace eit {

// Which frequency divides 4g^2 sigma_z in the dispersive shift of the
// steady-state polynomial. paper_literal uses the probe detuning delta as
// printed; corrected_omega uses the resonator frequency, which follows from
// 2 g X0 = -4 g^2 sigma_z0 / omega.
enum class SteadyMode { paper_literal, corrected_omega };

enum class Route { full_eq7, effective_eq12, resonant_simplified, ode_oracle };

// Numerator rate of the effective susceptibility.
enum class Numerator { gamma_f, gamma_d };

inline std::string_view to_string(SteadyMode m) {
    return m == SteadyMode::paper_literal ? "paper_literal" : "corrected_omega";
}

inline std::string_view to_string(Route r) {
    switch (r) {
        case Route::full_eq7: return "full_eq7";
        case Route::effective_eq12: return "effective_eq12";
        case Route::resonant_simplified: return "resonant_simplified";
        case Route::ode_oracle: return "ode_oracle";
    }
    return "?";
}

inline std::string_view to_string(Numerator n) { return n == Numerator::gamma_f ? "gamma_f" : "gamma_d"; }

struct SteadyState {
    double sigma_z0 = -1.0;
    double x0 = 0.0;
    complex sigma_m0{0.0, 0.0};
};

struct SusceptibilityPoint {
    double delta_sig = 0.0;
    complex chi{0.0, 0.0};
    Route route = Route::full_eq7;
};

// Real roots of c[0] + c[1] s + ... + c[k] s^k, leading zeros dropped.
// Companion-matrix eigenvalues followed by a Newton polish.
inline std::vector<complex> polynomial_roots(std::array<double, 4> c) {
    int degree = 3;
    const double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3])});
    while (degree > 0 && std::abs(c[static_cast<std::size_t>(degree)]) <= 1e-300 + 1e-15 * scale) --degree;
    if (degree == 0) return {};

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    const double lead = c[static_cast<std::size_t>(degree)];
    for (int i = 0; i < degree; ++i) companion(0, i) = -c[static_cast<std::size_t>(degree - 1 - i)] / lead;
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);

    std::vector<complex> roots;
    for (int i = 0; i < degree; ++i) {
        complex z = es.eigenvalues()(i);
        for (int it = 0; it < 8; ++it) {
            complex f = 0.0, df = 0.0;
            for (int k = degree; k >= 0; --k) {
                df = df * z + f;
                f = f * z + c[static_cast<std::size_t>(k)];
            }
            if (std::abs(df) == 0.0) break;
            const complex step = f / df;
            z -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
        }
        roots.push_back(z);
    }
    return roots;
}

// Coefficients (ascending) of the steady-state cubic in sigma_z0:
//   Gd (s+1) [(Delta - k s)^2 + Gf^2] + 4 Gf Omega_pu^2 s,   k = 4 g^2 / f
// with f = omega (corrected) or delta_sig (paper_literal).
inline std::array<double, 4> population_inversion_polynomial(const SystemParams& p, double delta_sig,
                                                              SteadyMode mode) {
    const double f = mode == SteadyMode::corrected_omega ? p.omega : delta_sig;
    if (f == 0.0) throw PreconditionError("population inversion: shift frequency is zero (delta_sig = 0 in paper_literal mode)");
    const double k = 4.0 * p.g * p.g / f;
    const double d = p.delta;
    const double gd = p.gamma_d;
    const double base = d * d + p.gamma_f * p.gamma_f;
    return {gd * base, gd * (base - 2.0 * d * k) + 4.0 * p.gamma_f * p.omega_pu * p.omega_pu,
            gd * (k * k - 2.0 * d * k), gd * k * k};
}

// Root of the steady-state cubic on the physical branch [-1, 0]. With several
// admissible roots the one closest to -1 is returned and the multiplicity is
// reported through diag.
inline double solve_population_inversion(const SystemParams& p, double delta_sig,
                                         SteadyMode mode = SteadyMode::corrected_omega,
                                         Diagnostics* diag = nullptr) {
    p.validate();
    if (p.omega_pu == 0.0) return -1.0;
    if (p.gamma_d <= 0.0) throw PreconditionError("solve_population_inversion: needs gamma_d > 0 when driven");

    const auto coeffs = population_inversion_polynomial(p, delta_sig, mode);
    const auto roots = polynomial_roots(coeffs);
    constexpr double tol = 1e-9;
    std::vector<double> admissible;
    for (const complex& z : roots)
        if (std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z)) && z.real() >= -1.0 - tol && z.real() <= tol)
            admissible.push_back(std::clamp(z.real(), -1.0, 0.0));

    if (admissible.empty()) {
        std::ostringstream os;
        os << "solve_population_inversion: no real root in [-1, 0]; roots:";
        for (const complex& z : roots) os << " " << z;
        throw DomainError(os.str());
    }
    std::sort(admissible.begin(), admissible.end());
    if (admissible.size() > 1) {
        std::ostringstream os;
        os << "solve_population_inversion: " << admissible.size() << " admissible roots, picked " << admissible.front();
        warn(diag, os.str());
    }
    return admissible.front();
}

inline SteadyState steady_state(const SystemParams& p, double delta_sig, SteadyMode mode = SteadyMode::corrected_omega,
                                Diagnostics* diag = nullptr) {
    SteadyState s;
    s.sigma_z0 = solve_population_inversion(p, delta_sig, mode, diag);
    s.x0 = -2.0 * p.g * s.sigma_z0 / p.omega;
    s.sigma_m0 = -p.omega_pu * s.sigma_z0 / complex{p.delta + 2.0 * p.g * s.x0, -p.gamma_f};
    return s;
}

namespace detail {

constexpr double singular_tol = 1e-14;

[[noreturn]] inline void singular(const char* factor, double delta_sig, complex a, complex b, complex c) {
    std::ostringstream os;
    os << "chi1_full: " << factor << " vanishes at delta_sig=" << delta_sig << " (A=" << a << ", B=" << b
       << ", C=" << c << ")";
    throw SingularityError(os.str());
}

}  // namespace detail

// Full first-order susceptibility, transcribed term by term:
//   chi = i Gf [ (Opu + 2 g sm0 C) * N / D + sz0 ] / A
//   N = 2 Opu sz0 / A + 2 i conj(sm0)
//   D = Gd - i d - 2 i Opu [ i Opu (1/B - 1/A) + 2 i g C (conj(sm0)/B - sm0/A) ]
inline SusceptibilityPoint chi1_full(const SystemParams& p, double delta_sig,
                                     SteadyMode mode = SteadyMode::corrected_omega, Diagnostics* diag = nullptr) {
    p.check_weak_probe(diag, "chi1_full");
    const SteadyState ss = steady_state(p, delta_sig, mode, diag);
    const double d = delta_sig;
    const double opu = p.omega_pu;
    const complex sm0 = ss.sigma_m0;
    const complex sm0c = std::conj(sm0);

    const complex a = I * d - p.gamma_f - I * p.delta - 2.0 * I * p.g * ss.x0;
    const complex b = p.gamma_f - I * d - I * p.delta - 2.0 * I * p.g * ss.x0;
    const complex c_den{p.omega * p.omega - d * d, -p.gamma_r * d};
    const complex c = std::abs(c_den) < detail::singular_tol ? complex{std::numeric_limits<double>::infinity(), 0.0}
                                                             : -2.0 * p.omega * p.g / c_den;
    if (std::abs(a) < detail::singular_tol) detail::singular("A", d, a, b, c);
    if (std::abs(b) < detail::singular_tol) detail::singular("B", d, a, b, c);
    if (std::abs(c_den) < detail::singular_tol) detail::singular("denominator of C", d, a, b, c);

    const complex nested = p.gamma_d - I * d -
                           2.0 * I * opu * (I * opu * (1.0 / b - 1.0 / a) + 2.0 * I * p.g * c * (sm0c / b - sm0 / a));
    if (std::abs(nested) < detail::singular_tol) detail::singular("nested denominator", d, a, b, c);

    const complex numer = 2.0 * opu * ss.sigma_z0 / a + 2.0 * I * sm0c;
    const complex chi = I * p.gamma_f * ((opu + 2.0 * p.g * sm0 * c) * (numer / nested) + ss.sigma_z0) / a;
    return {d, chi, Route::full_eq7};
}

// Effective dressed-state susceptibility
//   chi = i Gx / (Gf - i[d - (Delta + Delta_s)] + Oc^2 / (gamma/2 - i(d - omega)))
inline SusceptibilityPoint chi1_eff(const SystemParams& p, double delta_sig, Numerator numerator = Numerator::gamma_f,
                                    Diagnostics* diag = nullptr) {
    p.validate();
    if (p.delta == 0.0 || p.omega == 0.0) throw PreconditionError("chi1_eff: Delta and omega must be nonzero");
    p.check_weak_probe(diag, "chi1_eff");
    const double oc = p.effective_coupling();
    const double shift = p.energy_shift();
    const double rate = numerator == Numerator::gamma_f ? p.gamma_f : p.gamma_d;
    const complex denom = p.gamma_f - I * (delta_sig - (p.delta + shift)) +
                          oc * oc / (0.5 * p.gamma_r - I * (delta_sig - p.omega));
    return {delta_sig, I * rate / denom, Route::effective_eq12};
}

// Resonant-drive form, valid once Delta + Delta_s = omega:
//   chi = i Gf / (Gf - i(d - omega) + Oc^2 / [gamma/2 - i(d - omega)])
inline SusceptibilityPoint chi1_eff_resonant(const SystemParams& p, double delta_sig, Diagnostics* diag = nullptr) {
    p.validate();
    const double mismatch = p.delta + p.energy_shift() - p.omega;
    if (std::abs(mismatch) > 1e-9) {
        std::ostringstream os;
        os << "chi1_eff_resonant: requires Delta = omega - Delta_s (off by " << mismatch << " GHz)";
        throw PreconditionError(os.str());
    }
    p.check_weak_probe(diag, "chi1_eff_resonant");
    const double oc = p.effective_coupling();
    const double x = delta_sig - p.omega;
    const complex denom = p.gamma_f - I * x + oc * oc / (0.5 * p.gamma_r - I * x);
    return {delta_sig, I * p.gamma_f / denom, Route::resonant_simplified};
}

// Dimensionful susceptibility (mu^2 / Gf) chi.
inline complex scale_susceptibility(complex chi, const SystemParams& p) {
    if (!p.mu) throw PreconditionError("scale_susceptibility: mu not set");
    if (p.gamma_f == 0.0) throw PreconditionError("scale_susceptibility: gamma_f = 0");
    return (*p.mu * *p.mu / p.gamma_f) * chi;
}

}  // namespace eit
