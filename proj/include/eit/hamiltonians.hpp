#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "eit/operators.hpp"
#include "eit/params.hpp"

namespace eit {

// H' = Delta/2 sz + omega b^dag b + g (b^dag + b) sz - Omega_pu (s+ + s-)
inline Operator build_h_sys_prime(const SystemParams& p, std::size_t fock_cutoff) {
    p.validate();
    const HilbertSpace s(fock_cutoff);
    const Operator sz = sigma_z(s);
    const Operator b = boson_annihilation(s);
    const Operator bd = boson_creation(s);
    return 0.5 * p.delta * sz + p.omega * boson_number(s) + p.g * ((bd + b) * sz) -
           p.omega_pu * (sigma_plus(s) + sigma_minus(s));
}

// H_eff = (Omega_pu^2/Delta) sz + (2 g Omega_pu / Delta)(b^dag s- + b s+)
inline Operator build_h_eff(const SystemParams& p, std::size_t fock_cutoff, Diagnostics* diag = nullptr) {
    p.validate();
    if (p.delta == 0.0) throw PreconditionError("build_h_eff: Delta = 0");
    if (std::abs(p.delta - p.omega) / p.omega > 0.1)
        warn(diag, "build_h_eff: |Delta - omega|/omega > 0.1, effective Hamiltonian outside its derivation");
    const HilbertSpace s(fock_cutoff);
    const Operator sm = sigma_minus(s);
    const Operator sp = sigma_plus(s);
    const Operator b = boson_annihilation(s);
    const Operator bd = boson_creation(s);
    return (p.omega_pu * p.omega_pu / p.delta) * sigma_z(s) + p.effective_coupling() * (bd * sm + b * sp);
}

// Probe drive at time t: -Omega_pr (s+ e^{-i delta t} + s- e^{+i delta t}).
// The sigma^- exponent is taken with + sign so the operator is hermitian.
inline Operator build_h_probe_term(const SystemParams& p, std::size_t fock_cutoff, double delta_sig, double t) {
    p.validate();
    const HilbertSpace s(fock_cutoff);
    const complex phase = std::exp(-I * (delta_sig * t));
    return (-p.omega_pr * phase) * sigma_plus(s) + (-p.omega_pr * std::conj(phase)) * sigma_minus(s);
}

// s+ s- + b^dag b, conserved by H_eff.
inline Operator excitation_number(const HilbertSpace& s) { return sigma_plus(s) * sigma_minus(s) + boson_number(s); }

}  // namespace eit
