#pragma once

// Master-equation dynamics
//   d rho/dt = -i[H, rho] + sum_k r_k (A_k rho A_k^+ - 1/2 {A_k^+ A_k, rho})
// with a fixed-step fourth-order Runge-Kutta integrator.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eit/error.hpp"
#include "eit/hamiltonians.hpp"
#include "eit/operators.hpp"
#include "eit/params.hpp"

namespace eit {

class DensityMatrix {
public:
    DensityMatrix(HilbertSpace space, ComplexMatrix m) : space_(space), matrix_(std::move(m)) {
        const auto d = static_cast<Eigen::Index>(space_.total_dim());
        if (matrix_.rows() != d || matrix_.cols() != d) throw DimensionError("DensityMatrix: wrong dimension");
        if (hermiticity_error(matrix_) > 1e-10) throw PreconditionError("DensityMatrix: not hermitian");
        if (std::abs(matrix_.trace() - 1.0) > 1e-9) throw PreconditionError("DensityMatrix: trace != 1");
        if (min_eigenvalue(matrix_) < -1e-8) throw PreconditionError("DensityMatrix: not positive semidefinite");
    }

    static DensityMatrix pure(const HilbertSpace& s, Qubit q, std::size_t n) {
        return {s, projector(s, q, n).matrix()};
    }

    const HilbertSpace& space() const { return space_; }
    const ComplexMatrix& matrix() const { return matrix_; }

    static double min_eigenvalue(const ComplexMatrix& m) {
        const ComplexMatrix herm = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

private:
    HilbertSpace space_;
    ComplexMatrix matrix_;
};

struct Dissipator {
    Operator op;
    double rate;

    Dissipator(Operator a, double r) : op(std::move(a)), rate(r) {
        if (!(rate >= 0.0)) throw PreconditionError("Dissipator: rate must be >= 0");
    }
};

struct Observable {
    std::string name;
    Operator op;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // values[k][i]: observable k at times[i]

    double dt = 0.0;                    // step actually used
    double trace_drift = 0.0;           // max |Tr rho - 1|
    double hermiticity_error = 0.0;     // max |rho - rho^+|
    double min_eigenvalue = 1.0;        // over all samples
    double top_fock_population = 0.0;   // max population of level N
    bool truncation_flag = false;       // top_fock_population > 1e-4

    const std::vector<double>& series(const std::string& name) const {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == name) return values[k];
        throw PreconditionError("Trajectory: no series named " + name);
    }
};

inline ComplexMatrix lindblad_rhs(const Operator& h, const std::vector<Dissipator>& dissipators,
                                  const ComplexMatrix& rho) {
    const auto d = static_cast<Eigen::Index>(h.dim());
    if (rho.rows() != d || rho.cols() != d) throw DimensionError("lindblad_rhs: rho does not match H");
    const ComplexMatrix& hm = h.matrix();
    ComplexMatrix out = -I * (hm * rho - rho * hm);
    for (const Dissipator& k : dissipators) {
        h.require_same_space(k.op, "lindblad_rhs");
        if (k.rate == 0.0) continue;
        const ComplexMatrix& a = k.op.matrix();
        const ComplexMatrix ada = a.adjoint() * a;
        out += k.rate * (a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
    }
    return out;
}

inline ComplexMatrix lindblad_rhs(const Operator& h, const std::vector<Dissipator>& dissipators,
                                  const DensityMatrix& rho) {
    return lindblad_rhs(h, dissipators, rho.matrix());
}

// Liouvillian acting on column-stacked vec(rho).
inline ComplexMatrix liouvillian(const Operator& h, const std::vector<Dissipator>& dissipators) {
    const auto d = static_cast<Eigen::Index>(h.dim());
    ComplexMatrix l(d * d, d * d);
    ComplexMatrix basis = ComplexMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) {
            basis(i, j) = 1.0;
            const ComplexMatrix col = lindblad_rhs(h, dissipators, basis);
            l.col(i + j * d) = Eigen::Map<const ComplexVector>(col.data(), d * d);
            basis(i, j) = 0.0;
        }
    return l;
}

namespace detail {

// For a constant generator, one RK4 step of size h is the polynomial
// 1 + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24.
inline ComplexMatrix rk4_step_matrix(const ComplexMatrix& l, double h) {
    const Eigen::Index n = l.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix hl = h * l;
    ComplexMatrix t = id + 0.25 * hl;
    t = id + (hl / 3.0) * t;
    t = id + (0.5 * hl) * t;
    return id + hl * t;
}

inline ComplexMatrix matrix_power(ComplexMatrix base, std::size_t k) {
    ComplexMatrix result = ComplexMatrix::Identity(base.rows(), base.cols());
    bool first = true;
    while (k > 0) {
        if (k & 1U) {
            if (first) {
                result = base;
                first = false;
            } else {
                result = (result * base).eval();
            }
        }
        k >>= 1U;
        if (k > 0) base = (base * base).eval();
    }
    return result;
}

inline std::size_t steps_for(double span, double dt) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)));
}

}  // namespace detail

struct EvolveOptions {
    double stride = 0.5;   // output sampling interval, ns
    bool strict = false;   // truncation flag becomes an error
    double max_trace_drift = 1e-6;
};

// Largest dt accepted by evolve for a given Hamiltonian.
inline double max_stable_dt(const Operator& h) {
    const double norm = max_abs_entry(h.matrix());
    return norm > 0.0 ? 0.01 / norm : std::numeric_limits<double>::infinity();
}

// Fixed-step RK4 from rho0 to t_end, sampled every options.stride. The step is
// shrunk, never grown, so that an integer number of steps spans each stride.
// No trace renormalization is applied.
inline Trajectory evolve(const Operator& h, const std::vector<Dissipator>& dissipators, const DensityMatrix& rho0,
                         double t_end, double dt, const std::vector<Observable>& observables,
                         const EvolveOptions& options = {}) {
    h.require_same_space(Operator::zero(rho0.space()), "evolve");
    for (const auto& o : observables) h.require_same_space(o.op, "evolve observable");
    if (!(t_end >= 0.0)) throw PreconditionError("evolve: t_end must be >= 0");
    if (!(dt > 0.0)) throw PreconditionError("evolve: dt must be > 0");
    if (!(options.stride > 0.0)) throw PreconditionError("evolve: stride must be > 0");
    if (dt > max_stable_dt(h) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "evolve: dt=" << dt << " exceeds 0.01/max|H| = " << max_stable_dt(h);
        throw PreconditionError(os.str());
    }

    const HilbertSpace& space = rho0.space();
    const auto d = static_cast<Eigen::Index>(space.total_dim());
    const ComplexMatrix l = liouvillian(h, dissipators);

    const std::size_t n_full = static_cast<std::size_t>(std::floor(t_end / options.stride + 1e-9));
    const double remainder = t_end - static_cast<double>(n_full) * options.stride;

    Trajectory traj;
    traj.dt = options.stride / static_cast<double>(detail::steps_for(options.stride, dt));
    for (const auto& o : observables) traj.names.push_back(o.name);
    traj.values.resize(observables.size());

    const std::size_t top = space.fock_cutoff();
    const auto idx_top_e = static_cast<Eigen::Index>(space.index(Qubit::excited, top));
    const auto idx_top_g = static_cast<Eigen::Index>(space.index(Qubit::ground, top));

    auto record = [&](double t, const ComplexVector& v) {
        const Eigen::Map<const ComplexMatrix> rho(v.data(), d, d);
        for (std::size_t k = 0; k < observables.size(); ++k)
            traj.values[k].push_back(expectation(rho, observables[k].op).real());
        traj.times.push_back(t);
        const double drift = std::abs(rho.trace() - 1.0);
        traj.trace_drift = std::max(traj.trace_drift, drift);
        traj.hermiticity_error = std::max(traj.hermiticity_error, hermiticity_error(rho));
        traj.min_eigenvalue = std::min(traj.min_eigenvalue, DensityMatrix::min_eigenvalue(rho));
        const double top_pop = (rho(idx_top_e, idx_top_e) + rho(idx_top_g, idx_top_g)).real();
        traj.top_fock_population = std::max(traj.top_fock_population, top_pop);
        if (!std::isfinite(drift)) {
            std::ostringstream os;
            os << "evolve: non-finite state at t=" << t << " ns";
            throw NumericalError(os.str());
        }
        if (drift > options.max_trace_drift) {
            std::ostringstream os;
            os << "evolve: trace drift " << drift << " at t=" << t << " ns; reduce dt (now " << traj.dt << ")";
            throw NumericalError(os.str());
        }
    };

    ComplexVector v = Eigen::Map<const ComplexVector>(rho0.matrix().data(), d * d);
    record(0.0, v);
    if (n_full > 0) {
        const std::size_t k = detail::steps_for(options.stride, dt);
        const ComplexMatrix propagator =
            detail::matrix_power(detail::rk4_step_matrix(l, options.stride / static_cast<double>(k)), k);
        for (std::size_t j = 1; j <= n_full; ++j) {
            v = propagator * v;
            record(static_cast<double>(j) * options.stride, v);
        }
    }
    if (remainder > 1e-9 * options.stride) {
        const std::size_t k = detail::steps_for(remainder, dt);
        v = detail::matrix_power(detail::rk4_step_matrix(l, remainder / static_cast<double>(k)), k) * v;
        record(t_end, v);
    }

    traj.truncation_flag = traj.top_fock_population > 1e-4;
    if (traj.truncation_flag && options.strict) {
        std::ostringstream os;
        os << "evolve: population " << traj.top_fock_population << " reached Fock level " << top
           << "; raise the cutoff";
        throw NumericalError(os.str());
    }
    return traj;
}

// P_e0, P_g1, P_g0
inline std::vector<Observable> population_observables(const HilbertSpace& s) {
    return {{"P_e0", projector(s, Qubit::excited, 0)},
            {"P_g1", projector(s, Qubit::ground, 1)},
            {"P_g0", projector(s, Qubit::ground, 0)}};
}

// Standard channels: s- at Gf and b at gamma, plus optional s_z dephasing.
inline std::vector<Dissipator> standard_dissipators(const SystemParams& p, const HilbertSpace& s,
                                                    double dephasing_rate = 0.0) {
    std::vector<Dissipator> out{{sigma_minus(s), p.gamma_f}, {boson_annihilation(s), p.gamma_r}};
    if (dephasing_rate > 0.0) out.emplace_back(sigma_z(s), dephasing_rate);
    return out;
}

struct CompareOptions {
    std::size_t fock_cutoff = 5;
    std::optional<double> dt;     // default: min(0.001, 0.01 / max|H|)
    double stride = 0.5;
    double dephasing_rate = 0.0;  // optional D[s_z] channel, off by default
    bool truncation_check = true; // rerun at 2N
    bool strict = false;
};

struct Comparison {
    Trajectory full;
    Trajectory effective;
    std::array<double, 3> max_deviation{};  // P_e0, P_g1, P_g0
    std::optional<double> truncation_delta; // max |P(N) - P(2N)| over both runs
    std::vector<std::string> warnings;
};

namespace detail {

inline double max_series_difference(const Trajectory& a, const Trajectory& b, const std::string& name) {
    const auto& x = a.series(name);
    const auto& y = b.series(name);
    if (x.size() != y.size()) throw NumericalError("trajectories sampled on different grids");
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

inline std::pair<Trajectory, Trajectory> run_pair(const SystemParams& p, bool damped, double t_end,
                                                  std::size_t cutoff, const CompareOptions& o) {
    const HilbertSpace s(cutoff);
    const Operator h_full = build_h_sys_prime(p, cutoff);
    const Operator h_eff = build_h_eff(p, cutoff);
    const double dt = o.dt.value_or(std::min({0.001, max_stable_dt(h_full), max_stable_dt(h_eff)}));
    const auto dissipators = damped ? standard_dissipators(p, s, o.dephasing_rate) : std::vector<Dissipator>{};
    const auto rho0 = DensityMatrix::pure(s, Qubit::ground, 1);
    const auto obs = population_observables(s);
    EvolveOptions eo;
    eo.stride = o.stride;
    eo.strict = o.strict;
    auto eff = std::async(std::launch::async, [&] { return evolve(h_eff, dissipators, rho0, t_end, dt, obs, eo); });
    Trajectory full = evolve(h_full, dissipators, rho0, t_end, dt, obs, eo);
    return {std::move(full), eff.get()};
}

}  // namespace detail

// Evolves |g,1> under H'_sys and H_eff with identical dissipators and reports
// the largest population gaps.
inline Comparison compare_full_vs_effective(const SystemParams& p, bool damped, double t_end,
                                            const CompareOptions& options = {}) {
    Diagnostics diag;
    diag.strict = options.strict;
    build_h_eff(p, options.fock_cutoff, &diag);

    Comparison out;
    std::future<std::pair<Trajectory, Trajectory>> doubled;
    if (options.truncation_check)
        doubled = std::async(std::launch::async, [&] {
            return detail::run_pair(p, damped, t_end, 2 * options.fock_cutoff, options);
        });
    std::tie(out.full, out.effective) = detail::run_pair(p, damped, t_end, options.fock_cutoff, options);

    const std::array<const char*, 3> names{"P_e0", "P_g1", "P_g0"};
    for (std::size_t k = 0; k < names.size(); ++k)
        out.max_deviation[k] = detail::max_series_difference(out.full, out.effective, names[k]);

    if (options.truncation_check) {
        const auto [full2, eff2] = doubled.get();
        double delta = 0.0;
        for (const char* n : names)
            delta = std::max({delta, detail::max_series_difference(out.full, full2, n),
                              detail::max_series_difference(out.effective, eff2, n)});
        out.truncation_delta = delta;
        if (delta > 1e-4) {
            std::ostringstream os;
            os << "compare_full_vs_effective: populations move by " << delta << " when the Fock cutoff doubles";
            diag.warn(os.str());
        }
    }
    if (out.full.truncation_flag || out.effective.truncation_flag)
        diag.warn("compare_full_vs_effective: Fock ceiling population above 1e-4");
    out.warnings = diag.warnings;
    return out;
}

}  // namespace eit
