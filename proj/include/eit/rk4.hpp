#pragma once

#include <concepts>

namespace eit {

template <typename S>
concept VectorSpace = requires(S a, S b, double h) {
    { a + b } -> std::convertible_to<S>;
    { h * a } -> std::convertible_to<S>;
};

// One classic fourth-order Runge-Kutta step of dy/dt = f(y, t).
template <VectorSpace State, typename Rhs>
State rk4_step(const Rhs& f, const State& y, double t, double h) {
    const State k1 = f(y, t);
    const State k2 = f(y + (0.5 * h) * k1, t + 0.5 * h);
    const State k3 = f(y + (0.5 * h) * k2, t + 0.5 * h);
    const State k4 = f(y + h * k3, t + h);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace eit
