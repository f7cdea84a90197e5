#pragma once

// Dense operator algebra on the qubit (x) truncated-Fock space.
//
// Basis convention, used everywhere in this library:
//   qubit index 0 = |e>, 1 = |g>   (so sigma_z = diag(+1, -1))
//   composite space = qubit (x) resonator, index = q * (N + 1) + n

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "eit/error.hpp"

namespace eit {

using complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr complex I{0.0, 1.0};

enum class Qubit : std::size_t { excited = 0, ground = 1 };

class HilbertSpace {
public:
    explicit HilbertSpace(std::size_t fock_cutoff) : fock_cutoff_(fock_cutoff) {
        if (fock_cutoff_ < 1)
            throw PreconditionError("HilbertSpace: fock cutoff must be >= 1");
    }

    static constexpr std::size_t qubit_dim() { return 2; }
    std::size_t fock_cutoff() const { return fock_cutoff_; }
    std::size_t fock_dim() const { return fock_cutoff_ + 1; }
    std::size_t total_dim() const { return qubit_dim() * fock_dim(); }

    std::size_t index(Qubit q, std::size_t n) const {
        if (n > fock_cutoff_) throw PreconditionError("HilbertSpace::index: Fock level above cutoff");
        return static_cast<std::size_t>(q) * fock_dim() + n;
    }

    bool operator==(const HilbertSpace&) const = default;

private:
    std::size_t fock_cutoff_;
};

// Standard Kronecker product; (a (x) b)(i*rb + k, j*cb + l) = a(i,j) b(k,l).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index rb = b.rows(), cb = b.cols();
    ComplexMatrix out(a.rows() * rb, a.cols() * cb);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    return out;
}

inline ComplexMatrix identity(std::size_t n) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

// a|n> = sqrt(n)|n-1> on Fock levels 0..N.
inline ComplexMatrix annihilation(std::size_t fock_cutoff) {
    if (fock_cutoff < 1) throw PreconditionError("annihilation: fock cutoff must be >= 1");
    const auto dim = static_cast<Eigen::Index>(fock_cutoff + 1);
    ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline ComplexMatrix creation(std::size_t fock_cutoff) { return annihilation(fock_cutoff).adjoint(); }

inline ComplexMatrix number(std::size_t fock_cutoff) {
    const auto dim = static_cast<Eigen::Index>(fock_cutoff + 1);
    ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

namespace pauli {

inline ComplexMatrix z() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

// sigma^+ = |e><g|
inline ComplexMatrix plus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

// sigma^- = |g><e|
inline ComplexMatrix minus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

inline ComplexMatrix x() { return plus() + minus(); }

}  // namespace pauli

// A matrix bound to the composite space it acts on.
class Operator {
public:
    Operator(HilbertSpace space, ComplexMatrix matrix) : space_(space), matrix_(std::move(matrix)) {
        const auto d = static_cast<Eigen::Index>(space_.total_dim());
        if (matrix_.rows() != d || matrix_.cols() != d)
            throw DimensionError("Operator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                                 std::to_string(matrix_.cols()) + ", space needs " + std::to_string(d));
    }

    static Operator zero(HilbertSpace space) {
        const auto d = static_cast<Eigen::Index>(space.total_dim());
        return {space, ComplexMatrix::Zero(d, d)};
    }

    const HilbertSpace& space() const { return space_; }
    const ComplexMatrix& matrix() const { return matrix_; }
    std::size_t dim() const { return space_.total_dim(); }

    complex operator()(std::size_t row, std::size_t col) const {
        return matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    Operator adjoint() const { return {space_, matrix_.adjoint()}; }

    Operator& operator+=(const Operator& o) {
        require_same_space(o, "operator+=");
        matrix_ += o.matrix_;
        return *this;
    }
    Operator& operator-=(const Operator& o) {
        require_same_space(o, "operator-=");
        matrix_ -= o.matrix_;
        return *this;
    }
    Operator& operator*=(complex s) {
        matrix_ *= s;
        return *this;
    }

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator*(Operator a, complex s) { return a *= s; }
    friend Operator operator*(complex s, Operator a) { return a *= s; }
    friend Operator operator*(double s, Operator a) { return a *= complex{s, 0.0}; }
    friend Operator operator*(const Operator& a, const Operator& b) {
        a.require_same_space(b, "operator*");
        return {a.space_, a.matrix_ * b.matrix_};
    }

    void require_same_space(const Operator& o, const char* where) const {
        if (!(space_ == o.space_))
            throw DimensionError(std::string(where) + ": operators live on different spaces (N=" +
                                 std::to_string(space_.fock_cutoff()) + " vs N=" +
                                 std::to_string(o.space_.fock_cutoff()) + ")");
    }

private:
    HilbertSpace space_;
    ComplexMatrix matrix_;
};

// Embeddings into qubit (x) resonator.
inline Operator qubit_op(const HilbertSpace& s, const ComplexMatrix& q) {
    return {s, kron(q, identity(s.fock_dim()))};
}
inline Operator fock_op(const HilbertSpace& s, const ComplexMatrix& f) {
    return {s, kron(identity(2), f)};
}

inline Operator sigma_z(const HilbertSpace& s) { return qubit_op(s, pauli::z()); }
inline Operator sigma_plus(const HilbertSpace& s) { return qubit_op(s, pauli::plus()); }
inline Operator sigma_minus(const HilbertSpace& s) { return qubit_op(s, pauli::minus()); }
inline Operator boson_annihilation(const HilbertSpace& s) { return fock_op(s, annihilation(s.fock_cutoff())); }
inline Operator boson_creation(const HilbertSpace& s) { return fock_op(s, creation(s.fock_cutoff())); }
inline Operator boson_number(const HilbertSpace& s) { return fock_op(s, number(s.fock_cutoff())); }
inline Operator identity_op(const HilbertSpace& s) { return {s, identity(s.total_dim())}; }

// |q,n><q',n'|
inline Operator transition(const HilbertSpace& s, Qubit q, std::size_t n, Qubit qp, std::size_t np) {
    Operator op = Operator::zero(s);
    ComplexMatrix m = op.matrix();
    m(static_cast<Eigen::Index>(s.index(q, n)), static_cast<Eigen::Index>(s.index(qp, np))) = 1.0;
    return {s, std::move(m)};
}
inline Operator projector(const HilbertSpace& s, Qubit q, std::size_t n) { return transition(s, q, n, q, n); }

inline Operator commutator(const Operator& a, const Operator& b) {
    a.require_same_space(b, "commutator");
    return {a.space(), a.matrix() * b.matrix() - b.matrix() * a.matrix()};
}

// Tr(rho op)
inline complex expectation(const ComplexMatrix& rho, const Operator& op) {
    if (rho.rows() != static_cast<Eigen::Index>(op.dim()) || rho.cols() != rho.rows())
        throw DimensionError("expectation: rho is " + std::to_string(rho.rows()) + "x" +
                             std::to_string(rho.cols()) + ", operator dimension " + std::to_string(op.dim()));
    return (rho.cwiseProduct(op.matrix().transpose())).sum();
}

// max |M - M^dagger| entrywise
inline double hermiticity_error(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double max_abs_entry(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace eit
