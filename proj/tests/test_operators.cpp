#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eit/operators.hpp"
#include "test_support.hpp"

using namespace eit;
using eit::test::max_abs;

TEST(Kron, IdentityTimesIdentity) {
    EXPECT_EQ(max_abs(kron(identity(2), identity(2)) - identity(4)), 0.0);
}

TEST(Kron, SigmaZTimesIdentityIsBlockDiagonal) {
    const ComplexMatrix m = kron(pauli::z(), identity(2));
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect.diagonal() << 1.0, 1.0, -1.0, -1.0;
    EXPECT_EQ(max_abs(m - expect), 0.0);
}

TEST(Kron, RaisingTimesAnnihilationMovesG1ToE0) {
    // qubit (x) Fock with N = 1: |e,0>=0, |e,1>=1, |g,0>=2, |g,1>=3.
    // s+ = |e><g| and a = |0><1|, so the only nonzero entry is <e,0|.|g,1>.
    const ComplexMatrix m = kron(pauli::plus(), annihilation(1));
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect(0, 3) = 1.0;
    EXPECT_EQ(max_abs(m - expect), 0.0);

    ComplexVector g1 = ComplexVector::Zero(4);
    g1(3) = 1.0;
    const ComplexVector out = m * g1;
    EXPECT_EQ(out(0), complex(1.0, 0.0));
    EXPECT_EQ(out.squaredNorm(), 1.0);
}

TEST(Kron, AssociativeOnRandomMatrices) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> dim(1, 3);
        const ComplexMatrix a = test::random_matrix(rng, dim(rng), dim(rng));
        const ComplexMatrix b = test::random_matrix(rng, dim(rng), dim(rng));
        const ComplexMatrix c = test::random_matrix(rng, dim(rng), dim(rng));
        const ComplexMatrix lhs = kron(kron(a, b), c);
        const ComplexMatrix rhs = kron(a, kron(b, c));
        ASSERT_EQ(lhs.rows(), rhs.rows());
        ASSERT_EQ(lhs.cols(), rhs.cols());
        EXPECT_LE(max_abs(lhs - rhs), 1e-12);
    }
}

TEST(Annihilation, RejectsZeroCutoff) { EXPECT_THROW(annihilation(0), PreconditionError); }

TEST(Annihilation, LowestLevels) {
    const ComplexMatrix a = annihilation(1);
    ComplexVector one(2), zero(2);
    one << 0.0, 1.0;
    zero << 1.0, 0.0;
    EXPECT_EQ(max_abs(a * one - zero), 0.0);
    EXPECT_EQ((a * zero).norm(), 0.0);
}

TEST(Annihilation, SqrtNRule) {
    const ComplexMatrix a = annihilation(3);
    EXPECT_DOUBLE_EQ(a(2, 3).real(), std::sqrt(3.0));
    EXPECT_EQ(a.rows(), 4);
}

TEST(Annihilation, CanonicalCommutatorBelowCutoff) {
    for (std::size_t n : {1U, 4U, 9U}) {
        const ComplexMatrix a = annihilation(n);
        const ComplexMatrix c = a * a.adjoint() - a.adjoint() * a;
        const auto top = static_cast<Eigen::Index>(n);
        for (Eigen::Index i = 0; i <= top; ++i)
            for (Eigen::Index j = 0; j <= top; ++j) {
                if (i == top && j == top) continue;
                EXPECT_NEAR(std::abs(c(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 1e-14);
            }
        EXPECT_NEAR(c(top, top).real(), -static_cast<double>(n), 1e-12);
    }
}

TEST(BasisConvention, QubitMajorIndexing) {
    const HilbertSpace s(5);
    EXPECT_EQ(s.total_dim(), 12U);
    EXPECT_EQ(s.index(Qubit::excited, 0), 0U);
    EXPECT_EQ(s.index(Qubit::excited, 5), 5U);
    EXPECT_EQ(s.index(Qubit::ground, 0), 6U);
    EXPECT_EQ(s.index(Qubit::ground, 1), 7U);
    EXPECT_THROW((void)s.index(Qubit::ground, 6), PreconditionError);
    EXPECT_THROW(HilbertSpace(0), PreconditionError);

    const Operator sz = sigma_z(s);
    EXPECT_EQ(sz(s.index(Qubit::excited, 3), s.index(Qubit::excited, 3)), complex(1.0));
    EXPECT_EQ(sz(s.index(Qubit::ground, 3), s.index(Qubit::ground, 3)), complex(-1.0));
    const Operator n = boson_number(s);
    EXPECT_EQ(n(s.index(Qubit::ground, 4), s.index(Qubit::ground, 4)), complex(4.0));
}

TEST(Commutator, PauliAlgebra) {
    for (std::size_t cutoff : {1U, 3U}) {
        const HilbertSpace s(cutoff);
        const Operator sp = sigma_plus(s), sm = sigma_minus(s), sz = sigma_z(s);
        EXPECT_LE(max_abs(commutator(sp, sm).matrix() - sz.matrix()), 1e-14);
        EXPECT_LE(max_abs(commutator(sz, sp).matrix() - 2.0 * sp.matrix()), 1e-14);
        EXPECT_LE(max_abs(commutator(sz, sm).matrix() + 2.0 * sm.matrix()), 1e-14);
    }
}

TEST(Commutator, SelfCommutatorVanishes) {
    std::mt19937 rng(11);
    const HilbertSpace s(2);
    const Operator m(s, test::random_matrix(rng, 6, 6));
    EXPECT_LE(max_abs(commutator(m, m).matrix()), 1e-13);
}

TEST(Commutator, RejectsMismatchedSpaces) {
    EXPECT_THROW(commutator(sigma_z(HilbertSpace(1)), sigma_z(HilbertSpace(2))), DimensionError);
    EXPECT_THROW(Operator(HilbertSpace(1), identity(3)), DimensionError);
}

TEST(Expectation, BasisStates) {
    const HilbertSpace s(1);
    EXPECT_EQ(expectation(projector(s, Qubit::excited, 0).matrix(), sigma_z(s)), complex(1.0));
    EXPECT_EQ(expectation(projector(s, Qubit::ground, 1).matrix(), boson_number(s)), complex(1.0));
    const ComplexMatrix mixed = identity(4) / 4.0;
    EXPECT_NEAR(std::abs(expectation(mixed, sigma_z(s))), 0.0, 1e-15);
    EXPECT_THROW(expectation(identity(6) / 6.0, sigma_z(s)), DimensionError);
}

TEST(Hermiticity, ConstructedObservables) {
    const HilbertSpace s(6);
    const Operator b = boson_annihilation(s);
    for (const Operator& op : {sigma_z(s), boson_number(s), b + b.adjoint(), sigma_plus(s) + sigma_minus(s),
                               (b.adjoint() + b) * sigma_z(s)})
        EXPECT_LE(hermiticity_error(op.matrix()), 1e-12);
}
