#include <gtest/gtest.h>

#include <random>

#include "auxeng/fixtures.hpp"
#include "auxeng/operator_algebra.hpp"

using namespace auxeng;

namespace {

Matrix random_unitary(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> n;
    Matrix z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = Complex(n(rng), n(rng));
    Eigen::HouseholderQR<Matrix> qr(z);
    return qr.householderQ();
}

Matrix random_hermitian(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> n;
    Matrix z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = Complex(n(rng), n(rng));
    return 0.5 * (z + z.adjoint());
}

}  // namespace

TEST(PauliAssemble, SingleX) {
    const auto x = pauli_assemble({{1.0, parse_pauli_string("X")}}, 1);
    Matrix expected(2, 2);
    expected << 0, 1, 1, 0;
    EXPECT_LT((x.matrix() - expected).norm(), 1e-15);
    EXPECT_TRUE(x.hermitian());
}

TEST(PauliAssemble, TwoQubitLadderHamiltonian) {
    const auto h = pauli_assemble({{0.914, parse_pauli_string("ZZ")}, {0.405, parse_pauli_string("IX")}, {-0.5, parse_pauli_string("XX")}}, 2);
    // aZZ + bIX - cXX written out element by element
    Matrix expected(4, 4);
    expected << 0.914, 0.405, 0, -0.5,
                0.405, -0.914, -0.5, 0,
                0, -0.5, -0.914, 0.405,
                -0.5, 0, 0.405, 0.914;
    EXPECT_LT((h.matrix() - expected).norm(), 1e-14);
}

TEST(PauliAssemble, EmptyIsZero) {
    const auto h = pauli_assemble(std::vector<PauliTerm>{}, 2);
    EXPECT_EQ(h.dim(), 4);
    EXPECT_EQ(h.matrix().norm(), 0.0);
}

TEST(PauliAssemble, MismatchedLengthThrows) {
    EXPECT_THROW(pauli_assemble({{1.0, parse_pauli_string("XZ")}}, 1), DimensionError);
}

TEST(PauliProject, BasisMember) {
    const Matrix xx = pauli_string_matrix(parse_pauli_string("XX"));
    const std::vector<PauliString> basis{parse_pauli_string("XX")};
    const auto p = pauli_project(xx, basis);
    EXPECT_NEAR(p.coefficients[0], 1.0, 1e-15);
    EXPECT_NEAR(p.residual_norm, 0.0, 1e-15);
}

TEST(PauliProject, OrthogonalTermLeavesFrobeniusNorm) {
    const Matrix xx = pauli_string_matrix(parse_pauli_string("XX"));
    const std::vector<PauliString> basis{parse_pauli_string("ZZ")};
    const auto p = pauli_project(xx, basis);
    EXPECT_NEAR(p.coefficients[0], 0.0, 1e-15);
    EXPECT_NEAR(p.residual_norm, 2.0, 1e-14);
}

TEST(PauliProject, UncoupledProbeHamiltonianIsLocal) {
    const auto cfg = twoqubit_probe_config();
    const auto p = pauli_project(cfg.h0.matrix(), local_pauli_strings(2));
    EXPECT_NEAR(p.residual_norm, 0.0, 1e-14);
}

TEST(PauliProject, NonPowerOfTwoThrows) {
    const std::vector<PauliString> basis{parse_pauli_string("X")};
    EXPECT_THROW(pauli_project(Matrix::Identity(3, 3), basis), UnsupportedError);
}

TEST(PauliProject, RoundTripOnFullBasis) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    for (int q = 1; q <= 3; ++q) {
        const auto basis = all_pauli_strings(q);
        std::vector<PauliTerm> terms;
        for (const auto& s : basis) terms.push_back({n(rng), s});
        const auto a = pauli_assemble(terms, q);
        const auto p = pauli_project(a.matrix(), basis);
        for (std::size_t i = 0; i < terms.size(); ++i) EXPECT_NEAR(p.coefficients[i], terms[i].coefficient, 1e-12);
        EXPECT_LT(p.residual_norm, 1e-12);
    }
}

TEST(Eigendecompose, PauliXSpectrum) {
    const auto s = eigendecompose(0.5 * pauli_assemble({{1.0, parse_pauli_string("X")}}, 1));
    EXPECT_NEAR(s.eigenvalues(0).real(), -0.5, 1e-15);
    EXPECT_NEAR(s.eigenvalues(1).real(), 0.5, 1e-15);
}

TEST(Eigendecompose, UncoupledProbeSpectrum) {
    const auto s = eigendecompose(twoqubit_probe_config().h0);
    const double expected[] = {-1.5, -0.5, 0.5, 1.5};
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(s.eigenvalues(k).real(), expected[k], 1e-12);
}

TEST(Eigendecompose, DiagonalInput) {
    const auto s = eigendecompose(HermitianOperator::ladder(3));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(s.eigenvalues(k).real(), k, 1e-15);
    EXPECT_LT((s.eigenvectors - Matrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(Eigendecompose, ReconstructionAndOrthonormality) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 7;
        const Matrix a = random_hermitian(rng, d);
        const auto s = eigendecompose(a, SpectralMode::hermitian);
        const Matrix rec = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
        EXPECT_LE((rec - a).norm(), 1e-10 * a.norm());
        EXPECT_LT((s.eigenvectors.adjoint() * s.eigenvectors - Matrix::Identity(d, d)).norm(), 1e-10);
        for (int k = 1; k < d; ++k) EXPECT_LE(s.eigenvalues(k - 1).real(), s.eigenvalues(k).real());
    }
}

TEST(Eigendecompose, PhaseConventionIsDeterministic) {
    std::mt19937_64 rng(11);
    const Matrix a = random_hermitian(rng, 5);
    const auto s = eigendecompose(a, SpectralMode::hermitian);
    for (int k = 0; k < 5; ++k) {
        Eigen::Index i;
        s.eigenvectors.col(k).cwiseAbs().maxCoeff(&i);
        EXPECT_NEAR(s.eigenvectors(i, k).imag(), 0.0, 1e-14);
        EXPECT_GT(s.eigenvectors(i, k).real(), 0.0);
    }
    const auto again = eigendecompose(a, SpectralMode::hermitian);
    EXPECT_EQ((s.eigenvectors - again.eigenvectors).norm(), 0.0);
}

TEST(Eigendecompose, SpectrumInvariantUnderConjugation) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 5;
        const Matrix a = random_hermitian(rng, d);
        const Matrix u = random_unitary(rng, d);
        const auto s1 = eigendecompose(a, SpectralMode::hermitian);
        const auto s2 = eigendecompose(Matrix(u * a * u.adjoint()), SpectralMode::hermitian);
        EXPECT_LT((s1.eigenvalues - s2.eigenvalues).norm(), 1e-10);
    }
}

TEST(Eigendecompose, NearDegenerateIsFlagged) {
    const auto s = eigendecompose(HermitianOperator::diagonal(std::vector<double>{0.0, 1e-12, 1.0}));
    EXPECT_TRUE(s.near_degenerate);
    EXPECT_FALSE(eigendecompose(HermitianOperator::ladder(3)).near_degenerate);
}

TEST(Eigendecompose, GeneralModeSortsByRealPart) {
    Matrix a(2, 2);
    a << Complex(1.0, -0.1), 0.2, 0.2, Complex(0.0, -0.3);
    const auto s = eigendecompose(a, SpectralMode::general);
    EXPECT_LT(s.eigenvalues(0).real(), s.eigenvalues(1).real());
    for (int k = 0; k < 2; ++k) EXPECT_LT((a * s.eigenvectors.col(k) - s.eigenvalues(k) * s.eigenvectors.col(k)).norm(), 1e-12);
}

TEST(Tensor, Definitions) {
    const auto i2 = HermitianOperator::identity(2);
    const auto z = pauli_assemble({{1.0, parse_pauli_string("Z")}}, 1);
    const auto x = pauli_assemble({{1.0, parse_pauli_string("X")}}, 1);
    EXPECT_LT((tensor(i2, i2).matrix() - Matrix::Identity(4, 4)).norm(), 1e-15);
    Matrix zi = Matrix::Zero(4, 4);
    zi.diagonal() << 1, 1, -1, -1;
    EXPECT_LT((tensor(z, i2).matrix() - zi).norm(), 1e-15);
    Matrix xz(4, 4);
    xz << 0, 0, 1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, -1, 0, 0;
    EXPECT_LT((tensor(x, z).matrix() - xz).norm(), 1e-15);
}

TEST(Tensor, KroneckerSumSpectrum) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const int da = 2 + trial % 3, db = 2 + (trial / 3) % 3;
        const HermitianOperator a(random_hermitian(rng, da), true), b(random_hermitian(rng, db), true);
        const auto sum = tensor(a, HermitianOperator::identity(db)) + tensor(HermitianOperator::identity(da), b);
        const auto s = eigendecompose(sum).real_eigenvalues();
        const auto ea = eigendecompose(a).real_eigenvalues(), eb = eigendecompose(b).real_eigenvalues();
        std::vector<double> pairs;
        for (int i = 0; i < da; ++i)
            for (int j = 0; j < db; ++j) pairs.push_back(ea(i) + eb(j));
        std::sort(pairs.begin(), pairs.end());
        for (std::size_t k = 0; k < pairs.size(); ++k) EXPECT_NEAR(s(static_cast<Eigen::Index>(k)), pairs[k], 1e-10);
    }
}

TEST(HermitianOperator, RejectsNonHermitianWhenFlagged) {
    Matrix a(2, 2);
    a << 0, 1, 0, 0;
    EXPECT_THROW(HermitianOperator(a, true), PreconditionError);
    EXPECT_FALSE(HermitianOperator(a).hermitian());
}

TEST(HermitianOperator, RejectsDimensionOne) {
    EXPECT_THROW(HermitianOperator(Matrix::Identity(1, 1)), DimensionError);
}

TEST(HermitianOperator, SymmetrizesWithinTolerance) {
    Matrix a(2, 2);
    a << 0, Complex(1, 1e-14), Complex(1, -1e-14 + 1e-15), 0;
    const HermitianOperator h(a, true);
    EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
}
