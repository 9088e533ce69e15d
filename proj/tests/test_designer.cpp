#include <gtest/gtest.h>

#include "auxeng/designer.hpp"
#include "auxeng/fixtures.hpp"
#include "support.hpp"

using namespace auxeng;
using auxeng::testing::kMatchTolerance;
using auxeng::testing::probe_distance;

namespace {

// Probe coupling with the exact ratio f/g = sqrt(2) in the ladder frame.
Matrix probe_vtilde() {
    const auto cfg = twoqubit_probe_config(1.6817928305074290, 1.1892071150027210);
    const auto frame = eigendecompose(cfg.h0);
    Matrix vt = frame.eigenvectors.adjoint() * cfg.v.matrix() * frame.eigenvectors;
    return vt * (kVtildeNormGauge / vt.norm());
}

Matrix spectrum_of(const Matrix& a) { return Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues().cast<Complex>(); }

}  // namespace

TEST(FrameChange, DiagonalCoupling) {
    const auto c = frame_change(pauli_assemble({{1.0, parse_pauli_string("Z")}}, 1), HermitianOperator::ladder(2));
    EXPECT_TRUE(c.h0_physical.is_diagonal(1e-15));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_TRUE(std::abs(c.u(i, j)) < 1e-15 || std::abs(std::abs(c.u(i, j)) - 1.0) < 1e-15);
}

TEST(FrameChange, HadamardConjugation) {
    const auto c = frame_change(pauli_assemble({{1.0, parse_pauli_string("X")}}, 1), HermitianOperator::ladder(2));
    const auto& h = c.h0_physical.matrix();
    EXPECT_NEAR(h(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(h(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(h(0, 1)), 0.5, 1e-15);
    EXPECT_LT((spectrum_of(h) - spectrum_of(HermitianOperator::ladder(2).matrix())).norm(), 1e-14);
}

TEST(FrameChange, InvariantsOnRandomCouplings) {
    KeyedStream rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix v = Matrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                v(i, j) = Complex(rng.normal(), rng.normal());
                v(j, i) = std::conj(v(i, j));
            }
        const auto c = frame_change(v, HermitianOperator::ladder(4));
        const Matrix d = c.u.adjoint() * v * c.u;
        EXPECT_LT((d - Matrix(c.v_physical.cast<Complex>().asDiagonal())).norm(), 1e-10);
        EXPECT_LT((spectrum_of(c.h0_physical.matrix()) - spectrum_of(HermitianOperator::ladder(4).matrix())).norm(), 1e-10);
    }
}

TEST(FrameChange, DegenerateCouplingStillDeterministic) {
    const auto v = pauli_assemble({{1.0, parse_pauli_string("XI")}}, 2);
    const auto a = frame_change(v, HermitianOperator::ladder(4));
    const auto b = frame_change(v, HermitianOperator::ladder(4));
    EXPECT_TRUE(a.phase_ambiguous);
    EXPECT_EQ((a.u - b.u).norm(), 0.0);
}

TEST(FrameChange, ProbeCouplingGivesLocalHamiltonian) {
    const auto c = frame_change(probe_vtilde(), HermitianOperator::ladder(4));
    Matrix h = c.h0_physical.matrix();
    h.diagonal().array() -= 1.5;
    const auto p = pauli_project(h, local_pauli_strings(2));
    EXPECT_LT(p.residual_norm, 1e-12);
    std::vector<double> mags;
    for (double x : p.coefficients)
        if (std::abs(x) > 1e-9) mags.push_back(std::abs(x));
    std::sort(mags.begin(), mags.end());
    ASSERT_EQ(mags.size(), 2u);
    EXPECT_NEAR(mags[0], 0.5, 1e-12);
    EXPECT_NEAR(mags[1], 1.0, 1e-12);
}

TEST(Score, ProbeCouplingIsImplementable) {
    const auto problem = probe_problem();
    DesignCandidate c;
    c.vtilde = probe_vtilde();
    EXPECT_LT(score(c, problem), 1e-9);
    const auto built = detail::build_candidate(detail::prepare(problem), c.vtilde, true);
    EXPECT_LT(built.implementability, 1e-9);
    EXPECT_LT(probe_distance(built), kMatchTolerance);
}

TEST(Score, OrthogonalBasisCostsFrobeniusNorm) {
    DesignProblem p = probe_problem();
    p.engineerable_basis = {parse_pauli_string("ZZ")};
    const auto pp = detail::prepare(p);
    const Matrix xx = pauli_string_matrix(parse_pauli_string("XX"));
    RealVector v(4);
    v << -1.5, -0.5, 0.5, 1.5;  // exactly ZI + IZ/2 up to ordering
    const auto g = detail::best_gauge(pp, xx, v);
    EXPECT_NEAR(g.h0_residual, 2.0, 1e-14);
    EXPECT_NEAR(g.coupling_residual, 0.0, 1e-14);
}

TEST(Score, HigherOrderTermMatchesDefinition) {
    DesignProblem p = probe_problem();
    p.weights = {0.0, 1.0};
    p.constraints.eliminate_orders = {1, 3, 5};  // leave the small second order unpenalized
    DesignCandidate c;
    c.vtilde = probe_vtilde();
    // oracle: rescale so |E1^(4)| = 1, then sum |E^(m)| 4^-(m-4) over m = 5..8 and both levels
    const AuxiliaryConfig cfg(HermitianOperator::ladder(4), HermitianOperator(c.vtilde, true));
    const double s = std::pow(std::abs(expand_rs(cfg, 1, 4)[4]), -0.25);
    double expected = 0.0;
    for (int level : {1, 2}) {
        const auto e = expand_rs(cfg, level, 8).rescaled(s);
        for (int m = 5; m <= 8; ++m) expected += std::abs(e[m]) * std::pow(0.25, m - 4);
    }
    EXPECT_NEAR(score(c, p), expected, 1e-9 * expected);
    EXPECT_GT(expected, 0.1);
}

TEST(Score, InvariantUnderFrameSymmetries) {
    const auto problem = probe_problem();
    DesignCandidate c;
    c.vtilde = probe_vtilde();
    const double base = score(c, problem);
    // diagonal sign flips and a global phase of the diagonal-frame basis
    const Eigen::Vector4cd d(1.0, -1.0, -1.0, 1.0);
    DesignCandidate flipped;
    flipped.vtilde = d.asDiagonal() * c.vtilde * d.asDiagonal();
    EXPECT_NEAR(score(flipped, problem), base, 1e-12);
    const auto pp = detail::prepare(problem);
    const auto a = detail::build_candidate(pp, c.vtilde, true);
    const auto b = detail::build_candidate(pp, flipped.vtilde, true);
    EXPECT_TRUE(same_design(a, b));
}

TEST(Score, DedupIdentifiesColumnSignGauges) {
    const auto problem = probe_problem();
    const auto pp = detail::prepare(problem);
    const auto a = detail::build_candidate(pp, probe_vtilde(), true);
    for (const auto& g : detail::relabelings(4)) {
        if (g.perm != std::vector<int>{0, 1, 2, 3}) continue;
        DesignCandidate b = a;
        detail::apply_gauge(b, g);
        b.h0_physical = HermitianOperator(Matrix(b.u.adjoint() * HermitianOperator::ladder(4).matrix() * b.u), true);
        EXPECT_TRUE(same_design(a, b));
    }
}

TEST(Search, SingleEvaluationIsDeterministic) {
    const auto p = probe_problem();
    const auto a = search(p, 1, 42);
    const auto b = search(p, 1, 42);
    ASSERT_EQ(a.starts.size(), 1u);
    EXPECT_EQ(a.starts[0].best.evaluations, b.starts[0].best.evaluations);
    EXPECT_EQ((a.starts[0].best.vtilde - b.starts[0].best.vtilde).norm(), 0.0);
    EXPECT_EQ(a.starts[0].best.score, b.starts[0].best.score);
}

TEST(Search, IndependentOfThreadCount) {
    const auto p = probe_problem();
    const auto a = search(p, 800, 3, 3, 1);
    const auto b = search(p, 800, 3, 3, 3);
    ASSERT_EQ(a.starts.size(), b.starts.size());
    for (std::size_t i = 0; i < a.starts.size(); ++i) {
        EXPECT_EQ((a.starts[i].best.vtilde - b.starts[i].best.vtilde).norm(), 0.0);
        EXPECT_EQ(a.starts[i].best.score, b.starts[i].best.score);
    }
    EXPECT_EQ(a.candidates.size(), b.candidates.size());
}

TEST(Search, EmittedCandidatesSatisfyInvariants) {
    const auto p = probe_problem();
    const auto r = search(p, 3000, 1, 3);
    ASSERT_EQ(r.status, SearchStatus::found);
    for (const auto& c : r.candidates) {
        EXPECT_TRUE(c.verified);
        EXPECT_TRUE(generic_conditions(AuxiliaryConfig(p.h0_tilde, HermitianOperator(Matrix(c.coupling_scale * c.vtilde), true)), p.constraints).satisfied);
        EXPECT_LT((spectrum_of(c.h0_physical.matrix()) - spectrum_of(p.h0_tilde.matrix())).norm(), 1e-10);
        const Matrix d = c.u.adjoint() * c.vtilde * c.u;
        EXPECT_LT((d - Matrix(c.v_physical.cast<Complex>().asDiagonal())).norm(), 1e-10);
        EXPECT_LT(c.score, p.score_threshold);
    }
    for (std::size_t i = 1; i < r.candidates.size(); ++i) {
        EXPECT_LE(r.candidates[i - 1].score, r.candidates[i].score);
        for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(same_design(r.candidates[i], r.candidates[j]));
    }
}

TEST(Search, EmptyResultIsNotAnError) {
    DesignProblem p = probe_problem();
    p.score_threshold = 0.0;
    const auto r = search(p, 50, 0);
    EXPECT_EQ(r.status, SearchStatus::empty);
    EXPECT_TRUE(r.candidates.empty());
}

TEST(Search, RejectsBadArguments) {
    EXPECT_THROW(search(probe_problem(), 0, 0), PreconditionError);
    DesignProblem p = probe_problem();
    p.engineerable_basis.clear();
    EXPECT_THROW(search(p, 10, 0), PreconditionError);
    p = probe_problem();
    p.weights = {0.0, 0.0};
    EXPECT_THROW(search(p, 10, 0), PreconditionError);
}

TEST(Search, RecoversProbeDesignFromMostStarts) {
    const auto r = search(probe_problem(), 5000, 0, 20);
    int recovered = 0;
    for (const auto& s : r.starts)
        if (std::any_of(s.optima.begin(), s.optima.end(), [](const DesignCandidate& c) { return probe_distance(c) < kMatchTolerance; }))
            ++recovered;
    EXPECT_GE(recovered, 10);
}
