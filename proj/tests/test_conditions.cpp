#include <gtest/gtest.h>

#include <random>

#include "auxeng/conditions.hpp"
#include "auxeng/designer.hpp"
#include "auxeng/fixtures.hpp"

using namespace auxeng;

namespace {

Matrix qutrit_v(Complex v01, Complex v12, Complex v02) {
    Matrix v = Matrix::Zero(3, 3);
    v(0, 1) = v01;
    v(1, 2) = v12;
    v(0, 2) = v02;
    return Matrix(v + v.adjoint());
}

Matrix sym4(std::initializer_list<std::tuple<int, int, double>> entries) {
    Matrix v = Matrix::Zero(4, 4);
    for (auto [i, j, x] : entries) {
        v(i, j) = x;
        v(j, i) = x;
    }
    return v;
}

AuxiliaryConfig ladder_config(const Matrix& v) {
    return AuxiliaryConfig(HermitianOperator::ladder(static_cast<int>(v.rows())), HermitianOperator(v, true));
}

// Random zero-diagonal real V~ projected onto the two-qubit closed-form constraints.
std::optional<Matrix> satisfying_ladder_v(std::mt19937_64& rng, const ConstraintSet& cs) {
    std::normal_distribution<double> n;
    const detail::Parameterization par{4, false, true};
    std::vector<double> x(static_cast<std::size_t>(par.size()));
    for (auto& xi : x) xi = n(rng);
    if (!detail::normalize(x, par) || !detail::project(x, par, cs)) return std::nullopt;
    return par.to_matrix(x);
}

}  // namespace

TEST(QutritConditions, CycleExample) {
    const auto r = qutrit_conditions(qutrit_v(1, 1, 1));
    EXPECT_TRUE(r.satisfied);
    EXPECT_NEAR(r.at("r2"), 0.0, 1e-15);
    EXPECT_NEAR(r.at("third_order_magnitude"), 2.0, 1e-15);
}

TEST(QutritConditions, Unsatisfied) {
    const auto r = qutrit_conditions(qutrit_v(1, 2, 0));
    EXPECT_FALSE(r.satisfied);
    EXPECT_NEAR(r.at("r2"), 3.0, 1e-15);
}

TEST(QutritConditions, NoCycleNoThirdOrder) {
    EXPECT_NEAR(qutrit_conditions(qutrit_v(1, 1, 0)).at("third_order_magnitude"), 0.0, 1e-15);
}

TEST(QutritConditions, NonzeroDiagonalRejected) {
    Matrix v = qutrit_v(1, 1, 1);
    v(1, 1) = 0.5;
    EXPECT_THROW(qutrit_conditions(v, true), ConstraintShapeError);
    EXPECT_NO_THROW(qutrit_conditions(v, false));
}

TEST(QutritConditions, WrongDimensionRejected) {
    EXPECT_THROW(qutrit_conditions(Matrix(Matrix::Zero(4, 4))), DimensionError);
}

TEST(TwoQubitConditions, TrivialChain) {
    const auto r = twoqubit_x4_conditions(sym4({{0, 1, 1.0}, {1, 2, 1.0}}), 1);
    EXPECT_NEAR(r.at("r2"), 0.0, 1e-15);
    EXPECT_NEAR(r.at("r3"), 0.0, 1e-15);
    EXPECT_TRUE(r.satisfied);
}

TEST(TwoQubitConditions, Unsatisfied) {
    const auto r = twoqubit_x4_conditions(sym4({{0, 1, 1.0}, {1, 3, 1.0}}), 1);
    EXPECT_NEAR(r.at("r2"), -1.0, 1e-15);
    EXPECT_FALSE(r.satisfied);
}

TEST(TwoQubitConditions, LevelTwoIsIndexReversal) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 20; ++trial) {
        Matrix v = Matrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                v(i, j) = Complex(n(rng), n(rng));
                v(j, i) = std::conj(v(i, j));
            }
        const auto a = twoqubit_x4_conditions(v, 2);
        const auto b = twoqubit_x4_conditions(Matrix(v.reverse()), 1);
        EXPECT_NEAR(a.at("r2"), b.at("r2"), 1e-14);
        EXPECT_NEAR(a.at("r3"), b.at("r3"), 1e-14);
    }
}

TEST(TwoQubitConditions, LadderFixtureInDiagonalFrame) {
    const auto cfg = twoqubit_x4_config();
    const auto frame = eigendecompose(cfg.h0);
    const Matrix vt = frame.eigenvectors.adjoint() * cfg.v.matrix() * frame.eigenvectors;
    // the published coefficients carry three decimals, so the residuals are small, not zero
    const auto r = twoqubit_x4_conditions(Matrix(vt - Matrix(vt.diagonal().asDiagonal())), 1, true);
    EXPECT_LT(std::abs(r.at("r2")), 5e-3);
    EXPECT_LT(std::abs(r.at("r3")), 1e-3);
    const auto s = expand_rs(cfg, 1, 5);
    EXPECT_LT(std::abs(s[3]), 1e-3);
    EXPECT_LT(std::abs(s[5]), 1e-3);
}

TEST(TwoQubitConditions, ProbeSymmetryValidatedNumerically) {
    const auto cfg = twoqubit_probe_config(1.6817928305074290, 1.1892071150027210);
    const auto frame = eigendecompose(cfg.h0);
    const Matrix vt = frame.eigenvectors.adjoint() * cfg.v.matrix() * frame.eigenvectors;
    for (int level : {1, 2}) {
        const auto closed = twoqubit_x4_conditions(vt, level);
        EXPECT_LT(closed.max_abs(), 1e-8) << "level " << level;
        const auto s = expand_rs(cfg, level, 5);
        for (int m : {1, 2, 3, 5}) EXPECT_LT(std::abs(s[m]), 1e-6) << "level " << level << " order " << m;
    }
}

TEST(GenericConditions, ProbeFixture) {
    const auto r = generic_conditions(twoqubit_probe_config(), {4, {1, 2}, 4, {1, 2, 3, 5}, true});
    for (const auto& v : r.residuals) {
        if (v.name.find("^(2)") != std::string::npos) {
            EXPECT_EQ(classify(v.value), ResidualClass::small_nonzero) << v.name;
            EXPECT_NEAR(std::abs(v.value), 8e-4, 2e-4);
        } else {
            EXPECT_EQ(classify(v.value), ResidualClass::eliminated) << v.name;
        }
    }
    EXPECT_FALSE(r.satisfied);
    const auto odd = generic_conditions(twoqubit_probe_config(), {4, {1, 2}, 4, {1, 3, 5, 7}, true});
    EXPECT_TRUE(odd.satisfied);
    EXPECT_NEAR(std::abs(odd.at("E2^(4)")), 1.0, 0.02);
}

TEST(GenericConditions, ZeroCouplingTriviallySatisfied) {
    const AuxiliaryConfig cfg(HermitianOperator::ladder(4), HermitianOperator::zero(4));
    EXPECT_TRUE(generic_conditions(cfg, {4, {1}, 8, {1, 2, 3, 4, 5, 6, 7}, true}).satisfied);
}

TEST(GenericConditions, TwoLevelSecondOrderPresent) {
    const auto cfg = single_qubit_config();
    const auto r = generic_conditions(cfg, {2, {1}, 4, {2}, true});
    EXPECT_FALSE(r.satisfied);
    EXPECT_NEAR(std::abs(r.at("E1^(2)")), 1.0, 1e-12);
    EXPECT_EQ(classify(r.at("E1^(2)")), ResidualClass::present);
}

TEST(ConstraintSet, Validation) {
    EXPECT_THROW((ConstraintSet{4, {1}, 4, {4}, true}.validate()), PreconditionError);
    EXPECT_THROW((ConstraintSet{4, {1, 1}, 4, {2}, true}.validate()), PreconditionError);
    EXPECT_THROW((ConstraintSet{4, {5}, 4, {2}, true}.validate()), PreconditionError);
    EXPECT_NO_THROW((ConstraintSet{4, {1, 2}, 4, {1, 2, 3, 5}, true}.validate()));
}

TEST(Consistency, QutritClosedFormImpliesNumerics) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.1, 2.0), ph(0.0, 2.0 * std::numbers::pi);
    const ConstraintSet cs{3, {1}, 3, {1, 2}, true};
    for (int trial = 0; trial < 100; ++trial) {
        const double r = u(rng);
        const Matrix v = qutrit_v(std::polar(r, ph(rng)), std::polar(r, ph(rng)), std::polar(u(rng), ph(rng)));
        ASSERT_TRUE(qutrit_conditions(v).satisfied);
        EXPECT_TRUE(generic_conditions(ladder_config(v), cs).satisfied) << "sample " << trial;
    }
}

TEST(Consistency, QutritFourthOrderRemoved) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.1, 2.0), ph(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 100; ++trial) {
        const double r = u(rng);
        const Matrix v = qutrit_v(std::polar(r, ph(rng)), std::polar(r, ph(rng)), std::polar(u(rng), ph(rng)));
        EXPECT_LT(std::abs(expand_rs(ladder_config(v), 1, 4)[4]), 1e-6) << "sample " << trial;
    }
}

TEST(Consistency, TwoQubitClosedFormImpliesNumerics) {
    std::mt19937_64 rng(14);
    const ConstraintSet cs{4, {1}, 4, {1, 2, 3}, true};
    int checked = 0, fifth_order_violations = 0;
    for (int trial = 0; trial < 400 && checked < 100; ++trial) {
        const auto v = satisfying_ladder_v(rng, cs);
        if (!v) continue;
        const auto closed = twoqubit_x4_conditions(*v, 1);
        if (!closed.satisfied) continue;
        const auto cfg = ladder_config(*v);
        EXPECT_TRUE(generic_conditions(cfg, cs).satisfied) << "sample " << checked;
        if (std::abs(expand_rs(cfg, 1, 5)[5]) >= kEliminatedThreshold) ++fifth_order_violations;
        ++checked;
    }
    EXPECT_EQ(checked, 100);
    EXPECT_EQ(fifth_order_violations, 0);
}

TEST(ClosedFormFamily, Detection) {
    EXPECT_EQ(closed_form_family({3, {1}, 3, {1, 2}, true}), ClosedFormFamily::qutrit);
    EXPECT_EQ(closed_form_family({4, {1}, 4, {1, 2, 3, 5}, true}), ClosedFormFamily::twoqubit);
    EXPECT_EQ(closed_form_family({4, {1, 2}, 4, {1, 2, 3, 5}, true}), ClosedFormFamily::twoqubit);
    EXPECT_EQ(closed_form_family({4, {0}, 2, {1}, true}), ClosedFormFamily::none);
}
