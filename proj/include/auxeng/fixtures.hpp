// fixtures.hpp: named reference configurations with expected-value tables.

#pragma once

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "auxeng/conditions.hpp"
#include "auxeng/designer.hpp"
#include "auxeng/dynamics.hpp"
#include "auxeng/errors.hpp"
#include "auxeng/operator_algebra.hpp"
#include "auxeng/perturbation.hpp"

namespace auxeng {

enum class ToleranceKind {
    absolute,  // |computed - expected| <= tolerance
    relative,  // |computed - expected| <= tolerance * |expected|
    below,     // |computed| < tolerance
};

inline std::string_view to_string(ToleranceKind k) {
    switch (k) {
        case ToleranceKind::absolute: return "absolute";
        case ToleranceKind::relative: return "relative";
        case ToleranceKind::below: return "below";
    }
    return "absolute";
}

struct Expectation {
    std::string quantity;
    double expected = 0.0;
    ToleranceKind kind = ToleranceKind::absolute;
    double tolerance = 0.0;
    std::string source;  // "published" or "derived"

    bool check(double computed) const {
        if (!std::isfinite(computed)) return false;
        switch (kind) {
            case ToleranceKind::absolute: return std::abs(computed - expected) <= tolerance;
            case ToleranceKind::relative: return std::abs(computed - expected) <= tolerance * std::abs(expected);
            case ToleranceKind::below: return std::abs(computed) < tolerance;
        }
        return false;
    }
};

struct Fixture {
    std::string name;
    std::string description;
    AuxiliaryConfig config;
    std::vector<int> levels;
    int max_order = 6;
    double omega_res = 0.0;  // resonator angular frequency, s^-1 (physical fixtures)
    std::vector<Expectation> expectations;
};

// ---------------------------------------------------------------------------
// Configurations

inline AuxiliaryConfig single_qubit_config() {
    return AuxiliaryConfig(pauli_assemble({{0.5, {Pauli::X}}}, 1), pauli_assemble({{1.0, {Pauli::Z}}}, 1));
}

inline Matrix qutrit_coupling() {
    Matrix v = Matrix::Zero(3, 3);
    v(0, 1) = v(1, 0) = v(1, 2) = v(2, 1) = v(0, 2) = v(2, 0) = 1.0;
    return v;
}

inline AuxiliaryConfig qutrit_config() {
    return AuxiliaryConfig(HermitianOperator::ladder(3), HermitianOperator(qutrit_coupling(), true));
}

inline AuxiliaryConfig twoqubit_x4_config(double a = 0.914, double b = 0.405, double c = 0.5, double f = -1.823, double g = -1.382) {
    using enum Pauli;
    return AuxiliaryConfig(pauli_assemble({{a, {Z, Z}}, {b, {I, X}}, {-c, {X, X}}}, 2), pauli_assemble({{f, {Z, I}}, {g, {I, Z}}}, 2));
}

inline AuxiliaryConfig twoqubit_probe_config(double f = 1.682, double g = 1.189, double delta = 1.0, double mu = 0.0) {
    using enum Pauli;
    return AuxiliaryConfig(pauli_assemble({{1.0, {X, I}}, {0.5, {I, X}}}, 2), pauli_assemble({{f, {Z, I}}, {g, {I, Z}}}, 2), delta, mu);
}

inline constexpr double kCpbDelta = 1e9;                                 // omega_1^J, s^-1
inline constexpr double kCpbMu = 1e8;                                    // s^-1
inline constexpr double kCpbResonator = 2.0 * std::numbers::pi * 1e8;  // 100 MHz, s^-1

inline AuxiliaryConfig cpb_realization_config() { return twoqubit_probe_config(1.682, 1.189, kCpbDelta, kCpbMu); }

// ---------------------------------------------------------------------------
// Registry

inline std::vector<std::string> fixture_names() {
    return {"single_qubit_x2", "qutrit_x3", "twoqubit_x4", "twoqubit_probe", "cpb_realization"};
}

inline Fixture make_fixture(const std::string& name) {
    using TK = ToleranceKind;
    Fixture fx;
    fx.name = name;
    if (name == "single_qubit_x2") {
        fx.description = "single qubit h0 = X/2, v = Z; upper level follows sqrt(1 + 4 l^2)/2";
        fx.config = single_qubit_config();
        fx.levels = {1};
        fx.max_order = 6;
        const double e[] = {0.5, 0.0, 1.0, 0.0, -1.0, 0.0, 2.0};
        for (int m = 0; m <= 6; ++m) fx.expectations.push_back({coefficient_name(1, m), e[m], TK::absolute, 1e-9, "derived"});
    } else if (name == "qutrit_x3") {
        fx.description = "qutrit diag(0,1,2), V01 = V12 = V02 = 1; central level gives a pure x^3 term";
        fx.config = qutrit_config();
        fx.levels = {1};
        fx.max_order = 4;
        fx.expectations = {
            {coefficient_name(1, 1), 0.0, TK::below, 1e-10, "derived"},
            {coefficient_name(1, 2), 0.0, TK::below, 1e-10, "published"},
            {coefficient_name(1, 3), -2.0, TK::absolute, 1e-10, "derived"},
            {"third_order_magnitude", 2.0, TK::absolute, 1e-12, "published"},
        };
    } else if (name == "twoqubit_x4") {
        fx.description = "two-qubit x^4 source: h0 = a ZZ + b IX - c XX, v = f ZI + g IZ, level 1";
        fx.config = twoqubit_x4_config();
        fx.levels = {1};
        fx.max_order = 7;
        for (int m : {1, 3, 5, 7}) fx.expectations.push_back({coefficient_name(1, m), 0.0, TK::below, 1e-3, "published"});
        fx.expectations.push_back({coefficient_name(1, 2), 2e-4, TK::absolute, 1e-4, "published"});
        fx.expectations.push_back({coefficient_name(1, 4), -1.0, TK::relative, 0.02, "published"});
        fx.expectations.push_back({coefficient_name(1, 6), -3.99, TK::relative, 0.02, "published"});
    } else if (name == "twoqubit_probe") {
        fx.description = "x^4 probe: h0 = XI + IX/2, v = f ZI + g IZ, levels 1 and 2";
        fx.config = twoqubit_probe_config();
        fx.levels = {1, 2};
        fx.max_order = 7;
        for (int l : {1, 2})
            for (int m : {1, 3, 5, 7}) fx.expectations.push_back({coefficient_name(l, m), 0.0, TK::below, 1e-6, "published"});
        for (int m : {2, 4, 6}) fx.expectations.push_back({"antisymmetry^(" + std::to_string(m) + ")", 0.0, TK::below, 1e-6, "published"});
        fx.expectations.push_back({coefficient_name(2, 2), 8e-4, TK::absolute, 2e-4, "published"});
        fx.expectations.push_back({coefficient_name(2, 4), 1.0, TK::relative, 0.02, "published"});
        fx.expectations.push_back({coefficient_name(2, 6), -4.24, TK::relative, 0.02, "published"});
    } else if (name == "cpb_realization") {
        fx.description = "probe auxiliary as two Cooper-pair boxes: delta = 1e9 s^-1, mu = 1e8 s^-1, 100 MHz resonator, level 2";
        fx.config = cpb_realization_config();
        fx.levels = {2};
        fx.max_order = 6;
        fx.omega_res = kCpbResonator;
        fx.expectations = {
            {"kappa_per_s", 1e5, TK::relative, 0.05, "published"},
            {"x6_over_x4", -0.042, TK::relative, 0.05, "published"},
            {"kerr_per_s", 1.5e5, TK::relative, 0.05, "published"},
            {"tau_s", std::numbers::pi / 3e5, TK::relative, 0.05, "published"},
        };
    } else {
        std::string known;
        for (const auto& n : fixture_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown fixture \"" + name + "\" (known: " + known + ")");
    }
    return fx;
}

// ---------------------------------------------------------------------------
// Evaluation

struct FixtureCheck {
    Expectation expectation;
    double computed = 0.0;
    bool pass = false;
};

struct FixtureReport {
    std::string name;
    std::vector<ExpansionSeries> series;
    std::vector<FixtureCheck> checks;
    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const FixtureCheck& c) { return c.pass; });
    }
};

/// Every quantity a fixture can name: E{l}^(m) for its levels, the
/// antisymmetry |E_a^(m) + E_b^(m)| of a level pair, the closed-form qutrit
/// values, and the assembled resonator coefficients of physical fixtures.
inline std::map<std::string, double> fixture_quantities(const Fixture& fx, std::vector<ExpansionSeries>* series_out = nullptr) {
    std::map<std::string, double> q;
    std::vector<ExpansionSeries> series;
    for (int l : fx.levels) series.push_back(expand_rs(fx.config, l, fx.max_order));
    for (const auto& s : series)
        for (int m = 0; m <= s.max_order; ++m) q[coefficient_name(s.level_index, m)] = s[m];
    if (series.size() == 2)
        for (int m = 0; m <= fx.max_order; ++m) q["antisymmetry^(" + std::to_string(m) + ")"] = std::abs(series[0][m] + series[1][m]);
    if (fx.config.dim() == 3) {
        const auto r = qutrit_conditions(fx.config.v.matrix(), true);
        q["third_order_magnitude"] = r.at("third_order_magnitude");
    }
    if (fx.omega_res > 0.0 && fx.max_order >= 6) {
        const auto c = engineered_coefficients(series.front(), fx.config, {4, 6});
        q["kappa_per_s"] = c.at(4);
        q["x6_over_x4"] = c.at(6) / c.at(4);
        q["kerr_per_s"] = kerr_from_x4(c.at(4));
        q["tau_s"] = cat_time(c.at(4));
    }
    if (series_out) *series_out = std::move(series);
    return q;
}

inline FixtureReport evaluate_fixture(const Fixture& fx) {
    FixtureReport r;
    r.name = fx.name;
    const auto q = fixture_quantities(fx, &r.series);
    for (const auto& e : fx.expectations) {
        const auto it = q.find(e.quantity);
        const double v = it == q.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
        r.checks.push_back({e, v, e.check(v)});
    }
    return r;
}

// ---------------------------------------------------------------------------
// Design problems

/// Two tailored levels (1 and 2) on the ladder spectrum, x^4 engineered, odd
/// orders and the second order removed, H0 restricted to 1-local terms.
inline DesignProblem probe_problem() {
    DesignProblem p;
    p.dim = 4;
    p.h0_tilde = HermitianOperator::ladder(4);
    p.constraints = {4, {1, 2}, 4, {1, 2, 3, 5}, true};
    p.engineerable_basis = local_pauli_strings(2);
    return p;
}

/// Level 1 on the ladder spectrum, x^4 engineered, orders 1, 2, 3, 5 removed,
/// H0 drawn from two-qubit terms realizable with superconducting qubits.
inline DesignProblem x4_problem() {
    DesignProblem p;
    p.dim = 4;
    p.h0_tilde = HermitianOperator::ladder(4);
    p.constraints = {4, {1}, 4, {1, 2, 3, 5}, true};
    const std::vector<std::string> basis{"ZZ", "IX", "XX", "XI", "IZ", "ZI"};
    p.engineerable_basis = parse_pauli_strings(basis);
    return p;
}

/// Constraint set checked by the `conditions` command for each fixture.
inline ConstraintSet default_constraints(const std::string& fixture) {
    if (fixture == "single_qubit_x2") return {2, {1}, 2, {1}, true};
    if (fixture == "qutrit_x3") return {3, {1}, 3, {1, 2, 4}, true};
    if (fixture == "twoqubit_x4") return {4, {1}, 4, {1, 2, 3, 5}, true};
    if (fixture == "twoqubit_probe" || fixture == "cpb_realization") return {4, {1, 2}, 4, {1, 2, 3, 5}, true};
    make_fixture(fixture);
    throw ConfigError("fixture \"" + fixture + "\" has no constraint set");
}

inline DesignProblem design_problem_for(const std::string& fixture) {
    if (fixture == "twoqubit_probe" || fixture == "cpb_realization") return probe_problem();
    if (fixture == "twoqubit_x4") return x4_problem();
    throw ConfigError("fixture \"" + fixture + "\" has no design problem (use twoqubit_probe or twoqubit_x4)");
}

}  // namespace auxeng
