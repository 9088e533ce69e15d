// conditions.hpp: order-elimination constraints on the diagonal-frame coupling.
//
// The closed forms assume an evenly spaced bare spectrum diag(0, 1, ..., d-1)
// and a zero-diagonal coupling; they are cheap enough for optimizer inner
// loops. generic_conditions evaluates the actual expansion coefficients and
// is the authoritative check.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "auxeng/errors.hpp"
#include "auxeng/operator_algebra.hpp"
#include "auxeng/perturbation.hpp"

namespace auxeng {

inline constexpr double kClosedFormThreshold = 1e-8;

struct ConstraintSet {
    int dim = 0;
    std::vector<int> target_levels;    // one or two
    int engineer_order = 0;            // produce x^engineer_order
    std::vector<int> eliminate_orders; // forced to zero
    bool zero_diagonal = true;

    void validate() const {
        if (dim < 2) throw PreconditionError("constraint dimension must be at least 2");
        if (target_levels.empty() || target_levels.size() > 2)
            throw PreconditionError("constraints need one or two target levels");
        if (target_levels.size() == 2 && target_levels[0] == target_levels[1])
            throw PreconditionError("two target levels must be distinct");
        for (int l : target_levels)
            if (l < 0 || l >= dim) throw PreconditionError("target level " + std::to_string(l) + " out of range");
        if (engineer_order < 1) throw PreconditionError("engineer_order must be at least 1");
        if (std::find(eliminate_orders.begin(), eliminate_orders.end(), engineer_order) != eliminate_orders.end())
            throw PreconditionError("engineer_order cannot also be eliminated");
        for (int m : eliminate_orders)
            if (m < 1 || m > kMaxExpansionOrder) throw PreconditionError("eliminated order " + std::to_string(m) + " out of range");
    }

    bool eliminates(int m) const {
        return std::find(eliminate_orders.begin(), eliminate_orders.end(), m) != eliminate_orders.end();
    }

    int max_order() const {
        int m = engineer_order;
        for (int e : eliminate_orders) m = std::max(m, e);
        return m;
    }
};

struct NamedValue {
    std::string name;
    double value = 0.0;
};

struct ConstraintResidual {
    std::vector<NamedValue> residuals;  // constraints; zero when met
    std::vector<NamedValue> reported;   // informational quantities
    double threshold = kClosedFormThreshold;
    bool satisfied = false;

    static ConstraintResidual make(std::vector<NamedValue> residuals, double threshold, std::vector<NamedValue> reported = {}) {
        ConstraintResidual r;
        r.residuals = std::move(residuals);
        r.reported = std::move(reported);
        r.threshold = threshold;
        r.satisfied = r.satisfied_at(threshold);
        return r;
    }

    bool satisfied_at(double threshold_) const {
        return std::all_of(residuals.begin(), residuals.end(), [&](const NamedValue& v) { return std::abs(v.value) < threshold_; });
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : residuals) m = std::max(m, std::abs(v.value));
        return m;
    }

    double sum_squares() const {
        double s = 0.0;
        for (const auto& v : residuals) s += v.value * v.value;
        return s;
    }

    std::optional<double> find(std::string_view name) const {
        for (const auto& v : residuals)
            if (v.name == name) return v.value;
        for (const auto& v : reported)
            if (v.name == name) return v.value;
        return std::nullopt;
    }

    double at(std::string_view name) const {
        auto v = find(name);
        if (!v) throw PreconditionError("no residual named " + std::string(name));
        return *v;
    }
};

enum class ResidualClass { eliminated, small_nonzero, present };

inline ResidualClass classify(double coefficient) {
    const double a = std::abs(coefficient);
    if (a < kEliminatedThreshold) return ResidualClass::eliminated;
    if (a < kSmallNonzeroThreshold) return ResidualClass::small_nonzero;
    return ResidualClass::present;
}

inline std::string_view to_string(ResidualClass c) {
    switch (c) {
        case ResidualClass::eliminated: return "eliminated";
        case ResidualClass::small_nonzero: return "small_nonzero";
        case ResidualClass::present: return "present";
    }
    return "present";
}

namespace detail {

inline void check_zero_diagonal(const Matrix& v, bool zero_diagonal) {
    if (!zero_diagonal) return;
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        if (std::abs(v(i, i)) > 1e-12)
            throw ConstraintShapeError("coupling has nonzero diagonal element " + std::to_string(i) +
                                       " but zero_diagonal was requested");
}

// Index reversal n -> d-1-n.
inline Matrix reversed(const Matrix& v) { return v.reverse(); }

// Level-1 residuals of the two-qubit x^4 family: (r2, r3).
inline std::pair<double, double> twoqubit_level1(const Matrix& w) {
    const double r2 = std::norm(w(1, 3)) - 2.0 * (std::norm(w(0, 1)) - std::norm(w(1, 2)));
    const double r3 = (2.0 * w(1, 0) * w(0, 2) * w(2, 1) + w(1, 0) * w(0, 3) * w(3, 1) - w(1, 2) * w(2, 3) * w(3, 1)).real();
    return {r2, r3};
}

}  // namespace detail

/// Qutrit on diag(0, 1, 2), central level: the second-order term vanishes
/// when |V12|^2 = |V01|^2, which also removes the fourth order.
inline ConstraintResidual qutrit_conditions(const Matrix& vtilde, bool zero_diagonal = true) {
    if (vtilde.rows() != 3 || vtilde.cols() != 3) throw DimensionError("qutrit conditions need a 3x3 coupling");
    detail::check_zero_diagonal(vtilde, zero_diagonal);
    const double r = std::norm(vtilde(1, 2)) - std::norm(vtilde(0, 1));
    const double cycle = 2.0 * (vtilde(0, 1) * vtilde(1, 2) * vtilde(2, 0)).real();
    return ConstraintResidual::make({{"r2", r}}, kClosedFormThreshold,
                                    {{"third_order_magnitude", cycle}, {"third_order_coefficient", -cycle}});
}

inline ConstraintResidual qutrit_conditions(const HermitianOperator& vtilde, bool zero_diagonal = true) {
    return qutrit_conditions(vtilde.matrix(), zero_diagonal);
}

/// Two-qubit (diag(0,1,2,3)) conditions removing orders 2 and 3 of level 1:
///   r2 = |V13|^2 - 2(|V01|^2 - |V12|^2)
///   r3 = Re[2 V10 V02 V21 + V10 V03 V31 - V12 V23 V31]
/// Level 2 uses the same expressions on the index-reversed coupling.
inline ConstraintResidual twoqubit_x4_conditions(const Matrix& vtilde, int level, bool zero_diagonal = true) {
    if (vtilde.rows() != 4 || vtilde.cols() != 4) throw DimensionError("two-qubit conditions need a 4x4 coupling");
    if (level != 1 && level != 2) throw PreconditionError("two-qubit conditions are defined for levels 1 and 2");
    detail::check_zero_diagonal(vtilde, zero_diagonal);
    const auto [r2, r3] = detail::twoqubit_level1(level == 1 ? vtilde : detail::reversed(vtilde));
    return ConstraintResidual::make({{"r2", r2}, {"r3", r3}}, kClosedFormThreshold);
}

inline ConstraintResidual twoqubit_x4_conditions(const HermitianOperator& vtilde, int level, bool zero_diagonal = true) {
    return twoqubit_x4_conditions(vtilde.matrix(), level, zero_diagonal);
}

inline std::string coefficient_name(int level, int order) {
    return "E" + std::to_string(level) + "^(" + std::to_string(order) + ")";
}

/// Residual per (level, eliminated order) from the full expansion.
/// The engineered coefficient of every level is reported alongside.
inline ConstraintResidual generic_conditions(const AuxiliaryConfig& cfg, const ConstraintSet& cs) {
    cs.validate();
    if (cfg.dim() != cs.dim) throw DimensionError("constraint dimension does not match the configuration");
    std::vector<NamedValue> residuals;
    std::vector<NamedValue> reported;
    const int order = cs.max_order();
    for (int level : cs.target_levels) {
        const auto series = expand_rs(cfg, level, order);
        for (int m : cs.eliminate_orders) residuals.push_back({coefficient_name(level, m), series[m]});
        reported.push_back({coefficient_name(level, cs.engineer_order), series[cs.engineer_order]});
    }
    return ConstraintResidual::make(std::move(residuals), kEliminatedThreshold, std::move(reported));
}

// ---------------------------------------------------------------------------
// Closed-form families usable by the designer

enum class ClosedFormFamily { none, qutrit, twoqubit };

/// Which closed form (if any) covers a constraint set on the ladder spectrum.
inline ClosedFormFamily closed_form_family(const ConstraintSet& cs) {
    if (!cs.zero_diagonal) return ClosedFormFamily::none;
    if (cs.dim == 3 && cs.target_levels == std::vector<int>{1} && cs.eliminates(2)) return ClosedFormFamily::qutrit;
    if (cs.dim == 4 && cs.eliminates(2) && cs.eliminates(3) &&
        std::all_of(cs.target_levels.begin(), cs.target_levels.end(), [](int l) { return l == 1 || l == 2; }))
        return ClosedFormFamily::twoqubit;
    return ClosedFormFamily::none;
}

// Raw residual vector of the applicable closed form (no validation).
inline std::vector<double> closed_form_residuals(const Matrix& vtilde, const ConstraintSet& cs) {
    std::vector<double> r;
    switch (closed_form_family(cs)) {
        case ClosedFormFamily::qutrit:
            r.push_back(std::norm(vtilde(1, 2)) - std::norm(vtilde(0, 1)));
            break;
        case ClosedFormFamily::twoqubit:
            for (int level : cs.target_levels) {
                const auto [r2, r3] = detail::twoqubit_level1(level == 1 ? vtilde : detail::reversed(vtilde));
                r.push_back(r2);
                r.push_back(r3);
            }
            break;
        case ClosedFormFamily::none:
            break;
    }
    return r;
}

// Orders of the constraint set that the closed form handles.
inline std::vector<int> closed_form_orders(const ConstraintSet& cs) {
    switch (closed_form_family(cs)) {
        case ClosedFormFamily::qutrit: return {1, 2};
        case ClosedFormFamily::twoqubit: return {1, 2, 3};
        case ClosedFormFamily::none: return {1};
    }
    return {};
}

}  // namespace auxeng
