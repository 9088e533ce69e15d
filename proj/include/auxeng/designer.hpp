// designer.hpp: search for auxiliary systems with a prescribed expansion.
//
// The search works in the diagonal frame: h0_tilde is fixed (evenly spaced by
// default) and the coupling V~ is varied. U diagonalizes V~, the physical
// coupling is the diagonal matrix U^dag V~ U and the physical bare
// Hamiltonian is U^dag h0_tilde U, which has the spectrum of h0_tilde by
// construction. A candidate is good when that Hamiltonian (and the diagonal
// coupling) decompose onto a small set of engineerable Pauli terms.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "auxeng/conditions.hpp"
#include "auxeng/errors.hpp"
#include "auxeng/nelder_mead.hpp"
#include "auxeng/operator_algebra.hpp"
#include "auxeng/parallel.hpp"
#include "auxeng/perturbation.hpp"
#include "auxeng/random.hpp"

namespace auxeng {

inline constexpr double kVtildeNormGauge = 2.0;
inline constexpr double kSuppressionDiscount = 0.25;
inline constexpr double kPenaltyWeight = 1e6;
inline constexpr double kDedupTolerance = 1e-3;
inline constexpr double kHopSize = 0.5;

struct ObjectiveWeights {
    double implementability = 1.0;
    double higher_order = 0.0;
};

struct DesignProblem {
    int dim = 4;
    HermitianOperator h0_tilde = HermitianOperator::ladder(4);
    ConstraintSet constraints;
    std::vector<PauliString> engineerable_basis;  // allowed terms of the physical H0 (identity excluded)
    std::vector<PauliString> coupling_basis;      // allowed terms of the physical coupling; default Z on each qubit
    ObjectiveWeights weights;
    bool complex_couplings = false;  // also vary imaginary parts of V~
    double score_threshold = 1e-4;
    int suppression_orders = 4;      // orders above engineer_order in the higher-order term
    double max_coupling = 10.0;      // largest |coupling eigenvalue| in the |E^(m*)| = 1 convention
    int refine_evaluations = 400;    // cap per local refinement before hopping

    int n_qubits() const { return qubit_count(dim); }

    std::vector<PauliString> effective_coupling_basis() const {
        if (!coupling_basis.empty()) return coupling_basis;
        std::vector<PauliString> out;
        for (int q = 0; q < n_qubits(); ++q) out.push_back(single_qubit_string(n_qubits(), q, Pauli::Z));
        return out;
    }

    void validate() const {
        constraints.validate();
        if (constraints.dim != dim) throw DimensionError("constraint dimension does not match the problem");
        if (h0_tilde.dim() != dim) throw DimensionError("h0_tilde dimension does not match the problem");
        if (!h0_tilde.is_diagonal()) throw PreconditionError("h0_tilde must be diagonal");
        if (weights.implementability < 0.0 || weights.higher_order < 0.0)
            throw PreconditionError("objective weights must be non-negative");
        if (weights.implementability == 0.0 && weights.higher_order == 0.0)
            throw PreconditionError("objective weights cannot both be zero");
        if (engineerable_basis.empty()) throw PreconditionError("engineerable basis is empty");
        const int n = n_qubits();
        for (const auto& s : engineerable_basis)
            if (static_cast<int>(s.size()) != n) throw DimensionError("basis string \"" + to_string(s) + "\" has the wrong length");
        for (const auto& s : coupling_basis)
            if (static_cast<int>(s.size()) != n) throw DimensionError("coupling string \"" + to_string(s) + "\" has the wrong length");
    }
};

struct DesignCandidate {
    Matrix vtilde;                 // diagonal-frame coupling, Frobenius norm 2
    Matrix u;                      // columns: eigenvectors of vtilde
    RealVector v_physical;         // diagonal of U^dag V~ U
    HermitianOperator h0_physical; // U^dag h0_tilde U
    bool phase_ambiguous = false;  // vtilde had a degenerate spectrum

    double score = std::numeric_limits<double>::infinity();
    double implementability = 0.0;
    double higher_order = 0.0;
    double penalty = 0.0;

    std::vector<PauliTerm> pauli_decomposition;  // traceless part of h0_physical on the engineerable basis
    double h0_identity = 0.0;                    // removed constant
    double h0_residual = 0.0;
    std::vector<PauliTerm> couplings;            // physical coupling on the coupling basis, |E^(m*)| = 1 scale
    double coupling_residual = 0.0;
    double coupling_scale = 1.0;                 // factor applied to vtilde for the |E^(m*)| = 1 convention
    std::vector<ExpansionSeries> expansions;     // per target level, in the |E^(m*)| = 1 convention
    ConstraintResidual residuals;                // generic_conditions, |E^(m*)| = 1 convention
    bool verified = false;

    std::uint64_t seed = 0;
    int start_index = 0;
    int evaluations = 0;
};

// ---------------------------------------------------------------------------
// Pauli projections on small dense matrices

namespace detail {

// A Pauli string as a signed permutation: P(r, col[r]) = phase[r].
struct SparsePauli {
    PauliString label;
    std::vector<int> col;
    std::vector<Complex> phase;
};

inline SparsePauli sparse_pauli(const PauliString& s) {
    const Matrix p = pauli_string_matrix(s);
    SparsePauli out{s, std::vector<int>(static_cast<std::size_t>(p.rows())), std::vector<Complex>(static_cast<std::size_t>(p.rows()))};
    for (Eigen::Index r = 0; r < p.rows(); ++r)
        for (Eigen::Index c = 0; c < p.cols(); ++c)
            if (std::abs(p(r, c)) > 0.5) {
                out.col[static_cast<std::size_t>(r)] = static_cast<int>(c);
                out.phase[static_cast<std::size_t>(r)] = p(r, c);
            }
    return out;
}

inline std::vector<SparsePauli> sparse_basis(const std::vector<PauliString>& basis) {
    std::vector<SparsePauli> out;
    out.reserve(basis.size());
    for (const auto& s : basis) out.push_back(sparse_pauli(s));
    return out;
}

// Re Tr(A P) / d for a matrix accessed through `get(row, col)`.
template <class Get>
double pauli_coefficient(const SparsePauli& p, Get&& get) {
    Complex tr = 0.0;
    for (std::size_t r = 0; r < p.col.size(); ++r) tr += p.phase[r] * get(p.col[r], static_cast<int>(r));
    return tr.real() / static_cast<double>(p.col.size());
}

// Frobenius residual of the projection onto an orthogonal Pauli basis.
template <class Get>
double projection_residual(const std::vector<SparsePauli>& basis, double norm2, Get&& get, std::vector<double>* coeffs = nullptr) {
    const double d = basis.empty() ? 1.0 : static_cast<double>(basis.front().col.size());
    double captured = 0.0;
    if (coeffs) coeffs->clear();
    for (const auto& p : basis) {
        const double c = pauli_coefficient(p, get);
        captured += c * c * d;
        if (coeffs) coeffs->push_back(c);
    }
    return std::sqrt(std::max(0.0, norm2 - captured));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Frame change

/// U from the eigenvectors of V~ (ascending eigenvalues, operator_algebra
/// phase convention; degenerate blocks ordered by first-component magnitude).
inline DesignCandidate frame_change(const Matrix& vtilde, const HermitianOperator& h0_tilde) {
    if (vtilde.rows() != h0_tilde.dim() || vtilde.cols() != h0_tilde.dim())
        throw DimensionError("coupling and h0_tilde dimensions differ");
    if (!is_hermitian(vtilde)) throw PreconditionError("frame_change needs a Hermitian coupling");
    if (!h0_tilde.is_diagonal()) throw PreconditionError("frame_change needs a diagonal h0_tilde");
    auto spec = eigendecompose(Matrix(0.5 * (vtilde + vtilde.adjoint())), SpectralMode::hermitian);

    DesignCandidate c;
    c.phase_ambiguous = spec.near_degenerate;
    if (spec.near_degenerate) {
        const double tol = kDegeneracyRelativeGap * std::max(1.0, vtilde.norm());
        Eigen::Index start = 0;
        const auto n = spec.eigenvalues.size();
        while (start < n) {
            Eigen::Index end = start + 1;
            while (end < n && std::abs(spec.eigenvalues(end) - spec.eigenvalues(end - 1)) < tol) ++end;
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(end - start));
            std::iota(idx.begin(), idx.end(), start);
            std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
                return std::abs(spec.eigenvectors(0, a)) > std::abs(spec.eigenvectors(0, b));
            });
            Matrix block(spec.eigenvectors.rows(), end - start);
            for (std::size_t k = 0; k < idx.size(); ++k) block.col(static_cast<Eigen::Index>(k)) = spec.eigenvectors.col(idx[k]);
            spec.eigenvectors.middleCols(start, end - start) = block;
            start = end;
        }
    }
    c.vtilde = vtilde;
    c.u = spec.eigenvectors;
    c.v_physical = spec.real_eigenvalues();
    c.h0_physical = HermitianOperator(Matrix(c.u.adjoint() * h0_tilde.matrix() * c.u), true);
    return c;
}

inline DesignCandidate frame_change(const HermitianOperator& vtilde, const HermitianOperator& h0_tilde) {
    return frame_change(vtilde.matrix(), h0_tilde);
}

// ---------------------------------------------------------------------------
// Gauge relabelings: reorder and sign-flip the columns of U. Both the
// physical H0 and the diagonal coupling transform together, so the physics
// and the expansion are unchanged; only the Pauli form differs.

struct Relabeling {
    std::vector<int> perm;      // new column k = old column perm[k]
    std::vector<double> signs;  // times signs[k]
};

namespace detail {

inline std::vector<Relabeling> relabelings(int dim) {
    std::vector<Relabeling> out;
    std::vector<std::vector<int>> perms;
    std::vector<int> p(static_cast<std::size_t>(dim));
    std::iota(p.begin(), p.end(), 0);
    if (dim <= 4) {
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
    } else {
        perms.push_back(p);
    }
    const int sign_patterns = 1 << (dim - 1);
    for (const auto& perm : perms)
        for (int mask = 0; mask < sign_patterns; ++mask) {
            Relabeling r{perm, std::vector<double>(static_cast<std::size_t>(dim), 1.0)};
            for (int k = 1; k < dim; ++k)
                if (mask & (1 << (k - 1))) r.signs[static_cast<std::size_t>(k)] = -1.0;
            out.push_back(std::move(r));
        }
    return out;
}

struct PreparedProblem {
    const DesignProblem* problem;
    std::vector<SparsePauli> h0_basis;
    std::vector<SparsePauli> coupling_basis;
    std::vector<Relabeling> gauges;
    bool pauli = true;
};

inline PreparedProblem prepare(const DesignProblem& p) {
    PreparedProblem out{&p, {}, {}, {}, true};
    const bool power_of_two = p.dim >= 2 && (p.dim & (p.dim - 1)) == 0;
    out.pauli = power_of_two;
    if (power_of_two) {
        out.h0_basis = sparse_basis(p.engineerable_basis);
        out.coupling_basis = sparse_basis(p.effective_coupling_basis());
    }
    out.gauges = relabelings(p.dim);
    return out;
}
PreparedProblem prepare(DesignProblem&&) = delete;  // keeps a pointer to the problem

struct GaugeChoice {
    std::size_t index = 0;
    double h0_residual = 0.0;
    double coupling_residual = 0.0;
    double total() const { return h0_residual + coupling_residual; }
};

// Best relabeling for implementability. H0 and coupling are given in the
// frame of the canonical U; the relabeled H0 is s_a s_b H0[perm a, perm b].
inline GaugeChoice best_gauge(const PreparedProblem& pp, const Matrix& h0, const RealVector& v) {
    const auto d = h0.rows();
    const double shift = h0.trace().real() / static_cast<double>(d);
    Matrix h = h0;
    h.diagonal().array() -= shift;
    const double h_norm2 = h.squaredNorm();
    const double v_shift = v.mean();
    const double v_norm2 = (v.array() - v_shift).square().sum();

    GaugeChoice best;
    double best_total = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < pp.gauges.size(); ++g) {
        const auto& r = pp.gauges[g];
        auto get_h = [&](int a, int b) {
            return Complex(r.signs[static_cast<std::size_t>(a)] * r.signs[static_cast<std::size_t>(b)]) *
                   h(r.perm[static_cast<std::size_t>(a)], r.perm[static_cast<std::size_t>(b)]);
        };
        auto get_v = [&](int a, int b) {
            return a == b ? Complex(v(r.perm[static_cast<std::size_t>(a)]) - v_shift) : Complex(0.0);
        };
        const double hr = projection_residual(pp.h0_basis, h_norm2, get_h);
        const double vr = projection_residual(pp.coupling_basis, v_norm2, get_v);
        if (hr + vr < best_total - 1e-12) {
            best_total = hr + vr;
            best = {g, hr, vr};
        }
    }
    return best;
}

inline void apply_gauge(DesignCandidate& c, const Relabeling& r) {
    const auto d = c.u.cols();
    Matrix u(c.u.rows(), d);
    RealVector v(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        u.col(k) = r.signs[static_cast<std::size_t>(k)] * c.u.col(r.perm[static_cast<std::size_t>(k)]);
        v(k) = c.v_physical(r.perm[static_cast<std::size_t>(k)]);
    }
    c.u = u;
    c.v_physical = v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scoring

namespace detail {

struct Evaluation {
    double implementability = 0.0;
    double higher_order = 0.0;
    double penalty = 0.0;
    double scale = 1.0;
    std::vector<ExpansionSeries> expansions;  // scaled
    double score(const ObjectiveWeights& w) const { return w.implementability * implementability + w.higher_order * higher_order + penalty; }
};

inline int evaluation_order(const DesignProblem& p) {
    return std::min(kMaxExpansionOrder, std::max(p.constraints.max_order(), p.constraints.engineer_order + p.suppression_orders));
}

// Expansion-dependent parts of the score for a diagonal-frame coupling.
inline Evaluation evaluate_expansion(const DesignProblem& p, const Matrix& vtilde, bool closed_form_projected) {
    Evaluation ev;
    const auto& cs = p.constraints;
    const int order = evaluation_order(p);
    AuxiliaryConfig cfg(p.h0_tilde, HermitianOperator(vtilde, true));
    std::vector<ExpansionSeries> raw;
    try {
        for (int level : cs.target_levels) raw.push_back(expand_rs(cfg, level, order));
    } catch (const Error&) {
        ev.penalty = 1e3;
        return ev;
    }
    const double engineered = std::abs(raw.front()[cs.engineer_order]);
    if (!(engineered > 1e-10)) {
        ev.penalty = 1e3;
        return ev;
    }
    ev.scale = std::pow(engineered, -1.0 / cs.engineer_order);
    // Nearly vanishing E^(m*) needs a huge coupling to reach unit strength.
    const double vmax = Eigen::SelfAdjointEigenSolver<Matrix>(vtilde, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff() * ev.scale;
    if (vmax > p.max_coupling) ev.penalty += kPenaltyWeight * std::pow(vmax / p.max_coupling - 1.0, 2);
    for (auto& s : raw) ev.expansions.push_back(s.rescaled(ev.scale));

    std::vector<int> covered;
    if (closed_form_projected) covered = closed_form_orders(cs);
    else if (cs.zero_diagonal) covered = {1};
    for (const auto& s : ev.expansions) {
        for (int m : cs.eliminate_orders) {
            if (std::find(covered.begin(), covered.end(), m) != covered.end()) continue;
            ev.penalty += kPenaltyWeight * s[m] * s[m];
        }
        for (int m = cs.engineer_order + 1; m <= std::min(order, cs.engineer_order + p.suppression_orders); ++m)
            ev.higher_order += std::abs(s[m]) * std::pow(kSuppressionDiscount, m - cs.engineer_order);
    }
    return ev;
}

inline void fill_decomposition(DesignCandidate& c, const PreparedProblem& pp, double scale) {
    const auto& h = c.h0_physical.matrix();
    const auto d = h.rows();
    c.h0_identity = h.trace().real() / static_cast<double>(d);
    Matrix ht = h;
    ht.diagonal().array() -= c.h0_identity;
    std::vector<double> coeffs;
    auto get_h = [&](int a, int b) { return ht(a, b); };
    c.h0_residual = projection_residual(pp.h0_basis, ht.squaredNorm(), get_h, &coeffs);
    c.pauli_decomposition.clear();
    for (std::size_t i = 0; i < coeffs.size(); ++i) c.pauli_decomposition.push_back({coeffs[i], pp.h0_basis[i].label});

    const double vs = c.v_physical.mean();
    auto get_v = [&](int a, int b) { return a == b ? Complex(c.v_physical(a) - vs) : Complex(0.0); };
    c.coupling_residual = projection_residual(pp.coupling_basis, (c.v_physical.array() - vs).square().sum(), get_v, &coeffs);
    c.couplings.clear();
    for (std::size_t i = 0; i < coeffs.size(); ++i) c.couplings.push_back({coeffs[i] * scale, pp.coupling_basis[i].label});
}

// Full candidate from a diagonal-frame coupling (already projected and
// normalized): canonical gauge, decompositions, scaled expansions, score.
inline DesignCandidate build_candidate(const PreparedProblem& pp, const Matrix& vtilde, bool projected) {
    const auto& p = *pp.problem;
    DesignCandidate c = frame_change(vtilde, p.h0_tilde);
    auto ev = evaluate_expansion(p, vtilde, projected);
    if (pp.pauli) {
        const auto g = best_gauge(pp, c.h0_physical.matrix(), c.v_physical);
        detail::apply_gauge(c, pp.gauges[g.index]);
        c.h0_physical = HermitianOperator(Matrix(c.u.adjoint() * p.h0_tilde.matrix() * c.u), true);
        fill_decomposition(c, pp, ev.scale);
        c.implementability = g.total();
    }
    c.higher_order = ev.higher_order;
    c.penalty = ev.penalty;
    c.coupling_scale = ev.scale;
    c.expansions = std::move(ev.expansions);
    c.score = p.weights.implementability * c.implementability + p.weights.higher_order * c.higher_order + c.penalty;
    return c;
}

}  // namespace detail

/// Score of a candidate (lower is better): weighted implementability (Pauli
/// residual of the traceless physical H0 and of the physical coupling,
/// minimized over relabelings) plus weighted higher-order magnitude
/// sum_{m > m*} |E^(m)| 0.25^(m - m*) in the |E^(m*)| = 1 convention, plus a
/// 1e6-weighted quadratic penalty on eliminated orders.
inline double score(const DesignCandidate& candidate, const DesignProblem& problem) {
    problem.validate();
    const auto pp = detail::prepare(problem);
    const auto c = detail::build_candidate(pp, candidate.vtilde, false);
    return c.score;
}

// ---------------------------------------------------------------------------
// Parameterization and projection

namespace detail {

struct Parameterization {
    int dim;
    bool complex;
    bool zero_diagonal;

    int size() const {
        const int pairs = dim * (dim - 1) / 2;
        return pairs * (complex ? 2 : 1) + (zero_diagonal ? 0 : dim);
    }

    Matrix to_matrix(const std::vector<double>& x) const {
        Matrix v = Matrix::Zero(dim, dim);
        std::size_t k = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) {
                const double re = x[k++];
                const double im = complex ? x[k++] : 0.0;
                v(i, j) = Complex(re, im);
                v(j, i) = Complex(re, -im);
            }
        if (!zero_diagonal)
            for (int i = 0; i < dim; ++i) v(i, i) = x[k++];
        return v;
    }

    std::vector<double> from_matrix(const Matrix& v) const {
        std::vector<double> x;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) {
                x.push_back(v(i, j).real());
                if (complex) x.push_back(v(i, j).imag());
            }
        if (!zero_diagonal)
            for (int i = 0; i < dim; ++i) x.push_back(v(i, i).real());
        return x;
    }
};

inline bool normalize(std::vector<double>& x, const Parameterization& par) {
    const double n = par.to_matrix(x).norm();
    if (!(n > 1e-12)) return false;
    for (auto& xi : x) xi *= kVtildeNormGauge / n;
    return true;
}

// Minimum-norm Gauss-Newton projection onto the closed-form constraint
// surface, renormalizing after every step (the residuals are homogeneous).
inline bool project(std::vector<double>& x, const Parameterization& par, const ConstraintSet& cs) {
    if (!normalize(x, par)) return false;
    const auto n = static_cast<Eigen::Index>(x.size());
    for (int it = 0; it < 40; ++it) {
        const auto r0 = closed_form_residuals(par.to_matrix(x), cs);
        const auto k = static_cast<Eigen::Index>(r0.size());
        double rmax = 0.0;
        for (double r : r0) rmax = std::max(rmax, std::abs(r));
        if (rmax < 1e-13) return true;
        Eigen::MatrixXd jac(k, n);
        Eigen::VectorXd r(k);
        for (Eigen::Index i = 0; i < k; ++i) r(i) = r0[static_cast<std::size_t>(i)];
        const double h = 1e-7;
        for (Eigen::Index j = 0; j < n; ++j) {
            auto xp = x;
            xp[static_cast<std::size_t>(j)] += h;
            auto xm = x;
            xm[static_cast<std::size_t>(j)] -= h;
            const auto rp = closed_form_residuals(par.to_matrix(xp), cs);
            const auto rm = closed_form_residuals(par.to_matrix(xm), cs);
            for (Eigen::Index i = 0; i < k; ++i) jac(i, j) = (rp[static_cast<std::size_t>(i)] - rm[static_cast<std::size_t>(i)]) / (2 * h);
        }
        const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(r);
        if (!step.allFinite()) return false;
        for (Eigen::Index j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] -= step(j);
        if (!normalize(x, par)) return false;
    }
    const auto r = closed_form_residuals(par.to_matrix(x), cs);
    return std::all_of(r.begin(), r.end(), [](double v) { return std::abs(v) < 1e-11; });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Search

enum class SearchStatus { found, empty };

inline std::string_view to_string(SearchStatus s) { return s == SearchStatus::found ? "found" : "empty"; }

struct StartOutcome {
    int start_index = 0;
    DesignCandidate best;
    bool accepted = false;                // best is verified and below the score threshold
    std::vector<DesignCandidate> optima;  // distinct accepted local optima of this start
};

struct SearchResult {
    SearchStatus status = SearchStatus::empty;
    std::vector<DesignCandidate> candidates;  // accepted, deduplicated, ranked by score
    std::vector<StartOutcome> starts;         // best point of every start, in start order
    std::uint64_t seed = 0;
    int budget = 0;
    long total_evaluations = 0;
};

/// Gauge-invariant fingerprint: |coefficients| of the full Pauli expansion of
/// the traceless H0 and of the scaled coupling, minimized lexicographically
/// over relabelings of the eigenbasis and over qubit permutations.
inline std::vector<double> canonical_signature(const DesignCandidate& c) {
    const int d = static_cast<int>(c.u.rows());
    const int n = qubit_count(d);
    Matrix h = c.h0_physical.matrix();
    h.diagonal().array() -= h.trace().real() / d;
    RealVector v = (c.v_physical.array() - c.v_physical.mean()) * c.coupling_scale;
    const auto strings = all_pauli_strings(n, false);
    std::vector<Matrix> paulis;
    std::vector<int> qperm(static_cast<std::size_t>(n));
    std::iota(qperm.begin(), qperm.end(), 0);
    do
        for (const auto& s : strings) {
            PauliString t(s.size());
            for (int q = 0; q < n; ++q) t[static_cast<std::size_t>(q)] = s[static_cast<std::size_t>(qperm[static_cast<std::size_t>(q)])];
            paulis.push_back(pauli_string_matrix(t));
        }
    while (std::next_permutation(qperm.begin(), qperm.end()));

    std::vector<double> best;
    for (const auto& g : detail::relabelings(d)) {
        Matrix hg(d, d), vg = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) {
            const auto pi = static_cast<std::size_t>(i);
            vg(i, i) = v(g.perm[pi]);
            for (int j = 0; j < d; ++j) {
                const auto pj = static_cast<std::size_t>(j);
                hg(i, j) = g.signs[pi] * g.signs[pj] * h(g.perm[pi], g.perm[pj]);
            }
        }
        for (std::size_t k = 0; k < paulis.size(); k += strings.size()) {
            std::vector<double> sig;
            for (const Matrix* m : {&hg, &vg})
                for (std::size_t s = 0; s < strings.size(); ++s) {
                    const double c0 = std::abs(((*m) * paulis[k + s]).trace().real()) / d;
                    sig.push_back(std::round(c0 * 1e6) / 1e6);
                }
            if (best.empty() || sig < best) best = std::move(sig);
        }
    }
    return best;
}

inline bool same_design(const DesignCandidate& a, const DesignCandidate& b, double tol = kDedupTolerance) {
    const auto sa = canonical_signature(a);
    const auto sb = canonical_signature(b);
    if (sa.size() != sb.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (std::abs(sa[i] - sb[i]) > tol) return false;
    return true;
}

namespace detail {

inline StartOutcome run_start(const PreparedProblem& pp, int budget, std::uint64_t seed, int start_index) {
    const auto& p = *pp.problem;
    const Parameterization par{p.dim, p.complex_couplings, p.constraints.zero_diagonal};
    const bool closed = closed_form_family(p.constraints) != ClosedFormFamily::none &&
                        p.h0_tilde.matrix().isApprox(HermitianOperator::ladder(p.dim).matrix());

    KeyedStream rng(hash_key({seed, static_cast<std::uint64_t>(start_index), 0x5eedULL}));
    std::vector<double> x0(static_cast<std::size_t>(par.size()));
    for (auto& xi : x0) xi = rng.normal();

    int evaluations = 0;
    auto feasible = [&](std::vector<double> x) -> std::optional<std::vector<double>> {
        const bool ok = closed ? project(x, par, p.constraints) : normalize(x, par);
        if (!ok) return std::nullopt;
        return x;
    };
    auto objective = [&](const std::vector<double>& x) {
        ++evaluations;
        auto y = feasible(x);
        if (!y) return 1e6;
        const Matrix vt = par.to_matrix(*y);
        auto ev = evaluate_expansion(p, vt, closed);
        double s = ev.score(p.weights);
        if (p.weights.implementability > 0.0 && pp.pauli) {
            const auto spec = eigendecompose(vt, SpectralMode::hermitian);
            const Matrix h0 = spec.eigenvectors.adjoint() * p.h0_tilde.matrix() * spec.eigenvectors;
            s += p.weights.implementability * best_gauge(pp, h0, spec.real_eigenvalues()).total();
        }
        return s;
    };

    // Restarted simplex descent from x until converged or `cap` evaluations.
    auto refine = [&](std::vector<double> x, int cap) {
        const int stop = std::min(budget, evaluations + cap);
        double fx = objective(x);
        double step = 0.3;
        while (evaluations < stop) {
            NelderMeadOptions opt;
            opt.max_evaluations = stop - evaluations;
            opt.initial_step = step;
            opt.x_tolerance = 1e-11;
            opt.f_tolerance = 1e-15;
            const int before = evaluations;
            auto r = nelder_mead(objective, x, opt);
            if (r.value < fx) {
                fx = r.value;
                x = r.x;
            }
            if (evaluations == before) break;
            step = std::max(step * 0.3, 1e-6);
            if (r.converged && step <= 1e-6) break;
        }
        return x;
    };

    auto finish = [&](const std::vector<double>& x) {
        auto y = feasible(x);
        const Matrix vt = par.to_matrix(y ? *y : x);
        DesignCandidate c = build_candidate(pp, vt, closed && y.has_value());
        c.seed = seed;
        c.start_index = start_index;
        try {
            AuxiliaryConfig scaled(p.h0_tilde, HermitianOperator(Matrix(c.coupling_scale * vt), true));
            c.residuals = generic_conditions(scaled, p.constraints);
            c.verified = c.residuals.satisfied;
        } catch (const Error&) {
            c.verified = false;
        }
        return c;
    };

    StartOutcome out;
    out.start_index = start_index;
    const int local_cap = std::max(par.size() + 2, p.refine_evaluations);
    std::vector<double> x = x0;
    bool first = true;
    while (first || evaluations < budget) {
        x = refine(x, local_cap);
        auto c = finish(x);
        const bool accepted = c.verified && c.score < p.score_threshold;
        if (first || c.score < out.best.score) {
            out.best = c;
            out.accepted = accepted;
        }
        if (accepted && std::none_of(out.optima.begin(), out.optima.end(), [&](const DesignCandidate& k) { return same_design(k, c); }))
            out.optima.push_back(std::move(c));
        first = false;
        // Hop: a random kick from the last local optimum.
        const double kick = kHopSize * (0.1 + 0.9 * rng.uniform());
        for (auto& xi : x) xi += kick * rng.normal();
    }
    out.best.evaluations = evaluations;
    for (auto& c : out.optima) c.evaluations = evaluations;
    return out;
}

}  // namespace detail

/// Multi-start constrained search. Each start draws a random V~ from
/// (seed, start_index), projects it onto the closed-form constraint surface
/// when one applies (penalty otherwise), and refines it with restarted
/// Nelder-Mead. Remaining budget is spent hopping: random kicks from the last
/// local optimum followed by another refinement. Accepted candidates pass
/// generic_conditions and the score threshold; they are deduplicated up to
/// gauge and ranked by score.
inline SearchResult search(const DesignProblem& problem, int budget, std::uint64_t seed, int starts = 1, unsigned threads = 0) {
    problem.validate();
    if (budget < 1) throw PreconditionError("search budget must be at least 1");
    if (starts < 1) throw PreconditionError("search needs at least one start");
    const auto pp = detail::prepare(problem);

    SearchResult out;
    out.seed = seed;
    out.budget = budget;
    out.starts = parallel_map(
        static_cast<std::size_t>(starts), [&](std::size_t i) { return detail::run_start(pp, budget, seed, static_cast<int>(i)); }, threads);

    std::vector<std::pair<DesignCandidate, std::vector<double>>> accepted;
    for (const auto& s : out.starts) {
        out.total_evaluations += s.best.evaluations;
        for (const auto& c : s.optima) accepted.emplace_back(c, canonical_signature(c));
    }
    std::stable_sort(accepted.begin(), accepted.end(), [](const auto& a, const auto& b) {
        if (a.first.score != b.first.score) return a.first.score < b.first.score;
        return a.second < b.second;
    });
    std::vector<std::vector<double>> kept;
    for (auto& [c, sig] : accepted) {
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const std::vector<double>& k) {
            for (std::size_t i = 0; i < k.size(); ++i)
                if (std::abs(k[i] - sig[i]) > kDedupTolerance) return false;
            return true;
        });
        if (dup) continue;
        kept.push_back(sig);
        out.candidates.push_back(std::move(c));
    }
    out.status = out.candidates.empty() ? SearchStatus::empty : SearchStatus::found;
    return out;
}

}  // namespace auxeng
