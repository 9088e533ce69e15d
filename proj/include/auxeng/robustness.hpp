// robustness.hpp: sensitivity of expansion coefficients to Hamiltonian noise
// and to qubit decay.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "auxeng/errors.hpp"
#include "auxeng/operator_algebra.hpp"
#include "auxeng/parallel.hpp"
#include "auxeng/perturbation.hpp"
#include "auxeng/random.hpp"

namespace auxeng {

inline constexpr double kMaxRejectionRate = 0.1;
inline constexpr int kMaxAttemptsPerSample = 16;

/// Additive Gaussian error on the local Pauli terms of every qubit of h0.
/// sigma is in units of delta.
struct NoiseModel {
    std::vector<Pauli> per_qubit_dof{Pauli::X, Pauli::Y, Pauli::Z};
    double sigma = 0.01;
    int samples = 2000;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw PreconditionError("noise sigma must be non-negative");
        if (samples < 2) throw PreconditionError("noise model needs at least 2 samples");
        for (Pauli p : per_qubit_dof)
            if (p == Pauli::I) throw PreconditionError("identity is not a noise degree of freedom");
    }
};

/// h0 + sum over qubits q and dofs k of delta_{qk} P_k^(q), with
/// delta ~ N(0, sigma^2) keyed by (seed, sample, attempt, qubit, dof).
inline AuxiliaryConfig perturb_hamiltonian(const AuxiliaryConfig& base, const NoiseModel& noise, std::uint64_t sample_index,
                                           std::uint64_t attempt = 0) {
    noise.validate();
    const int n = qubit_count(base.dim());
    if (noise.sigma == 0.0) return base;
    Matrix h = base.h0.matrix();
    for (int q = 0; q < n; ++q)
        for (std::size_t k = 0; k < noise.per_qubit_dof.size(); ++k) {
            const double d = noise.sigma * standard_normal(hash_key({noise.seed, sample_index, attempt, static_cast<std::uint64_t>(q), k}));
            h += d * pauli_string_matrix(single_qubit_string(n, q, noise.per_qubit_dof[k]));
        }
    return AuxiliaryConfig(HermitianOperator(h, base.h0.hermitian()), base.v, base.delta, base.mu);
}

struct SensitivityReport {
    int level = 0;
    int max_order = 0;
    double sigma = 0.0;
    int samples = 0;
    int rejections = 0;
    std::uint64_t seed = 0;
    std::vector<double> sigma_m;  // index m-1 holds Sigma_(m)
    std::vector<double> stderr_m;

    double at(int m) const { return sigma_m.at(static_cast<std::size_t>(m - 1)); }
};

namespace detail {

// Pairwise summation: the result does not depend on evaluation order.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const auto h = x.size() / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

// Sample standard deviation and its standard error (delta method on the
// fourth central moment).
inline std::pair<double, double> std_and_error(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = pairwise_sum(x) / n;
    std::vector<double> d2(x.size()), d4(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    const double var = pairwise_sum(d2) / (n - 1.0);
    const double m4 = pairwise_sum(d4) / n;
    const double s = std::sqrt(var);
    if (s == 0.0) return {0.0, 0.0};
    const double var_of_var = std::max(0.0, (m4 - var * var * (n - 3.0) / (n - 1.0)) / n);
    return {s, std::sqrt(var_of_var) / (2.0 * s)};
}

}  // namespace detail

/// Sigma_(m): sample standard deviation over noise draws of
/// E_n^(m)(perturbed) - E_n^(m)(base), m = 1..M. Draws for which the
/// expansion fails (degenerate level) are redrawn; more than 10% rejections
/// raise NoiseTooLargeError.
inline SensitivityReport coefficient_sensitivity(const AuxiliaryConfig& base, int level, int max_order, const NoiseModel& noise,
                                                 unsigned threads = 0) {
    noise.validate();
    qubit_count(base.dim());
    if (max_order < 1) throw PreconditionError("sensitivity needs max_order >= 1");
    const auto ref = expand_rs(base, level, max_order);

    struct Draw {
        std::vector<double> delta;
        int rejected = 0;
    };
    auto draws = parallel_map(
        static_cast<std::size_t>(noise.samples),
        [&](std::size_t i) {
            Draw d;
            for (int attempt = 0; attempt < kMaxAttemptsPerSample; ++attempt) {
                try {
                    const auto s = expand_rs(perturb_hamiltonian(base, noise, i, static_cast<std::uint64_t>(attempt)), level, max_order);
                    for (int m = 1; m <= max_order; ++m) d.delta.push_back(s[m] - ref[m]);
                    return d;
                } catch (const DegeneracyError&) {
                    ++d.rejected;
                }
            }
            return d;
        },
        threads);

    SensitivityReport r;
    r.level = level;
    r.max_order = max_order;
    r.sigma = noise.sigma;
    r.samples = noise.samples;
    r.seed = noise.seed;
    bool exhausted = false;
    for (const auto& d : draws) {
        r.rejections += d.rejected;
        exhausted = exhausted || d.delta.empty();
    }
    if (exhausted || r.rejections > kMaxRejectionRate * noise.samples)
        throw NoiseTooLargeError(std::to_string(r.rejections) + " of " + std::to_string(noise.samples) +
                                 " noise draws gave a degenerate level; reduce sigma");

    for (int m = 1; m <= max_order; ++m) {
        std::vector<double> x;
        x.reserve(draws.size());
        for (const auto& d : draws) x.push_back(d.delta[static_cast<std::size_t>(m - 1)]);
        const auto [s, e] = detail::std_and_error(x);
        r.sigma_m.push_back(s);
        r.stderr_m.push_back(e);
    }
    return r;
}

/// CSV table with header `order,sigma_m,stderr`.
inline std::string to_csv(const SensitivityReport& r) {
    std::string out = "order,sigma_m,stderr\n";
    char buf[96];
    for (std::size_t i = 0; i < r.sigma_m.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, r.sigma_m[i], r.stderr_m[i]);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decay

/// Basis of the sigma+ sigma- projector. `energy`: the upper eigenstate of
/// each qubit's local part of h0. `charge`: |1><1| of the computational basis.
enum class DecayBasis { energy, charge };

inline std::string_view to_string(DecayBasis b) { return b == DecayBasis::energy ? "energy" : "charge"; }

inline DecayBasis decay_basis_from_string(std::string_view s) {
    if (s == "energy") return DecayBasis::energy;
    if (s == "charge") return DecayBasis::charge;
    throw ConfigError("unknown decay basis \"" + std::string(s) + "\"");
}

/// Excited-state projector of qubit q as a full-space operator.
inline Matrix excited_projector(const HermitianOperator& h0, int qubit, DecayBasis basis) {
    const int n = qubit_count(h0.dim());
    if (qubit < 0 || qubit >= n) throw PreconditionError("qubit index out of range");
    Matrix local = Matrix::Zero(2, 2);
    if (basis == DecayBasis::energy) {
        for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
            const double c = (h0.matrix() * pauli_string_matrix(single_qubit_string(n, qubit, p))).trace().real() / h0.dim();
            local += c * pauli_matrix(p);
        }
        if (local.norm() < 1e-12) throw PreconditionError("qubit " + std::to_string(qubit) + " has no local energy splitting");
        const auto spec = eigendecompose(local, SpectralMode::hermitian);
        local = spec.eigenvectors.col(1) * spec.eigenvectors.col(1).adjoint();
    } else {
        local(1, 1) = 1.0;
    }
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < n; ++k) out = kron(out, k == qubit ? local : Matrix(Matrix::Identity(2, 2)));
    return out;
}

/// h0 - i (gamma/2) sum_q sigma+ sigma-^(q); gamma in units of delta.
inline AuxiliaryConfig add_decay(const AuxiliaryConfig& base, double gamma, DecayBasis basis = DecayBasis::energy) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw PreconditionError("gamma must be non-negative");
    const int n = qubit_count(base.dim());
    if (gamma == 0.0) return base;
    Matrix h = base.h0.matrix();
    for (int q = 0; q < n; ++q) h -= Complex(0.0, gamma / 2.0) * excited_projector(base.h0, q, basis);
    return AuxiliaryConfig(HermitianOperator(h, false), base.v, base.delta, base.mu);
}

struct DecayShift {
    int level = 0;
    double gamma = 0.0;
    DecayBasis basis = DecayBasis::energy;
    std::vector<Complex> shift;  // E^(m)(gamma) - E^(m)(0), m = 0..M

    double max_abs(int from_order = 0) const {
        double m = 0.0;
        for (std::size_t k = static_cast<std::size_t>(from_order); k < shift.size(); ++k) m = std::max(m, std::abs(shift[k]));
        return m;
    }
};

inline DecayShift decay_shift(const AuxiliaryConfig& base, double gamma, int level, int max_order, DecayBasis basis = DecayBasis::energy) {
    const auto ref = expand_rs(base, level, max_order);
    const auto decayed = expand_nonhermitian(add_decay(base, gamma, basis), level, max_order);
    DecayShift out;
    out.level = level;
    out.gamma = gamma;
    out.basis = basis;
    for (int m = 0; m <= max_order; ++m) out.shift.push_back(decayed.complex_at(m) - ref.complex_at(m));
    return out;
}

}  // namespace auxeng
