// Helpers shared by the unit tests and the acceptance binary.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "auxeng/designer.hpp"

namespace auxeng::testing {

inline std::map<std::string, double> magnitudes(const std::vector<PauliTerm>& terms) {
    std::map<std::string, double> out;
    for (const auto& t : terms) out[to_string(t.factors)] = std::abs(t.coefficient);
    return out;
}

inline std::string swap_qubits(const std::string& s) { return std::string(s.rbegin(), s.rend()); }

/// Largest deviation of a two-qubit candidate from an expected design, up to
/// signs and the exchange of the two qubits. Terms of the candidate's
/// decomposition that are not expected must vanish.
inline double design_distance(const DesignCandidate& c, const std::map<std::string, double>& h0,
                              const std::map<std::string, double>& coupling) {
    const auto h = magnitudes(c.pauli_decomposition);
    const auto v = magnitudes(c.couplings);
    double best = std::numeric_limits<double>::infinity();
    for (bool swap : {false, true}) {
        double d = 0.0;
        auto compare = [&](const std::map<std::string, double>& got, const std::map<std::string, double>& want) {
            for (const auto& [label, value] : got) {
                const auto it = want.find(swap ? swap_qubits(label) : label);
                d = std::max(d, std::abs(value - (it == want.end() ? 0.0 : it->second)));
            }
            for (const auto& [label, value] : want)
                if (!got.count(swap ? swap_qubits(label) : label)) d = std::max(d, value);
        };
        compare(h, h0);
        compare(v, coupling);
        best = std::min(best, d);
    }
    return best;
}

// Two uncoupled qubits sigma_x + sigma_x/2 with couplings f, g on sigma_z.
inline double probe_distance(const DesignCandidate& c) {
    return design_distance(c, {{"XI", 1.0}, {"IX", 0.5}}, {{"ZI", 1.682}, {"IZ", 1.189}});
}

// a ZZ + b IX - c XX with couplings f, g on sigma_z.
inline double ladder_distance(const DesignCandidate& c) {
    return design_distance(c, {{"ZZ", 0.914}, {"IX", 0.405}, {"XX", 0.5}}, {{"ZI", 1.823}, {"IZ", 1.382}});
}

inline constexpr double kMatchTolerance = 0.02;

inline Matrix random_hermitian(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> n;
    Matrix z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = Complex(n(rng), n(rng));
    return 0.5 * (z + z.adjoint());
}

inline Matrix random_unitary(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> n;
    Matrix z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = Complex(n(rng), n(rng));
    return Eigen::HouseholderQR<Matrix>(z).householderQ();
}

}  // namespace auxeng::testing
