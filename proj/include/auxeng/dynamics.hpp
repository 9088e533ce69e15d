// dynamics.hpp: resonator (x) auxiliary evolution in a truncated Fock space.
//
// Physical units: energies and rates in s^-1 with hbar = 1. The auxiliary
// config carries h0 in units of delta, so the joint Hamiltonian is
//   H = delta h0 (x) 1 + mu v (x) x + omega 1 (x) a^dag a
// with the auxiliary factor first.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "auxeng/errors.hpp"
#include "auxeng/operator_algebra.hpp"
#include "auxeng/perturbation.hpp"

namespace auxeng {

inline constexpr int kMaxJointDimension = 4096;
inline constexpr double kTruncationTolerance = 1e-6;

struct FockSpace {
    int n_max = 30;      // photon numbers 0 .. n_max-1
    double omega = 0.0;  // resonator angular frequency, s^-1

    void validate() const {
        if (n_max < 2) throw PreconditionError("Fock space needs n_max >= 2");
        if (!std::isfinite(omega)) throw PreconditionError("resonator frequency must be finite");
    }
};

inline Matrix annihilation(int n) {
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

inline Matrix number_operator(int n) {
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = k;
    return m;
}

inline Matrix position(int n) {
    const Matrix a = annihilation(n);
    return (a + a.adjoint()) / std::numbers::sqrt2;
}

/// x^m on the first n Fock states, with no truncation artifact: the power is
/// taken in a space large enough that every kept element is exact.
inline Matrix position_power(int n, int m) {
    if (m < 0) throw PreconditionError("negative power of x");
    const int big = n + m;
    const Matrix x = position(big);
    Matrix p = Matrix::Identity(big, big);
    for (int k = 0; k < m; ++k) p = p * x;
    return p.topLeftCorner(n, n);
}

/// Normalized coherent state |alpha> on n Fock states.
inline Vector coherent_state(Complex alpha, int n) {
    Vector v(n);
    const double r = std::abs(alpha);
    for (int k = 0; k < n; ++k) {
        // alpha^k / sqrt(k!) in log space
        const double logmag = k == 0 ? 0.0 : k * std::log(r) - 0.5 * std::lgamma(k + 1.0);
        const Complex phase = k == 0 ? Complex(1.0) : std::polar(1.0, k * std::arg(alpha));
        v(k) = r == 0.0 ? Complex(k == 0 ? 1.0 : 0.0) : std::exp(logmag - 0.5 * r * r) * phase;
    }
    return v / v.norm();
}

// ---------------------------------------------------------------------------
// Hamiltonians

inline Matrix build_joint(const AuxiliaryConfig& cfg, const FockSpace& fock) {
    cfg.validate();
    fock.validate();
    const long total = static_cast<long>(cfg.dim()) * fock.n_max;
    if (total > kMaxJointDimension)
        throw ResourceError("joint dimension " + std::to_string(total) + " exceeds " + std::to_string(kMaxJointDimension));
    const Matrix id_aux = Matrix::Identity(cfg.dim(), cfg.dim());
    const Matrix id_res = Matrix::Identity(fock.n_max, fock.n_max);
    return kron(Matrix(cfg.delta * cfg.h0.matrix()), id_res) + kron(Matrix(cfg.mu * cfg.v.matrix()), position(fock.n_max)) +
           kron(id_aux, Matrix(fock.omega * number_operator(fock.n_max)));
}

/// Coefficients delta E^(m) eps^m (s^-1) of x^m for the selected orders.
inline std::map<int, double> engineered_coefficients(const ExpansionSeries& series, const AuxiliaryConfig& cfg, const std::vector<int>& orders) {
    std::map<int, double> out;
    for (int m : orders) {
        if (m < 0 || m > series.max_order) throw PreconditionError("order " + std::to_string(m) + " outside the computed series");
        out[m] = cfg.delta * series[m] * std::pow(cfg.epsilon(), m);
    }
    return out;
}

/// H_eng = delta sum_m E^(m) eps^m x^m + omega a^dag a.
inline Matrix effective_hamiltonian(const ExpansionSeries& series, const AuxiliaryConfig& cfg, const FockSpace& fock,
                                    const std::vector<int>& orders) {
    fock.validate();
    Matrix h = fock.omega * number_operator(fock.n_max);
    for (const auto& [m, c] : engineered_coefficients(series, cfg, orders)) h += c * position_power(fock.n_max, m);
    return h;
}

// ---------------------------------------------------------------------------
// Rotating-wave reduction

/// Polynomial in n = a^dag a: value = sum_k coefficients[k] n^k.
struct NumberPolynomial {
    std::vector<double> coefficients;
    std::vector<int> dropped_odd;  // odd orders present in the input

    double operator()(double n) const {
        double v = 0.0;
        for (std::size_t k = coefficients.size(); k-- > 0;) v = v * n + coefficients[k];
        return v;
    }
    double at(std::size_t k) const { return k < coefficients.size() ? coefficients[k] : 0.0; }
};

/// Number-conserving part of sum_m c_m x^m. The diagonal <k|x^m|k> is a
/// polynomial of degree m/2 in k; it is interpolated exactly from k = 0..m/2.
inline NumberPolynomial rwa_reduce(const std::map<int, double>& poly) {
    NumberPolynomial out;
    for (const auto& [m, c] : poly) {
        if (m < 0) throw PreconditionError("negative order in polynomial");
        if (m % 2 == 1) {
            out.dropped_odd.push_back(m);
            continue;
        }
        const int deg = m / 2;
        const Matrix xm = position_power(deg + 1, m);
        Eigen::MatrixXd vander(deg + 1, deg + 1);
        Eigen::VectorXd rhs(deg + 1);
        for (int k = 0; k <= deg; ++k) {
            for (int j = 0; j <= deg; ++j) vander(k, j) = std::pow(static_cast<double>(k), j);
            rhs(k) = xm(k, k).real();
        }
        const Eigen::VectorXd p = vander.fullPivLu().solve(rhs);
        if (out.coefficients.size() < static_cast<std::size_t>(deg + 1)) out.coefficients.resize(static_cast<std::size_t>(deg + 1), 0.0);
        for (int j = 0; j <= deg; ++j) out.coefficients[static_cast<std::size_t>(j)] += c * std::round(p(j) * 1024.0) / 1024.0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Propagation

/// exp(-i H t) applied to states by spectral decomposition of Hermitian H.
class Propagator {
public:
    explicit Propagator(const Matrix& h) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
        if (es.info() != Eigen::Success)
            throw NumericalError("eigensolver failed for Hamiltonian with hash " + std::to_string(matrix_hash(h)));
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
    }

    Vector evolve(const Vector& psi0, double t) const {
        Vector c = vectors_.adjoint() * psi0;
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -energies_(k) * t);
        return vectors_ * c;
    }

    double expectation(const Vector& psi) const {
        const Vector c = vectors_.adjoint() * psi;
        return (c.cwiseAbs2().array() * energies_.array()).sum();
    }

private:
    RealVector energies_;
    Matrix vectors_;
};

struct JointSimResult {
    std::vector<double> times;
    std::vector<double> fidelity_effective;  // <chi(t)| rho_res(t) |chi(t)>
    std::vector<double> adiabatic_leakage;   // population outside the bare auxiliary level
    double max_norm_drift = 0.0;
    double max_energy_drift = 0.0;  // relative
    double truncation_population = 0.0;  // top two Fock levels, worst of both simulations
    bool valid = true;
    std::optional<double> cat_fidelity;
};

inline std::string to_csv(const JointSimResult& r) {
    std::string out = "t,fidelity,leakage\n";
    char buf[128];
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.times[i], r.fidelity_effective[i], r.adiabatic_leakage[i]);
        out += buf;
    }
    return out;
}

namespace detail {

inline double top_population(const RealVector& pop, int n_max) {
    return pop(n_max - 1) + pop(n_max - 2);
}

}  // namespace detail

/// Full joint evolution from |level n of h0> (x) |alpha> against the
/// resonator-only evolution under the effective Hamiltonian for `orders`.
inline JointSimResult evolve_and_compare(const AuxiliaryConfig& cfg, const FockSpace& fock, Complex alpha, int level, double t_final,
                                         int steps, const std::vector<int>& orders) {
    fock.validate();
    if (steps < 1) throw PreconditionError("need at least one time step");
    const int max_order = std::max(1, orders.empty() ? 1 : *std::max_element(orders.begin(), orders.end()));
    const auto series = expand_rs(cfg, level, max_order);
    const auto spec = eigendecompose(cfg.h0);
    const Vector aux0 = spec.eigenvectors.col(level);
    const Vector res0 = coherent_state(alpha, fock.n_max);

    const int d = cfg.dim();
    const int n = fock.n_max;
    const Matrix hj = build_joint(cfg, fock);
    const Propagator full(hj);
    const Propagator eff(effective_hamiltonian(series, cfg, fock, orders));

    Vector psi0(d * n);
    for (int a = 0; a < d; ++a) psi0.segment(a * n, n) = aux0(a) * res0;
    const double e0 = full.expectation(psi0);

    JointSimResult r;
    for (int s = 0; s <= steps; ++s) {
        const double t = t_final * s / steps;
        const Vector psi = full.evolve(psi0, t);
        const Vector chi = eff.evolve(res0, t);
        Matrix m(d, n);
        for (int a = 0; a < d; ++a) m.row(a) = psi.segment(a * n, n).transpose();
        const Vector proj = m * chi.conjugate();
        const Vector in_branch = m.transpose() * aux0.conjugate();

        r.times.push_back(t);
        r.fidelity_effective.push_back(proj.squaredNorm());
        r.adiabatic_leakage.push_back(std::max(0.0, psi.squaredNorm() - in_branch.squaredNorm()));
        r.max_norm_drift = std::max(r.max_norm_drift, std::abs(psi.norm() - 1.0));
        r.max_energy_drift = std::max(r.max_energy_drift, std::abs(full.expectation(psi) - e0) / std::max(1.0, std::abs(e0)));

        const RealVector pop = m.cwiseAbs2().colwise().sum().transpose();
        r.truncation_population = std::max(r.truncation_population, detail::top_population(pop, n));
        r.truncation_population = std::max(r.truncation_population, detail::top_population(chi.cwiseAbs2(), n));
    }
    r.valid = r.truncation_population < kTruncationTolerance;
    return r;
}

// ---------------------------------------------------------------------------
// Kerr cat benchmark

/// Kerr strength chi of the n^2 term produced by an x^4 coefficient kappa.
inline double kerr_from_x4(double kappa) { return rwa_reduce({{4, kappa}}).at(2); }

/// Time at which chi n^2 evolution reaches chi t = pi/2.
inline double cat_time(double kappa) {
    if (kappa == 0.0) throw PreconditionError("cat time needs a nonzero Kerr strength");
    return std::numbers::pi / (2.0 * std::abs(kerr_from_x4(kappa)));
}

struct CatBenchmark {
    double tau = 0.0;
    double cat_fidelity = 0.0;
    double truncation_population = 0.0;
    bool valid = true;
};

/// Two-component cat reached by exp(-i s (pi/2) n^2) from |alpha>, s = +-1:
/// (e^{-i s pi/4}|alpha> + e^{i s pi/4}|-alpha>)/sqrt2, normalized.
inline Vector kerr_cat(Complex alpha, int n, int s) {
    const Complex p = std::polar(1.0, -s * std::numbers::pi / 4.0);
    Vector v = (p * coherent_state(alpha, n) + std::conj(p) * coherent_state(-alpha, n)) / std::numbers::sqrt2;
    return v / v.norm();
}

/// Evolves |alpha> under H = -(3/2) kappa (a^dag a)^2 for tau = pi/(3|kappa|)
/// and compares with the closed-form cat.
inline CatBenchmark cat_benchmark(double kappa, Complex alpha, const FockSpace& fock) {
    fock.validate();
    const double chi = -kerr_from_x4(kappa);  // H = chi n^2
    CatBenchmark b;
    b.tau = cat_time(kappa);
    Matrix h = Matrix::Zero(fock.n_max, fock.n_max);
    for (int k = 0; k < fock.n_max; ++k) h(k, k) = chi * k * k;
    const Vector psi = Propagator(h).evolve(coherent_state(alpha, fock.n_max), b.tau);
    // exp(-i chi tau n^2) with |chi tau| = pi/2
    const Vector target = kerr_cat(alpha, fock.n_max, chi > 0 ? 1 : -1);
    b.cat_fidelity = std::norm(target.dot(psi));
    b.truncation_population = detail::top_population(psi.cwiseAbs2(), fock.n_max);
    b.valid = b.truncation_population < kTruncationTolerance;
    return b;
}

}  // namespace auxeng
