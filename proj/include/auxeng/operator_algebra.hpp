// operator_algebra.hpp: dense operators, Pauli strings, Kronecker products and
// eigendecomposition with a reproducible ordering/phase convention.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "auxeng/errors.hpp"

namespace auxeng {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kDegeneracyRelativeGap = 1e-8;

inline bool all_finite(const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

// Largest |A_ij - conj(A_ji)|.
inline double hermiticity_defect(const Matrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Tolerance is absolute for O(1) matrices and scales with the largest entry
// for matrices in physical units.
inline bool is_hermitian(const Matrix& m, double tol = kHermitianTolerance) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return hermiticity_defect(m) <= tol * scale;
}

inline std::uint64_t matrix_hash(const Matrix& m) {
    // FNV-1a over the raw doubles; used to identify matrices in error reports.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](double x) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &x, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            mix(m(i, j).real());
            mix(m(i, j).imag());
        }
    return h;
}

/// Dense square operator of dimension >= 2.
///
/// Despite the name this also carries non-Hermitian matrices (decay
/// broadening); `hermitian()` reports which case applies. A matrix flagged
/// Hermitian is stored exactly Hermitian: entries within tolerance of their
/// adjoint are symmetrized on construction.
class HermitianOperator {
public:
    HermitianOperator() : HermitianOperator(Matrix::Zero(2, 2)) {}

    // Flag detected from the entries.
    explicit HermitianOperator(Matrix entries) : m_(std::move(entries)) {
        validate_shape();
        hermitian_ = is_hermitian(m_);
        if (hermitian_) symmetrize();
    }

    HermitianOperator(Matrix entries, bool hermitian) : m_(std::move(entries)), hermitian_(hermitian) {
        validate_shape();
        if (hermitian_) {
            if (!is_hermitian(m_))
                throw PreconditionError("matrix flagged Hermitian deviates from its adjoint by " +
                                        std::to_string(hermiticity_defect(m_)));
            symmetrize();
        }
    }

    static HermitianOperator zero(int dim) { return HermitianOperator(Matrix::Zero(dim, dim), true); }
    static HermitianOperator identity(int dim) { return HermitianOperator(Matrix::Identity(dim, dim), true); }

    static HermitianOperator diagonal(std::span<const double> values) {
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
        return HermitianOperator(std::move(m), true);
    }

    // diag(0, 1, ..., dim-1): evenly spaced levels in units of the spacing.
    static HermitianOperator ladder(int dim) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        std::iota(v.begin(), v.end(), 0.0);
        return diagonal(v);
    }

    int dim() const noexcept { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }
    bool hermitian() const noexcept { return hermitian_; }
    Complex operator()(int i, int j) const { return m_(i, j); }

    double frobenius_norm() const { return m_.norm(); }

    bool is_diagonal(double tol = 1e-12) const {
        Matrix off = m_;
        off.diagonal().setZero();
        return off.cwiseAbs().maxCoeff() <= tol;
    }

    friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
        if (a.dim() != b.dim()) throw DimensionError("operator sum of mismatched dimensions");
        return HermitianOperator(a.m_ + b.m_, a.hermitian_ && b.hermitian_);
    }
    friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
        if (a.dim() != b.dim()) throw DimensionError("operator difference of mismatched dimensions");
        return HermitianOperator(a.m_ - b.m_, a.hermitian_ && b.hermitian_);
    }
    friend HermitianOperator operator*(double s, const HermitianOperator& a) {
        return HermitianOperator(s * a.m_, a.hermitian_);
    }

    // U A U†; stays Hermitian when A is.
    HermitianOperator conjugated(const Matrix& u) const {
        if (u.rows() != m_.rows() || u.cols() != m_.cols()) throw DimensionError("conjugation by mismatched unitary");
        return HermitianOperator(u * m_ * u.adjoint(), hermitian_);
    }

private:
    void validate_shape() const {
        if (m_.rows() != m_.cols()) throw DimensionError("operator matrix must be square");
        if (m_.rows() < 2) throw DimensionError("operator dimension must be at least 2");
        if (!all_finite(m_)) throw NumericalError("operator has non-finite entries");
    }
    void symmetrize() { m_ = (0.5 * (m_ + m_.adjoint())).eval(); }

    Matrix m_;
    bool hermitian_ = true;
};

// ---------------------------------------------------------------------------
// Kronecker products

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    k = Eigen::kroneckerProduct(a, b);
    return k;
}

inline HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(kron(a.matrix(), b.matrix()), a.hermitian() && b.hermitian());
}

// ---------------------------------------------------------------------------
// Pauli strings

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

using PauliString = std::vector<Pauli>;

struct PauliTerm {
    double coefficient = 0.0;
    PauliString factors;
};

inline char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline std::string to_string(const PauliString& s) {
    std::string out;
    out.reserve(s.size());
    for (Pauli p : s) out.push_back(to_char(p));
    return out;
}

// "XZ" -> {X, Z}; qubit 1 is the leftmost (most significant) factor.
inline PauliString parse_pauli_string(std::string_view text) {
    PauliString s;
    s.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case 'I': case 'i': s.push_back(Pauli::I); break;
            case 'X': case 'x': s.push_back(Pauli::X); break;
            case 'Y': case 'y': s.push_back(Pauli::Y); break;
            case 'Z': case 'z': s.push_back(Pauli::Z); break;
            default: throw ConfigError("invalid Pauli factor '" + std::string(1, c) + "' in \"" + std::string(text) + "\"");
        }
    }
    if (s.empty()) throw ConfigError("empty Pauli string");
    return s;
}

inline std::vector<PauliString> parse_pauli_strings(std::span<const std::string> texts) {
    std::vector<PauliString> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(parse_pauli_string(t));
    return out;
}

inline Matrix pauli_matrix(Pauli p) {
    Matrix m = Matrix::Zero(2, 2);
    switch (p) {
        case Pauli::I: m << 1.0, 0.0, 0.0, 1.0; break;
        case Pauli::X: m << 0.0, 1.0, 1.0, 0.0; break;
        case Pauli::Y: m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0; break;
        case Pauli::Z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return m;
}

inline Matrix pauli_string_matrix(const PauliString& s) {
    if (s.empty()) throw DimensionError("empty Pauli string");
    Matrix m = pauli_matrix(s.front());
    for (std::size_t q = 1; q < s.size(); ++q) m = kron(m, pauli_matrix(s[q]));
    return m;
}

// Number of qubits for a 2^n dimensional space.
inline int qubit_count(int dim) {
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw UnsupportedError("dimension " + std::to_string(dim) + " is not a power of two");
    int n = 0;
    while ((1 << n) < dim) ++n;
    return n;
}

/// Sum of Pauli tensor products on n qubits.
inline HermitianOperator pauli_assemble(std::span<const PauliTerm> terms, int n_qubits) {
    if (n_qubits < 1) throw DimensionError("pauli_assemble needs at least one qubit");
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& t : terms) {
        if (static_cast<int>(t.factors.size()) != n_qubits)
            throw DimensionError("Pauli term \"" + to_string(t.factors) + "\" has " + std::to_string(t.factors.size()) +
                                 " factors, expected " + std::to_string(n_qubits));
        if (!std::isfinite(t.coefficient)) throw NumericalError("non-finite Pauli coefficient");
        m += t.coefficient * pauli_string_matrix(t.factors);
    }
    return HermitianOperator(std::move(m), true);
}

inline HermitianOperator pauli_assemble(std::initializer_list<PauliTerm> terms, int n_qubits) {
    return pauli_assemble(std::span<const PauliTerm>(terms.begin(), terms.size()), n_qubits);
}

struct PauliProjection {
    std::vector<double> coefficients;
    double residual_norm = 0.0;
};

/// Coefficients c_i = Re Tr(A P_i) / 2^n and the Frobenius norm of what the
/// basis does not capture. Basis strings must be distinct.
inline PauliProjection pauli_project(const Matrix& a, std::span<const PauliString> basis) {
    if (a.rows() != a.cols()) throw DimensionError("pauli_project needs a square matrix");
    const int n = qubit_count(static_cast<int>(a.rows()));
    const double norm = static_cast<double>(a.rows());
    PauliProjection out;
    out.coefficients.reserve(basis.size());
    Matrix rest = a;
    for (const auto& s : basis) {
        if (static_cast<int>(s.size()) != n)
            throw DimensionError("basis string \"" + to_string(s) + "\" does not match " + std::to_string(n) + " qubits");
        const Matrix p = pauli_string_matrix(s);
        const double c = (a * p).trace().real() / norm;
        out.coefficients.push_back(c);
        rest -= c * p;
    }
    out.residual_norm = rest.norm();
    return out;
}

inline std::vector<PauliString> all_pauli_strings(int n_qubits, bool include_identity = true) {
    std::vector<PauliString> out;
    const int count = 1 << (2 * n_qubits);
    for (int code = 0; code < count; ++code) {
        PauliString s(static_cast<std::size_t>(n_qubits));
        int c = code;
        for (int q = n_qubits - 1; q >= 0; --q) {
            s[static_cast<std::size_t>(q)] = static_cast<Pauli>(c & 3);
            c >>= 2;
        }
        const bool identity = std::all_of(s.begin(), s.end(), [](Pauli p) { return p == Pauli::I; });
        if (identity && !include_identity) continue;
        out.push_back(std::move(s));
    }
    return out;
}

// Every weight-one string: X, Y, Z on each qubit.
inline std::vector<PauliString> local_pauli_strings(int n_qubits) {
    std::vector<PauliString> out;
    for (int q = 0; q < n_qubits; ++q)
        for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
            PauliString s(static_cast<std::size_t>(n_qubits), Pauli::I);
            s[static_cast<std::size_t>(q)] = p;
            out.push_back(std::move(s));
        }
    return out;
}

// Single factor p on qubit q (0-based, leftmost first) of n qubits.
inline PauliString single_qubit_string(int n_qubits, int qubit, Pauli p) {
    PauliString s(static_cast<std::size_t>(n_qubits), Pauli::I);
    s.at(static_cast<std::size_t>(qubit)) = p;
    return s;
}

// ---------------------------------------------------------------------------
// Eigendecomposition

enum class SpectralMode { hermitian, general };

struct SpectralDecomposition {
    Vector eigenvalues;    // ascending by real part, then imaginary part
    Matrix eigenvectors;   // columns; unitary in Hermitian mode, unit-norm otherwise
    double degeneracy_gap = std::numeric_limits<double>::infinity();
    bool near_degenerate = false;

    RealVector real_eigenvalues() const { return eigenvalues.real(); }
    int size() const { return static_cast<int>(eigenvalues.size()); }
};

namespace detail {

// Largest-magnitude component made real-positive; first index wins ties.
inline void fix_phase(Eigen::Ref<Vector> v) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best_abs * (1.0 + 1e-12) + 1e-14) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

inline SpectralDecomposition finish(const Vector& values, const Matrix& vectors, double scale) {
    const auto n = values.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
        return values(a).imag() < values(b).imag();
    });
    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(vectors.rows(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = values(order[static_cast<std::size_t>(k)]);
        Vector col = vectors.col(order[static_cast<std::size_t>(k)]);
        const double nrm = col.norm();
        if (nrm > 0.0) col /= nrm;
        fix_phase(col);
        out.eigenvectors.col(k) = col;
    }
    for (Eigen::Index k = 0; k + 1 < n; ++k)
        out.degeneracy_gap = std::min(out.degeneracy_gap, std::abs(out.eigenvalues(k + 1) - out.eigenvalues(k)));
    out.near_degenerate = n > 1 && out.degeneracy_gap < kDegeneracyRelativeGap * std::max(scale, 1e-300);
    return out;
}

}  // namespace detail

inline SpectralDecomposition eigendecompose(const Matrix& a, SpectralMode mode = SpectralMode::hermitian) {
    if (a.rows() != a.cols()) throw DimensionError("eigendecompose needs a square matrix");
    if (!all_finite(a)) throw NumericalError("eigendecompose: non-finite entries");
    const double scale = a.norm();
    if (mode == SpectralMode::hermitian) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
        if (solver.info() != Eigen::Success)
            throw NumericalError("Hermitian eigensolver did not converge (matrix hash " + std::to_string(matrix_hash(a)) + ")");
        return detail::finish(solver.eigenvalues().cast<Complex>(), solver.eigenvectors(), scale);
    }
    Eigen::ComplexEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success)
        throw NumericalError("general eigensolver did not converge (matrix hash " + std::to_string(matrix_hash(a)) + ")");
    return detail::finish(solver.eigenvalues(), solver.eigenvectors(), scale);
}

inline SpectralDecomposition eigendecompose(const HermitianOperator& a) {
    return eigendecompose(a.matrix(), a.hermitian() ? SpectralMode::hermitian : SpectralMode::general);
}

}  // namespace auxeng
