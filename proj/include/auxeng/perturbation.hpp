// perturbation.hpp: eigenvalue power series of H_aux = H0 + lambda V.
//
// Coefficients are dimensionless: with H0 expressed in units of the level
// spacing Delta, E_n(lambda) = Delta * sum_m E_n^(m) (lambda/Delta)^m.
//
// Sign convention for energy denominators: Delta_mn = E_n^(0) - E_m^(0)
// (standard Rayleigh-Schroedinger). It is pinned by the two-level check
// H0 = diag(-1/2, 1/2), V = sigma_x, for which the upper level has E^(2) = +1.
// With that convention the qutrit third-order coefficient at the central
// level is E_1^(3) = -2 Re[V01 V12 V20].

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "auxeng/errors.hpp"
#include "auxeng/operator_algebra.hpp"

namespace auxeng {

inline constexpr int kMaxExpansionOrder = 12;
// |E^(m)| below this is reported as eliminated.
inline constexpr double kEliminatedThreshold = 1e-6;
// Residual scale of the published configurations (e.g. E^(2) ~ 8e-4).
inline constexpr double kSmallNonzeroThreshold = 1e-3;

/// Auxiliary system under study: H_aux = delta * (h0 + (mu/delta) x v).
/// h0 is in units of delta; v is dimensionless.
struct AuxiliaryConfig {
    HermitianOperator h0;
    HermitianOperator v;
    double delta = 1.0;
    double mu = 0.0;

    AuxiliaryConfig() = default;
    AuxiliaryConfig(HermitianOperator h0_, HermitianOperator v_, double delta_ = 1.0, double mu_ = 0.0)
        : h0(std::move(h0_)), v(std::move(v_)), delta(delta_), mu(mu_) {
        validate();
    }

    double epsilon() const { return mu / delta; }
    int dim() const { return h0.dim(); }

    void validate() const {
        if (h0.dim() != v.dim())
            throw DimensionError("h0 has dimension " + std::to_string(h0.dim()) + " but v has " + std::to_string(v.dim()));
        if (!(delta > 0.0) || !std::isfinite(delta)) throw PreconditionError("delta must be positive and finite");
        if (!std::isfinite(mu)) throw PreconditionError("mu must be finite");
    }
};

enum class ExpansionMethod { rs_recursion, spectral_fit };

inline std::string_view to_string(ExpansionMethod m) {
    return m == ExpansionMethod::rs_recursion ? "rs_recursion" : "spectral_fit";
}

inline ExpansionMethod expansion_method_from_string(std::string_view s) {
    if (s == "rs_recursion") return ExpansionMethod::rs_recursion;
    if (s == "spectral_fit") return ExpansionMethod::spectral_fit;
    throw ConfigError("unknown expansion method \"" + std::string(s) + "\"");
}

struct ExpansionSeries {
    int level_index = 0;
    int max_order = 0;
    ExpansionMethod method = ExpansionMethod::rs_recursion;
    std::vector<Complex> coefficients;  // E^(0) ... E^(max_order)
    std::vector<double> uncertainty;

    double operator[](int m) const { return coefficients.at(static_cast<std::size_t>(m)).real(); }
    Complex complex_at(int m) const { return coefficients.at(static_cast<std::size_t>(m)); }

    std::vector<double> real_coefficients() const {
        std::vector<double> out;
        out.reserve(coefficients.size());
        for (const auto& c : coefficients) out.push_back(c.real());
        return out;
    }

    double max_imaginary() const {
        double m = 0.0;
        for (const auto& c : coefficients) m = std::max(m, std::abs(c.imag()));
        return m;
    }

    bool eliminated(int m, double threshold = kEliminatedThreshold) const {
        return std::abs(complex_at(m)) < threshold;
    }

    // Same coefficients for the coupling rescaled by s: E^(m) -> s^m E^(m).
    ExpansionSeries rescaled(double s) const {
        ExpansionSeries out = *this;
        double p = 1.0;
        for (std::size_t m = 0; m < out.coefficients.size(); ++m) {
            out.coefficients[m] *= p;
            if (m < out.uncertainty.size()) out.uncertainty[m] *= std::abs(p);
            p *= s;
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Frame of H0 eigenstates

/// H0 eigenvalues (ascending) and V expressed in the H0 eigenbasis.
struct DiagonalFrame {
    Vector energies;
    Matrix v;       // S^-1 V S
    Matrix basis;   // S, columns are H0 eigenvectors
    bool hermitian = true;
};

inline DiagonalFrame diagonal_frame(const AuxiliaryConfig& cfg) {
    cfg.validate();
    const auto spec = eigendecompose(cfg.h0);
    DiagonalFrame f;
    f.energies = spec.eigenvalues;
    f.basis = spec.eigenvectors;
    f.hermitian = cfg.h0.hermitian();
    if (f.hermitian)
        f.v = f.basis.adjoint() * cfg.v.matrix() * f.basis;
    else
        f.v = f.basis.partialPivLu().solve(cfg.v.matrix() * f.basis);
    return f;
}

inline void require_level(const DiagonalFrame& f, int n) {
    if (n < 0 || n >= f.energies.size())
        throw PreconditionError("level index " + std::to_string(n) + " outside 0.." + std::to_string(f.energies.size() - 1));
}

inline void require_nondegenerate(const DiagonalFrame& f, int n) {
    require_level(f, n);
    const double scale = std::max(1.0, f.energies.cwiseAbs().maxCoeff());
    for (Eigen::Index m = 0; m < f.energies.size(); ++m) {
        if (m == n) continue;
        const double gap = std::abs(f.energies(n) - f.energies(m));
        if (gap < kDegeneracyRelativeGap * scale) throw DegeneracyError(n, static_cast<int>(m), gap);
    }
}

// Distance from level n to the rest of the spectrum.
inline double isolation_gap(const DiagonalFrame& f, int n) {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < f.energies.size(); ++m)
        if (m != n) d = std::min(d, std::abs(f.energies(n) - f.energies(m)));
    return d;
}

// ---------------------------------------------------------------------------
// Closed-form low orders (zero-diagonal coupling in the H0 eigenframe)

namespace detail {

inline DiagonalFrame hermitian_frame_for(const AuxiliaryConfig& cfg, int n) {
    if (!cfg.h0.hermitian() || !cfg.v.hermitian())
        throw PreconditionError("closed-form coefficients require Hermitian h0 and v");
    auto f = diagonal_frame(cfg);
    require_nondegenerate(f, n);
    return f;
}

}  // namespace detail

/// sum_{m != n} |V_mn|^2 / Delta_mn.
inline double coeff_order2(const AuxiliaryConfig& cfg, int n) {
    const auto f = detail::hermitian_frame_for(cfg, n);
    const auto d = f.energies.size();
    double sum = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
        if (m == n) continue;
        sum += std::norm(f.v(m, n)) / (f.energies(n).real() - f.energies(m).real());
    }
    return sum;
}

/// sum_{m,l != n} V_nm V_ml V_ln / (Delta_mn Delta_ln). Exact third order
/// whenever V_nn = 0.
inline double coeff_order3(const AuxiliaryConfig& cfg, int n) {
    const auto f = detail::hermitian_frame_for(cfg, n);
    const auto d = f.energies.size();
    const double en = f.energies(n).real();
    Complex sum = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
        if (m == n) continue;
        for (Eigen::Index l = 0; l < d; ++l) {
            if (l == n) continue;
            sum += f.v(n, m) * f.v(m, l) * f.v(l, n) / ((en - f.energies(m).real()) * (en - f.energies(l).real()));
        }
    }
    return sum.real();
}

/// Four-cycle sum minus the renormalization term
/// sum_{m,l != n} |V_mn|^2 |V_ln|^2 / (Delta_mn Delta_ln^2).
inline double coeff_order4(const AuxiliaryConfig& cfg, int n) {
    const auto f = detail::hermitian_frame_for(cfg, n);
    const auto d = f.energies.size();
    const double en = f.energies(n).real();
    auto den = [&](Eigen::Index k) { return en - f.energies(k).real(); };
    Complex cycles = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
        if (m == n) continue;
        for (Eigen::Index l = 0; l < d; ++l) {
            if (l == n) continue;
            for (Eigen::Index j = 0; j < d; ++j) {
                if (j == n) continue;
                cycles += f.v(n, m) * f.v(m, l) * f.v(l, j) * f.v(j, n) / (den(m) * den(l) * den(j));
            }
        }
    }
    double renorm = 0.0;
    for (Eigen::Index m = 0; m < d; ++m) {
        if (m == n) continue;
        for (Eigen::Index l = 0; l < d; ++l) {
            if (l == n) continue;
            renorm += std::norm(f.v(m, n)) * std::norm(f.v(l, n)) / (den(m) * den(l) * den(l));
        }
    }
    return cycles.real() - renorm;
}

// ---------------------------------------------------------------------------
// General order

namespace detail {

inline void check_order(int max_order) {
    if (max_order < 0) throw PreconditionError("max_order must be non-negative");
    if (max_order > kMaxExpansionOrder)
        throw OrderOverflowError("requested order " + std::to_string(max_order) + " exceeds the supported maximum " +
                                 std::to_string(kMaxExpansionOrder));
}

// Rayleigh-Schroedinger recursion in the H0 eigenframe with intermediate
// normalization <n|psi_k> = 0 for k >= 1:
//   E^(k)   = (V psi_{k-1})_n
//   psi_k   = R [V psi_{k-1} - sum_{j=1..k} E^(j) psi_{k-j}],  R = sum_{m != n} |m><m| / (E_n - E_m)
// No assumption that lower orders vanish. Also valid for a non-Hermitian
// frame (similarity-transformed coupling).
inline std::vector<Complex> rs_recursion(const Vector& energies, const Matrix& v, int n, int max_order) {
    const auto d = energies.size();
    std::vector<Complex> e(static_cast<std::size_t>(max_order) + 1);
    e[0] = energies(n);
    std::vector<Vector> psi;
    psi.reserve(static_cast<std::size_t>(max_order) + 1);
    psi.push_back(Vector::Unit(d, n));
    for (int k = 1; k <= max_order; ++k) {
        Vector rhs = v * psi[static_cast<std::size_t>(k - 1)];
        e[static_cast<std::size_t>(k)] = rhs(n);
        for (int j = 1; j <= k; ++j) rhs -= e[static_cast<std::size_t>(j)] * psi[static_cast<std::size_t>(k - j)];
        Vector next = Vector::Zero(d);
        for (Eigen::Index m = 0; m < d; ++m)
            if (m != n) next(m) = rhs(m) / (energies(n) - energies(m));
        psi.push_back(std::move(next));
    }
    return e;
}

// Rough floating-point error bound for the recursion: the k-th coefficient
// is a sum of O(k) products of k couplings and k-1 inverse gaps.
inline std::vector<double> rs_roundoff(const Matrix& v, double gap, int max_order) {
    const double vn = std::max(v.norm(), 1e-300);
    std::vector<double> u(static_cast<std::size_t>(max_order) + 1);
    u[0] = 0.0;
    for (int k = 1; k <= max_order; ++k)
        u[static_cast<std::size_t>(k)] = 64.0 * std::numeric_limits<double>::epsilon() * k * vn * std::pow(vn / gap, k - 1);
    return u;
}

}  // namespace detail

/// Full Rayleigh-Schroedinger expansion of level n (ascending index of h0).
inline ExpansionSeries expand_rs(const AuxiliaryConfig& cfg, int n, int max_order) {
    detail::check_order(max_order);
    if (!cfg.h0.hermitian())
        throw PreconditionError("expand_rs needs a Hermitian h0; use expand_nonhermitian for decay");
    const auto f = diagonal_frame(cfg);
    require_nondegenerate(f, n);
    ExpansionSeries s;
    s.level_index = n;
    s.max_order = max_order;
    s.method = ExpansionMethod::rs_recursion;
    s.coefficients = detail::rs_recursion(f.energies, f.v, n, max_order);
    if (cfg.v.hermitian())
        for (auto& c : s.coefficients) c = Complex(c.real(), 0.0);
    s.uncertainty = detail::rs_roundoff(f.v, isolation_gap(f, n), max_order);
    return s;
}

// ---------------------------------------------------------------------------
// Spectral fit

/// Sampling grid for the fit route.
///
/// `circle` samples lambda = r exp(2 pi i k / points); the least-squares
/// polynomial on those nodes is the discrete Fourier transform, which is
/// well conditioned up to order 12. `chebyshev` samples real Chebyshev nodes
/// on [-r, r] and solves the Vandermonde least-squares problem; it is kept
/// for comparison and reports much larger uncertainties at high order.
struct FitGrid {
    enum class Kind { circle, chebyshev };
    Kind kind = Kind::circle;
    int points = 64;          // circle: nodes on the circle; chebyshev: 41 by default
    double radius = 0.0;      // 0 selects automatically
    int radial_steps = 24;    // circle: tracking steps from 0 out to the radius

    static FitGrid chebyshev(int points = 41, double radius = 0.0) {
        FitGrid g;
        g.kind = Kind::chebyshev;
        g.points = points;
        g.radius = radius;
        return g;
    }
};

namespace detail {

inline Vector unit(const Vector& v) {
    const double n = v.norm();
    return n > 0.0 ? Vector(v / n) : v;
}

// Eigenpair of h0 + lambda v whose eigenvector overlaps most with `prev`.
struct TrackedPoint {
    Complex value;
    Vector vector;
    double overlap;
};

inline TrackedPoint track_step(const Matrix& h0, const Matrix& v, Complex lambda, const Vector& prev, bool hermitian_real) {
    const Matrix h = h0 + lambda * v;
    const auto spec = eigendecompose(h, hermitian_real ? SpectralMode::hermitian : SpectralMode::general);
    TrackedPoint best{0.0, Vector(), -1.0};
    for (int k = 0; k < spec.size(); ++k) {
        const double ov = std::abs(prev.dot(spec.eigenvectors.col(k)));  // dot conjugates prev
        if (ov > best.overlap) best = {spec.eigenvalues(k), unit(spec.eigenvectors.col(k)), ov};
    }
    return best;
}

inline void require_overlap(double overlap, Complex lambda) {
    if (overlap < 0.5)
        throw BranchTrackingError("branch tracking lost the level near lambda = (" + std::to_string(lambda.real()) + ", " +
                                  std::to_string(lambda.imag()) + "), overlap " + std::to_string(overlap) +
                                  "; use a smaller grid radius");
}

inline double default_radius(const DiagonalFrame& f, const AuxiliaryConfig& cfg, int n, FitGrid::Kind kind) {
    const double vnorm = cfg.v.matrix().operatorNorm();
    const double gap = isolation_gap(f, n);
    if (kind == FitGrid::Kind::chebyshev) return vnorm > 0.0 ? std::min(0.1, 0.2 * gap / vnorm) : 0.1;
    // The series converges at least for |lambda| < gap / (2 ||V||).
    return vnorm > 0.0 ? 0.25 * gap / vnorm : 1.0;
}

inline ExpansionSeries fit_circle(const AuxiliaryConfig& cfg, const DiagonalFrame& f, int n, int max_order, const FitGrid& grid) {
    const double r = grid.radius > 0.0 ? grid.radius : default_radius(f, cfg, n, grid.kind);
    const int npts = std::max(grid.points, 2 * max_order + 8);
    const Matrix& h0 = cfg.h0.matrix();
    const Matrix& v = cfg.v.matrix();
    const bool herm = cfg.h0.hermitian() && cfg.v.hermitian();

    Vector state = f.basis.col(n);
    for (int s = 1; s <= grid.radial_steps; ++s) {
        const Complex lam = r * static_cast<double>(s) / grid.radial_steps;
        auto p = track_step(h0, v, lam, state, herm);
        require_overlap(p.overlap, lam);
        state = p.vector;
    }
    std::vector<Complex> samples(static_cast<std::size_t>(npts));
    const Vector start = state;
    for (int k = 0; k < npts; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / npts;
        const Complex lam = std::polar(r, theta);
        auto p = track_step(h0, v, lam, state, herm && k == 0);
        require_overlap(p.overlap, lam);
        samples[static_cast<std::size_t>(k)] = p.value;
        state = p.vector;
    }
    // Closing the loop must return to the starting eigenvector.
    require_overlap(std::abs(start.dot(state)), Complex(r, 0.0));

    // Discrete Fourier coefficients c_j = (1/N) sum_k E_k exp(-i j theta_k).
    std::vector<Complex> c(static_cast<std::size_t>(npts));
    double emax = 0.0;
    for (const auto& e : samples) emax = std::max(emax, std::abs(e));
    for (int j = 0; j < npts; ++j) {
        Complex acc = 0.0;
        for (int k = 0; k < npts; ++k) acc += samples[static_cast<std::size_t>(k)] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / npts);
        c[static_cast<std::size_t>(j)] = acc / static_cast<double>(npts);
    }
    // Modes above npts/2 alias negative powers, which an analytic branch does
    // not have; their size measures roundoff plus aliasing from the tail.
    double tail = 0.0;
    for (int j = npts / 2; j < npts; ++j) tail = std::max(tail, std::abs(c[static_cast<std::size_t>(j)]));
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(emax, 1.0);

    ExpansionSeries s;
    s.level_index = n;
    s.max_order = max_order;
    s.method = ExpansionMethod::spectral_fit;
    s.coefficients.resize(static_cast<std::size_t>(max_order) + 1);
    s.uncertainty.resize(static_cast<std::size_t>(max_order) + 1);
    for (int m = 0; m <= max_order; ++m) {
        const double rm = std::pow(r, m);
        s.coefficients[static_cast<std::size_t>(m)] = c[static_cast<std::size_t>(m)] / rm;
        s.uncertainty[static_cast<std::size_t>(m)] = (std::max(tail, floor)) / rm;
    }
    if (herm)
        for (auto& x : s.coefficients) x = Complex(x.real(), 0.0);
    return s;
}

inline ExpansionSeries fit_chebyshev(const AuxiliaryConfig& cfg, const DiagonalFrame& f, int n, int max_order, const FitGrid& grid) {
    const double r = grid.radius > 0.0 ? grid.radius : default_radius(f, cfg, n, grid.kind);
    const int npts = grid.points % 2 == 1 ? grid.points : grid.points + 1;  // odd count puts a node at 0
    const Matrix& h0 = cfg.h0.matrix();
    const Matrix& v = cfg.v.matrix();
    const bool herm = cfg.h0.hermitian() && cfg.v.hermitian();
    const int mid = npts / 2;

    std::vector<double> t(static_cast<std::size_t>(npts));
    for (int k = 0; k < npts; ++k) t[static_cast<std::size_t>(k)] = -std::cos(std::numbers::pi * (k + 0.5) / npts);
    t[static_cast<std::size_t>(mid)] = 0.0;

    std::vector<Complex> e(static_cast<std::size_t>(npts));
    e[static_cast<std::size_t>(mid)] = f.energies(n);
    for (int dir : {+1, -1}) {
        Vector state = f.basis.col(n);
        for (int k = mid + dir; k >= 0 && k < npts; k += dir) {
            const double lam = r * t[static_cast<std::size_t>(k)];
            auto p = track_step(h0, v, lam, state, herm);
            require_overlap(p.overlap, lam);
            e[static_cast<std::size_t>(k)] = p.value;
            state = p.vector;
        }
    }
    bool even = true;
    double scale = 0.0;
    for (int k = 0; k < npts; ++k) scale = std::max(scale, std::abs(e[static_cast<std::size_t>(k)]));
    for (int k = 0; k < npts; ++k)
        if (std::abs(e[static_cast<std::size_t>(k)] - e[static_cast<std::size_t>(npts - 1 - k)]) > 1e-13 * std::max(scale, 1.0)) even = false;

    // Fit degree: the requested order plus a margin for the truncated tail,
    // limited by the node count.
    const int degree = std::min(max_order + 4, npts - 2);
    std::vector<int> powers;
    for (int p = 0; p <= degree; ++p)
        if (!even || p % 2 == 0) powers.push_back(p);
    const auto cols = static_cast<Eigen::Index>(powers.size());
    Eigen::MatrixXd a(npts, cols);
    Eigen::MatrixXd b(npts, 2);
    for (int k = 0; k < npts; ++k) {
        for (Eigen::Index j = 0; j < cols; ++j) a(k, j) = std::pow(t[static_cast<std::size_t>(k)], powers[static_cast<std::size_t>(j)]);
        b(k, 0) = e[static_cast<std::size_t>(k)].real();
        b(k, 1) = e[static_cast<std::size_t>(k)].imag();
    }
    const auto qr = a.colPivHouseholderQr();
    const Eigen::MatrixXd x = qr.solve(b);
    const Eigen::MatrixXd resid = a * x - b;
    const double dof = std::max<double>(1.0, static_cast<double>(npts - cols));
    const double sigma2 = std::max(resid.squaredNorm() / dof, std::pow(4.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0), 2));
    const Eigen::MatrixXd cov = (a.transpose() * a).inverse() * sigma2;

    ExpansionSeries s;
    s.level_index = n;
    s.max_order = max_order;
    s.method = ExpansionMethod::spectral_fit;
    s.coefficients.assign(static_cast<std::size_t>(max_order) + 1, Complex(0.0));
    s.uncertainty.assign(static_cast<std::size_t>(max_order) + 1, 0.0);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const int p = powers[static_cast<std::size_t>(j)];
        if (p > max_order) continue;
        const double rp = std::pow(r, p);
        s.coefficients[static_cast<std::size_t>(p)] = Complex(x(j, 0), x(j, 1)) / rp;
        s.uncertainty[static_cast<std::size_t>(p)] = std::sqrt(std::max(cov(j, j), 0.0)) / rp;
    }
    if (even)
        for (int p = 1; p <= max_order; p += 2) s.uncertainty[static_cast<std::size_t>(p)] = 1e-13 * std::max(scale, 1.0) / std::pow(r, p);
    if (herm)
        for (auto& c : s.coefficients) c = Complex(c.real(), 0.0);
    return s;
}

}  // namespace detail

/// Second route to the coefficients: diagonalize h0 + lambda v on a grid,
/// follow the branch continuously from lambda = 0 and fit a polynomial.
inline ExpansionSeries expand_spectral_fit(const AuxiliaryConfig& cfg, int n, int max_order, const FitGrid& grid = {}) {
    detail::check_order(max_order);
    const auto f = diagonal_frame(cfg);
    require_nondegenerate(f, n);
    return grid.kind == FitGrid::Kind::circle ? detail::fit_circle(cfg, f, n, max_order, grid)
                                              : detail::fit_chebyshev(cfg, f, n, max_order, grid);
}

// ---------------------------------------------------------------------------
// Two branches

/// Order-m summary diag(E_first, E_second) = identity_part * 1 + y_part * Y,
/// with Y = |first><first| - |second><second|.
struct BranchPairTerm {
    int order = 0;
    double first = 0.0;
    double second = 0.0;
    double identity_part = 0.0;
    double y_part = 0.0;
    bool antisymmetric = false;  // |E_first + E_second| < 1e-6
};

struct TwoBranchExpansion {
    ExpansionSeries first;
    ExpansionSeries second;
    std::vector<BranchPairTerm> terms;

    /// Lowest order m >= 1 carrying a pure Y coupling of at least the
    /// small-nonzero scale; every lower order is either eliminated or
    /// below that scale.
    std::optional<int> leading_y_order() const {
        for (const auto& t : terms) {
            if (t.order == 0) continue;
            const bool negligible = std::abs(t.first) < kSmallNonzeroThreshold && std::abs(t.second) < kSmallNonzeroThreshold;
            if (negligible) continue;
            if (t.antisymmetric) return t.order;
            return std::nullopt;
        }
        return std::nullopt;
    }
};

inline TwoBranchExpansion expand_two_branch(const AuxiliaryConfig& cfg, int n1, int n2, int max_order) {
    if (n1 == n2) throw PreconditionError("two-branch expansion needs two distinct levels");
    TwoBranchExpansion out;
    out.first = expand_rs(cfg, n1, max_order);
    out.second = expand_rs(cfg, n2, max_order);
    for (int m = 0; m <= max_order; ++m) {
        BranchPairTerm t;
        t.order = m;
        t.first = out.first[m];
        t.second = out.second[m];
        t.identity_part = 0.5 * (t.first + t.second);
        t.y_part = 0.5 * (t.first - t.second);
        t.antisymmetric = std::abs(t.first + t.second) < kEliminatedThreshold;
        out.terms.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Non-Hermitian (decay-broadened) expansion

/// Expansion of the branch of a non-Hermitian h0 that continues level n of
/// its Hermitian part. The branch is the eigenvector with largest overlap
/// with the Hermitian-part eigenvector; two overlaps within 0.1 of each other
/// are ambiguous.
inline ExpansionSeries expand_nonhermitian(const AuxiliaryConfig& cfg, int n, int max_order) {
    detail::check_order(max_order);
    if (cfg.h0.hermitian()) return expand_rs(cfg, n, max_order);
    cfg.validate();

    const Matrix herm_part = 0.5 * (cfg.h0.matrix() + cfg.h0.matrix().adjoint());
    const auto ref = eigendecompose(herm_part, SpectralMode::hermitian);
    if (n < 0 || n >= ref.size()) throw PreconditionError("level index out of range");
    const Vector target = ref.eigenvectors.col(n);

    const auto f = diagonal_frame(cfg);
    std::vector<double> overlaps(static_cast<std::size_t>(f.energies.size()));
    for (Eigen::Index k = 0; k < f.energies.size(); ++k)
        overlaps[static_cast<std::size_t>(k)] = std::abs(target.dot(detail::unit(f.basis.col(k))));
    const auto best = std::max_element(overlaps.begin(), overlaps.end()) - overlaps.begin();
    for (std::size_t k = 0; k < overlaps.size(); ++k)
        if (static_cast<long>(k) != best && overlaps[static_cast<std::size_t>(best)] - overlaps[k] < 0.1)
            throw BranchIdentificationError("branch of level " + std::to_string(n) + " is ambiguous: overlaps " +
                                            std::to_string(overlaps[static_cast<std::size_t>(best)]) + " and " +
                                            std::to_string(overlaps[k]));
    const int k = static_cast<int>(best);
    require_nondegenerate(f, k);

    ExpansionSeries s;
    s.level_index = n;
    s.max_order = max_order;
    s.method = ExpansionMethod::rs_recursion;
    s.coefficients = detail::rs_recursion(f.energies, f.v, k, max_order);
    s.uncertainty = detail::rs_roundoff(f.v, isolation_gap(f, k), max_order);
    return s;
}

}  // namespace auxeng
