// nelder_mead.hpp: derivative-free simplex minimization

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace auxeng {

struct NelderMeadOptions {
    int max_evaluations = 1000;
    double initial_step = 0.1;   // simplex edge, absolute
    double x_tolerance = 1e-10;  // simplex diameter
    double f_tolerance = 1e-14;  // spread of vertex values
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead with the dimension-adaptive coefficients of Gao and Han
/// (reflection 1, expansion 1 + 2/n, contraction 0.75 - 1/2n, shrink 1 - 1/n).
template <class Objective>
NelderMeadResult nelder_mead(Objective&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    NelderMeadResult out;
    if (n == 0) {
        out.x = x0;
        out.value = f(x0);
        out.evaluations = 1;
        out.converged = true;
        return out;
    }
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double gamma = 1.0 + 2.0 / dn;
    const double rho = 0.75 - 1.0 / (2.0 * dn);
    const double sigma = 1.0 - 1.0 / dn;

    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.initial_step;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    auto at = [&](const std::vector<double>& base, const std::vector<double>& worst, double t, std::vector<double>& dst) {
        for (std::size_t j = 0; j < n; ++j) dst[j] = base[j] + t * (base[j] - worst[j]);
    };

    while (evals < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
        if (diameter < opt.x_tolerance && std::abs(fv[worst] - fv[best]) < opt.f_tolerance) {
            out.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / dn;

        at(centroid, simplex[worst], alpha, xr);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            at(centroid, simplex[worst], gamma, xe);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        // Outside or inside contraction.
        const bool outside = fr < fv[worst];
        at(centroid, simplex[worst], outside ? rho * alpha : -rho, xc);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + sigma * (simplex[i][j] - simplex[best][j]);
            fv[i] = eval(simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    out.x = simplex[best];
    out.value = fv[best];
    out.evaluations = evals;
    return out;
}

}  // namespace auxeng
