// From the probe design to a Kerr cat: resonator coefficients, cat time and
// the cat fidelity of the resulting Kerr evolution.

#include <cstdio>

#include "auxeng/fixtures.hpp"

using namespace auxeng;

int main() {
    const auto cfg = cpb_realization_config();
    const auto series = expand_rs(cfg, 2, 6);
    const auto c = engineered_coefficients(series, cfg, {2, 4, 6});
    std::printf("x^2 %.6g  x^4 %.6g  x^6 %.6g  (s^-1)\n", c.at(2), c.at(4), c.at(6));
    std::printf("x^6/x^4 %.5f\n", c.at(6) / c.at(4));
    const auto n = rwa_reduce({{4, c.at(4)}});
    std::printf("RWA: %.6g n^2 + %.6g n + %.6g\n", n.at(2), n.at(1), n.at(0));
    for (double alpha : {1.0, 2.0, 3.0}) {
        const auto b = cat_benchmark(c.at(4), alpha, FockSpace{80, 0.0});
        std::printf("alpha %.0f: tau %.4g s, cat fidelity %.12f\n", alpha, b.tau, b.cat_fidelity);
    }
}
