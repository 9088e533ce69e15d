// Expansion coefficients of the bundled configurations by both methods.

#include <cstdio>

#include "auxeng/fixtures.hpp"

using namespace auxeng;

int main() {
    for (const auto& name : fixture_names()) {
        const auto fx = make_fixture(name);
        for (int level : fx.levels) {
            const auto rs = expand_rs(fx.config, level, fx.max_order);
            const auto fit = expand_spectral_fit(fx.config, level, fx.max_order);
            std::printf("%s, level %d\n", name.c_str(), level);
            for (int m = 0; m <= fx.max_order; ++m)
                std::printf("  m=%d  %+.10e  %+.10e  (+- %.1e)\n", m, rs[m], fit[m], fit.uncertainty[static_cast<std::size_t>(m)]);
        }
    }
}
