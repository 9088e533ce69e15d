// Searches for the two-branch probe design and prints the accepted candidates.

#include <cstdio>
#include <cstdlib>

#include "auxeng/fixtures.hpp"

using namespace auxeng;

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0;
    const auto r = search(probe_problem(), 5000, seed, 8);
    std::printf("%zu distinct designs from %ld evaluations\n", r.candidates.size(), r.total_evaluations);
    for (const auto& c : r.candidates) {
        std::printf("score %.3e  H0:", c.score);
        for (const auto& t : c.pauli_decomposition) std::printf(" %+.4f %s", t.coefficient, to_string(t.factors).c_str());
        std::printf("  coupling:");
        for (const auto& t : c.couplings) std::printf(" %+.4f %s", t.coefficient, to_string(t.factors).c_str());
        std::printf("\n");
    }
}
