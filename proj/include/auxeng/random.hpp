// random.hpp: counter-based deterministic random numbers.
//
// Every draw is a pure function of (key..., counter), so sample i of a Monte
// Carlo run is reproducible regardless of the order samples are evaluated in.

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace auxeng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
    return h;
}

// Uniform in (0, 1); never returns 0 so the log in Box-Muller is finite.
inline double uniform_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

/// Standard normal for a given key (Box-Muller on two derived uniforms).
inline double standard_normal(std::uint64_t key) {
    const double u1 = uniform_open(splitmix64(key ^ 0x1ULL));
    const double u2 = uniform_open(splitmix64(key ^ 0x2ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential stream on top of the counter-based generator.
class KeyedStream {
public:
    explicit KeyedStream(std::uint64_t key) : key_(key) {}
    double normal() { return standard_normal(hash_key({key_, counter_++})); }
    double uniform() { return uniform_open(hash_key({key_, counter_++})); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace auxeng
