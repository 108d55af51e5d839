#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace newsjump {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed: splitmix64 folded over the base seed and each index in turn,
/// seed = splitmix64(seed ^ splitmix64(index)).
inline std::uint64_t child_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices) {
    std::uint64_t s = splitmix64(base);
    for (auto i : indices) s = splitmix64(s ^ splitmix64(i));
    return s;
}

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n) by rejection; identical on every platform.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = rng();
    while (x >= limit);
    return x % n;
}

/// Standard normal by the Marsaglia polar method (second variate discarded).
inline double standard_normal(Rng& rng) {
    for (;;) {
        const double u = 2.0 * uniform01(rng) - 1.0;
        const double v = 2.0 * uniform01(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

}  // namespace newsjump
