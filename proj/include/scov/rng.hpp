#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace scov::rng {

// Counter-based random streams. Every draw is a pure function of a
// 64-bit key tuple, so generation order and thread scheduling never
// change the values.

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b, std::uint64_t c = 0) {
    std::uint64_t h = mix64(seed ^ 0x2545f4914f6cdd1dULL);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// uniform in (0,1]; never returns 0 so it is safe under log()
inline double uniform01(std::uint64_t key) {
    return (static_cast<double>(key >> 11) + 1.0) * 0x1.0p-53;
}

inline double uniform01(std::uint64_t seed, std::uint64_t a,
                        std::uint64_t b, std::uint64_t c = 0) {
    return uniform01(hash_key(seed, a, b, c));
}

// standard normal via Box-Muller on two derived counters
inline double gaussian(std::uint64_t seed, std::uint64_t a,
                       std::uint64_t b, std::uint64_t c = 0) {
    const std::uint64_t k = hash_key(seed, a, b, c);
    const double u1 = uniform01(k);
    const double u2 = uniform01(mix64(k ^ 0xda942042e4dd58b5ULL));
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

// uniform integer in [0, bound)
inline std::uint64_t uniform_below(std::uint64_t bound, std::uint64_t seed,
                                   std::uint64_t a, std::uint64_t b,
                                   std::uint64_t c = 0) {
    // 128-bit multiply keeps the modulo bias below 2^-64
    const std::uint64_t k = hash_key(seed, a, b, c);
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(k) * bound) >> 64);
}

inline bool coin(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                 std::uint64_t c = 0) {
    return (hash_key(seed, a, b, c) & 1ULL) != 0;
}

}  // namespace scov::rng
