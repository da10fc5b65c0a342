#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tailcount {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic stream seed derived from a base seed and up to three
/// stream indices. Independent streams let replicates and panel blocks
/// be generated in parallel while staying bit-reproducible.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = base;
    std::uint64_t h = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xc2b2ae3d27d4eb4fULL;
    h ^= splitmix64(s);
    s ^= c + 0x165667b19e3779f9ULL;
    h ^= splitmix64(s);
    return h;
}

inline std::mt19937_64 make_stream(std::uint64_t base, std::uint64_t a,
                                   std::uint64_t b = 0, std::uint64_t c = 0) {
    return std::mt19937_64(derive_seed(base, a, b, c));
}

/// Uniform draw on (0, 1); never returns exactly 0.
inline double uniform01(std::mt19937_64& gen) {
    // 53-bit mantissa, shifted into (0,1]
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1p-53;
}

/// Pareto(alpha) on [1, inf): P(Y > u) = u^{-alpha} for u >= 1.
inline double pareto_draw(std::mt19937_64& gen, double alpha) {
    return std::pow(uniform01(gen), -1.0 / alpha);
}

}  // namespace tailcount
