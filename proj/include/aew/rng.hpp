#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace aew {

using Rng = std::mt19937_64;

// SplitMix64 finalizer (Steele/Lea/Flood).
constexpr std::uint64_t avalanche64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Per-trial stream seed. Injective in the index at fixed master seed
// (odd multiplier, then a bijective finalizer), so distinct trials never
// share a stream.
constexpr std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                          std::uint64_t trial_index) {
    std::uint64_t z = master_seed ^ (0x9e3779b97f4a7c15ULL * (trial_index + 1));
    return avalanche64(avalanche64(z) + 0x9e3779b97f4a7c15ULL);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform double in [0,1) from the top 53 bits; avoids
// std::uniform_real_distribution so streams are identical across standard
// library implementations.
inline double uniform01(Rng& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double rademacher(Rng& g) { return (g() & 1u) ? 1.0 : -1.0; }

// Uniform index in [0, k), consuming exactly one generator step. For powers
// of two this extracts the top bits, which coincides with floor(uniform01 * k).
inline std::size_t uniform_index(Rng& g, std::size_t k) {
    if ((k & (k - 1)) == 0) {
        const int bits = std::countr_zero(k);
        const std::uint64_t raw = g();
        return bits == 0 ? 0 : static_cast<std::size_t>(raw >> (64 - bits));
    }
    const std::size_t i = static_cast<std::size_t>(uniform01(g) * static_cast<double>(k));
    return i < k ? i : k - 1;
}

// Standard normal via Box-Muller (polar form not used: branch-free count of
// two uniforms per call keeps streams reproducible).
inline double standard_normal(Rng& g) {
    double u1 = uniform01(g);
    while (u1 == 0.0) u1 = uniform01(g);
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace aew
