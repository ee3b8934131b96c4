#pragma once

#include <cstdint>
#include <random>

namespace ssreg {

using Rng = std::mt19937_64;

//! splitmix64 step, used to derive well-separated child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

//! Deterministic child seed for a (stream, counter) pair under a master seed.
//!
//! Streams keep independent uses (design draw, noise draw, sampler, ...) from
//! colliding; counters index replications within a stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t counter = 0) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0x9e3779b97f4a7c15ull + a;
    std::uint64_t b = splitmix64(s);
    s ^= counter * 0xc2b2ae3d27d4eb4full + b;
    return splitmix64(s);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

//! Uniform draw on (0, 1), built directly from generator bits so the stream
//! is stable across standard-library implementations.
inline double canonical(Rng& rng) {
    // 53 random mantissa bits, shifted into (0, 1); offset avoids exact 0
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

} // namespace ssreg
