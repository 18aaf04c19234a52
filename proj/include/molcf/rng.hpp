#pragma once

#include <cstdint>
#include <random>

namespace molcf {

// splitmix64: stateless 64-bit mixer used for all seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derives an independent seed stream from a master seed and a list of tags.
// Used everywhere a component needs its own rng: derive_seed(master, {rep, stage, member}).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t t : tags)
        s = splitmix64(s ^ (t + 0x9E3779B97F4A7C15ULL));
    return s;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace molcf
