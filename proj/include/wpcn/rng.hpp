#pragma once

#include <cstdint>
#include <random>

namespace wpcn {

// SplitMix64 step. Bijective on uint64, so distinct inputs give distinct
// outputs; used for deriving independent child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream substream: same master, different tags give decorrelated seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return splitmix64(splitmix64(master) ^ splitmix64(tag * 0xD1B54A32D192ED03ULL + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    std::mt19937_64 eng(splitmix64(seed));
    return eng;
}

}  // namespace wpcn
