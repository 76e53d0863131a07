#pragma once

#include <cstdint>

namespace cylflow {

// Identifies one replicate of one experiment. Every random draw in the
// project is a pure function of (seed, replicate, counter, draw), so fields
// regenerate bit-exactly no matter how work is scheduled across threads.
struct SeedSpec {
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
};

// splitmix64 finalizer (Stafford mix13 variant).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based stream: no state, no ordering requirements.
constexpr std::uint64_t stream_bits(const SeedSpec& s, std::uint64_t counter,
                                    std::uint32_t draw = 0) {
    std::uint64_t h = mix64(s.seed);
    h = mix64(h ^ (s.replicate + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (counter + 0xd1b54a32d192ed03ULL));
    h = mix64(h ^ (static_cast<std::uint64_t>(draw) + 0x2545f4914f6cdd1dULL));
    return h;
}

// Uniform double in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr double uniform01(const SeedSpec& s, std::uint64_t counter, std::uint32_t draw = 0) {
    return to_unit(stream_bits(s, counter, draw));
}

}  // namespace cylflow
