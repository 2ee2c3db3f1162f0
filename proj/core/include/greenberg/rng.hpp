#pragma once

#include <cstdint>

namespace greenberg {

/// SplitMix64 (Steele/Lea/Flood; Vigna's fixed-increment variant).
/// Substream i of a run seeded with s starts at mix(s + i·GAMMA2) with a
/// second increment coprime to GAMMA: deriving the start state through the
/// avalanche function keeps substreams from being shifted copies of one
/// another, which they would be if the start were simply s + i·GAMMA.
class SplitMix64 {
  public:
    static constexpr std::uint64_t GAMMA = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t GAMMA2 = 0xD1B54A32D192ED03ULL;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
        return SplitMix64(mix(seed + index * GAMMA2));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return mix(state_ += GAMMA); }

    /// Uniform in [0, m) by rejection, exact and platform-independent.
    std::uint64_t below(std::uint64_t m) {
        if (m <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % m;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % m;
    }

  private:
    std::uint64_t state_;
};

}  // namespace greenberg
