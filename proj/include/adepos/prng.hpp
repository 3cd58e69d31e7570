#pragma once

#include <cstdint>

namespace adepos {

// SplitMix64 generator. The i-th output of a stream with a given seed is
// mix(seed + (i+1)*GAMMA), so streams are splittable: any (seed, index)
// value can be produced without stepping through the sequence, and two
// languages implementing this contract produce bit-identical draws.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    // Random value at a given stream position, without advancing any state.
    static std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
        return mix(seed + (index + 1) * kGamma);
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    std::uint64_t state_;
};

// Deterministic sub-seed for an indexed substream (bearing k of a trial,
// block j of a sweep, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64::at(seed, 0x5EEDull + stream);
}

} // namespace adepos
