#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adepos/signal_features.hpp"

namespace adepos {

// Synthetic per-bearing feature streams with known ground truth, for
// dataset-free testing of the whole pipeline.

struct SegmentSpec {
    enum class Noise { gaussian, uniform };

    std::array<double, kFeatureDim> mean{};
    std::array<double, kFeatureDim> stddev{};
    // Per-feature coefficients of a shared latent factor drawn once per
    // sample; nonzero loadings correlate the features the way a common
    // operating condition (load, speed) does.
    std::array<double, kFeatureDim> loading{};
    int length = 0;
    Noise noise = Noise::gaussian; // uniform keeps the same stddev, bounded tails
};

// Linear per-sample ramp added on top of the segments from `start` on.
struct DriftSpec {
    std::size_t start = 0;
    std::array<double, kFeatureDim> slope{};
};

struct SyntheticBearingSpec {
    std::string id;
    bool faulty = false;
    std::vector<SegmentSpec> segments;
    std::optional<DriftSpec> drift;
};

struct SyntheticStream {
    std::string id;
    bool faulty = false;
    std::vector<FeatureVector> features;
};

// Gaussian draws come from the SplitMix64 stream of (seed, id), so the same
// spec and seed always produce the identical stream.
SyntheticStream generate_synthetic(const SyntheticBearingSpec& spec, std::uint64_t seed);

// A stock fleet: `n_healthy` stationary bearings plus `n_faulty` bearings
// whose last ~15% of life drifts in rms, peak-peak and kurtosis.
std::vector<SyntheticBearingSpec> default_synthetic_fleet(int n_healthy, int n_faulty,
                                                          int samples);

} // namespace adepos
