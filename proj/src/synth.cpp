#include "adepos/synth.hpp"

#include <cmath>
#include <numbers>

#include "adepos/errors.hpp"
#include "adepos/prng.hpp"

namespace adepos {

namespace {

std::uint64_t stream_seed(std::uint64_t seed, const std::string& id) {
    std::uint64_t h = 1469598103934665603ull; // FNV-1a over the bearing id
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return SplitMix64::mix(seed ^ h);
}

double gaussian(SplitMix64& rng) {
    // Box-Muller; u1 nudged away from zero so log stays finite.
    const double u1 = rng.next_unit();
    const double u2 = rng.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1 + 1e-300));
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

void validate(const SyntheticBearingSpec& spec) {
    if (spec.segments.empty()) throw InvalidSpec("synthetic spec has no segments");
    for (const auto& seg : spec.segments) {
        if (seg.length <= 0) throw InvalidSpec("segment length must be positive");
        for (int f = 0; f < kFeatureDim; ++f) {
            if (!std::isfinite(seg.mean[static_cast<std::size_t>(f)]) ||
                !std::isfinite(seg.stddev[static_cast<std::size_t>(f)]) ||
                !std::isfinite(seg.loading[static_cast<std::size_t>(f)]))
                throw InvalidSpec("segment statistics must be finite");
            if (seg.stddev[static_cast<std::size_t>(f)] < 0.0)
                throw InvalidSpec("segment stddev must be >= 0");
        }
    }
}

} // namespace

SyntheticStream generate_synthetic(const SyntheticBearingSpec& spec, std::uint64_t seed) {
    validate(spec);

    SyntheticStream stream;
    stream.id = spec.id;
    stream.faulty = spec.faulty;

    SplitMix64 rng(stream_seed(seed, spec.id));
    std::size_t t = 0;
    for (const auto& seg : spec.segments) {
        // uniform with matched standard deviation: half-width sqrt(3)*sigma
        const double uniform_halfwidth = std::sqrt(3.0);
        for (int s = 0; s < seg.length; ++s, ++t) {
            const double factor = seg.noise == SegmentSpec::Noise::gaussian
                                      ? gaussian(rng)
                                      : uniform_halfwidth * rng.next_symmetric();
            std::array<double, kFeatureDim> v{};
            for (std::size_t f = 0; f < kFeatureDim; ++f) {
                const double z = seg.noise == SegmentSpec::Noise::gaussian
                                     ? gaussian(rng)
                                     : uniform_halfwidth * rng.next_symmetric();
                v[f] = seg.mean[f] + seg.loading[f] * factor + seg.stddev[f] * z;
            }
            if (spec.drift && t >= spec.drift->start) {
                const double age = static_cast<double>(t - spec.drift->start + 1);
                for (std::size_t f = 0; f < kFeatureDim; ++f) v[f] += spec.drift->slope[f] * age;
            }
            stream.features.push_back(FeatureVector::from_array(v));
        }
    }
    return stream;
}

std::vector<SyntheticBearingSpec> default_synthetic_fleet(int n_healthy, int n_faulty,
                                                          int samples) {
    if (n_healthy < 0 || n_faulty < 0 || samples < 10)
        throw InvalidSpec("fleet needs nonnegative counts and >= 10 samples");

    // Healthy operating point. A common operating factor ties the features
    // together, so the healthy cloud is a thin slab of joint codes rather
    // than the whole 6-bit box; bounded noise keeps late-life samples
    // inside the range the quantizer learned from the prefix.
    SegmentSpec base;
    base.mean = {1.0, 3.0, 4.0, 1.5, 0.0};
    base.loading = {0.10, 0.30, 0.40, 0.15, 0.06};
    base.stddev = {0.01, 0.03, 0.04, 0.015, 0.006};
    base.length = samples;
    base.noise = SegmentSpec::Noise::uniform;

    std::vector<SyntheticBearingSpec> fleet;
    for (int i = 0; i < n_healthy; ++i) {
        SyntheticBearingSpec spec;
        spec.id = "synth_healthy" + std::to_string(i + 1);
        spec.segments = {base};
        fleet.push_back(std::move(spec));
    }
    for (int i = 0; i < n_faulty; ++i) {
        SyntheticBearingSpec spec;
        spec.id = "synth_faulty" + std::to_string(i + 1);
        spec.faulty = true;
        spec.segments = {base};
        DriftSpec drift;
        // End-of-life degradation runs against the healthy correlation:
        // rms and peak-peak climb while kurtosis, crest factor and skewness
        // sink, walking the quantized stream off the training slab through
        // joint codes no learner has seen.
        drift.start = static_cast<std::size_t>(samples - samples / 8);
        const double ramp = static_cast<double>(samples / 8);
        drift.slope = {0.5 / ramp, -2.0 / ramp, 2.5 / ramp, -0.8 / ramp, -0.3 / ramp};
        spec.drift = drift;
        fleet.push_back(std::move(spec));
    }
    return fleet;
}

} // namespace adepos
