#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace adepos {

// One raw vibration window is a sequence of acceleration samples
// (unitless after the ADC). Windows must hold at least two finite samples.
using Window = std::vector<double>;

inline constexpr int kFeatureDim = 5;

inline constexpr std::array<std::string_view, kFeatureDim> kFeatureNames = {
    "rms", "kurtosis", "peak_peak", "crest_factor", "skewness"};

// The five time-domain statistics of one window.
// Kurtosis is raw (non-excess) population kurtosis m4/m2^2, skewness is
// m3/m2^1.5, both on population central moments. Crest factor uses
// peak = max(|x|).
struct FeatureVector {
    double rms = 0.0;
    double kurtosis = 0.0;
    double peak_peak = 0.0;
    double crest_factor = 0.0;
    double skewness = 0.0;

    std::array<double, kFeatureDim> as_array() const {
        return {rms, kurtosis, peak_peak, crest_factor, skewness};
    }
    static FeatureVector from_array(const std::array<double, kFeatureDim>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
};

// Per-feature clamping ranges learned from training data.
struct QuantParams {
    struct Range {
        double lo = 0.0;
        double hi = 1.0;
    };
    std::array<Range, kFeatureDim> ranges;
};

// 6-bit integer feature codes, each in [0, 63].
struct QuantFeatureVector {
    std::array<int, kFeatureDim> codes{};

    // Codes as real model inputs.
    std::array<double, kFeatureDim> as_real() const {
        std::array<double, kFeatureDim> r;
        for (int i = 0; i < kFeatureDim; ++i) r[i] = static_cast<double>(codes[i]);
        return r;
    }
};

// Throws DegenerateWindow when the window has zero variance or zero RMS
// (kurtosis / crest factor undefined).
FeatureVector extract_features(std::span<const double> window);

// Per-feature min-max over the training set; a degenerate range is widened
// by one ULP so hi > lo always holds. Throws EmptyTrainingSet.
QuantParams fit_quantizer(std::span<const FeatureVector> train);

// round(63*(v-lo)/(hi-lo)) with round-half-up, clamped to [0, 63].
// Round-half-up is part of the wire contract so that independent
// implementations agree bit-exactly.
QuantFeatureVector quantize(const FeatureVector& fv, const QuantParams& q);

} // namespace adepos
