#include "adepos/signal_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adepos/errors.hpp"

namespace adepos {

FeatureVector extract_features(std::span<const double> window) {
    const std::size_t n = window.size();
    if (n < 2) throw DegenerateWindow("window needs at least 2 samples");

    double sum = 0.0, sum_sq = 0.0;
    double lo = window[0], hi = window[0], peak = 0.0;
    for (double x : window) {
        if (!std::isfinite(x)) throw DegenerateWindow("non-finite sample in window");
        sum += x;
        sum_sq += x * x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        peak = std::max(peak, std::fabs(x));
    }
    const double mean = sum / static_cast<double>(n);
    const double rms = std::sqrt(sum_sq / static_cast<double>(n));

    // Second pass for the central moments.
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : window) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    if (m2 <= 0.0 || rms <= 0.0)
        throw DegenerateWindow("zero variance or zero rms; kurtosis/crest undefined");

    FeatureVector fv;
    fv.rms = rms;
    fv.kurtosis = m4 / (m2 * m2);
    fv.peak_peak = hi - lo;
    fv.crest_factor = peak / rms;
    fv.skewness = m3 / (m2 * std::sqrt(m2));
    return fv;
}

QuantParams fit_quantizer(std::span<const FeatureVector> train) {
    if (train.empty()) throw EmptyTrainingSet("quantizer needs at least one training vector");

    QuantParams q;
    auto first = train[0].as_array();
    for (int i = 0; i < kFeatureDim; ++i) q.ranges[i] = {first[i], first[i]};
    for (const auto& fv : train) {
        auto a = fv.as_array();
        for (int i = 0; i < kFeatureDim; ++i) {
            q.ranges[i].lo = std::min(q.ranges[i].lo, a[i]);
            q.ranges[i].hi = std::max(q.ranges[i].hi, a[i]);
        }
    }
    for (auto& r : q.ranges) {
        if (r.hi <= r.lo)
            r.hi = std::nextafter(r.lo, std::numeric_limits<double>::infinity());
    }
    return q;
}

QuantFeatureVector quantize(const FeatureVector& fv, const QuantParams& q) {
    QuantFeatureVector out;
    auto a = fv.as_array();
    for (int i = 0; i < kFeatureDim; ++i) {
        const auto& r = q.ranges[i];
        const double t = 63.0 * (a[i] - r.lo) / (r.hi - r.lo);
        const double rounded = std::floor(t + 0.5); // round half up
        out.codes[i] = static_cast<int>(std::clamp(rounded, 0.0, 63.0));
    }
    return out;
}

} // namespace adepos
