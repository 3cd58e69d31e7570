#pragma once

#include <span>
#include <vector>

namespace adepos {

// lambda = max(eps) + 0.5 * c * sigma_eps, with sigma the sample standard
// deviation (n-1 denominator). Needs at least two error values.
double loo_threshold(std::span<const double> healthy_errors, double c = 1.0);

// gamma = max|eps_test| / mean|eps_train|: how far the worst test deviation
// sits above the average training noise. Throws ZeroTrainingNoise when the
// training mean is zero.
double gamma_ratio(std::span<const double> test_errors, std::span<const double> train_errors);

// rho = min(gamma_faulty) - max(gamma_healthy). Positive iff one threshold
// on gamma separates the groups; negative means overlap.
double robustness_margin(std::span<const double> gamma_healthy,
                         std::span<const double> gamma_faulty);

struct BearingOutcomeLabel {
    bool truth_faulty = false;
    bool alarm = false;
};

struct DetectionMetrics {
    double accuracy = 0.0;        // (faulty & alarm) or (healthy & !alarm)
    double false_positive = 0.0;  // healthy bearings that alarmed
    int total = 0;
    int healthy_total = 0;
};

DetectionMetrics detection_metrics(std::span<const BearingOutcomeLabel> outcomes);

// One trial's evaluation record: per-bearing noise ratios, the margin
// separating the groups, and the detection metrics.
struct EvalSummary {
    std::vector<double> gamma; // per bearing, run order
    double rho = 0.0;          // defined when both groups are nonempty
    bool rho_defined = false;
    double accuracy = 0.0;
    double false_positive = 0.0;
};

// `gammas` runs parallel to `outcomes`.
EvalSummary summarize_evaluation(std::span<const BearingOutcomeLabel> outcomes,
                                 std::span<const double> gammas);

} // namespace adepos
