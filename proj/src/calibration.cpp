#include "adepos/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "adepos/errors.hpp"

namespace adepos {

double loo_threshold(std::span<const double> healthy_errors, double c) {
    if (healthy_errors.size() < 2)
        throw InsufficientData("threshold calibration needs at least two error values");
    if (c < 0.0) throw InvalidParams("threshold multiplier c must be >= 0");

    const double n = static_cast<double>(healthy_errors.size());
    double sum = 0.0, max_eps = healthy_errors[0];
    for (double e : healthy_errors) {
        sum += e;
        max_eps = std::max(max_eps, e);
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (double e : healthy_errors) ss += (e - mean) * (e - mean);
    const double sigma = std::sqrt(ss / (n - 1.0));
    return max_eps + 0.5 * c * sigma;
}

double gamma_ratio(std::span<const double> test_errors, std::span<const double> train_errors) {
    if (test_errors.empty() || train_errors.empty())
        throw InsufficientData("gamma needs nonempty test and train error sets");
    double train_mean = 0.0;
    for (double e : train_errors) train_mean += std::fabs(e);
    train_mean /= static_cast<double>(train_errors.size());
    if (train_mean <= 0.0) throw ZeroTrainingNoise("mean training error is zero");

    double test_max = 0.0;
    for (double e : test_errors) test_max = std::max(test_max, std::fabs(e));
    return test_max / train_mean;
}

double robustness_margin(std::span<const double> gamma_healthy,
                         std::span<const double> gamma_faulty) {
    if (gamma_healthy.empty() || gamma_faulty.empty())
        throw EmptyGroup("robustness margin needs both healthy and faulty gammas");
    const double h = *std::max_element(gamma_healthy.begin(), gamma_healthy.end());
    const double f = *std::min_element(gamma_faulty.begin(), gamma_faulty.end());
    return f - h;
}

EvalSummary summarize_evaluation(std::span<const BearingOutcomeLabel> outcomes,
                                 std::span<const double> gammas) {
    if (outcomes.size() != gammas.size())
        throw DimensionMismatch("one gamma per bearing outcome required");

    EvalSummary s;
    s.gamma.assign(gammas.begin(), gammas.end());
    const DetectionMetrics m = detection_metrics(outcomes);
    s.accuracy = m.accuracy;
    s.false_positive = m.false_positive;

    std::vector<double> healthy, faulty;
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        (outcomes[i].truth_faulty ? faulty : healthy).push_back(gammas[i]);
    if (!healthy.empty() && !faulty.empty()) {
        s.rho = robustness_margin(healthy, faulty);
        s.rho_defined = true;
    }
    return s;
}

DetectionMetrics detection_metrics(std::span<const BearingOutcomeLabel> outcomes) {
    if (outcomes.empty()) throw EmptyGroup("detection metrics need at least one outcome");

    DetectionMetrics m;
    int correct = 0, false_alarms = 0;
    for (const auto& o : outcomes) {
        const bool ok = o.truth_faulty ? o.alarm : !o.alarm;
        if (ok) ++correct;
        if (!o.truth_faulty) {
            ++m.healthy_total;
            if (o.alarm) ++false_alarms;
        }
    }
    m.total = static_cast<int>(outcomes.size());
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.total);
    m.false_positive =
        m.healthy_total > 0 ? static_cast<double>(false_alarms) / m.healthy_total : 0.0;
    return m;
}

} // namespace adepos
