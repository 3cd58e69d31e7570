#include <doctest.h>

#include <vector>

#include "adepos/calibration.hpp"
#include "adepos/errors.hpp"
#include "adepos/prng.hpp"

using namespace adepos;

TEST_CASE("loo_threshold: hand case and degenerate sets") {
    const std::vector<double> eps = {0.1, 0.2, 0.3}; // sigma = 0.1
    CHECK(loo_threshold(eps, 1.0) == doctest::Approx(0.35));

    const std::vector<double> flat = {0.2, 0.2, 0.2};
    CHECK(loo_threshold(flat, 1.0) == doctest::Approx(0.2));

    CHECK(loo_threshold(eps, 0.0) == doctest::Approx(0.3));

    CHECK_THROWS_AS(loo_threshold(std::vector<double>{0.1}, 1.0), InsufficientData);
}

TEST_CASE("loo_threshold: monotone in c and in pointwise increases") {
    SplitMix64 rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> eps(8);
        for (auto& e : eps) e = rng.next_unit();

        const double l1 = loo_threshold(eps, 0.3);
        const double l2 = loo_threshold(eps, 1.7);
        CHECK(l1 <= l2);

        auto bumped = eps;
        const std::size_t idx = rng.next_u64() % bumped.size();
        // raising the maximum raises lambda; sigma may move either way, so
        // bump the max element specifically
        const auto max_it = std::max_element(bumped.begin(), bumped.end());
        *max_it += 0.5;
        CHECK(loo_threshold(bumped, 1.0) >= loo_threshold(eps, 1.0));
        (void)idx;
    }
}

TEST_CASE("gamma_ratio: hand cases") {
    const std::vector<double> train = {0.1, 0.1, 0.1};
    const std::vector<double> test = {0.2, 0.5, 0.1};
    CHECK(gamma_ratio(test, train) == doctest::Approx(5.0));

    const std::vector<double> level = {0.1};
    CHECK(gamma_ratio(level, train) == doctest::Approx(1.0));

    const std::vector<double> zeros = {0.0, 0.0};
    CHECK_THROWS_AS(gamma_ratio(test, zeros), ZeroTrainingNoise);
    CHECK_THROWS_AS(gamma_ratio(std::vector<double>{}, train), InsufficientData);
}

TEST_CASE("gamma_ratio: invariant under joint positive scaling") {
    SplitMix64 rng(6174);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> train(5), test(7);
        for (auto& e : train) e = 0.01 + rng.next_unit();
        for (auto& e : test) e = 0.01 + rng.next_unit();
        const double g = gamma_ratio(test, train);
        const double scale = 0.1 + 10.0 * rng.next_unit();
        auto train_scaled = train;
        auto test_scaled = test;
        for (auto& e : train_scaled) e *= scale;
        for (auto& e : test_scaled) e *= scale;
        CHECK(gamma_ratio(test_scaled, train_scaled) == doctest::Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("robustness_margin: gap semantics") {
    const std::vector<double> healthy = {1.0, 2.0};
    const std::vector<double> faulty = {10.0, 12.0};
    CHECK(robustness_margin(healthy, faulty) == doctest::Approx(8.0));

    const std::vector<double> overlapping = {1.5, 3.0};
    CHECK(robustness_margin(overlapping, healthy) < 0.0);

    const std::vector<double> touching = {2.0, 5.0};
    CHECK(robustness_margin(healthy, touching) == doctest::Approx(0.0));

    CHECK_THROWS_AS(robustness_margin({}, faulty), EmptyGroup);
}

TEST_CASE("robustness_margin: positive iff a single gamma threshold separates") {
    SplitMix64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> healthy(4), faulty(3);
        for (auto& g : healthy) g = 10.0 * rng.next_unit();
        for (auto& g : faulty) g = 10.0 * rng.next_unit();
        const double rho = robustness_margin(healthy, faulty);

        bool separable = false;
        const double h_max = *std::max_element(healthy.begin(), healthy.end());
        const double f_min = *std::min_element(faulty.begin(), faulty.end());
        separable = f_min > h_max;
        CHECK((rho > 0.0) == separable);
    }
}

TEST_CASE("detection_metrics: counting") {
    std::vector<BearingOutcomeLabel> outcomes;
    for (int i = 0; i < 8; ++i) outcomes.push_back({false, false});
    for (int i = 0; i < 4; ++i) outcomes.push_back({true, true});
    DetectionMetrics m = detection_metrics(outcomes);
    CHECK(m.accuracy == doctest::Approx(1.0));
    CHECK(m.false_positive == doctest::Approx(0.0));

    outcomes[0].alarm = true; // one healthy false alarm out of 12
    m = detection_metrics(outcomes);
    CHECK(m.accuracy == doctest::Approx(11.0 / 12.0));
    CHECK(m.false_positive == doctest::Approx(1.0 / 8.0));

    // healthy-only population
    std::vector<BearingOutcomeLabel> healthy_only = {{false, false}, {false, true}};
    m = detection_metrics(healthy_only);
    CHECK(m.accuracy == doctest::Approx(0.5));
    CHECK(m.false_positive == doctest::Approx(0.5));

    CHECK_THROWS_AS(detection_metrics({}), EmptyGroup);
}

TEST_CASE("summarize_evaluation: gammas, margin and metrics in one record") {
    std::vector<BearingOutcomeLabel> outcomes = {
        {false, false}, {false, false}, {true, true}, {true, true}};
    const std::vector<double> gammas = {1.2, 2.0, 9.0, 11.0};
    const EvalSummary s = summarize_evaluation(outcomes, gammas);
    CHECK(s.accuracy == doctest::Approx(1.0));
    CHECK(s.false_positive == doctest::Approx(0.0));
    REQUIRE(s.rho_defined);
    CHECK(s.rho == doctest::Approx(7.0));
    CHECK(s.gamma == gammas);

    // healthy-only group leaves the margin undefined
    std::vector<BearingOutcomeLabel> healthy_only = {{false, false}, {false, true}};
    const std::vector<double> g2 = {1.0, 2.0};
    const EvalSummary s2 = summarize_evaluation(healthy_only, g2);
    CHECK_FALSE(s2.rho_defined);
    CHECK(s2.false_positive == doctest::Approx(0.5));

    CHECK_THROWS_AS(summarize_evaluation(outcomes, g2), DimensionMismatch);
}
