#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "adepos/ensemble.hpp"
#include "adepos/errors.hpp"
#include "adepos/prng.hpp"

using namespace adepos;

namespace {

// Learner i of this panel is anomalous exactly when component i of the
// input exceeds 0.5 (residual |0 - |x_i|| against lambda = 0.5), so a
// sample vector encodes an arbitrary verdict pattern.
Ensemble pattern_panel(int n_max) {
    Ensemble ens;
    ens.d = n_max;
    ens.L = 1;
    ens.n_max = n_max;
    ens.lambda = 0.5;
    for (int i = 0; i < n_max; ++i) {
        BaseLearner bl = init_base_learner(n_max, 1, Mode::boundary, 1000 + i);
        bl.W.setZero();
        bl.W(0, i) = 1.0;
        bl.b.setZero();
        bl.beta.setConstant(1.0);
        bl.target = 0.0; // residual = |x_i|
        ens.learners.push_back(std::move(bl));
    }
    return ens;
}

Eigen::VectorXd pattern_input(unsigned bits, int n_max) {
    Eigen::VectorXd x(n_max);
    for (int i = 0; i < n_max; ++i) x(i) = (bits >> i) & 1u ? 1.0 : 0.0;
    return x;
}

// Straight-line enumeration of the escalation policy, independent of the
// state machine implementation.
struct PolicyOutcome {
    bool alarm = false;
    Verdict final = Verdict::healthy;
    int consulted = 0;
    int next_active = 1;
};

PolicyOutcome policy_oracle(unsigned bits, int entry_active, int n_max) {
    const auto vote = [&](int n) {
        int anomalous = 0;
        for (int i = 0; i < n; ++i) anomalous += (bits >> i) & 1u;
        return 2 * anomalous > n ? Verdict::anomalous : Verdict::healthy;
    };
    int a = entry_active;
    Verdict cur = vote(a);
    while (cur == Verdict::anomalous && a < n_max) {
        a = std::min(a + 2, n_max);
        cur = vote(a);
    }
    PolicyOutcome out;
    out.final = cur;
    out.consulted = a;
    out.alarm = cur == Verdict::anomalous;
    out.next_active = out.alarm ? a : std::max(1, a - 2);
    return out;
}

} // namespace

TEST_CASE("learner_verdict: threshold semantics") {
    BaseLearner bl = init_base_learner(2, 1, Mode::boundary, 5);
    bl.W.setZero();
    bl.b.setZero();
    bl.beta.setZero();
    Eigen::VectorXd x(2);
    x.setZero();

    bl.target = 0.1; // residual = 0.1
    CHECK(learner_verdict(bl, x, 0.35) == Verdict::healthy);

    bl.target = 0.35; // residual exactly lambda stays healthy
    CHECK(learner_verdict(bl, x, 0.35) == Verdict::healthy);

    bl.target = 0.36;
    CHECK(learner_verdict(bl, x, 0.35) == Verdict::anomalous);

    bl.target = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(learner_verdict(bl, x, 0.35), NonFiniteValue);
}

TEST_CASE("majority_vote: basics and errors") {
    using V = Verdict;
    const std::vector<V> aha = {V::anomalous, V::healthy, V::anomalous};
    CHECK(majority_vote(aha) == V::anomalous);
    const std::vector<V> single = {V::healthy};
    CHECK(majority_vote(single) == V::healthy);
    const std::vector<V> five = {V::anomalous, V::healthy, V::anomalous, V::healthy, V::healthy};
    CHECK(majority_vote(five) == V::healthy);

    CHECK_THROWS_AS(majority_vote(std::vector<V>{}), EvenOrEmptyPanel);
    const std::vector<V> even = {V::healthy, V::anomalous};
    CHECK_THROWS_AS(majority_vote(even), EvenOrEmptyPanel);
}

TEST_CASE("majority_vote: stable under single flips when the margin is >= 3") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 * static_cast<int>(rng.next_u64() % 5) + 3; // 3..11
        std::vector<Verdict> panel(static_cast<std::size_t>(n));
        int anomalous = 0;
        for (auto& v : panel) {
            v = rng.next_unit() < 0.5 ? Verdict::healthy : Verdict::anomalous;
            anomalous += v == Verdict::anomalous;
        }
        const int margin = std::abs(2 * anomalous - n);
        if (margin < 3) continue;
        const Verdict outcome = majority_vote(panel);
        for (std::size_t i = 0; i < panel.size(); ++i) {
            auto flipped = panel;
            flipped[i] =
                flipped[i] == Verdict::healthy ? Verdict::anomalous : Verdict::healthy;
            CHECK(majority_vote(flipped) == outcome);
        }
    }
}

TEST_CASE("adepos_evaluate: hand-traced walkthroughs at n_max = 5") {
    Ensemble ens = pattern_panel(5);
    AdeposConfig cfg;

    // first learner anomalous, escalated panel of three votes healthy
    AdeposState st = AdeposState::initial(ens, cfg);
    SampleResult r = adepos_evaluate(ens, st, pattern_input(0b00001, 5), cfg);
    CHECK(r.final_vote == Verdict::healthy);
    CHECK_FALSE(r.maintenance);
    CHECK(r.executed == 3);
    CHECK(st.active == 1);

    // every learner anomalous: 1 -> 3 -> 5, full panel agrees, alarm
    st = AdeposState::initial(ens, cfg);
    r = adepos_evaluate(ens, st, pattern_input(0b11111, 5), cfg);
    CHECK(r.maintenance);
    CHECK(r.executed == 5);
    CHECK(st.active == 5);

    // quiet first learner: one execution, panel stays at one
    st = AdeposState::initial(ens, cfg);
    r = adepos_evaluate(ens, st, pattern_input(0b00000, 5), cfg);
    CHECK(r.final_vote == Verdict::healthy);
    CHECK(r.executed == 1);
    CHECK(st.active == 1);
}

TEST_CASE("adepos_evaluate: exhaustive agreement with the policy oracle") {
    for (int n_max : {1, 3, 5}) {
        Ensemble ens = pattern_panel(n_max);
        for (unsigned bits = 0; bits < (1u << n_max); ++bits) {
            for (int entry = 1; entry <= n_max; entry += 2) {
                AdeposConfig cfg;
                cfg.initial_active = entry;
                AdeposState st = AdeposState::initial(ens, cfg);
                const SampleResult got = adepos_evaluate(ens, st, pattern_input(bits, n_max), cfg);
                const PolicyOutcome want = policy_oracle(bits, entry, n_max);
                CHECK(got.maintenance == want.alarm);
                CHECK(got.final_vote == want.final);
                CHECK(got.executed == want.consulted);
                CHECK(st.active == want.next_active);
            }
        }
    }
}

TEST_CASE("adepos state stays odd and bounded over randomized streams") {
    SplitMix64 rng(2718);
    for (int n_max : {3, 5, 9}) {
        Ensemble ens = pattern_panel(n_max);
        AdeposConfig cfg;
        AdeposState st = AdeposState::initial(ens, cfg);
        int last_active = st.active;
        for (int step = 0; step < 100000 / n_max; ++step) {
            const unsigned bits = static_cast<unsigned>(rng.next_u64() & ((1u << n_max) - 1));
            const SampleResult r = adepos_evaluate(ens, st, pattern_input(bits, n_max), cfg);
            REQUIRE(st.active % 2 == 1);
            REQUIRE(st.active >= 1);
            REQUIRE(st.active <= n_max);
            REQUIRE(r.executed >= 1);
            REQUIRE(r.executed <= n_max);
            REQUIRE(r.executed >= std::min(last_active, n_max));
            // alarms only with the full panel consulted
            if (r.maintenance) REQUIRE(r.executed == n_max);
            last_active = st.active;
        }
    }
}

TEST_CASE("train_ensemble: panel shape and seeds") {
    SplitMix64 rng(31415);
    Eigen::MatrixXd X(40, 5);
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (int c = 0; c < 5; ++c) X(r, c) = static_cast<double>(rng.next_u64() % 64);

    EnsembleConfig cfg;
    cfg.d = 5;
    cfg.L = 20;
    cfg.n_max = 9;
    cfg.base_seed = 400;
    const Ensemble ens = train_ensemble(X, cfg);
    CHECK(ens.learners.size() == 9);
    for (std::size_t i = 0; i < ens.learners.size(); ++i) {
        CHECK(ens.learners[i].seed == 400 + i);
        for (std::size_t j = i + 1; j < ens.learners.size(); ++j)
            CHECK((ens.learners[i].W - ens.learners[j].W).cwiseAbs().maxCoeff() > 0.0);
    }

    cfg.n_max = 1;
    CHECK(train_ensemble(X, cfg).learners.size() == 1);

    cfg.n_max = 4;
    CHECK_THROWS_AS(train_ensemble(X, cfg), EvenOrEmptyPanel);
}

TEST_CASE("run_lifetime: quiet stream, tripping tail, fixed panel") {
    // all-healthy: learners with target 0 never trip a 0.5 threshold
    Ensemble quiet = pattern_panel(5);
    Eigen::MatrixXd calm = Eigen::MatrixXd::Zero(50, 5);
    LifetimeReport rep = run_lifetime(quiet, calm);
    CHECK_FALSE(rep.maintenance_flag);
    CHECK(rep.average_l_eff == doctest::Approx(1.0 * quiet.L));

    // last sample trips everyone
    Eigen::MatrixXd tail = calm;
    tail.row(49).setOnes();
    rep = run_lifetime(quiet, tail);
    CHECK(rep.maintenance_flag);
    REQUIRE(rep.maintenance_index.has_value());
    CHECK(*rep.maintenance_index == 49);

    // fixed panel: every sample pays for all learners
    AdeposConfig fixed;
    fixed.fixed_panel = true;
    rep = run_lifetime(quiet, calm, fixed);
    CHECK(rep.average_l_eff == doctest::Approx(5.0 * quiet.L));
    for (const auto& s : rep.samples) CHECK(s.executed == 5);

    // halt-on-alarm stops recording at the alarm
    AdeposConfig halt;
    halt.halt_on_alarm = true;
    Eigen::MatrixXd early = calm;
    early.row(10).setOnes();
    rep = run_lifetime(quiet, early, halt);
    CHECK(rep.maintenance_flag);
    CHECK(rep.samples.size() == 11);
}

TEST_CASE("escalation reuses cached verdicts within a sample") {
    // anomalous first learner forces a re-vote; executed counts distinct
    // learners, so escalation from 1 to 3 runs exactly two new learners
    Ensemble ens = pattern_panel(5);
    AdeposConfig cfg;
    AdeposState st = AdeposState::initial(ens, cfg);
    const SampleResult r = adepos_evaluate(ens, st, pattern_input(0b00101, 5), cfg);
    // learners 0 and 2 anomalous: vote(1)=A -> vote(3)=A (2 of 3) -> vote(5)=H
    CHECK(r.executed == 5);
    CHECK(r.final_vote == Verdict::healthy);
    CHECK(st.active == 3);
}

TEST_CASE("NG-backed ensemble evaluates the pool once per sample") {
    SplitMix64 rng(999);
    Eigen::MatrixXd X(30, 5);
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (int c = 0; c < 5; ++c) X(r, c) = static_cast<double>(rng.next_u64() % 64);

    EnsembleConfig cfg;
    cfg.d = 5;
    cfg.L = 8;
    cfg.n_max = 5;
    cfg.base_seed = 606;
    cfg.use_ng = true;
    Ensemble ens = train_ensemble(X, cfg);
    CHECK(ens.use_ng);
    CHECK(ens.pool.l_phy == required_physical_neurons(8, 5));

    ens.lambda = 1e9; // nothing trips; one learner per sample
    Eigen::MatrixXd stream = X.topRows(20);
    const LifetimeReport rep = run_lifetime(ens, stream);
    CHECK(rep.pool_preact_evals == 20);

    ens.lambda = -1.0; // everything trips; still one pool pass per sample
    const LifetimeReport rep2 = run_lifetime(ens, stream);
    CHECK(rep2.pool_preact_evals == 20);
    CHECK(rep2.maintenance_flag);
}

TEST_CASE("lifetime serialization: row per sample") {
    Ensemble ens = pattern_panel(3);
    Eigen::MatrixXd stream = Eigen::MatrixXd::Zero(3, 3);
    stream.row(2).setOnes();
    const LifetimeReport rep = run_lifetime(ens, stream);

    std::ostringstream out;
    write_lifetime_tsv(rep, out);
    const std::string text = out.str();
    CHECK(text.find("index\tverdict\tlearners_executed\tl_eff") != std::string::npos);
    CHECK(text.find("0\thealthy\t1\t1") != std::string::npos);
    CHECK(text.find("2\talarm\t3\t3") != std::string::npos);
}
