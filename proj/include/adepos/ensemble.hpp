#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "adepos/elm.hpp"
#include "adepos/neuron_gen.hpp"

namespace adepos {

enum class Verdict { healthy, anomalous };

// How the base learners of an ensemble are trained on the healthy stream.
struct TrainRule {
    enum class Algorithm { opium, batch } algorithm = Algorithm::opium;
    ThetaVariant theta = ThetaVariant::constant_theta;
    // Optional early stop: stop once the relative beta change over a
    // trailing window drops below `tol`. Disabled by default (the whole
    // prefix is consumed).
    bool stop_on_convergence = false;
    int convergence_window = 50;
    double convergence_tol = 1e-4;
};

struct EnsembleConfig {
    int d = 5;
    int L = 20;
    int n_max = 9; // must be odd
    std::uint64_t base_seed = 0;
    Mode mode = Mode::boundary;
    double C = 1.0;
    double target = 1.0;
    bool use_ng = false; // synthesize hidden neurons from a shared pool
    TrainRule train;
};

// N_max trained base learners sharing (d, L, mode) and the training stream,
// with distinct seeds base_seed + i. When neuron generation is on, all
// learners draw activations from one shared physical pool; the stored W/b
// of each learner are the differenced weights, so direct evaluation and the
// pool path agree up to floating-point association.
struct Ensemble {
    std::vector<BaseLearner> learners;
    int d = 0;
    int L = 0;
    int n_max = 0;
    double lambda = 0.0; // residual threshold, set by calibration
    bool use_ng = false;
    PhysicalPool pool; // valid iff use_ng
    PairMap pair_map;  // valid iff use_ng
    bool use_fixed_point = false;
    std::vector<FixedPointProfile> fp_profiles; // per learner, iff use_fixed_point
};

// Fit per-learner fixed-point profiles and switch residual evaluation to
// the 16-bit MAC path. Boundary mode, direct (non-NG) evaluation, integer
// inputs only.
void enable_fixed_point(Ensemble& ens);

// Escalation policy knobs. `fixed_panel` disables the adaptive controller
// entirely: every sample consults all n_max learners (baseline mode).
struct AdeposConfig {
    int initial_active = 1; // odd
    bool halt_on_alarm = false;
    bool fixed_panel = false;
};

// Per-stream mutable state of the escalation controller.
struct AdeposState {
    int active = 1;                               // odd, in [1, n_max]
    std::vector<std::optional<Verdict>> cache;    // per-sample learner verdicts
    int executed_this_sample = 0;

    static AdeposState initial(const Ensemble& ens, const AdeposConfig& cfg = {});
};

struct SampleResult {
    Verdict final_vote = Verdict::healthy;
    bool maintenance = false;     // full panel consulted and still anomalous
    int executed = 0;             // distinct learners run on this sample
    std::uint64_t pool_evals = 0; // physical pre-activation passes (NG only)
};

struct SampleRecord {
    Verdict verdict = Verdict::healthy;
    bool maintenance = false;
    int executed = 0;
    int l_eff = 0; // L * executed
};

struct LifetimeReport {
    int L = 0;
    int n_max = 0;
    std::vector<SampleRecord> samples;
    bool maintenance_flag = false;
    std::optional<std::size_t> maintenance_index;
    double average_l_eff = 0.0;
    std::uint64_t pool_preact_evals = 0; // NG bookkeeping, one per sample expected
};

// Train n_max learners on the same healthy stream (rows of X).
// Throws EvenOrEmptyPanel when n_max is even, and propagates learner errors.
Ensemble train_ensemble(const Eigen::MatrixXd& healthy, const EnsembleConfig& cfg);

// Anomalous iff residual(bl, x) > lambda (strict; ties are healthy).
// A non-finite residual is surfaced as NonFiniteValue, never as a verdict.
Verdict learner_verdict(const BaseLearner& bl, const Eigen::VectorXd& x, double lambda);

// Majority label of an odd, nonempty panel.
Verdict majority_vote(std::span<const Verdict> verdicts);

// One sample through the escalation controller:
//   - evaluate the first `active` learners (cached verdicts are reused),
//   - while the vote is anomalous and learners remain, add two and re-vote
//     on the same sample,
//   - an anomalous full-panel vote is a maintenance alarm,
//   - a healthy vote de-escalates the next sample's panel by two (floor 1).
// Each learner executes at most once per sample.
SampleResult adepos_evaluate(const Ensemble& ens, AdeposState& state, const Eigen::VectorXd& x,
                             const AdeposConfig& cfg = {});

// Fold adepos_evaluate over the rows of `stream`. The maintenance flag
// latches at the first alarm; unless halt_on_alarm is set, later samples
// are still recorded.
LifetimeReport run_lifetime(const Ensemble& ens, const Eigen::MatrixXd& stream,
                            const AdeposConfig& cfg = {});

// Residuals of every learner on every row (calibration input).
std::vector<double> ensemble_residuals(const Ensemble& ens, const Eigen::MatrixXd& stream);

// Row-per-sample delimited text: index, verdict, learners_executed, l_eff.
void write_lifetime_tsv(const LifetimeReport& report, std::ostream& out);

} // namespace adepos
