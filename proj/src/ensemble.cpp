#include "adepos/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "adepos/errors.hpp"

namespace adepos {

namespace {

// Activation vector of learner `idx` for input x, through the pool when
// neuron generation is on. `preacts` caches the physical pre-activations
// for the current sample.
Eigen::VectorXd learner_hidden(const Ensemble& ens, int idx, const Eigen::VectorXd& x,
                               std::optional<Eigen::VectorXd>& preacts,
                               std::uint64_t* pool_counter) {
    if (!ens.use_ng) return hidden_activations(ens.learners[static_cast<std::size_t>(idx)], x);
    if (!preacts) preacts = physical_preactivations(ens.pool, x, pool_counter);
    return virtual_block(*preacts, ens.pair_map, idx);
}

QuantFeatureVector codes_of(const Eigen::VectorXd& x) {
    if (x.size() != kFeatureDim)
        throw DimensionMismatch("fixed-point evaluation expects 5 feature codes");
    QuantFeatureVector qx;
    for (int i = 0; i < kFeatureDim; ++i) {
        const double v = x(i);
        if (v != std::floor(v) || v < 0.0 || v > 63.0)
            throw InvalidParams("fixed-point evaluation expects integer codes in [0, 63]");
        qx.codes[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
    return qx;
}

double learner_residual(const Ensemble& ens, int idx, const Eigen::VectorXd& x,
                        std::optional<Eigen::VectorXd>& preacts, std::uint64_t* pool_counter) {
    const auto& bl = ens.learners[static_cast<std::size_t>(idx)];
    if (ens.use_fixed_point) {
        const double out =
            quantized_infer(bl, codes_of(x), ens.fp_profiles[static_cast<std::size_t>(idx)]);
        return std::fabs(bl.target - out);
    }
    if (!ens.use_ng) return residual(bl, x);
    return residual_from_hidden(bl, learner_hidden(ens, idx, x, preacts, pool_counter), x);
}

} // namespace

void enable_fixed_point(Ensemble& ens) {
    if (ens.use_ng)
        throw InvalidParams("fixed-point evaluation and neuron generation are exclusive paths");
    ens.fp_profiles.clear();
    for (const auto& bl : ens.learners) ens.fp_profiles.push_back(FixedPointProfile::fit(bl));
    ens.use_fixed_point = true;
}

Ensemble train_ensemble(const Eigen::MatrixXd& healthy, const EnsembleConfig& cfg) {
    if (cfg.n_max < 1 || cfg.n_max % 2 == 0)
        throw EvenOrEmptyPanel("ensemble size must be odd and >= 1, got " +
                               std::to_string(cfg.n_max));
    if (healthy.rows() < 1) throw EmptyTrainingSet("ensemble training stream is empty");
    if (healthy.cols() != cfg.d)
        throw DimensionMismatch("training stream has " + std::to_string(healthy.cols()) +
                                " columns, config says d=" + std::to_string(cfg.d));

    Ensemble ens;
    ens.d = cfg.d;
    ens.L = cfg.L;
    ens.n_max = cfg.n_max;
    ens.use_ng = cfg.use_ng;

    if (cfg.use_ng) {
        auto [pool, map] = build_pool(cfg.d, cfg.L, cfg.n_max, cfg.base_seed);
        ens.pool = std::move(pool);
        ens.pair_map = std::move(map);
        for (int i = 0; i < cfg.n_max; ++i)
            ens.learners.push_back(
                differenced_learner(ens.pool, ens.pair_map, i, cfg.mode, cfg.C, cfg.target));
    } else {
        for (int i = 0; i < cfg.n_max; ++i)
            ens.learners.push_back(init_base_learner(cfg.d, cfg.L, cfg.mode,
                                                     cfg.base_seed + static_cast<std::uint64_t>(i),
                                                     cfg.C, cfg.target));
    }

    if (cfg.train.algorithm == TrainRule::Algorithm::batch) {
        for (auto& bl : ens.learners) train_batch(bl, healthy);
        return ens;
    }

    // Online training, one pass over the prefix, optional convergence stop.
    for (int i = 0; i < cfg.n_max; ++i) {
        auto& bl = ens.learners[static_cast<std::size_t>(i)];
        std::vector<Eigen::MatrixXd> history;
        for (Eigen::Index r = 0; r < healthy.rows(); ++r) {
            const Eigen::VectorXd x = healthy.row(r).transpose();
            std::optional<Eigen::VectorXd> preacts;
            const Eigen::VectorXd h = learner_hidden(ens, i, x, preacts, nullptr);
            opium_step(bl, h, x, cfg.train.theta);

            if (cfg.train.stop_on_convergence) {
                history.push_back(bl.beta);
                const int w = cfg.train.convergence_window;
                if (static_cast<int>(history.size()) > w) {
                    const auto& old = history[history.size() - 1 - static_cast<std::size_t>(w)];
                    const double denom = std::max(bl.beta.norm(), 1e-300);
                    if ((bl.beta - old).norm() / denom < cfg.train.convergence_tol) break;
                }
            }
        }
    }
    return ens;
}

Verdict learner_verdict(const BaseLearner& bl, const Eigen::VectorXd& x, double lambda) {
    const double eps = residual(bl, x);
    if (!std::isfinite(eps)) throw NonFiniteValue("non-finite residual; no verdict");
    return eps > lambda ? Verdict::anomalous : Verdict::healthy;
}

Verdict majority_vote(std::span<const Verdict> verdicts) {
    if (verdicts.empty() || verdicts.size() % 2 == 0)
        throw EvenOrEmptyPanel("majority vote needs an odd, nonempty panel");
    const auto anomalous =
        std::count(verdicts.begin(), verdicts.end(), Verdict::anomalous);
    return 2 * anomalous > static_cast<long>(verdicts.size()) ? Verdict::anomalous
                                                              : Verdict::healthy;
}

AdeposState AdeposState::initial(const Ensemble& ens, const AdeposConfig& cfg) {
    AdeposState st;
    st.active = cfg.fixed_panel ? ens.n_max : std::clamp(cfg.initial_active, 1, ens.n_max);
    if (st.active % 2 == 0) throw EvenOrEmptyPanel("initial active count must be odd");
    st.cache.assign(static_cast<std::size_t>(ens.n_max), std::nullopt);
    return st;
}

SampleResult adepos_evaluate(const Ensemble& ens, AdeposState& state, const Eigen::VectorXd& x,
                             const AdeposConfig& cfg) {
    std::fill(state.cache.begin(), state.cache.end(), std::nullopt);
    state.executed_this_sample = 0;

    std::optional<Eigen::VectorXd> preacts; // NG pool pre-activations, computed at most once
    std::uint64_t pool_evals = 0;

    const auto verdict_of = [&](int idx) {
        auto& slot = state.cache[static_cast<std::size_t>(idx)];
        if (!slot) {
            const double eps = learner_residual(ens, idx, x, preacts, &pool_evals);
            if (!std::isfinite(eps)) throw NonFiniteValue("non-finite residual; no verdict");
            slot = eps > ens.lambda ? Verdict::anomalous : Verdict::healthy;
            ++state.executed_this_sample;
        }
        return *slot;
    };

    const auto vote_first = [&](int n) {
        std::vector<Verdict> panel(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) panel[static_cast<std::size_t>(i)] = verdict_of(i);
        return majority_vote(panel);
    };

    if (cfg.fixed_panel) state.active = ens.n_max;

    Verdict vote = vote_first(state.active);
    while (vote == Verdict::anomalous && state.active < ens.n_max && !cfg.fixed_panel) {
        state.active = std::min(state.active + 2, ens.n_max);
        vote = vote_first(state.active);
    }

    SampleResult res;
    res.final_vote = vote;
    res.executed = state.executed_this_sample;
    res.pool_evals = pool_evals;
    if (vote == Verdict::anomalous) {
        res.maintenance = true; // only reachable with the full panel consulted
    } else if (!cfg.fixed_panel) {
        state.active = std::max(1, state.active - 2);
    }
    return res;
}

LifetimeReport run_lifetime(const Ensemble& ens, const Eigen::MatrixXd& stream,
                            const AdeposConfig& cfg) {
    LifetimeReport report;
    report.L = ens.L;
    report.n_max = ens.n_max;

    AdeposState state = AdeposState::initial(ens, cfg);
    double l_eff_sum = 0.0;
    for (Eigen::Index r = 0; r < stream.rows(); ++r) {
        const Eigen::VectorXd x = stream.row(r).transpose();
        const SampleResult s = adepos_evaluate(ens, state, x, cfg);
        report.pool_preact_evals += s.pool_evals;

        SampleRecord rec;
        rec.verdict = s.final_vote;
        rec.maintenance = s.maintenance;
        rec.executed = s.executed;
        rec.l_eff = ens.L * s.executed;
        report.samples.push_back(rec);
        l_eff_sum += rec.l_eff;

        if (s.maintenance && !report.maintenance_flag) {
            report.maintenance_flag = true;
            report.maintenance_index = static_cast<std::size_t>(r);
            if (cfg.halt_on_alarm) break;
        }
    }
    if (!report.samples.empty())
        report.average_l_eff = l_eff_sum / static_cast<double>(report.samples.size());
    return report;
}

std::vector<double> ensemble_residuals(const Ensemble& ens, const Eigen::MatrixXd& stream) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(stream.rows()) * ens.learners.size());
    for (Eigen::Index r = 0; r < stream.rows(); ++r) {
        const Eigen::VectorXd x = stream.row(r).transpose();
        std::optional<Eigen::VectorXd> preacts;
        for (int i = 0; i < static_cast<int>(ens.learners.size()); ++i)
            out.push_back(learner_residual(ens, i, x, preacts, nullptr));
    }
    return out;
}

void write_lifetime_tsv(const LifetimeReport& report, std::ostream& out) {
    out << "# lifetime v1\tL=" << report.L << "\tn_max=" << report.n_max << "\n";
    out << "index\tverdict\tlearners_executed\tl_eff\n";
    for (std::size_t i = 0; i < report.samples.size(); ++i) {
        const auto& s = report.samples[i];
        out << i << '\t' << (s.maintenance ? "alarm" : "healthy") << '\t' << s.executed << '\t'
            << s.l_eff << '\n';
    }
}

} // namespace adepos
