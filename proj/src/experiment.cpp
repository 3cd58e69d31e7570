#include "adepos/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "adepos/dataset_io.hpp"
#include "adepos/errors.hpp"
#include "adepos/prng.hpp"

namespace adepos {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// config (de)serialization
// ---------------------------------------------------------------------------

json config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["dataset_root"] = cfg.dataset_root;
    doc["csv_root"] = cfg.csv_root;
    doc["d"] = cfg.d;
    doc["L"] = cfg.L;
    doc["n_max"] = cfg.n_max;
    doc["seeds"] = cfg.seeds;
    doc["c"] = cfg.c;
    doc["train_prefix_fraction"] = cfg.train_prefix_fraction;
    doc["train_prefix_min"] = cfg.train_prefix_min;
    doc["train_prefix_max"] = cfg.train_prefix_max;
    doc["train_algorithm"] =
        cfg.train.algorithm == TrainRule::Algorithm::opium ? "opium" : "batch";
    doc["theta_variant"] =
        cfg.train.theta == ThetaVariant::constant_theta ? "constant" : "rls";
    doc["stop_on_convergence"] = cfg.train.stop_on_convergence;
    doc["theta_c"] = cfg.theta_c;
    doc["convergence_window"] = cfg.train.convergence_window;
    doc["convergence_tol"] = cfg.train.convergence_tol;
    doc["use_ng"] = cfg.use_ng;
    doc["fixed_point"] = cfg.fixed_point;
    doc["initial_active"] = cfg.adepos.initial_active;
    doc["halt_on_alarm"] = cfg.adepos.halt_on_alarm;
    doc["fixed_panel"] = cfg.adepos.fixed_panel;
    doc["cost_mac"] = cfg.cost.mac;
    doc["cost_add"] = cfg.cost.add;
    doc["workers"] = cfg.workers;
    doc["average_channel_pairs"] = cfg.average_channel_pairs;
    doc["synth_healthy"] = cfg.synth_healthy;
    doc["synth_faulty"] = cfg.synth_faulty;
    doc["synth_samples"] = cfg.synth_samples;
    doc["synth_seed"] = cfg.synth_seed;
    return doc;
}

ExperimentConfig config_from_json(const json& doc) {
    ExperimentConfig cfg;
    cfg.dataset_root = doc.value("dataset_root", cfg.dataset_root);
    cfg.csv_root = doc.value("csv_root", cfg.csv_root);
    cfg.d = doc.value("d", cfg.d);
    cfg.L = doc.value("L", cfg.L);
    cfg.n_max = doc.value("n_max", cfg.n_max);
    if (doc.contains("seeds")) cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.c = doc.value("c", cfg.c);
    cfg.train_prefix_fraction = doc.value("train_prefix_fraction", cfg.train_prefix_fraction);
    cfg.train_prefix_min = doc.value("train_prefix_min", cfg.train_prefix_min);
    cfg.train_prefix_max = doc.value("train_prefix_max", cfg.train_prefix_max);
    const std::string algo = doc.value("train_algorithm", std::string("opium"));
    if (algo == "opium")
        cfg.train.algorithm = TrainRule::Algorithm::opium;
    else if (algo == "batch")
        cfg.train.algorithm = TrainRule::Algorithm::batch;
    else
        throw InvalidParams("unknown train_algorithm '" + algo + "'");
    const std::string theta = doc.value("theta_variant", std::string("constant"));
    if (theta == "constant")
        cfg.train.theta = ThetaVariant::constant_theta;
    else if (theta == "rls")
        cfg.train.theta = ThetaVariant::rls;
    else
        throw InvalidParams("unknown theta_variant '" + theta + "'");
    cfg.train.stop_on_convergence = doc.value("stop_on_convergence", cfg.train.stop_on_convergence);
    cfg.theta_c = doc.value("theta_c", cfg.theta_c);
    cfg.train.convergence_window = doc.value("convergence_window", cfg.train.convergence_window);
    cfg.train.convergence_tol = doc.value("convergence_tol", cfg.train.convergence_tol);
    cfg.use_ng = doc.value("use_ng", cfg.use_ng);
    cfg.fixed_point = doc.value("fixed_point", cfg.fixed_point);
    cfg.adepos.initial_active = doc.value("initial_active", cfg.adepos.initial_active);
    cfg.adepos.halt_on_alarm = doc.value("halt_on_alarm", cfg.adepos.halt_on_alarm);
    cfg.adepos.fixed_panel = doc.value("fixed_panel", cfg.adepos.fixed_panel);
    cfg.cost.mac = doc.value("cost_mac", cfg.cost.mac);
    cfg.cost.add = doc.value("cost_add", cfg.cost.add);
    cfg.workers = doc.value("workers", cfg.workers);
    cfg.average_channel_pairs = doc.value("average_channel_pairs", cfg.average_channel_pairs);
    cfg.synth_healthy = doc.value("synth_healthy", cfg.synth_healthy);
    cfg.synth_faulty = doc.value("synth_faulty", cfg.synth_faulty);
    cfg.synth_samples = doc.value("synth_samples", cfg.synth_samples);
    cfg.synth_seed = doc.value("synth_seed", cfg.synth_seed);
    return cfg;
}

// ---------------------------------------------------------------------------
// data loading
// ---------------------------------------------------------------------------

namespace {

struct CampaignLayout {
    std::string dir;
    int channels;
    bool paired;                 // two columns per bearing
    std::vector<bool> faulty;    // per bearing, from the campaign outcome
};

// The three vibration campaigns: which bearings eventually failed is part
// of the published run-to-failure record.
std::vector<CampaignLayout> ims_layouts() {
    return {
        {"1st_test", 8, true, {false, false, true, true}},
        {"2nd_test", 4, false, {true, false, false, false}},
        {"3rd_test", 4, false, {false, false, true, false}},
    };
}

std::vector<BearingData> load_ims_bearing_data(const ExperimentConfig& cfg) {
    std::vector<BearingData> out;
    for (const auto& layout : ims_layouts()) {
        const fs::path dir = fs::path(cfg.dataset_root) / layout.dir;
        if (!fs::is_directory(dir))
            throw IoError("campaign directory missing: " + dir.string());

        const ImsFileSet set = discover_ims_files(dir, layout.channels);
        const int bearings = static_cast<int>(layout.faulty.size());
        const ChannelMapping map = layout.paired
                                       ? ChannelMapping::paired(bearings, cfg.average_channel_pairs)
                                       : ChannelMapping::identity(bearings);

        std::vector<BearingData> campaign(static_cast<std::size_t>(bearings));
        for (int b = 0; b < bearings; ++b) {
            campaign[static_cast<std::size_t>(b)].id =
                layout.dir + "/bearing" + std::to_string(b + 1);
            campaign[static_cast<std::size_t>(b)].truth_faulty =
                layout.faulty[static_cast<std::size_t>(b)];
        }

        // stream file by file so raw windows never accumulate in memory
        for (const auto& file : set.files) {
            const Eigen::MatrixXd m = load_ims_file(file, layout.channels);
            for (int b = 0; b < bearings; ++b) {
                const auto& cols = map.channels_per_bearing[static_cast<std::size_t>(b)];
                Window w(static_cast<std::size_t>(m.rows()));
                if (cols.size() > 1 && map.average_pairs) {
                    for (Eigen::Index r = 0; r < m.rows(); ++r)
                        w[static_cast<std::size_t>(r)] = 0.5 * (m(r, cols[0]) + m(r, cols[1]));
                } else {
                    for (Eigen::Index r = 0; r < m.rows(); ++r)
                        w[static_cast<std::size_t>(r)] = m(r, cols.front());
                }
                campaign[static_cast<std::size_t>(b)].features.push_back(extract_features(w));
            }
        }
        for (auto& b : campaign) out.push_back(std::move(b));
    }
    return out;
}

} // namespace

namespace {

std::vector<BearingData> load_csv_bearing_data(const std::string& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InsufficientData("no feature CSVs under " + root);

    std::vector<BearingData> out;
    for (const auto& f : files) {
        const FeatureCsv csv = load_feature_csv(f);
        BearingData b;
        b.id = f.stem().string();
        b.truth_faulty = csv.has_labels &&
                         std::any_of(csv.labels.begin(), csv.labels.end(),
                                     [](int l) { return l != 0; });
        b.features = csv.features;
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace

std::vector<BearingData> load_bearing_data(const ExperimentConfig& cfg) {
    if (!cfg.csv_root.empty()) return load_csv_bearing_data(cfg.csv_root);
    if (!cfg.dataset_root.empty()) return load_ims_bearing_data(cfg);

    std::vector<BearingData> out;
    for (const auto& spec :
         default_synthetic_fleet(cfg.synth_healthy, cfg.synth_faulty, cfg.synth_samples)) {
        SyntheticStream s = generate_synthetic(spec, cfg.synth_seed);
        out.push_back({s.id, s.faulty, std::move(s.features)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

namespace {

struct PerBearingModel {
    Ensemble ensemble;
    Eigen::MatrixXd inputs;           // quantized codes, n x d
    int prefix = 0;
    std::vector<double> train_errors; // residuals on the training prefix
    std::vector<double> test_errors;  // residuals on the rest of life
};

int prefix_length(const ExperimentConfig& cfg, std::size_t samples) {
    const int n = static_cast<int>(samples);
    int p = static_cast<int>(std::lround(cfg.train_prefix_fraction * n));
    p = std::max(p, cfg.train_prefix_min);
    p = std::min(p, cfg.train_prefix_max);
    p = std::min(p, n - 1); // always leave something to test
    if (p < 1) throw InsufficientData("bearing stream too short to split");
    return p;
}

PerBearingModel build_bearing_model(const ExperimentConfig& cfg, const BearingData& bearing,
                                    std::uint64_t base_seed) {
    if (bearing.features.size() < 3)
        throw InsufficientData("bearing " + bearing.id + " has too few samples");

    PerBearingModel m;
    m.prefix = prefix_length(cfg, bearing.features.size());

    const QuantParams qp = fit_quantizer(
        std::span<const FeatureVector>(bearing.features.data(), static_cast<std::size_t>(m.prefix)));

    const auto n = static_cast<Eigen::Index>(bearing.features.size());
    m.inputs.resize(n, kFeatureDim);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto codes = quantize(bearing.features[static_cast<std::size_t>(r)], qp).as_real();
        for (int f = 0; f < kFeatureDim; ++f) m.inputs(r, f) = codes[static_cast<std::size_t>(f)];
    }

    EnsembleConfig ecfg;
    ecfg.d = cfg.d;
    ecfg.L = cfg.L;
    ecfg.n_max = cfg.n_max;
    ecfg.base_seed = base_seed;
    ecfg.C = cfg.theta_c;
    ecfg.use_ng = cfg.use_ng;
    ecfg.train = cfg.train;
    m.ensemble = train_ensemble(m.inputs.topRows(m.prefix), ecfg);
    if (cfg.fixed_point) enable_fixed_point(m.ensemble);

    m.train_errors = ensemble_residuals(m.ensemble, m.inputs.topRows(m.prefix));
    m.test_errors = ensemble_residuals(m.ensemble, m.inputs.bottomRows(n - m.prefix));
    return m;
}

void run_jobs(int workers, std::size_t count, const std::function<void(std::size_t)>& job) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(workers, static_cast<int>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) job(i);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Aggregates {
    double mean_accuracy = 0.0;
    double mean_false_positive = 0.0;
    double mean_avg_l_eff = 0.0;
    double neuron_reduction = 0.0;
    double energy_ratio = 0.0;
    double mean_rho = 0.0;
    bool rho_defined = false;
};

// Aggregate statistics from the flat per-run rows; also used to audit the
// incremental aggregation after the run.
Aggregates aggregate_rows(const ExperimentConfig& cfg, const std::vector<BearingRunRow>& rows,
                          const std::vector<LifetimeReport>& traces) {
    Aggregates agg;
    double acc_sum = 0.0, fp_sum = 0.0, rho_sum = 0.0;
    int rho_count = 0;
    for (std::uint64_t seed : cfg.seeds) {
        std::vector<BearingOutcomeLabel> outcomes;
        std::vector<double> gamma_healthy, gamma_faulty;
        for (const auto& row : rows) {
            if (row.seed != seed) continue;
            outcomes.push_back({row.truth_faulty, row.alarm});
            (row.truth_faulty ? gamma_faulty : gamma_healthy).push_back(row.gamma);
        }
        const DetectionMetrics m = detection_metrics(outcomes);
        acc_sum += m.accuracy;
        fp_sum += m.false_positive;
        if (!gamma_healthy.empty() && !gamma_faulty.empty()) {
            rho_sum += robustness_margin(gamma_healthy, gamma_faulty);
            ++rho_count;
        }
    }
    const double n_seeds = static_cast<double>(cfg.seeds.size());
    agg.mean_accuracy = acc_sum / n_seeds;
    agg.mean_false_positive = fp_sum / n_seeds;
    if (rho_count > 0) {
        agg.mean_rho = rho_sum / rho_count;
        agg.rho_defined = true;
    }

    double leff_sum = 0.0;
    for (const auto& row : rows) leff_sum += row.avg_l_eff;
    agg.mean_avg_l_eff = leff_sum / static_cast<double>(rows.size());
    agg.neuron_reduction = static_cast<double>(cfg.L) * cfg.n_max / agg.mean_avg_l_eff;

    double adaptive_energy = 0.0, baseline_energy = 0.0;
    for (const auto& trace : traces) {
        adaptive_energy += modeled_energy(trace, cfg.d, cfg.use_ng, cfg.cost);
        baseline_energy += modeled_energy(fixed_panel_baseline(trace), cfg.d, false, cfg.cost);
    }
    agg.energy_ratio = adaptive_energy > 0.0 ? baseline_energy / adaptive_energy : 0.0;
    return agg;
}

} // namespace

LifetimeReport fixed_panel_baseline(const LifetimeReport& adaptive) {
    LifetimeReport base = adaptive;
    for (auto& s : base.samples) {
        s.executed = base.n_max;
        s.l_eff = base.L * base.n_max;
    }
    base.average_l_eff = static_cast<double>(base.L) * base.n_max;
    base.pool_preact_evals = base.samples.size();
    return base;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const std::function<void(const BearingRunRow&)>& on_row) {
    if (cfg.seeds.empty()) throw InvalidParams("experiment needs at least one seed");
    if (cfg.d != kFeatureDim)
        throw InvalidParams("the feature pipeline is five-dimensional; d must be 5");

    const std::vector<BearingData> bearings = load_bearing_data(cfg);
    if (bearings.empty()) throw InsufficientData("no bearing streams to run");

    ExperimentReport report;
    report.config = cfg;

    // incremental aggregation, audited at the end against aggregate_rows
    double acc_sum = 0.0, fp_sum = 0.0, rho_sum = 0.0, leff_sum = 0.0;
    double adaptive_energy = 0.0, baseline_energy = 0.0;
    int rho_count = 0;

    const std::size_t n_bearings = bearings.size();
    for (std::uint64_t seed : cfg.seeds) {
        // Stage 1: one ensemble per bearing, shared first-layer seed within
        // the trial so residual scales are comparable across bearings.
        const std::uint64_t base_seed = derive_seed(seed, 0);
        std::vector<PerBearingModel> models(n_bearings);
        run_jobs(cfg.workers, n_bearings, [&](std::size_t b) {
            models[b] = build_bearing_model(cfg, bearings[b], base_seed);
        });

        // Stage 2: leave-one-bearing-out threshold, then the lifetime run.
        std::vector<BearingRunRow> seed_rows(n_bearings);
        std::vector<LifetimeReport> seed_traces(n_bearings);
        run_jobs(cfg.workers, n_bearings, [&](std::size_t t) {
            std::vector<double> calib;
            for (std::size_t b = 0; b < n_bearings; ++b) {
                if (b == t || bearings[b].truth_faulty) continue;
                calib.insert(calib.end(), models[b].test_errors.begin(),
                             models[b].test_errors.end());
            }
            if (calib.size() < 2)
                throw InsufficientData("not enough healthy calibration bearings");

            Ensemble& ens = models[t].ensemble;
            ens.lambda = loo_threshold(calib, cfg.c);

            const auto n = models[t].inputs.rows();
            const LifetimeReport life =
                run_lifetime(ens, models[t].inputs.bottomRows(n - models[t].prefix), cfg.adepos);

            BearingRunRow row;
            row.seed = seed;
            row.bearing = bearings[t].id;
            row.truth_faulty = bearings[t].truth_faulty;
            row.alarm = life.maintenance_flag;
            row.maintenance_index = life.maintenance_index;
            row.avg_l_eff = life.average_l_eff;
            row.gamma = gamma_ratio(models[t].test_errors, models[t].train_errors);
            row.lambda = ens.lambda;
            row.ops_adepos = run_op_count(life, cfg.d, cfg.use_ng);
            row.ops_baseline = run_op_count(fixed_panel_baseline(life), cfg.d, false);
            seed_rows[t] = std::move(row);
            seed_traces[t] = std::move(life);
        });

        std::vector<BearingOutcomeLabel> outcomes;
        std::vector<double> gammas;
        for (std::size_t t = 0; t < n_bearings; ++t) {
            const BearingRunRow& row = seed_rows[t];
            outcomes.push_back({row.truth_faulty, row.alarm});
            gammas.push_back(row.gamma);
            leff_sum += row.avg_l_eff;
            adaptive_energy += modeled_energy(seed_traces[t], cfg.d, cfg.use_ng, cfg.cost);
            baseline_energy +=
                modeled_energy(fixed_panel_baseline(seed_traces[t]), cfg.d, false, cfg.cost);

            if (on_row) on_row(row);
            report.rows.push_back(std::move(seed_rows[t]));
            report.traces.push_back(std::move(seed_traces[t]));
        }
        const EvalSummary trial = summarize_evaluation(outcomes, gammas);
        acc_sum += trial.accuracy;
        fp_sum += trial.false_positive;
        if (trial.rho_defined) {
            rho_sum += trial.rho;
            ++rho_count;
        }
    }

    const double n_seeds = static_cast<double>(cfg.seeds.size());
    report.mean_accuracy = acc_sum / n_seeds;
    report.mean_false_positive = fp_sum / n_seeds;
    report.mean_avg_l_eff = leff_sum / static_cast<double>(report.rows.size());
    report.neuron_reduction = static_cast<double>(cfg.L) * cfg.n_max / report.mean_avg_l_eff;
    report.energy_ratio = adaptive_energy > 0.0 ? baseline_energy / adaptive_energy : 0.0;
    if (rho_count > 0) {
        report.mean_rho = rho_sum / rho_count;
        report.rho_defined = true;
    }

    // consistency audit: the published aggregates must be recomputable from
    // the flat per-run rows
    const Aggregates audit = aggregate_rows(cfg, report.rows, report.traces);
    const auto close = [](double a, double b) {
        return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
    };
    if (!close(audit.mean_accuracy, report.mean_accuracy) ||
        !close(audit.mean_false_positive, report.mean_false_positive) ||
        !close(audit.mean_avg_l_eff, report.mean_avg_l_eff) ||
        !close(audit.energy_ratio, report.energy_ratio))
        throw Error("experiment aggregate audit failed");
    return report;
}

// ---------------------------------------------------------------------------
// report emission
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

std::string sanitize(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (c == '/' || c == '\\' || c == ' ') c = '_';
    return out;
}

} // namespace

void emit_reports(const ExperimentReport& report, const fs::path& out_dir) {
    if (report.rows.empty()) throw InvalidParams("refusing to emit an empty report");
    if (report.rows.size() != report.traces.size())
        throw DimensionMismatch("report rows and traces are out of step");

    fs::create_directories(out_dir);
    fs::create_directories(out_dir / "traces");

    {
        json summary;
        summary["version"] = 1;
        summary["config"] = config_to_json(report.config);
        summary["mean_accuracy"] = report.mean_accuracy;
        summary["mean_false_positive"] = report.mean_false_positive;
        summary["mean_avg_l_eff"] = report.mean_avg_l_eff;
        summary["neuron_reduction"] = report.neuron_reduction;
        summary["energy_ratio"] = report.energy_ratio;
        if (report.rho_defined) summary["mean_rho"] = report.mean_rho;
        summary["runs"] = report.rows.size();
        std::ofstream out(out_dir / "summary.json");
        if (!out) throw IoError("cannot write summary.json");
        out << summary.dump(2) << '\n';
    }

    {
        std::ofstream out(out_dir / "lifetimes.tsv");
        if (!out) throw IoError("cannot write lifetimes.tsv");
        out << "# lifetimes v1\n";
        out << "seed\tbearing\ttruth\talarm\tmaintenance_index\tavg_l_eff\tgamma\tlambda\tops_"
               "adepos\tops_baseline\n";
        for (const auto& row : report.rows) {
            out << row.seed << '\t' << row.bearing << '\t'
                << (row.truth_faulty ? "faulty" : "healthy") << '\t' << (row.alarm ? 1 : 0) << '\t';
            if (row.maintenance_index)
                out << *row.maintenance_index;
            else
                out << "-";
            out << '\t' << format_double(row.avg_l_eff) << '\t' << format_double(row.gamma) << '\t'
                << format_double(row.lambda) << '\t' << row.ops_adepos << '\t' << row.ops_baseline
                << '\n';
        }
    }

    {
        std::ofstream out(out_dir / "plot_accuracy_vs_leff.tsv");
        if (!out) throw IoError("cannot write plot_accuracy_vs_leff.tsv");
        out << "# accuracy vs effective neurons v1\n";
        out << "seed\taccuracy\tfalse_positive\tmean_avg_l_eff\n";
        for (std::uint64_t seed : report.config.seeds) {
            std::vector<BearingOutcomeLabel> outcomes;
            double leff = 0.0;
            int count = 0;
            for (const auto& row : report.rows) {
                if (row.seed != seed) continue;
                outcomes.push_back({row.truth_faulty, row.alarm});
                leff += row.avg_l_eff;
                ++count;
            }
            if (count == 0) continue;
            const DetectionMetrics m = detection_metrics(outcomes);
            out << seed << '\t' << format_double(m.accuracy) << '\t'
                << format_double(m.false_positive) << '\t' << format_double(leff / count) << '\n';
        }
    }

    {
        // four op-count projections of the same execution traces
        std::ofstream out(out_dir / "plot_energy.tsv");
        if (!out) throw IoError("cannot write plot_energy.tsv");
        out << "# modeled energy v1\n";
        out << "variant\ttotal_ops\tmodeled_energy\n";
        const struct {
            const char* label;
            bool fixed;
            bool ng;
        } variants[] = {{"fixed_direct", true, false},
                        {"fixed_ng", true, true},
                        {"adaptive_direct", false, false},
                        {"adaptive_ng", false, true}};
        for (const auto& v : variants) {
            std::uint64_t ops = 0;
            double joules = 0.0;
            for (const auto& trace : report.traces) {
                const LifetimeReport& r = v.fixed ? fixed_panel_baseline(trace) : trace;
                ops += run_op_count(r, report.config.d, v.ng);
                joules += modeled_energy(r, report.config.d, v.ng, report.config.cost);
            }
            out << v.label << '\t' << ops << '\t' << format_double(joules) << '\n';
        }
    }

    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        const fs::path p = out_dir / "traces" /
                           ("trace_" + std::to_string(row.seed) + "_" + sanitize(row.bearing) +
                            ".tsv");
        std::ofstream out(p);
        if (!out) throw IoError("cannot write " + p.string());
        write_lifetime_tsv(report.traces[i], out);
    }
}

// ---------------------------------------------------------------------------
// report (de)serialization
// ---------------------------------------------------------------------------

json report_to_json(const ExperimentReport& report) {
    json doc;
    doc["version"] = 1;
    doc["config"] = config_to_json(report.config);
    doc["mean_accuracy"] = report.mean_accuracy;
    doc["mean_false_positive"] = report.mean_false_positive;
    doc["mean_avg_l_eff"] = report.mean_avg_l_eff;
    doc["neuron_reduction"] = report.neuron_reduction;
    doc["energy_ratio"] = report.energy_ratio;
    doc["mean_rho"] = report.mean_rho;
    doc["rho_defined"] = report.rho_defined;

    json rows = json::array();
    for (const auto& r : report.rows) {
        json row;
        row["seed"] = r.seed;
        row["bearing"] = r.bearing;
        row["truth_faulty"] = r.truth_faulty;
        row["alarm"] = r.alarm;
        if (r.maintenance_index) row["maintenance_index"] = *r.maintenance_index;
        row["avg_l_eff"] = r.avg_l_eff;
        row["gamma"] = r.gamma;
        row["lambda"] = r.lambda;
        row["ops_adepos"] = r.ops_adepos;
        row["ops_baseline"] = r.ops_baseline;
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);

    json traces = json::array();
    for (const auto& t : report.traces) {
        json trace;
        trace["L"] = t.L;
        trace["n_max"] = t.n_max;
        trace["maintenance_flag"] = t.maintenance_flag;
        if (t.maintenance_index) trace["maintenance_index"] = *t.maintenance_index;
        trace["average_l_eff"] = t.average_l_eff;
        trace["pool_preact_evals"] = t.pool_preact_evals;
        json executed = json::array();
        json verdicts = json::array();
        for (const auto& s : t.samples) {
            executed.push_back(s.executed);
            verdicts.push_back(s.maintenance ? 1 : 0);
        }
        trace["executed"] = std::move(executed);
        trace["alarms"] = std::move(verdicts);
        traces.push_back(std::move(trace));
    }
    doc["traces"] = std::move(traces);
    return doc;
}

ExperimentReport report_from_json(const json& doc) {
    ExperimentReport report;
    report.config = config_from_json(doc.at("config"));
    report.mean_accuracy = doc.at("mean_accuracy").get<double>();
    report.mean_false_positive = doc.at("mean_false_positive").get<double>();
    report.mean_avg_l_eff = doc.at("mean_avg_l_eff").get<double>();
    report.neuron_reduction = doc.at("neuron_reduction").get<double>();
    report.energy_ratio = doc.at("energy_ratio").get<double>();
    report.mean_rho = doc.value("mean_rho", 0.0);
    report.rho_defined = doc.value("rho_defined", false);

    for (const auto& r : doc.at("rows")) {
        BearingRunRow row;
        row.seed = r.at("seed").get<std::uint64_t>();
        row.bearing = r.at("bearing").get<std::string>();
        row.truth_faulty = r.at("truth_faulty").get<bool>();
        row.alarm = r.at("alarm").get<bool>();
        if (r.contains("maintenance_index"))
            row.maintenance_index = r.at("maintenance_index").get<std::size_t>();
        row.avg_l_eff = r.at("avg_l_eff").get<double>();
        row.gamma = r.at("gamma").get<double>();
        row.lambda = r.at("lambda").get<double>();
        row.ops_adepos = r.at("ops_adepos").get<std::uint64_t>();
        row.ops_baseline = r.at("ops_baseline").get<std::uint64_t>();
        report.rows.push_back(std::move(row));
    }
    for (const auto& t : doc.at("traces")) {
        LifetimeReport trace;
        trace.L = t.at("L").get<int>();
        trace.n_max = t.at("n_max").get<int>();
        trace.maintenance_flag = t.at("maintenance_flag").get<bool>();
        if (t.contains("maintenance_index"))
            trace.maintenance_index = t.at("maintenance_index").get<std::size_t>();
        trace.average_l_eff = t.at("average_l_eff").get<double>();
        trace.pool_preact_evals = t.at("pool_preact_evals").get<std::uint64_t>();
        const auto& executed = t.at("executed");
        const auto& alarms = t.at("alarms");
        for (std::size_t i = 0; i < executed.size(); ++i) {
            SampleRecord s;
            s.executed = executed[i].get<int>();
            s.maintenance = alarms[i].get<int>() != 0;
            s.verdict = s.maintenance ? Verdict::anomalous : Verdict::healthy;
            s.l_eff = trace.L * s.executed;
            trace.samples.push_back(s);
        }
        report.traces.push_back(std::move(trace));
    }
    return report;
}

} // namespace adepos
