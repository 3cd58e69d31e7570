#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "adepos/calibration.hpp"
#include "adepos/ensemble.hpp"
#include "adepos/power_model.hpp"
#include "adepos/synth.hpp"

namespace adepos {

// Everything a full run needs. Data comes from the first configured
// source: a directory of per-bearing feature CSVs (csv_root), raw
// vibration campaigns (dataset_root), or the built-in synthetic fleet.
struct ExperimentConfig {
    std::string dataset_root;
    std::string csv_root;
    int d = 5;
    int L = 20;
    int n_max = 9;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double c = 1.0;

    // healthy training prefix per bearing: fraction of life, clamped to
    // [train_prefix_min, train_prefix_max] samples
    double train_prefix_fraction = 0.10;
    int train_prefix_min = 20;
    int train_prefix_max = 300;

    TrainRule train;
    double theta_c = 1.0; // online-update gain constant, theta0 = C*I
    bool use_ng = false;
    bool fixed_point = false;
    AdeposConfig adepos;
    PerOpCost cost;
    int workers = 1;

    // dataset-1 style two-channel bearings: take the first channel or the
    // pair average
    bool average_channel_pairs = false;

    // synthetic fleet (used when dataset_root is empty)
    int synth_healthy = 8;
    int synth_faulty = 4;
    int synth_samples = 400;
    std::uint64_t synth_seed = 1234;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& doc);

// Pre-extracted per-bearing feature stream with its ground truth.
struct BearingData {
    std::string id;
    bool truth_faulty = false;
    std::vector<FeatureVector> features;
};

// Feature streams for the run: either the synthetic fleet or one stream per
// bearing of the three vibration campaigns under dataset_root.
std::vector<BearingData> load_bearing_data(const ExperimentConfig& cfg);

struct BearingRunRow {
    std::uint64_t seed = 0;
    std::string bearing;
    bool truth_faulty = false;
    bool alarm = false;
    std::optional<std::size_t> maintenance_index;
    double avg_l_eff = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    std::uint64_t ops_adepos = 0;
    std::uint64_t ops_baseline = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<BearingRunRow> rows;      // ordered by (seed, bearing)
    std::vector<LifetimeReport> traces;   // parallel to rows

    double mean_accuracy = 0.0;
    double mean_false_positive = 0.0;
    double mean_avg_l_eff = 0.0;
    double neuron_reduction = 0.0; // L*n_max over mean_avg_l_eff
    double energy_ratio = 0.0;     // fixed-panel energy over adaptive energy
    double mean_rho = 0.0;
    bool rho_defined = false;
};

// Full protocol: per seed, train one ensemble per bearing on its healthy
// prefix, leave-one-bearing-out calibrate the threshold from the healthy
// calibration bearings' errors, run every lifetime, aggregate. Aggregates
// are audited against a recomputation from the per-run rows before the
// report is returned. `on_row` (if given) sees every completed row in
// (seed, bearing) order, so callers can flush partial results on failure.
ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const std::function<void(const BearingRunRow&)>& on_row = {});

// Same execution trace with every sample charged for the full panel.
LifetimeReport fixed_panel_baseline(const LifetimeReport& adaptive);

// Machine-readable summary plus plot-ready tables:
//   summary.json, lifetimes.tsv, plot_accuracy_vs_leff.tsv, plot_energy.tsv,
//   traces/trace_<seed>_<bearing>.tsv
// Throws on an empty report; reruns are byte-identical.
void emit_reports(const ExperimentReport& report, const std::filesystem::path& out_dir);

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);

} // namespace adepos
