// Command-line driver for the anomaly-detection toolkit: train ensembles,
// calibrate thresholds, run lifetime experiments, sweep the converter
// models and generate synthetic fleets.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "adepos/calibration.hpp"
#include "adepos/dataset_io.hpp"
#include "adepos/errors.hpp"
#include "adepos/experiment.hpp"
#include "adepos/model_io.hpp"
#include "adepos/power_model.hpp"
#include "adepos/prng.hpp"
#include "adepos/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

adepos::ExperimentConfig load_config(const std::string& path) {
    adepos::ExperimentConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw adepos::IoError("cannot open config " + path);
        json doc;
        in >> doc;
        cfg = adepos::config_from_json(doc);
    }
    if (const char* root = std::getenv("ADEPOS_DATASET_ROOT"))
        if (*root) cfg.dataset_root = root;
    return cfg;
}

// Train per-bearing ensembles for the first seed and save the model
// documents.
int cmd_train(const adepos::ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto bearings = adepos::load_bearing_data(cfg);
    const std::uint64_t base_seed = adepos::derive_seed(cfg.seeds.front(), 0);

    for (const auto& bearing : bearings) {
        const int prefix = std::max(
            cfg.train_prefix_min,
            static_cast<int>(std::lround(cfg.train_prefix_fraction *
                                         static_cast<double>(bearing.features.size()))));
        const int usable = std::min<int>(prefix, static_cast<int>(bearing.features.size()) - 1);

        const auto qp = adepos::fit_quantizer(std::span<const adepos::FeatureVector>(
            bearing.features.data(), static_cast<std::size_t>(usable)));
        Eigen::MatrixXd train(usable, adepos::kFeatureDim);
        for (int r = 0; r < usable; ++r) {
            const auto codes = adepos::quantize(bearing.features[static_cast<std::size_t>(r)], qp)
                                   .as_real();
            for (int f = 0; f < adepos::kFeatureDim; ++f)
                train(r, f) = codes[static_cast<std::size_t>(f)];
        }

        adepos::EnsembleConfig ecfg;
        ecfg.d = cfg.d;
        ecfg.L = cfg.L;
        ecfg.n_max = cfg.n_max;
        ecfg.base_seed = base_seed;
        ecfg.C = cfg.theta_c;
        ecfg.use_ng = cfg.use_ng;
        ecfg.train = cfg.train;
        const adepos::Ensemble ens = adepos::train_ensemble(train, ecfg);

        std::string name = bearing.id;
        for (char& c : name)
            if (c == '/') c = '_';
        adepos::save_model(fs::path(out_dir) / (name + ".json"),
                           adepos::ensemble_to_json(ens, qp));
        std::cout << "trained " << bearing.id << " (" << usable << " samples)\n";
    }
    return 0;
}

// Leave-one-bearing-out threshold table.
int cmd_calibrate(const adepos::ExperimentConfig& cfg, const std::string& out_file) {
    adepos::ExperimentConfig one_seed = cfg;
    one_seed.seeds = {cfg.seeds.front()};
    const adepos::ExperimentReport report = adepos::run_experiment(one_seed);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_file.empty()) {
        file.open(out_file);
        if (!file) throw adepos::IoError("cannot write " + out_file);
        out = &file;
    }
    *out << "# thresholds v1\nbearing\tlambda\tgamma\ttruth\n";
    for (const auto& row : report.rows)
        *out << row.bearing << '\t' << row.lambda << '\t' << row.gamma << '\t'
             << (row.truth_faulty ? "faulty" : "healthy") << '\n';
    return 0;
}

int cmd_run(const adepos::ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);

    std::vector<adepos::BearingRunRow> partial;
    try {
        const adepos::ExperimentReport report =
            adepos::run_experiment(cfg, [&](const adepos::BearingRunRow& row) {
                partial.push_back(row);
            });
        adepos::emit_reports(report, out_dir);
        {
            std::ofstream out(fs::path(out_dir) / "experiment.json");
            if (!out) throw adepos::IoError("cannot write experiment.json");
            out << adepos::report_to_json(report).dump(2) << '\n';
        }
        std::cout << "runs: " << report.rows.size() << "\n"
                  << "mean accuracy: " << report.mean_accuracy << "\n"
                  << "mean false positive: " << report.mean_false_positive << "\n"
                  << "mean avg L_eff: " << report.mean_avg_l_eff << "\n"
                  << "neuron reduction vs fixed panel: " << report.neuron_reduction << "\n"
                  << "modeled energy ratio: " << report.energy_ratio << "\n";
        return 0;
    } catch (const std::exception& e) {
        // flush whatever completed plus a failure manifest
        json manifest;
        manifest["error"] = e.what();
        manifest["completed_rows"] = partial.size();
        json rows = json::array();
        for (const auto& row : partial) {
            rows.push_back({{"seed", row.seed},
                            {"bearing", row.bearing},
                            {"alarm", row.alarm},
                            {"avg_l_eff", row.avg_l_eff}});
        }
        manifest["rows"] = std::move(rows);
        std::ofstream out(fs::path(out_dir) / "failure_manifest.json");
        out << manifest.dump(2) << '\n';
        std::cerr << "run failed: " << e.what() << "\n";
        return 1;
    }
}

// COT-vs-AOT ripple sweep over the converter's operating box, plus the
// duty-cycled system energy at the configured operating point.
int cmd_power(const std::string& out_file) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_file.empty()) {
        file.open(out_file);
        if (!file) throw adepos::IoError("cannot write " + out_file);
        out = &file;
    }

    // representative timing-circuit values giving on-times of a couple of
    // hundred nanoseconds; the sweep shape, not the absolute scale, is the
    // point
    const adepos::AotParams aot =
        adepos::aot_constants_from_circuit(150e-12, 2.2e3, 1.5e-4, 0.5, 1.1, 2.7);
    const double t_on_center = adepos::aot_on_time(aot, 3.0, 0.875);

    *out << "# ripple sweep v1\nv_batt\tv_out\tcot_ripple\taot_ripple\n";
    for (double v_batt : {2.7, 3.3}) {
        for (int i = 0; i <= 15; ++i) {
            const double v_out = 0.5 + 0.05 * i;
            adepos::BuckParams b;
            b.r_esr = 0.1;
            b.c_out = 10e-6;
            b.l_ind = 2.2e-6;
            b.v_batt = v_batt;
            b.v_out = v_out;
            b.t_on = t_on_center;
            const double cot = adepos::buck_ripple(b);
            b.t_on = adepos::aot_on_time(aot, v_batt, v_out);
            const double aot_ripple = adepos::buck_ripple(b);
            *out << v_batt << '\t' << v_out << '\t' << cot << '\t' << aot_ripple << '\n';
        }
    }
    return 0;
}

int cmd_synth(const adepos::ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto fleet =
        adepos::default_synthetic_fleet(cfg.synth_healthy, cfg.synth_faulty, cfg.synth_samples);
    for (const auto& spec : fleet) {
        const adepos::SyntheticStream s = adepos::generate_synthetic(spec, cfg.synth_seed);
        const std::vector<int> labels(s.features.size(), s.faulty ? 1 : 0);
        adepos::write_feature_csv(fs::path(out_dir) / (s.id + ".csv"), s.features, &labels);
        std::cout << "wrote " << s.id << ".csv (" << s.features.size() << " rows)\n";
    }
    return 0;
}

int cmd_report(const std::string& in_file, const std::string& out_dir) {
    std::ifstream in(in_file);
    if (!in) throw adepos::IoError("cannot open " + in_file);
    json doc;
    in >> doc;
    adepos::emit_reports(adepos::report_from_json(doc), out_dir);
    std::cout << "reports written to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ELM-based one-class anomaly detection with adaptive ensembles"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir = "out", out_file, in_file;
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config, "print the default configuration and exit");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
    };

    auto* train = app.add_subcommand("train", "train per-bearing ensembles and save models");
    add_common(train);
    train->add_option("--out", out_dir, "output directory");

    auto* calibrate = app.add_subcommand("calibrate", "leave-one-out threshold table");
    add_common(calibrate);
    calibrate->add_option("--out", out_file, "output file (default stdout)");

    auto* run = app.add_subcommand("run", "full lifetime experiment with reports");
    add_common(run);
    run->add_option("--out", out_dir, "output directory");

    auto* power = app.add_subcommand("power", "converter ripple sweep (COT vs AOT)");
    power->add_option("--out", out_file, "output file (default stdout)");

    auto* synth = app.add_subcommand("synth", "write the synthetic fleet as feature CSVs");
    add_common(synth);
    synth->add_option("--out", out_dir, "output directory");

    auto* report = app.add_subcommand("report", "re-emit reports from a saved experiment");
    report->add_option("--in", in_file, "experiment.json from a previous run")->required();
    report->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dump_config) {
            std::cout << adepos::config_to_json(adepos::ExperimentConfig{}).dump(2) << "\n";
            return 0;
        }
        if (train->parsed()) return cmd_train(load_config(config_path), out_dir);
        if (calibrate->parsed()) return cmd_calibrate(load_config(config_path), out_file);
        if (run->parsed()) return cmd_run(load_config(config_path), out_dir);
        if (power->parsed()) return cmd_power(out_file);
        if (synth->parsed()) return cmd_synth(load_config(config_path), out_dir);
        if (report->parsed()) return cmd_report(in_file, out_dir);
        std::cout << app.help();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
