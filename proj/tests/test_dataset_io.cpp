#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "adepos/dataset_io.hpp"
#include "adepos/errors.hpp"
#include "adepos/model_io.hpp"
#include "adepos/prng.hpp"

using namespace adepos;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "adepos_io_tests";
    fs::create_directories(dir);
    return dir;
}

// Snapshot fixture in the campaign file format: `rows` lines of
// tab-separated channel readings.
fs::path write_snapshot(const std::string& name, int rows, int channels,
                        double base = 0.0) {
    const fs::path p = temp_dir() / name;
    std::ofstream out(p);
    SplitMix64 rng(rows * 31 + channels);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < channels; ++c)
            out << (c ? "\t" : "") << base + 0.001 * c + 0.1 * rng.next_symmetric();
        out << '\n';
    }
    return p;
}

} // namespace

TEST_CASE("load_ims_file: well-formed snapshot") {
    const fs::path p = write_snapshot("good.txt", ImsFileSet::kRowsPerFile, 8);
    const Eigen::MatrixXd m = load_ims_file(p, 8);
    CHECK(m.rows() == ImsFileSet::kRowsPerFile);
    CHECK(m.cols() == 8);
}

TEST_CASE("load_ims_file: shape and parse failures") {
    const fs::path shorter = write_snapshot("short.txt", ImsFileSet::kRowsPerFile - 1, 4);
    CHECK_THROWS_AS(load_ims_file(shorter, 4), ShapeError);

    const fs::path bad = temp_dir() / "bad.txt";
    {
        std::ofstream out(bad);
        out << "0.1\t0.2\n";
        out << "0.3\tabc\n";
    }
    try {
        load_ims_file(bad, 2);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 2);
        CHECK(std::string(e.what()).find("bad.txt") != std::string::npos);
    }

    const fs::path wide = temp_dir() / "wide.txt";
    {
        std::ofstream out(wide);
        out << "0.1\t0.2\t0.3\n";
    }
    CHECK_THROWS_AS(load_ims_file(wide, 2), ParseError);

    CHECK_THROWS_AS(load_ims_file(temp_dir() / "missing.txt", 2), IoError);
}

TEST_CASE("bearing_streams: identity and averaged-pair mappings") {
    const fs::path dir = temp_dir() / "campaign";
    fs::create_directories(dir);
    // two snapshot files, named so lexicographic order is chronological
    for (const char* name : {"2004.02.12.10.32.39", "2004.02.12.10.42.39"}) {
        const fs::path p = dir / name;
        std::ofstream out(p);
        for (int r = 0; r < ImsFileSet::kRowsPerFile; ++r) {
            for (int c = 0; c < 4; ++c) out << (c ? "\t" : "") << 0.5 * c + (r % 7) * 0.01;
            out << '\n';
        }
    }

    const ImsFileSet set = discover_ims_files(dir, 4);
    CHECK(set.files.size() == 2);
    CHECK(set.files[0].filename() < set.files[1].filename());

    const auto identity = bearing_streams(set, ChannelMapping::identity(4));
    CHECK(identity.size() == 4);
    CHECK(identity[0].windows.size() == 2);
    CHECK(identity[0].windows[0].size() == ImsFileSet::kRowsPerFile);
    CHECK(identity[1].windows[0][0] == doctest::Approx(0.5));

    const auto avg = bearing_streams(set, ChannelMapping::paired(2, true));
    CHECK(avg.size() == 2);
    // bearing 1 averages columns 0 and 1
    CHECK(avg[0].windows[0][0] == doctest::Approx(0.25));

    const auto first_of_pair = bearing_streams(set, ChannelMapping::paired(2, false));
    CHECK(first_of_pair[0].windows[0][0] == doctest::Approx(0.0));

    ChannelMapping broken;
    broken.channels_per_bearing = {{9}};
    CHECK_THROWS_AS(bearing_streams(set, broken), MappingError);
}

TEST_CASE("feature csv: round trip, labels, missing columns") {
    std::vector<FeatureVector> rows;
    SplitMix64 rng(777);
    for (int i = 0; i < 3; ++i) {
        FeatureVector fv;
        fv.rms = rng.next_unit();
        fv.kurtosis = 3.0 * rng.next_unit();
        fv.peak_peak = 4.0 * rng.next_unit();
        fv.crest_factor = 1.0 + rng.next_unit();
        fv.skewness = rng.next_symmetric();
        rows.push_back(fv);
    }
    const std::vector<int> labels = {0, 1, 0};

    const fs::path p = temp_dir() / "features.csv";
    write_feature_csv(p, rows, &labels);
    const FeatureCsv back = load_feature_csv(p);
    REQUIRE(back.features.size() == 3);
    CHECK(back.has_labels);
    CHECK(back.labels == labels);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back.features[i].rms == doctest::Approx(rows[i].rms).epsilon(1e-15));
        CHECK(back.features[i].skewness == doctest::Approx(rows[i].skewness).epsilon(1e-15));
    }

    const fs::path p2 = temp_dir() / "features_nolabel.csv";
    write_feature_csv(p2, rows);
    CHECK_FALSE(load_feature_csv(p2).has_labels);

    const fs::path p3 = temp_dir() / "missing_col.csv";
    {
        std::ofstream out(p3);
        out << "rms,peak_peak,crest_factor,skewness\n0.1,0.2,0.3,0.4\n";
    }
    CHECK_THROWS_AS(load_feature_csv(p3), MissingColumn);
}

TEST_CASE("loading is deterministic and order-preserving") {
    const fs::path p = write_snapshot("det.txt", ImsFileSet::kRowsPerFile, 2, 1.0);
    const Eigen::MatrixXd a = load_ims_file(p, 2);
    const Eigen::MatrixXd b = load_ims_file(p, 2);
    CHECK(a == b);
}

TEST_CASE("model document: learner round trip is bit-exact") {
    BaseLearner bl = init_base_learner(5, 12, Mode::boundary, 31337, 2.0, 1.0);
    SplitMix64 rng(1);
    for (int j = 0; j < 12; ++j) bl.beta(j, 0) = rng.next_symmetric() * 1e-3;
    Eigen::VectorXd x(5);
    for (int i = 0; i < 5; ++i) x(i) = 30.0 * rng.next_unit();
    opium_update(bl, x, ThetaVariant::rls);

    QuantParams qp;
    for (auto& r : qp.ranges) r = {rng.next_unit(), 1.0 + rng.next_unit()};

    const auto doc = learner_to_json(bl, qp);
    const std::string wire = doc.dump();
    std::optional<QuantParams> qp_back;
    const BaseLearner back = learner_from_json(nlohmann::json::parse(wire), &qp_back);

    CHECK(back.W == bl.W);
    CHECK(back.b == bl.b);
    CHECK(back.beta == bl.beta);
    CHECK(back.theta == bl.theta);
    CHECK(back.seed == bl.seed);
    CHECK(back.mode == bl.mode);
    REQUIRE(qp_back.has_value());
    for (int f = 0; f < kFeatureDim; ++f) {
        CHECK(qp_back->ranges[static_cast<std::size_t>(f)].lo ==
              qp.ranges[static_cast<std::size_t>(f)].lo);
        CHECK(qp_back->ranges[static_cast<std::size_t>(f)].hi ==
              qp.ranges[static_cast<std::size_t>(f)].hi);
    }
}

TEST_CASE("model document: ensemble with pool round trips") {
    SplitMix64 rng(2);
    Eigen::MatrixXd X(30, 5);
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (int c = 0; c < 5; ++c) X(r, c) = static_cast<double>(rng.next_u64() % 64);

    EnsembleConfig cfg;
    cfg.d = 5;
    cfg.L = 6;
    cfg.n_max = 3;
    cfg.base_seed = 99;
    cfg.use_ng = true;
    Ensemble ens = train_ensemble(X, cfg);
    ens.lambda = 0.125;

    const auto doc = ensemble_to_json(ens);
    const Ensemble back = ensemble_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.n_max == 3);
    CHECK(back.lambda == 0.125);
    CHECK(back.use_ng);
    CHECK(back.pool.W == ens.pool.W);
    CHECK(back.pair_map.pairs == ens.pair_map.pairs);
    REQUIRE(back.learners.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.learners[i].beta == ens.learners[i].beta);

    // behavioural equivalence on a fresh sample
    Eigen::VectorXd x(5);
    for (int i = 0; i < 5; ++i) x(i) = static_cast<double>(rng.next_u64() % 64);
    AdeposState s1 = AdeposState::initial(ens);
    AdeposState s2 = AdeposState::initial(back);
    const SampleResult r1 = adepos_evaluate(ens, s1, x);
    const SampleResult r2 = adepos_evaluate(back, s2, x);
    CHECK(r1.final_vote == r2.final_vote);
    CHECK(r1.executed == r2.executed);
}

TEST_CASE("model document: version gate") {
    BaseLearner bl = init_base_learner(2, 2, Mode::boundary, 1);
    auto doc = learner_to_json(bl);
    doc["version"] = 999;
    CHECK_THROWS_AS(learner_from_json(doc), ParseError);
}
