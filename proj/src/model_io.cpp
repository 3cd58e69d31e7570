#include "adepos/model_io.hpp"

#include <fstream>

#include "adepos/errors.hpp"

namespace adepos {

using nlohmann::json;

namespace {

constexpr int kModelVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc, const char* what) {
    if (!doc.is_array() || doc.empty() || !doc[0].is_array())
        throw ParseError("<model>", 0, std::string("expected a matrix for ") + what);
    const Eigen::Index rows = static_cast<Eigen::Index>(doc.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(doc[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(doc[static_cast<std::size_t>(r)].size()) != cols)
            throw ParseError("<model>", 0, std::string("ragged matrix for ") + what);
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = doc[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vector_from_json(const json& doc) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
    for (std::size_t i = 0; i < doc.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = doc[i].get<double>();
    return v;
}

json quant_to_json(const QuantParams& q) {
    json ranges = json::array();
    for (const auto& r : q.ranges) ranges.push_back({{"lo", r.lo}, {"hi", r.hi}});
    return ranges;
}

QuantParams quant_from_json(const json& doc) {
    QuantParams q;
    if (doc.size() != static_cast<std::size_t>(kFeatureDim))
        throw ParseError("<model>", 0, "quantizer must carry one range per feature");
    for (int i = 0; i < kFeatureDim; ++i) {
        q.ranges[static_cast<std::size_t>(i)].lo = doc[static_cast<std::size_t>(i)].at("lo").get<double>();
        q.ranges[static_cast<std::size_t>(i)].hi = doc[static_cast<std::size_t>(i)].at("hi").get<double>();
    }
    return q;
}

void check_version(const json& doc) {
    if (doc.at("version").get<int>() != kModelVersion)
        throw ParseError("<model>", 0,
                         "unsupported model version " + doc.at("version").dump());
}

} // namespace

json learner_to_json(const BaseLearner& bl, const std::optional<QuantParams>& quant) {
    json doc;
    doc["version"] = kModelVersion;
    doc["mode"] = bl.mode == Mode::boundary ? "boundary" : "autoencoder";
    doc["d"] = bl.d;
    doc["L"] = bl.L;
    doc["seed"] = bl.seed;
    doc["C"] = bl.C;
    doc["R"] = bl.target;
    doc["W"] = matrix_to_json(bl.W);
    doc["b"] = vector_to_json(bl.b);
    doc["beta"] = matrix_to_json(bl.beta);
    doc["theta"] = matrix_to_json(bl.theta);
    if (quant) doc["quantizer"] = quant_to_json(*quant);
    return doc;
}

BaseLearner learner_from_json(const json& doc, std::optional<QuantParams>* quant) {
    check_version(doc);
    BaseLearner bl;
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode == "boundary")
        bl.mode = Mode::boundary;
    else if (mode == "autoencoder")
        bl.mode = Mode::autoencoder;
    else
        throw ParseError("<model>", 0, "unknown mode '" + mode + "'");
    bl.d = doc.at("d").get<int>();
    bl.L = doc.at("L").get<int>();
    bl.seed = doc.at("seed").get<std::uint64_t>();
    bl.C = doc.at("C").get<double>();
    bl.target = doc.at("R").get<double>();
    bl.W = matrix_from_json(doc.at("W"), "W");
    bl.b = vector_from_json(doc.at("b"));
    bl.beta = matrix_from_json(doc.at("beta"), "beta");
    bl.theta = matrix_from_json(doc.at("theta"), "theta");
    if (bl.W.rows() != bl.L || bl.W.cols() != bl.d || bl.b.size() != bl.L ||
        bl.beta.rows() != bl.L || bl.theta.rows() != bl.L || bl.theta.cols() != bl.L)
        throw DimensionMismatch("model document dimensions are inconsistent");
    if (quant) {
        *quant = std::nullopt;
        if (doc.contains("quantizer")) *quant = quant_from_json(doc.at("quantizer"));
    }
    return bl;
}

json pool_to_json(const PhysicalPool& pool, const PairMap& map) {
    json doc;
    doc["version"] = kModelVersion;
    doc["d"] = pool.d;
    doc["l_phy"] = pool.l_phy;
    doc["seed"] = pool.seed;
    doc["W"] = matrix_to_json(pool.W);
    doc["b"] = vector_to_json(pool.b);
    doc["block_L"] = map.L;
    doc["n_blocks"] = map.n_blocks;
    json pairs = json::array();
    for (const auto& [j, k] : map.pairs) pairs.push_back({j, k});
    doc["pairs"] = std::move(pairs);
    return doc;
}

std::pair<PhysicalPool, PairMap> pool_from_json(const json& doc) {
    check_version(doc);
    PhysicalPool pool;
    pool.d = doc.at("d").get<int>();
    pool.l_phy = doc.at("l_phy").get<int>();
    pool.seed = doc.at("seed").get<std::uint64_t>();
    pool.W = matrix_from_json(doc.at("W"), "pool W");
    pool.b = vector_from_json(doc.at("b"));
    PairMap map;
    map.L = doc.at("block_L").get<int>();
    map.n_blocks = doc.at("n_blocks").get<int>();
    for (const auto& p : doc.at("pairs"))
        map.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    if (map.pairs.size() != static_cast<std::size_t>(map.L) * static_cast<std::size_t>(map.n_blocks))
        throw DimensionMismatch("pair map length does not match block layout");
    return {std::move(pool), std::move(map)};
}

json ensemble_to_json(const Ensemble& ens, const std::optional<QuantParams>& quant) {
    json doc;
    doc["version"] = kModelVersion;
    doc["d"] = ens.d;
    doc["L"] = ens.L;
    doc["n_max"] = ens.n_max;
    doc["lambda"] = ens.lambda;
    doc["use_ng"] = ens.use_ng;
    json learners = json::array();
    for (const auto& bl : ens.learners) learners.push_back(learner_to_json(bl));
    doc["learners"] = std::move(learners);
    if (ens.use_ng) doc["pool"] = pool_to_json(ens.pool, ens.pair_map);
    if (quant) doc["quantizer"] = quant_to_json(*quant);
    return doc;
}

Ensemble ensemble_from_json(const json& doc, std::optional<QuantParams>* quant) {
    check_version(doc);
    Ensemble ens;
    ens.d = doc.at("d").get<int>();
    ens.L = doc.at("L").get<int>();
    ens.n_max = doc.at("n_max").get<int>();
    ens.lambda = doc.at("lambda").get<double>();
    ens.use_ng = doc.at("use_ng").get<bool>();
    for (const auto& l : doc.at("learners")) ens.learners.push_back(learner_from_json(l));
    if (ens.use_ng) {
        auto [pool, map] = pool_from_json(doc.at("pool"));
        ens.pool = std::move(pool);
        ens.pair_map = std::move(map);
    }
    if (quant) {
        *quant = std::nullopt;
        if (doc.contains("quantizer")) *quant = quant_from_json(doc.at("quantizer"));
    }
    return ens;
}

void save_model(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

json load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
    return doc;
}

} // namespace adepos
