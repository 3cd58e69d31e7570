#include "adepos/neuron_gen.hpp"

#include <cmath>

#include "adepos/errors.hpp"
#include "adepos/prng.hpp"

namespace adepos {

int required_physical_neurons(int L, int n_max) {
    if (L < 1 || n_max < 1) throw InvalidDimension("required_physical_neurons needs L, n_max >= 1");
    const double needed = static_cast<double>(n_max) * static_cast<double>(L);
    int c = static_cast<int>(std::ceil((1.0 + std::sqrt(1.0 + 8.0 * needed)) / 2.0));
    // guard the ceil against floating-point edge cases near exact squares
    auto capacity = [](int m) { return static_cast<long long>(m) * (m - 1) / 2; };
    while (c > 2 && capacity(c - 1) >= static_cast<long long>(needed)) --c;
    while (capacity(c) < static_cast<long long>(needed)) ++c;
    return std::max(c, 2);
}

std::pair<PhysicalPool, PairMap> build_pool(int d, int L, int n_max, std::uint64_t seed) {
    if (d < 1 || L < 1 || n_max < 1) throw InvalidDimension("build_pool needs d, L, n_max >= 1");

    PhysicalPool pool;
    pool.d = d;
    pool.l_phy = required_physical_neurons(L, n_max);
    pool.seed = seed;

    SplitMix64 rng(seed);
    pool.W.resize(pool.l_phy, d);
    for (int j = 0; j < pool.l_phy; ++j)
        for (int i = 0; i < d; ++i) pool.W(j, i) = rng.next_symmetric();
    pool.b.resize(pool.l_phy);
    for (int j = 0; j < pool.l_phy; ++j) pool.b(j) = rng.next_symmetric();

    PairMap map;
    map.L = L;
    map.n_blocks = n_max;
    map.pairs.reserve(static_cast<std::size_t>(n_max) * L);
    const std::size_t wanted = static_cast<std::size_t>(n_max) * static_cast<std::size_t>(L);
    for (int j = 0; j < pool.l_phy && map.pairs.size() < wanted; ++j)
        for (int k = j + 1; k < pool.l_phy && map.pairs.size() < wanted; ++k)
            map.pairs.emplace_back(j, k);
    return {std::move(pool), std::move(map)};
}

Eigen::VectorXd physical_preactivations(const PhysicalPool& pool, const Eigen::VectorXd& x,
                                        std::uint64_t* eval_counter) {
    if (x.size() != pool.d)
        throw DimensionMismatch("input has size " + std::to_string(x.size()) + ", pool expects d=" +
                                std::to_string(pool.d));
    if (eval_counter) ++*eval_counter;
    return pool.W * x + pool.b;
}

Eigen::VectorXd virtual_block(const Eigen::VectorXd& preacts, const PairMap& map, int block) {
    if (block < 0 || block >= map.n_blocks) throw DimensionMismatch("block index out of range");
    Eigen::VectorXd h(map.L);
    const std::size_t base = static_cast<std::size_t>(block) * static_cast<std::size_t>(map.L);
    for (int t = 0; t < map.L; ++t) {
        const auto [j, k] = map.pairs[base + static_cast<std::size_t>(t)];
        h(t) = std::fabs(preacts(k) - preacts(j));
    }
    return h;
}

Eigen::VectorXd virtual_hidden(const PhysicalPool& pool, const PairMap& map,
                               const Eigen::VectorXd& x) {
    const Eigen::VectorXd p = physical_preactivations(pool, x);
    Eigen::VectorXd h(static_cast<Eigen::Index>(map.size()));
    for (std::size_t t = 0; t < map.size(); ++t) {
        const auto [j, k] = map.pairs[t];
        h(static_cast<Eigen::Index>(t)) = std::fabs(p(k) - p(j));
    }
    return h;
}

BaseLearner differenced_learner(const PhysicalPool& pool, const PairMap& map, int block, Mode mode,
                                double C, double target) {
    if (block < 0 || block >= map.n_blocks) throw DimensionMismatch("block index out of range");
    BaseLearner bl = init_base_learner(pool.d, map.L, mode, pool.seed, C, target);
    const std::size_t base = static_cast<std::size_t>(block) * static_cast<std::size_t>(map.L);
    for (int t = 0; t < map.L; ++t) {
        const auto [j, k] = map.pairs[base + static_cast<std::size_t>(t)];
        bl.W.row(t) = pool.W.row(k) - pool.W.row(j);
        bl.b(t) = pool.b(k) - pool.b(j);
    }
    return bl;
}

} // namespace adepos
