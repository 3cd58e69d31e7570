#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "adepos/elm.hpp"
#include "adepos/errors.hpp"
#include "adepos/neuron_gen.hpp"
#include "adepos/prng.hpp"

using namespace adepos;

namespace {

Eigen::VectorXd random_input(SplitMix64& rng, int d, double scale = 1.0) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = scale * rng.next_symmetric();
    return x;
}

} // namespace

TEST_CASE("required_physical_neurons: pinned values") {
    CHECK(required_physical_neurons(20, 9) == 20); // 20*19/2 = 190 >= 180
    CHECK(required_physical_neurons(1, 1) == 2);
    CHECK(required_physical_neurons(20, 1) == 7); // 7*6/2 = 21 >= 20
}

TEST_CASE("required_physical_neurons: minimality over a grid") {
    for (int L = 1; L <= 40; ++L) {
        for (int n = 1; n <= 11; n += 2) {
            const int p = required_physical_neurons(L, n);
            const long long need = static_cast<long long>(L) * n;
            CHECK(static_cast<long long>(p) * (p - 1) / 2 >= need);
            if (p > 2) CHECK(static_cast<long long>(p - 1) * (p - 2) / 2 < need);
        }
    }
}

TEST_CASE("build_pool: sizes, determinism, pair layout") {
    const auto [pool, map] = build_pool(5, 20, 9, 77);
    CHECK(pool.l_phy == 20);
    CHECK(pool.W.rows() == 20);
    CHECK(pool.W.cols() == 5);
    CHECK(map.size() == 180);
    CHECK(map.n_blocks == 9);

    const auto [pool2, map2] = build_pool(5, 20, 9, 77);
    CHECK(pool.W == pool2.W);
    CHECK(pool.b == pool2.b);
    CHECK(map.pairs == map2.pairs);

    // lexicographic enumeration
    CHECK(map.pairs[0] == std::pair<int, int>{0, 1});
    CHECK(map.pairs[1] == std::pair<int, int>{0, 2});
    for (const auto& [j, k] : map.pairs) {
        CHECK(j < k);
        CHECK(k < pool.l_phy);
    }

    const auto [tiny_pool, tiny_map] = build_pool(1, 1, 1, 3);
    CHECK(tiny_map.pairs == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(tiny_pool.l_phy == 2);
}

TEST_CASE("virtual_hidden: bias-only input and hand difference") {
    const auto [pool, map] = build_pool(3, 4, 3, 5);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
    const Eigen::VectorXd h = virtual_hidden(pool, map, zero);
    for (std::size_t t = 0; t < map.size(); ++t) {
        const auto [j, k] = map.pairs[t];
        CHECK(h(static_cast<Eigen::Index>(t)) ==
              doctest::Approx(std::fabs(pool.b(k) - pool.b(j))));
    }
}

TEST_CASE("virtual activations equal differenced-weight direct evaluation") {
    SplitMix64 rng(123);
    const auto [pool, map] = build_pool(5, 20, 9, 99);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd x = random_input(rng, 5, 2.0);
        const Eigen::VectorXd hv = virtual_hidden(pool, map, x);
        for (int block = 0; block < map.n_blocks; ++block) {
            const BaseLearner direct = differenced_learner(pool, map, block, Mode::boundary);
            const Eigen::VectorXd hd = hidden_activations(direct, x);
            for (int t = 0; t < map.L; ++t)
                CHECK(std::fabs(hv(block * map.L + t) - hd(t)) <= 1e-12);
        }
    }
}

TEST_CASE("physical pre-activations computed once per sample") {
    const auto [pool, map] = build_pool(5, 8, 5, 42);
    SplitMix64 rng(43);
    const Eigen::VectorXd x = random_input(rng, 5);

    std::uint64_t count = 0;
    const Eigen::VectorXd p = physical_preactivations(pool, x, &count);
    // every block reuses the same cached pre-activations
    for (int block = 0; block < map.n_blocks; ++block) (void)virtual_block(p, map, block);
    CHECK(count == 1);
}

TEST_CASE("NG-built learner trains as well as a directly sampled one") {
    SplitMix64 rng(345);
    const int d = 5, L = 16;
    const auto [pool, map] = build_pool(d, L, 3, 1001);

    Eigen::MatrixXd X(120, d);
    for (Eigen::Index r = 0; r < X.rows(); ++r) X.row(r) = random_input(rng, d).transpose();

    BaseLearner ng = differenced_learner(pool, map, 0, Mode::boundary);
    BaseLearner direct = init_base_learner(d, L, Mode::boundary, 2002);
    train_batch(ng, X);
    train_batch(direct, X);

    double ng_mean = 0.0, direct_mean = 0.0;
    Eigen::MatrixXd test(200, d);
    for (Eigen::Index r = 0; r < test.rows(); ++r) {
        const Eigen::VectorXd x = random_input(rng, d);
        ng_mean += residual(ng, x);
        direct_mean += residual(direct, x);
    }
    ng_mean /= 200.0;
    direct_mean /= 200.0;
    const double ratio = ng_mean / direct_mean;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("neuron_gen: dimension errors") {
    CHECK_THROWS_AS(build_pool(0, 4, 3, 1), InvalidDimension);
    CHECK_THROWS_AS(required_physical_neurons(0, 1), InvalidDimension);
    const auto [pool, map] = build_pool(3, 4, 3, 5);
    Eigen::VectorXd wrong(2);
    wrong.setZero();
    CHECK_THROWS_AS(virtual_hidden(pool, map, wrong), DimensionMismatch);
    CHECK_THROWS_AS(differenced_learner(pool, map, 7, Mode::boundary), DimensionMismatch);
}
