#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "adepos/elm.hpp"

namespace adepos {

// A small pool of physical neurons. Virtual hidden neurons are synthesized
// as pairwise differences of the physical pre-activations, so L_phy physical
// neurons can serve up to L_phy*(L_phy-1)/2 virtuals. Immutable after
// construction; concurrent reads are fine.
struct PhysicalPool {
    int d = 0;
    int l_phy = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd W; // l_phy x d
    Eigen::VectorXd b; // l_phy
};

// Which physical pair (j, k), j < k, backs each virtual neuron. Pairs are
// enumerated in lexicographic order and partitioned into n_blocks contiguous
// blocks of L, one block per base learner.
struct PairMap {
    int L = 0;
    int n_blocks = 0;
    std::vector<std::pair<int, int>> pairs; // size n_blocks * L

    std::size_t size() const { return pairs.size(); }
};

// Smallest L_phy with L_phy*(L_phy-1)/2 >= n_max*L.
int required_physical_neurons(int L, int n_max);

// Pool weights and biases are sampled exactly like a base learner's, from
// the SplitMix64 stream of `seed`.
std::pair<PhysicalPool, PairMap> build_pool(int d, int L, int n_max, std::uint64_t seed);

// The L_phy pre-activations W*x + b (no nonlinearity). When `eval_counter`
// is given it is incremented once per call, which lets callers assert the
// pool is charged exactly once per input sample.
Eigen::VectorXd physical_preactivations(const PhysicalPool& pool, const Eigen::VectorXd& x,
                                        std::uint64_t* eval_counter = nullptr);

// One base learner's L virtual activations |p_k - p_j| from cached
// pre-activations. The absolute value is applied after differencing.
Eigen::VectorXd virtual_block(const Eigen::VectorXd& preacts, const PairMap& map, int block);

// All n_blocks*L virtual activations for one input.
Eigen::VectorXd virtual_hidden(const PhysicalPool& pool, const PairMap& map,
                               const Eigen::VectorXd& x);

// Materialize block `block` as a standalone learner with weights W_k - W_j
// and biases b_k - b_j. Evaluating it directly is mathematically identical
// to the differenced-pool path.
BaseLearner differenced_learner(const PhysicalPool& pool, const PairMap& map, int block, Mode mode,
                                double C = 1.0, double target = 1.0);

} // namespace adepos
