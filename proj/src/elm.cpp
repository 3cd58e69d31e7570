#include "adepos/elm.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "adepos/errors.hpp"
#include "adepos/prng.hpp"

namespace adepos {

namespace {

void check_input(const BaseLearner& bl, const Eigen::VectorXd& x) {
    if (x.size() != bl.d)
        throw DimensionMismatch("input has size " + std::to_string(x.size()) + ", learner expects d=" +
                                std::to_string(bl.d));
}

void check_hidden(const BaseLearner& bl, const Eigen::VectorXd& h) {
    if (h.size() != bl.L)
        throw DimensionMismatch("activation vector has size " + std::to_string(h.size()) +
                                ", learner expects L=" + std::to_string(bl.L));
}

int output_dim(const BaseLearner& bl) { return bl.mode == Mode::boundary ? 1 : bl.d; }

Eigen::VectorXd targets_for(const BaseLearner& bl, const Eigen::VectorXd& x) {
    if (bl.mode == Mode::boundary) return Eigen::VectorXd::Constant(1, bl.target);
    return x;
}

} // namespace

BaseLearner init_base_learner(int d, int L, Mode mode, std::uint64_t seed, double C, double target) {
    if (d < 1 || L < 1) throw InvalidDimension("base learner needs d >= 1 and L >= 1");

    BaseLearner bl;
    bl.mode = mode;
    bl.d = d;
    bl.L = L;
    bl.seed = seed;
    bl.C = C;
    bl.target = target;

    SplitMix64 rng(seed);
    bl.W.resize(L, d);
    for (int j = 0; j < L; ++j)
        for (int i = 0; i < d; ++i) bl.W(j, i) = rng.next_symmetric();
    bl.b.resize(L);
    for (int j = 0; j < L; ++j) bl.b(j) = rng.next_symmetric();

    bl.beta = Eigen::MatrixXd::Zero(L, output_dim(bl));
    bl.theta = C * Eigen::MatrixXd::Identity(L, L);
    return bl;
}

Eigen::VectorXd hidden_activations(const BaseLearner& bl, const Eigen::VectorXd& x) {
    check_input(bl, x);
    return (bl.W * x + bl.b).cwiseAbs();
}

Eigen::VectorXd decode(const BaseLearner& bl, const Eigen::VectorXd& h) {
    check_hidden(bl, h);
    return bl.beta.transpose() * h;
}

double residual_from_hidden(const BaseLearner& bl, const Eigen::VectorXd& h,
                            const Eigen::VectorXd& x) {
    check_input(bl, x);
    const Eigen::VectorXd out = decode(bl, h);
    if (bl.mode == Mode::boundary) return std::fabs(bl.target - out(0));
    return (x - out).norm();
}

double residual(const BaseLearner& bl, const Eigen::VectorXd& x) {
    return residual_from_hidden(bl, hidden_activations(bl, x), x);
}

double residual_squared(const BaseLearner& bl, const Eigen::VectorXd& x) {
    const double r = residual(bl, x);
    return r * r;
}

void train_batch(BaseLearner& bl, const Eigen::MatrixXd& X) {
    if (X.rows() < 1) throw DimensionMismatch("batch training needs at least one row");
    if (X.cols() != bl.d)
        throw DimensionMismatch("training matrix has " + std::to_string(X.cols()) +
                                " columns, learner expects d=" + std::to_string(bl.d));

    const Eigen::Index n = X.rows();
    Eigen::MatrixXd H(n, bl.L);
    for (Eigen::Index r = 0; r < n; ++r)
        H.row(r) = hidden_activations(bl, X.row(r).transpose()).transpose();

    Eigen::MatrixXd T;
    if (bl.mode == Mode::boundary)
        T = Eigen::MatrixXd::Constant(n, 1, bl.target);
    else
        T = X;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    bl.beta = svd.solve(T);
}

void opium_step(BaseLearner& bl, const Eigen::VectorXd& h, const Eigen::VectorXd& x,
                ThetaVariant variant) {
    check_hidden(bl, h);
    check_input(bl, x);

    const Eigen::VectorXd theta_h = bl.theta * h;
    const double denom = 1.0 + h.dot(theta_h);
    const Eigen::VectorXd eta = theta_h / denom;

    const Eigen::RowVectorXd innovation = targets_for(bl, x).transpose() - h.transpose() * bl.beta;
    bl.beta += eta * innovation;

    if (variant == ThetaVariant::rls) {
        bl.theta -= eta * (h.transpose() * bl.theta);
        // keep theta numerically symmetric
        bl.theta = 0.5 * (bl.theta + bl.theta.transpose()).eval();
    }

    if (!bl.beta.allFinite() || !bl.theta.allFinite())
        throw NonFiniteValue("non-finite intermediate in online update");
}

void opium_update(BaseLearner& bl, const Eigen::VectorXd& x, ThetaVariant variant) {
    opium_step(bl, hidden_activations(bl, x), x, variant);
}

// --------------------------------------------------------------------------
// fixed-point path
// --------------------------------------------------------------------------

namespace {

constexpr int kQMax = 32767; // int16 range used symmetrically
constexpr int kInputMax = 63;

int largest_shift_for(double max_abs) {
    // Largest s in [0, 30] with max_abs * 2^s <= kQMax.
    if (max_abs == 0.0) return 15;
    int s = static_cast<int>(std::floor(std::log2(kQMax / max_abs)));
    while (s > 0 && std::round(max_abs * std::ldexp(1.0, s)) > kQMax) --s;
    if (s < 0 || std::round(max_abs * std::ldexp(1.0, s)) > kQMax)
        throw InvalidParams("weights too large for a 16-bit fixed-point profile");
    return std::min(s, 30);
}

std::int16_t quantize_weight(double w, int shift) {
    const double scaled = std::round(w * std::ldexp(1.0, shift));
    if (scaled > kQMax || scaled < -kQMax)
        throw InvalidParams("scaled weight exceeds the int16 range");
    return static_cast<std::int16_t>(scaled);
}

std::int32_t checked_add(std::int64_t acc, std::int64_t term) {
    const std::int64_t next = acc + term;
    if (next > std::numeric_limits<std::int32_t>::max() ||
        next < std::numeric_limits<std::int32_t>::min())
        throw AccumulatorOverflow("32-bit accumulator overflow in quantized inference");
    return static_cast<std::int32_t>(next);
}

} // namespace

FixedPointProfile FixedPointProfile::fit(const BaseLearner& bl) {
    if (bl.mode != Mode::boundary)
        throw InvalidParams("fixed-point profile supports boundary mode only");

    FixedPointProfile fp;
    const double w_max = std::max(bl.W.cwiseAbs().maxCoeff(), bl.b.cwiseAbs().maxCoeff());
    fp.w_shift = largest_shift_for(w_max);
    fp.beta_shift = largest_shift_for(bl.beta.cwiseAbs().maxCoeff());

    // Worst-case first-layer accumulator over any 6-bit input, per row, in
    // integer units of 2^w_shift.
    std::vector<double> row_bound(static_cast<std::size_t>(bl.L), 0.0);
    double acc_bound = 0.0;
    for (int j = 0; j < bl.L; ++j) {
        double row = 0.0;
        for (int i = 0; i < bl.d; ++i)
            row += std::fabs(static_cast<double>(quantize_weight(bl.W(j, i), fp.w_shift))) * kInputMax;
        row += std::fabs(static_cast<double>(quantize_weight(bl.b(j), fp.w_shift)));
        row_bound[static_cast<std::size_t>(j)] = row;
        acc_bound = std::max(acc_bound, row);
    }
    fp.h_shift = 0;
    while (std::ldexp(acc_bound, -fp.h_shift) > kQMax) ++fp.h_shift;

    // The output accumulator must fit 32 bits even when every product hits
    // its bound with one sign; trade beta precision until it does.
    const auto out_bound = [&](int beta_shift) {
        double bound = 0.0;
        for (int j = 0; j < bl.L; ++j)
            bound += std::fabs(std::round(bl.beta(j, 0) * std::ldexp(1.0, beta_shift))) *
                     std::ceil(std::ldexp(row_bound[static_cast<std::size_t>(j)], -fp.h_shift));
        return bound;
    };
    while (fp.beta_shift > 0 &&
           out_bound(fp.beta_shift) > static_cast<double>(std::numeric_limits<std::int32_t>::max()))
        --fp.beta_shift;
    return fp;
}

double quantized_infer(const BaseLearner& bl, const QuantFeatureVector& qx,
                       const FixedPointProfile& fp) {
    if (bl.mode != Mode::boundary) throw InvalidParams("quantized inference is boundary-mode only");
    if (bl.d != kFeatureDim)
        throw DimensionMismatch("quantized inference expects d=" + std::to_string(kFeatureDim));

    const std::int64_t half = fp.h_shift > 0 ? (std::int64_t{1} << (fp.h_shift - 1)) : 0;

    std::int32_t out_acc = 0;
    for (int j = 0; j < bl.L; ++j) {
        std::int32_t acc = quantize_weight(bl.b(j), fp.w_shift);
        for (int i = 0; i < bl.d; ++i) {
            const std::int32_t w = quantize_weight(bl.W(j, i), fp.w_shift);
            acc = checked_add(acc, static_cast<std::int64_t>(w) * qx.codes[i]);
        }
        const std::int64_t mag = std::abs(static_cast<std::int64_t>(acc));
        const std::int64_t h16 = (mag + half) >> fp.h_shift;
        if (h16 > kQMax)
            throw AccumulatorOverflow("rescaled activation exceeds the 16-bit range");
        const std::int32_t beta_q = quantize_weight(bl.beta(j, 0), fp.beta_shift);
        out_acc = checked_add(out_acc, static_cast<std::int64_t>(beta_q) * h16);
    }
    const int out_scale = fp.w_shift - fp.h_shift + fp.beta_shift;
    return std::ldexp(static_cast<double>(out_acc), -out_scale);
}

} // namespace adepos
