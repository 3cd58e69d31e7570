#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "adepos/signal_features.hpp"

namespace adepos {

// Boundary learners regress a scalar target R, autoencoder learners
// reconstruct their input.
enum class Mode { boundary, autoencoder };

// How the inverse-correlation state theta evolves across online updates.
//   constant_theta: theta stays C*I forever (gain never decays).
//   rls:            theta <- theta - eta * h^T * theta after each step,
//                   the classic recursive-least-squares propagation.
enum class ThetaVariant { constant_theta, rls };

// One mini extreme-learning-machine: a frozen random projection
// (W, b, absolute-value activation) plus trainable output weights beta.
// Treated as a value; updates mutate the caller's copy and nothing is
// shared between learners.
struct BaseLearner {
    Mode mode = Mode::boundary;
    int d = 0; // input dimension
    int L = 0; // hidden neuron count
    std::uint64_t seed = 0;
    double C = 1.0;      // theta initialisation scale, theta0 = C*I
    double target = 1.0; // boundary regression target R

    Eigen::MatrixXd W;     // L x d, frozen random input weights
    Eigen::VectorXd b;     // L, frozen random biases
    Eigen::MatrixXd beta;  // L x 1 (boundary) or L x d (autoencoder)
    Eigen::MatrixXd theta; // L x L, symmetric PSD online-update state
};

// W and b are i.i.d. uniform on [-1, 1] drawn from the SplitMix64 stream of
// `seed` (W row-major first, then b), beta starts at zero, theta at C*I.
BaseLearner init_base_learner(int d, int L, Mode mode, std::uint64_t seed, double C = 1.0,
                              double target = 1.0);

// h_j = |sum_i W_ji x_i + b_j|
Eigen::VectorXd hidden_activations(const BaseLearner& bl, const Eigen::VectorXd& x);

// Boundary: the single-entry vector (sum_j beta_j h_j).
// Autoencoder: the reconstruction x~ with x~_k = sum_j beta_jk h_j.
Eigen::VectorXd decode(const BaseLearner& bl, const Eigen::VectorXd& h);

// Deviation in output units: |R - R~| for boundary mode, ||x - x~||_2 for
// autoencoder mode.
double residual(const BaseLearner& bl, const Eigen::VectorXd& x);
double residual_from_hidden(const BaseLearner& bl, const Eigen::VectorXd& h,
                            const Eigen::VectorXd& x);

// Squared-error variant of the residual, kept for parity checks.
double residual_squared(const BaseLearner& bl, const Eigen::VectorXd& x);

// Least-squares batch fit beta = H^+ T where H stacks hidden activations of
// the rows of X and T is the all-R column (boundary) or X itself
// (autoencoder). Uses an SVD pseudo-inverse; singular values below
// 1e-10 * sigma_max are treated as zero.
void train_batch(BaseLearner& bl, const Eigen::MatrixXd& X);

// One online update on sample x:
//   eta  = theta*h / (1 + h^T*theta*h)
//   beta += eta * (T - prediction)^T
// with T = R (boundary) or x (autoencoder). The rls variant additionally
// propagates theta; constant_theta leaves it untouched.
void opium_update(BaseLearner& bl, const Eigen::VectorXd& x,
                  ThetaVariant variant = ThetaVariant::constant_theta);

// Same update with an externally supplied activation vector (used when
// hidden neurons are synthesized from a shared physical pool).
void opium_step(BaseLearner& bl, const Eigen::VectorXd& h, const Eigen::VectorXd& x,
                ThetaVariant variant = ThetaVariant::constant_theta);

// ---------------------------------------------------------------------------
// Fixed-point inference path (boundary mode)
//
// Mirrors a 16x16 signed MAC datapath with 32-bit accumulation. Every tensor
// gets a power-of-two scale: W and b share 2^w_shift, beta uses
// 2^beta_shift, and first-layer accumulators are renormalized to 16 bits by
// an arithmetic right shift of h_shift before entering the output MAC.
// ---------------------------------------------------------------------------
struct FixedPointProfile {
    int w_shift = 0;    // W, b stored as round(w * 2^w_shift), int16
    int beta_shift = 0; // beta stored as round(beta * 2^beta_shift), int16
    int h_shift = 0;    // |acc| >> h_shift must fit int16 for any 6-bit input

    // Derive scales from a trained learner. Throws InvalidParams when no
    // nonnegative shift can represent the weights in the int16 range.
    static FixedPointProfile fit(const BaseLearner& bl);
};

// Evaluate the boundary output using quantized weights, integer inputs and
// 32-bit accumulation, then rescale back to a real. Overflow of either
// accumulator throws AccumulatorOverflow, never wraps.
double quantized_infer(const BaseLearner& bl, const QuantFeatureVector& qx,
                       const FixedPointProfile& fp);

} // namespace adepos
