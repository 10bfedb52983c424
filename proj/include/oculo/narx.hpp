#pragma once

#include "oculo/config.hpp"
#include "oculo/plant.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace oculo {

class NarxError : public std::runtime_error {
public:
    explicit NarxError(const std::string& what) : std::runtime_error(what) {}
};

/// One-hidden-layer NARX predictor: x_{t+1} = b2 + W_o sigma(b1 + W_u u_hist
/// + W_x x_hist), with logistic sigma. Normalization constants are stored so
/// forward() is self-contained on natural units (u rad, x rad/2 + rad/s).
struct NarxWeights {
    NarxConfig config;
    Eigen::MatrixXd w_u;   // n_h x (s_u * (n_u + 1))
    Eigen::MatrixXd w_x;   // n_h x (s_x * (n_x + 1))
    Eigen::MatrixXd w_o;   // s_x x n_h
    Eigen::VectorXd b1;    // n_h
    Eigen::VectorXd b2;    // s_x
    Vec6 u_scale = Vec6::Constant(3.0);   // command divisor
    Vec6 x_scale = Vec6::Ones();          // state divisor per channel

    int num_parameters() const;
    /// Flat view in a fixed order (w_u, w_x, w_o, b1, b2), for optimizers and
    /// gradient checks.
    Eigen::VectorXd flatten() const;
    void unflatten(const Eigen::VectorXd& theta);
};

/// Deterministic fan-in-scaled uniform initialization.
NarxWeights init_weights(const NarxConfig& config, unsigned seed);

/// Time-aligned command/state sequences at the control sample period, with a
/// contiguous train/validation/test split.
struct Dataset {
    std::vector<Vec6> u;  // rad
    std::vector<Vec6> x;  // [rotvec rad/2; omega rad/s]
    std::size_t train_end = 0;  // [0, train_end) is train
    std::size_t val_end = 0;    // [train_end, val_end) validation, rest test
    unsigned seed = 0;
};

/// Simulate the plant at its own dt under a seeded random pulse-step saccade
/// excitation (commands clipped to [0, 3] rad), then downsample to the
/// control period. total_ms >= 10000.
Dataset gen_dataset(const PlantConfig& config, double total_ms, unsigned seed,
                    double control_dt = 3e-3);

/// Predict the next state. Histories are ordered oldest-first and must have
/// exactly n_u+1 commands and n_x+1 states.
Vec6 narx_forward(const NarxWeights& w, const std::vector<Vec6>& u_hist,
                  const std::vector<Vec6>& x_hist);

/// Closed-loop rollout: predictions are fed back as state history. Returns
/// one state per command sample (aligned with u_traj indices, starting at
/// the last state of x0_hist).
std::vector<Vec6> narx_rollout(const NarxWeights& w, const std::vector<Vec6>& u_traj,
                               const std::vector<Vec6>& x0_hist);

struct TrainReport {
    std::vector<double> train_mse;  // per epoch, natural units
    std::vector<double> val_mse;
    int best_epoch = 0;
    double test_mse = 0.0;          // one-step, on the test split
};

/// Teacher-forced one-step training with analytic gradients (Adam). Early
/// stops after `patience` epochs without validation improvement; the weights
/// with the best validation MSE are returned.
NarxWeights train_narx(const Dataset& data, const NarxConfig& config,
                       const TrainConfig& train, TrainReport* report = nullptr);

/// Max relative error between the analytic loss gradient and central finite
/// differences on `count` seeded coordinates.
double gradient_check(const NarxWeights& w, const Dataset& data, int count, unsigned seed);

/// Per-channel coefficient of determination of `predicted` against `truth`.
Vec6 r_squared(const std::vector<Vec6>& predicted, const std::vector<Vec6>& truth);

void save_weights(const NarxWeights& w, const std::string& path);
NarxWeights load_weights(const std::string& path);

}  // namespace oculo
