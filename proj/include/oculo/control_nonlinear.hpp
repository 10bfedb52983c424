#pragma once

#include "oculo/config.hpp"
#include "oculo/control_linear.hpp"
#include "oculo/costs.hpp"
#include "oculo/narx.hpp"

#include <Eigen/Dense>

#include <vector>

namespace oculo {

/// Normalized Gaussian basis over a discrete horizon: phi(i, t) is a
/// Gaussian in t centered at c_i, and every column of phi sums to one, so a
/// coefficient matrix whose columns are all v expands to the constant
/// trajectory v.
struct GmmBasis {
    int count = 0;                 // N
    std::vector<double> centers;   // sample indices, evenly spaced over [0, T]
    double width = 0.0;            // common sigma, samples
    Eigen::MatrixXd phi;           // N x (T+1), column-stochastic
};

/// Build the basis for a T-sample horizon with N = round(c_ratio * T) >= 2
/// functions. width <= 0 selects the center spacing.
GmmBasis gmm_basis(int horizon, double c_ratio, double width = 0.0);

/// u_{0:T} = M phi; M is 6 x N, result is one command per column.
std::vector<Vec6> expand(const Eigen::MatrixXd& coeffs, const GmmBasis& basis);

/// One evaluation of the policy objective on the learned model.
struct PolicyEval {
    CostBreakdown costs;           // model-rollout accuracy/duration/energy
    double clamp_penalty = 0.0;    // quadratic penalty on u < 0 clamping
    double objective = 0.0;        // costs.total + clamp_penalty
    std::vector<Vec6> commands;    // clamped u_0..u_T
    std::vector<Vec6> states;      // model rollout x_0..x_{T+W}
};

/// Expand M, clamp at u >= 0 (with a quadratic penalty on the clamped mass),
/// roll the learned model forward holding the final command through the
/// accuracy window, and score with the standard cost terms.
PolicyEval policy_cost(const Eigen::MatrixXd& coeffs, const GmmBasis& basis,
                       const CostWeights& weights, const NarxWeights& narx,
                       const std::vector<Vec6>& x0_hist, const Vec6& goal,
                       double control_dt);

/// Saccade plan from the learned-model trajectory optimization.
struct NonlinearPlan {
    std::vector<Vec6> commands;    // u_0..u_T, rad
    Eigen::MatrixXd coeffs;        // optimized 6 x N coefficient matrix
    int horizon = 0;               // T, samples of control_dt
    double duration_s = 0.0;
    CostBreakdown model_costs;     // scored on the learned-model rollout
    CostBreakdown costs;           // scored on the plant execution
    Trajectory rollout;            // plant execution at plant dt
};

struct NonlinearSearchResult {
    NonlinearPlan best;
    std::vector<DurationCurvePoint> curve;  // model-rollout costs per duration
};

/// For each grid duration: build the basis, start from a constant coefficient
/// matrix, and run a quasi-Newton descent with numerical gradients for
/// solver.max_iterations accepted steps. The grid minimizer (by model cost)
/// is expanded, executed on the plant, and re-scored there.
NonlinearSearchResult optimize_traj(const PlantConfig& config, const NarxWeights& narx,
                                    const EyeState& x0, const EyeState& goal,
                                    const CostWeights& weights, const SolverConfig& solver);

}  // namespace oculo
