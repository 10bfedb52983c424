#pragma once

#include "oculo/config.hpp"
#include "oculo/costs.hpp"
#include "oculo/linearize.hpp"

#include <vector>

namespace oculo {

class PlanningError : public std::runtime_error {
public:
    explicit PlanningError(const std::string& what) : std::runtime_error(what) {}
};

/// Open-loop saccade plan produced on the linearized model. Costs are the
/// ones achieved by replaying the commands on the nonlinear plant, not the
/// quadratic surrogate the planner minimized.
struct LinearPlan {
    std::vector<Vec6> commands;       // u_0..u_T, absolute motor angles, rad
    std::vector<Vec6> predicted_xi;   // xi_0..xi_{T+W} under the linear model
    int horizon = 0;                  // T, samples of model.dt
    double duration_s = 0.0;          // T * dt
    CostBreakdown costs;              // plant-rollout evaluation
    Trajectory rollout;               // plant execution at plant dt
    double kkt_residual = 0.0;        // inner QP optimality certificate
};

struct DurationCurvePoint {
    int horizon = 0;
    double duration_s = 0.0;
    CostBreakdown costs;
    bool feasible = false;
};

struct PlanSearchResult {
    LinearPlan best;
    std::vector<DurationCurvePoint> curve;  // one entry per grid duration
};

/// Replay a 6 x (T+1) command sequence sampled at control_dt on the plant
/// (integration at config.dt), holding the last command for `extra` further
/// control samples.
Trajectory replay_on_plant(const PlantConfig& config, const EyeState& x0,
                           const std::vector<Vec6>& commands, double control_dt,
                           int extra_samples);

/// Score a plant rollout of a T-sample plan: accuracy over the window after
/// T, energy over the command increments, duration from T * control_dt.
CostBreakdown score_rollout(const Trajectory& rollout, const std::vector<Vec6>& commands,
                            const EyeState& goal, int horizon, double control_dt,
                            const CostWeights& weights);

/// Minimize lambda_A J_A + lambda_E J_E over u_1..u_T >= 0 (u_0 is pinned to
/// the pretension command) subject to the discrete linear dynamics, states
/// eliminated by forward substitution. The box-constrained QP is solved to a
/// KKT residual <= kkt_tol by a primal active-set method.
LinearPlan plan_fixed_horizon(const PlantConfig& config, const LinearModel& model,
                              const EyeState& goal, int horizon, const CostWeights& weights,
                              double kkt_tol = 1e-6);

/// Outer duration search over the grid {t_max/d, 2 t_max/d, ..., t_max};
/// grid points whose inner problem fails are excluded. Returns the total-cost
/// minimizer plus the whole cost-vs-duration curve.
PlanSearchResult plan_saccade(const PlantConfig& config, const LinearModel& model,
                              const EyeState& goal, const CostWeights& weights,
                              const SolverConfig& solver);

}  // namespace oculo
