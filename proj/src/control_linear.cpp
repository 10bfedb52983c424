#include "oculo/control_linear.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace oculo {

namespace {

/// min 0.5 z'Hz + g'z  s.t.  z >= lb, for symmetric positive-definite H.
/// Primal active-set method starting from the feasible z = 0.
Eigen::VectorXd solve_box_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& lb, double tol, double& kkt_residual) {
    const int n = static_cast<int>(g.size());
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    std::vector<bool> active(n, false);

    const int max_iters = 20 * n + 100;
    for (int it = 0; it < max_iters; ++it) {
        std::vector<int> free_idx;
        free_idx.reserve(n);
        for (int i = 0; i < n; ++i) {
            if (!active[i]) {
                free_idx.push_back(i);
            }
        }
        const Eigen::VectorXd grad = h * z + g;

        // Equality-constrained step on the free coordinates.
        const int nf = static_cast<int>(free_idx.size());
        Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
        if (nf > 0) {
            Eigen::MatrixXd hff(nf, nf);
            Eigen::VectorXd gf(nf);
            for (int a = 0; a < nf; ++a) {
                gf[a] = grad[free_idx[a]];
                for (int b = 0; b < nf; ++b) {
                    hff(a, b) = h(free_idx[a], free_idx[b]);
                }
            }
            const Eigen::VectorXd pf = hff.ldlt().solve(-gf);
            for (int a = 0; a < nf; ++a) {
                p[free_idx[a]] = pf[a];
            }
        }

        if (p.lpNorm<Eigen::Infinity>() < 1e-12) {
            // At the EQP optimum; check the multipliers of the active bounds.
            int worst = -1;
            double worst_mu = -tol;
            for (int i = 0; i < n; ++i) {
                if (active[i] && grad[i] < worst_mu) {
                    worst_mu = grad[i];
                    worst = i;
                }
            }
            if (worst < 0) {
                break;  // KKT point
            }
            active[worst] = false;
            continue;
        }

        // Ratio test against the bounds of the free coordinates.
        double alpha = 1.0;
        int blocking = -1;
        for (int i : free_idx) {
            if (p[i] < 0.0) {
                const double a = (lb[i] - z[i]) / p[i];
                if (a < alpha) {
                    alpha = a;
                    blocking = i;
                }
            }
        }
        z += alpha * p;
        if (blocking >= 0) {
            z[blocking] = lb[blocking];
            active[blocking] = true;
        }
    }

    // Certify: stationarity on free coordinates, nonnegative multipliers on
    // active ones, primal feasibility.
    const Eigen::VectorXd grad = h * z + g;
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
        if (active[i]) {
            res = std::max(res, std::max(0.0, -grad[i]));
        } else {
            res = std::max(res, std::abs(grad[i]));
        }
        res = std::max(res, lb[i] - z[i]);
    }
    kkt_residual = res;
    return z;
}

}  // namespace

Trajectory replay_on_plant(const PlantConfig& config, const EyeState& x0,
                           const std::vector<Vec6>& commands, double control_dt,
                           int extra_samples) {
    const int sub = static_cast<int>(std::round(control_dt / config.dt));
    if (sub < 1 || std::abs(sub * config.dt - control_dt) > 1e-12) {
        throw std::invalid_argument("replay_on_plant: control_dt must be a multiple of plant dt");
    }
    std::vector<Vec6> fine;
    fine.reserve((commands.size() + extra_samples) * sub);
    for (const Vec6& u : commands) {
        for (int s = 0; s < sub; ++s) {
            fine.push_back(u);
        }
    }
    for (int e = 0; e < extra_samples; ++e) {
        for (int s = 0; s < sub; ++s) {
            fine.push_back(commands.back());
        }
    }
    return simulate(config, x0, fine, config.dt);
}

CostBreakdown score_rollout(const Trajectory& rollout, const std::vector<Vec6>& commands,
                            const EyeState& goal, int horizon, double control_dt,
                            const CostWeights& weights) {
    const double plant_dt = rollout.t.size() > 1 ? rollout.t[1] - rollout.t[0] : control_dt;
    const int sub = static_cast<int>(std::round(control_dt / plant_dt));
    std::vector<Vec6> coarse_states;
    for (std::size_t i = 0; i < rollout.size(); i += sub) {
        coarse_states.push_back(rollout.states[i].as_vector());
    }
    const double j_a = accuracy_cost(coarse_states, goal.as_vector(), horizon, weights.window);
    const double j_e = energy_cost(commands);
    return make_costs(j_a, horizon * control_dt, j_e, weights);
}

LinearPlan plan_fixed_horizon(const PlantConfig& config, const LinearModel& model,
                              const EyeState& goal, int horizon, const CostWeights& weights,
                              double kkt_tol) {
    const int T = horizon;
    const int W = weights.window;
    if (T < W) {
        throw std::invalid_argument("plan_fixed_horizon: horizon must be >= the accuracy window");
    }
    const Vec6 xi_goal = global_to_local(model, goal);  // throws away-from-chart goals
    const Vec6 u_bar = model.equilibrium_command;

    // Decision variable z = [du_1; ...; du_T] (du_0 = 0: the plan starts at
    // the pretension command). States are eliminated by forward substitution:
    // xi_t = sum_s A^(t-1-s) B du_s, with du held at du_T through the window.
    const int n = 6 * T;
    std::vector<Mat6> a_pow(T + W);
    a_pow[0] = Mat6::Identity();
    for (int j = 1; j < T + W; ++j) {
        a_pow[j] = a_pow[j - 1] * model.a_d;
    }

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(6 * W, n);
    Eigen::VectorXd y(6 * W);
    for (int w = 1; w <= W; ++w) {
        const int t = T + w;  // window state index
        auto block_row = p.middleRows<6>(6 * (w - 1));
        for (int s = 1; s <= T; ++s) {
            block_row.middleCols<6>(6 * (s - 1)) = a_pow[t - 1 - s] * model.b_d;
        }
        // Holding the last command through the window accumulates onto du_T.
        for (int s = T + 1; s <= t - 1; ++s) {
            block_row.middleCols<6>(6 * (T - 1)) += a_pow[t - 1 - s] * model.b_d;
        }
        y.segment<6>(6 * (w - 1)) = xi_goal;
    }

    // J_E = |D z|^2 with D the first-difference operator anchored at du_0 = 0.
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < T; ++t) {
        d.block<6, 6>(6 * t, 6 * t) = Mat6::Identity();
        if (t > 0) {
            d.block<6, 6>(6 * t, 6 * (t - 1)) = -Mat6::Identity();
        }
    }

    const Eigen::MatrixXd h =
        2.0 * weights.lambda_accuracy * p.transpose() * p +
        2.0 * weights.lambda_energy * d.transpose() * d;
    const Eigen::VectorXd g = -2.0 * weights.lambda_accuracy * p.transpose() * y;
    Eigen::VectorXd lb(n);
    for (int t = 0; t < T; ++t) {
        lb.segment<6>(6 * t) = -u_bar;
    }

    LinearPlan plan;
    const Eigen::VectorXd z = solve_box_qp(h, g, lb, kkt_tol, plan.kkt_residual);
    if (!z.allFinite()) {
        throw PlanningError("plan_fixed_horizon: inner QP produced non-finite iterate");
    }

    plan.horizon = T;
    plan.duration_s = T * model.dt;
    plan.commands.resize(T + 1, u_bar);
    for (int t = 1; t <= T; ++t) {
        plan.commands[t] = u_bar + Vec6(z.segment<6>(6 * (t - 1)));
    }

    // Predicted local states xi_0..xi_{T+W} under the discrete model.
    plan.predicted_xi.assign(T + W + 1, Vec6::Zero());
    for (int t = 0; t < T + W; ++t) {
        const Vec6 du = plan.commands[std::min(t, T)] - u_bar;
        plan.predicted_xi[t + 1] = model.a_d * plan.predicted_xi[t] + model.b_d * du;
    }

    // The reported cost is the nonlinear plant's, not the surrogate's.
    plan.rollout = replay_on_plant(config, model.equilibrium_state, plan.commands,
                                   model.dt, W);
    plan.costs = score_rollout(plan.rollout, plan.commands, goal, T, model.dt, weights);
    return plan;
}

PlanSearchResult plan_saccade(const PlantConfig& config, const LinearModel& model,
                              const EyeState& goal, const CostWeights& weights,
                              const SolverConfig& solver) {
    PlanSearchResult out;
    const Vec6 goal_local = global_to_local(model, goal);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= solver.duration_grid; ++k) {
        const double duration = solver.t_max * k / solver.duration_grid;
        const int horizon = static_cast<int>(std::round(duration / solver.control_dt));
        DurationCurvePoint point;
        point.horizon = horizon;
        point.duration_s = horizon * solver.control_dt;
        try {
            LinearPlan plan = plan_fixed_horizon(config, model, goal, horizon, weights);
            // The duration curve reports the planner's own objective (the
            // quadratic surrogate the grid search minimizes); the winning
            // plan additionally carries its plant-evaluated costs.
            const double a_pred =
                accuracy_cost(plan.predicted_xi, goal_local, horizon, weights.window);
            point.costs = make_costs(a_pred, point.duration_s,
                                     energy_cost(plan.commands), weights);
            point.feasible = true;
            if (point.costs.total < best) {
                best = point.costs.total;
                out.best = std::move(plan);
            }
        } catch (const std::exception&) {
            point.feasible = false;  // excluded from the search
        }
        out.curve.push_back(point);
    }
    if (!std::isfinite(best)) {
        throw PlanningError("plan_saccade: every duration grid point failed");
    }
    return out;
}

}  // namespace oculo
