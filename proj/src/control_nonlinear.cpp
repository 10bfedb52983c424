#include "oculo/control_nonlinear.hpp"

#include "oculo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>

namespace oculo {

namespace {

constexpr double kClampPenaltyWeight = 10.0;

}  // namespace

GmmBasis gmm_basis(int horizon, double c_ratio, double width) {
    if (horizon < 2) {
        throw PlanningError("gmm_basis: horizon must be at least 2 samples");
    }
    const int count = static_cast<int>(std::lround(c_ratio * horizon));
    if (count < 2) {
        throw PlanningError("gmm_basis: fewer than 2 basis functions");
    }
    if (count >= horizon + 1) {
        throw PlanningError("gmm_basis: basis must be smaller than the horizon");
    }
    GmmBasis basis;
    basis.count = count;
    const double spacing = static_cast<double>(horizon) / (count - 1);
    basis.width = width > 0.0 ? width : spacing;
    basis.centers.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        basis.centers[static_cast<std::size_t>(i)] = i * spacing;
    }
    basis.phi.resize(count, horizon + 1);
    for (int t = 0; t <= horizon; ++t) {
        double sum = 0.0;
        for (int i = 0; i < count; ++i) {
            const double d = (t - basis.centers[static_cast<std::size_t>(i)]) / basis.width;
            // Floor keeps far tails strictly positive where exp underflows.
            const double g = std::max(std::exp(-0.5 * d * d), 1e-290);
            basis.phi(i, t) = g;
            sum += g;
        }
        basis.phi.col(t) /= sum;
    }
    return basis;
}

std::vector<Vec6> expand(const Eigen::MatrixXd& coeffs, const GmmBasis& basis) {
    if (coeffs.rows() != 6 || coeffs.cols() != basis.phi.rows()) {
        throw PlanningError("expand: coefficient matrix must be 6 x N");
    }
    const Eigen::MatrixXd u = coeffs * basis.phi;
    std::vector<Vec6> out(static_cast<std::size_t>(u.cols()));
    for (Eigen::Index t = 0; t < u.cols(); ++t) {
        out[static_cast<std::size_t>(t)] = u.col(t);
    }
    return out;
}

PolicyEval policy_cost(const Eigen::MatrixXd& coeffs, const GmmBasis& basis,
                       const CostWeights& weights, const NarxWeights& narx,
                       const std::vector<Vec6>& x0_hist, const Vec6& goal,
                       double control_dt) {
    PolicyEval eval;
    eval.commands = expand(coeffs, basis);
    const int horizon = static_cast<int>(eval.commands.size()) - 1;

    double clamp_sq = 0.0;
    for (Vec6& u : eval.commands) {
        for (int m = 0; m < 6; ++m) {
            if (u[m] < 0.0) {
                clamp_sq += u[m] * u[m];
                u[m] = 0.0;
            }
        }
    }
    eval.clamp_penalty = kClampPenaltyWeight * clamp_sq;

    std::vector<Vec6> u_traj = eval.commands;
    for (int t = 0; t < weights.window; ++t) {
        u_traj.push_back(eval.commands.back());
    }
    eval.states = narx_rollout(narx, u_traj, x0_hist);

    const double accuracy = accuracy_cost(eval.states, goal, horizon, weights.window);
    const double energy = energy_cost(eval.commands);
    eval.costs = make_costs(accuracy, horizon * control_dt, energy, weights);
    eval.objective = eval.costs.total + eval.clamp_penalty;
    return eval;
}

namespace {

struct GridOutcome {
    DurationCurvePoint point;
    Eigen::MatrixXd coeffs;
    GmmBasis basis;
    double objective = std::numeric_limits<double>::infinity();
};

/// BFGS with central-difference gradients and Armijo backtracking; runs until
/// `max_iterations` accepted steps or no further descent is found.
GridOutcome optimize_grid_point(int horizon, const NarxWeights& narx,
                                const std::vector<Vec6>& x0_hist, const Vec6& goal,
                                const CostWeights& weights, const SolverConfig& solver) {
    GridOutcome out;
    out.point.horizon = horizon;
    out.point.duration_s = horizon * solver.control_dt;
    out.basis = gmm_basis(horizon, solver.c_ratio);

    const int n = 6 * out.basis.count;
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(n, solver.initial_coefficient);
    const auto as_matrix = [&](const Eigen::VectorXd& v) {
        return Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(v.data(), 6, out.basis.count));
    };
    const auto objective = [&](const Eigen::VectorXd& v) {
        return policy_cost(as_matrix(v), out.basis, weights, narx, x0_hist, goal,
                           solver.control_dt)
            .objective;
    };
    const auto gradient = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd g(n);
        Eigen::VectorXd probe = v;
        const double h = 1e-5;
        for (int i = 0; i < n; ++i) {
            probe[i] = v[i] + h;
            const double fp = objective(probe);
            probe[i] = v[i] - h;
            const double fm = objective(probe);
            probe[i] = v[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        return g;
    };

    double f = objective(theta);
    Eigen::VectorXd g = gradient(theta);
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;

    for (int iter = 0; iter < solver.max_iterations; ++iter) {
        Eigen::VectorXd dir = -(h_inv * g);
        if (dir.dot(g) >= 0.0) {  // lost curvature; restart on the gradient
            dir = -g;
            h_inv.setIdentity();
            scaled = false;
        }
        double alpha = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        Eigen::VectorXd theta_new;
        bool accepted = false;
        for (int ls = 0; ls < 25; ++ls) {
            theta_new = theta + alpha * dir;
            f_new = objective(theta_new);
            if (f_new < f - 1e-4 * alpha * std::abs(dir.dot(g))) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            break;
        }
        const Eigen::VectorXd g_new = gradient(theta_new);
        const Eigen::VectorXd s = theta_new - theta;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            if (!scaled) {
                h_inv *= sy / y.squaredNorm();
                scaled = true;
            }
            const Eigen::VectorXd hy = h_inv * y;
            const double yhy = y.dot(hy);
            h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                     (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        theta = theta_new;
        f = f_new;
        g = g_new;
    }

    const PolicyEval best =
        policy_cost(as_matrix(theta), out.basis, weights, narx, x0_hist, goal, solver.control_dt);
    out.coeffs = as_matrix(theta);
    out.objective = best.objective;
    out.point.costs = best.costs;
    out.point.feasible = true;
    return out;
}

}  // namespace

NonlinearSearchResult optimize_traj(const PlantConfig& config, const NarxWeights& narx,
                                    const EyeState& x0, const EyeState& goal,
                                    const CostWeights& weights, const SolverConfig& solver) {
    const std::vector<Vec6> x0_hist(static_cast<std::size_t>(narx.config.state_memory) + 1,
                                    x0.as_vector());
    Vec6 goal_vec = goal.as_vector();
    goal_vec.tail<3>().setZero();

    std::vector<std::future<std::optional<GridOutcome>>> jobs;
    for (int k = 1; k <= solver.duration_grid; ++k) {
        const int horizon = static_cast<int>(
            std::lround(k * solver.t_max / solver.duration_grid / solver.control_dt));
        jobs.push_back(std::async(std::launch::async, [=, &narx]() -> std::optional<GridOutcome> {
            try {
                WorkerSlot slot;
                return optimize_grid_point(horizon, narx, x0_hist, goal_vec, weights, solver);
            } catch (const std::exception&) {
                return std::nullopt;
            }
        }));
    }

    NonlinearSearchResult result;
    std::optional<GridOutcome> winner;
    for (int k = 1; k <= solver.duration_grid; ++k) {
        auto outcome = jobs[static_cast<std::size_t>(k - 1)].get();
        DurationCurvePoint point;
        point.horizon = static_cast<int>(
            std::lround(k * solver.t_max / solver.duration_grid / solver.control_dt));
        point.duration_s = point.horizon * solver.control_dt;
        if (outcome) {
            point = outcome->point;
            if (!winner || outcome->point.costs.total < winner->point.costs.total) {
                winner = std::move(outcome);
            }
        }
        result.curve.push_back(point);
    }
    if (!winner) {
        throw PlanningError("optimize_traj: every duration-grid point failed");
    }

    NonlinearPlan& plan = result.best;
    plan.coeffs = winner->coeffs;
    plan.horizon = winner->point.horizon;
    plan.duration_s = winner->point.duration_s;
    plan.model_costs = winner->point.costs;
    plan.commands = expand(winner->coeffs, winner->basis);
    for (Vec6& u : plan.commands) {
        u = u.cwiseMax(0.0);
    }
    plan.rollout = replay_on_plant(config, x0, plan.commands, solver.control_dt, weights.window);
    plan.costs = score_rollout(plan.rollout, plan.commands, goal, plan.horizon, solver.control_dt,
                               weights);
    return result;
}

}  // namespace oculo
