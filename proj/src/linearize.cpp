#include "oculo/linearize.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace oculo {

Vec6 local_dynamics(const PlantConfig& config, const LinearModel& model,
                    const Vec6& xi, const Vec6& du) {
    const Vec3 eta = xi.head<3>();
    const Vec3 dw = xi.tail<3>();
    EyeState state;
    state.orientation = model.equilibrium_state.orientation * exp_map(eta);
    state.omega = model.equilibrium_state.omega + dw;
    Vec6 out;
    out.head<3>() = -state.omega.cross(eta) + dw;
    out.tail<3>() = angular_acceleration(config, state, model.equilibrium_command + du);
    return out;
}

LinearModel linearize(const PlantConfig& config, const EyeState& x_bar, const Vec6& u_bar,
                      double dt, double fd_step, double torque_tol, double tension_margin) {
    const TorqueBreakdown tq = net_torque(config, x_bar, u_bar);
    if (tq.net.norm() > torque_tol || x_bar.omega.norm() > torque_tol) {
        throw NotAnEquilibriumError("linearize: residual torque or velocity above tolerance");
    }
    for (int m = 0; m < kNumMuscles; ++m) {
        if (tq.forces[m].tension < tension_margin) {
            throw SlackBoundaryError(std::string("linearize: cable ") + kMuscleNames[m] +
                                     " is at the slack boundary");
        }
    }

    LinearModel model;
    model.equilibrium_state = x_bar;
    model.equilibrium_command = u_bar;
    model.dt = dt;

    for (int j = 0; j < 6; ++j) {
        Vec6 xi = Vec6::Zero();
        xi[j] = fd_step;
        const Vec6 fwd = local_dynamics(config, model, xi, Vec6::Zero());
        xi[j] = -fd_step;
        const Vec6 bwd = local_dynamics(config, model, xi, Vec6::Zero());
        model.a.col(j) = (fwd - bwd) / (2.0 * fd_step);
    }
    for (int j = 0; j < 6; ++j) {
        Vec6 du = Vec6::Zero();
        du[j] = fd_step;
        const Vec6 fwd = local_dynamics(config, model, Vec6::Zero(), du);
        du[j] = -fd_step;
        const Vec6 bwd = local_dynamics(config, model, Vec6::Zero(), du);
        model.b.col(j) = (fwd - bwd) / (2.0 * fd_step);
    }

    // Exact zero-order-hold discretization via the augmented matrix exponential.
    Eigen::Matrix<double, 12, 12> aug = Eigen::Matrix<double, 12, 12>::Zero();
    aug.topLeftCorner<6, 6>() = model.a;
    aug.topRightCorner<6, 6>() = model.b;
    const Eigen::Matrix<double, 12, 12> expm = (aug * dt).exp();
    model.a_d = expm.topLeftCorner<6, 6>();
    model.b_d = expm.topRightCorner<6, 6>();
    return model;
}

EyeState local_to_global(const LinearModel& model, const Vec6& xi) {
    const Vec3 eta = xi.head<3>();
    if (eta.norm() >= M_PI) {
        throw OutOfChartError("local_to_global: |eta| >= pi");
    }
    EyeState s;
    s.orientation = model.equilibrium_state.orientation * exp_map(eta);
    s.omega = model.equilibrium_state.omega + xi.tail<3>();
    return s;
}

Vec6 global_to_local(const LinearModel& model, const EyeState& state) {
    Vec6 xi;
    xi.head<3>() = log_map(model.equilibrium_state.orientation.transpose() * state.orientation);
    xi.tail<3>() = state.omega - model.equilibrium_state.omega;
    return xi;
}

double linearization_error(const PlantConfig& config, const LinearModel& model,
                           PerturbationKind kind, const Vec3& axis, double magnitude,
                           double horizon_s) {
    if (magnitude == 0.0) {
        return 0.0;
    }
    constexpr double kRad2Deg = 180.0 / M_PI;
    Vec6 xi0 = Vec6::Zero();
    if (kind == PerturbationKind::Orientation) {
        xi0.head<3>() = magnitude * axis.normalized();
    } else {
        xi0.tail<3>() = magnitude * axis.normalized();
    }

    // Nonlinear free response at the plant step, sampled at the model step.
    EyeState state = local_to_global(model, xi0);
    const int samples = static_cast<int>(std::lround(horizon_s / model.dt));
    const int sub = static_cast<int>(std::lround(model.dt / config.dt));

    Vec6 xi = xi0;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        for (int s = 0; s < sub; ++s) {
            state = step(config, state, model.equilibrium_command, config.dt);
        }
        xi = model.a_d * xi;
        const EyeState predicted = local_to_global(model, xi);
        // "Accuracy error": orientation discrepancy between the two free
        // responses, in degrees, relative to the perturbation size (deg for
        // orientation perturbations, deg/s for velocity perturbations).
        const double ori_err =
            rotation_angle(predicted.orientation.transpose() * state.orientation) * kRad2Deg;
        worst = std::max(worst, ori_err);
    }
    const double magnitude_deg = magnitude * kRad2Deg;
    return worst / magnitude_deg;
}

}  // namespace oculo
