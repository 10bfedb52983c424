#pragma once

#include "oculo/plant.hpp"

namespace oculo {

using Mat6 = Eigen::Matrix<double, 6, 6>;

class NotAnEquilibriumError : public std::runtime_error {
public:
    explicit NotAnEquilibriumError(const std::string& what) : std::runtime_error(what) {}
};

class SlackBoundaryError : public std::runtime_error {
public:
    explicit SlackBoundaryError(const std::string& what) : std::runtime_error(what) {}
};

/// Linear model of the plant in Lie-group local coordinates xi = [eta; dw]
/// around an equilibrium (x_bar, u_bar): xi_dot = A xi + B du.
struct LinearModel {
    Mat6 a = Mat6::Zero();
    Mat6 b = Mat6::Zero();
    Mat6 a_d = Mat6::Zero();   // discrete-time, exact expm at dt
    Mat6 b_d = Mat6::Zero();
    EyeState equilibrium_state;
    Vec6 equilibrium_command = Vec6::Zero();
    double dt = 3e-3;          // discretization step, s
};

/// Continuous-time local dynamics [eta_dot; dw_dot] evaluated through the
/// nonlinear plant (eta_dot = -(w)^ eta + dw to first order).
Vec6 local_dynamics(const PlantConfig& config, const LinearModel& model,
                    const Vec6& xi, const Vec6& du);

/// Central-difference Jacobians of the local dynamics at the equilibrium.
/// Requires a true equilibrium (elastic torque residual <= torque_tol) with
/// every cable taut by at least tension_margin.
LinearModel linearize(const PlantConfig& config, const EyeState& x_bar, const Vec6& u_bar,
                      double dt = 3e-3, double fd_step = 1e-6,
                      double torque_tol = 1e-6, double tension_margin = 1e-4);

EyeState local_to_global(const LinearModel& model, const Vec6& xi);
Vec6 global_to_local(const LinearModel& model, const EyeState& state);

enum class PerturbationKind { Orientation, Velocity };

/// Max-over-time relative discrepancy between the free (du = 0) responses of
/// the linear model and the nonlinear plant, starting from the equilibrium
/// perturbed along `axis` by `magnitude` (rad for orientation, rad/s for
/// velocity). Discrepancy and magnitude are compared in degrees.
double linearization_error(const PlantConfig& config, const LinearModel& model,
                           PerturbationKind kind, const Vec3& axis, double magnitude,
                           double horizon_s = 0.2);

}  // namespace oculo
