#include "oculo/plant.hpp"

#include <cmath>

namespace oculo {

const std::array<const char*, kNumMuscles> kMuscleNames = {"IR", "MR", "SR", "LR", "IO", "SO"};

namespace {

// Rectus insertions sit 25 deg anterior of the equator; recti routing points
// are behind the eye with a common medial (+y) shift so that MR is shorter
// than LR at primary position. Obliques insert posterior-laterally and route
// medial-anteriorly, giving mixed torsional/vertical pull directions.
constexpr double kEyeRadius = 0.04;          // m
constexpr double kRectusAnteriorDeg = 25.0;  // deg anterior of the equator
constexpr double kRectusRoutingX = -0.08;    // m
constexpr double kRectusRoutingOffset = 0.030;  // m lateral offset at the back
constexpr double kMedialShift = 0.008;       // m, +y shift of recti routing
constexpr double kEyeMass = 0.24;            // kg
constexpr double kDampingNms = 0.019;         // N m s, isotropic
constexpr double kCableStiffness = 60.0;     // N
constexpr double kSpindleRadius = 0.016;     // m
// Winding angle absorbed by cable slack at the primary position: the rest
// length exceeds the primary chord by kSpindleRadius * kSlackWindRad, so a
// cable only becomes taut once its motor has wound past that angle. This
// keeps holding tensions moderate while dT/du stays large.
constexpr double kSlackWindRad = 1.2;        // rad

PlantConfig base_config(double medial_shift, bool symmetric_obliques) {
    PlantConfig c;
    c.eye_radius = kEyeRadius;
    c.spindle_radius = kSpindleRadius;
    c.inertia = (0.4 * kEyeMass * kEyeRadius * kEyeRadius) * Mat3::Identity();
    c.damping = kDampingNms * Mat3::Identity();
    c.stiffness = Vec6::Constant(kCableStiffness);
    c.dt = 1e-3;

    const double a = kRectusAnteriorDeg * M_PI / 180.0;
    const double ax = kEyeRadius * std::sin(a);   // anterior offset on the globe
    const double al = kEyeRadius * std::cos(a);   // lateral offset on the globe
    c.insertion_eye[MR] = Vec3(ax, al, 0.0);
    c.insertion_eye[LR] = Vec3(ax, -al, 0.0);
    c.insertion_eye[SR] = Vec3(ax, 0.0, al);
    c.insertion_eye[IR] = Vec3(ax, 0.0, -al);

    c.routing_head[MR] = Vec3(kRectusRoutingX, kRectusRoutingOffset + medial_shift, 0.0);
    c.routing_head[LR] = Vec3(kRectusRoutingX, -kRectusRoutingOffset + medial_shift, 0.0);
    c.routing_head[SR] = Vec3(kRectusRoutingX, medial_shift, kRectusRoutingOffset);
    c.routing_head[IR] = Vec3(kRectusRoutingX, medial_shift, -kRectusRoutingOffset);

    if (symmetric_obliques) {
        const Vec3 oblique = kEyeRadius * Vec3(-0.62, 0.0, -0.78).normalized();
        c.insertion_eye[IO] = oblique;
        c.insertion_eye[SO] = Vec3(oblique.x(), oblique.y(), -oblique.z());
        c.routing_head[IO] = Vec3(0.02, 0.0, -0.015);
        c.routing_head[SO] = Vec3(0.02, 0.0, 0.015);
    } else {
        const Vec3 oblique = kEyeRadius * Vec3(-0.35, -0.75, -0.55).normalized();
        c.insertion_eye[IO] = oblique;
        c.insertion_eye[SO] = Vec3(oblique.x(), oblique.y(), -oblique.z());
        c.routing_head[IO] = Vec3(0.02, 0.05, -0.015);
        c.routing_head[SO] = Vec3(0.02, 0.05, 0.015);
    }

    // Rest lengths exceed the primary-position chord by a fixed wound length;
    // tension at primary is k/l0 * r * (u - kSlackWindRad) for u past the
    // slack angle.
    for (int m = 0; m < kNumMuscles; ++m) {
        c.rest_length[m] = (c.insertion_eye[m] - c.routing_head[m]).norm() +
                           kSpindleRadius * kSlackWindRad;
    }
    c.validate();
    return c;
}

}  // namespace

PlantConfig PlantConfig::standard() { return base_config(kMedialShift, false); }

PlantConfig PlantConfig::symmetric() { return base_config(0.0, true); }

void PlantConfig::validate() const {
    if (!(spindle_radius > 0.0) || !(eye_radius > 0.0)) {
        throw std::invalid_argument("PlantConfig: radii must be positive");
    }
    if ((stiffness.array() <= 0.0).any() || (rest_length.array() <= 0.0).any()) {
        throw std::invalid_argument("PlantConfig: stiffness and rest lengths must be positive");
    }
    if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("PlantConfig: inertia must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> ie(inertia);
    if (ie.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("PlantConfig: inertia must be positive definite");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> de(0.5 * (damping + damping.transpose()));
    if (de.eigenvalues().minCoeff() < 0.0) {
        throw std::invalid_argument("PlantConfig: damping must be positive semidefinite");
    }
    for (int m = 0; m < kNumMuscles; ++m) {
        if (std::abs(insertion_eye[m].norm() - eye_radius) > 1e-9) {
            throw std::invalid_argument("PlantConfig: insertion points must lie on the globe");
        }
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("PlantConfig: dt must be positive");
    }
}

Vec6 EyeState::as_vector() const {
    Vec6 x;
    x.head<3>() = rotvec_of(orientation);
    x.tail<3>() = omega;
    return x;
}

EyeState EyeState::from_vector(const Vec6& x) {
    EyeState s;
    s.orientation = matrix_of(Vec3(x.head<3>()));
    s.omega = x.tail<3>();
    return s;
}

double cable_length(const PlantConfig& config, const EyeState& state, const Vec6& u, int m) {
    const Vec3 insertion_head = state.orientation * config.insertion_eye[m];
    return (insertion_head - config.routing_head[m]).norm() + config.spindle_radius * u[m];
}

CableForce cable_force(const PlantConfig& config, const EyeState& state, const Vec6& u, int m) {
    CableForce out;
    const Vec3 insertion_head = state.orientation * config.insertion_eye[m];
    const Vec3 chord = config.routing_head[m] - insertion_head;  // pulling direction
    const double chord_len = chord.norm();
    if (chord_len < 1e-9) {
        throw DegenerateGeometryError("cable_force: insertion coincides with routing point");
    }
    out.length = chord_len + config.spindle_radius * u[m];
    const double hooke =
        config.stiffness[m] / config.rest_length[m] * (out.length - config.rest_length[m]);
    out.slack = hooke <= 0.0;
    out.tension = out.slack ? 0.0 : hooke;
    // Unit pulling direction in the eye frame.
    const Vec3 dir_eye = state.orientation.transpose() * (chord / chord_len);
    out.force = out.tension * dir_eye;
    return out;
}

TorqueBreakdown net_torque(const PlantConfig& config, const EyeState& state, const Vec6& u) {
    TorqueBreakdown out;
    for (int m = 0; m < kNumMuscles; ++m) {
        out.forces[m] = cable_force(config, state, u, m);
        out.per_muscle[m] = config.insertion_eye[m].cross(out.forces[m].force);
        out.elastic += out.per_muscle[m];
    }
    out.damping = -config.damping * state.omega;
    out.net = out.elastic + out.damping;
    return out;
}

Vec3 angular_acceleration(const PlantConfig& config, const EyeState& state, const Vec6& u) {
    const Vec3 tau = net_torque(config, state, u).net;
    const Vec3 gyro = state.omega.cross(config.inertia * state.omega);
    return config.inertia.ldlt().solve(tau - gyro);
}

namespace {

struct Derivative {
    Vec3 body_rate;  // orientation rate in exponential coordinates
    Vec3 alpha;
};

Derivative derivative(const PlantConfig& config, const EyeState& state, const Vec6& u) {
    return {state.omega, angular_acceleration(config, state, u)};
}

EyeState advance(const EyeState& base, const Derivative& d, double h) {
    EyeState s;
    s.orientation = base.orientation * exp_map(h * d.body_rate);
    s.omega = base.omega + h * d.alpha;
    return s;
}

}  // namespace

EyeState step(const PlantConfig& config, const EyeState& state, const Vec6& u, double dt) {
    const Derivative k1 = derivative(config, state, u);
    const Derivative k2 = derivative(config, advance(state, k1, 0.5 * dt), u);
    const Derivative k3 = derivative(config, advance(state, k2, 0.5 * dt), u);
    const Derivative k4 = derivative(config, advance(state, k3, dt), u);

    EyeState next;
    const Vec3 rate =
        (k1.body_rate + 2.0 * k2.body_rate + 2.0 * k3.body_rate + k4.body_rate) / 6.0;
    next.orientation = orthonormalize(state.orientation * exp_map(dt * rate));
    next.omega = state.omega + dt / 6.0 * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha);
    return next;
}

Trajectory simulate(const PlantConfig& config, const EyeState& initial,
                    const std::vector<Vec6>& commands, double dt) {
    Trajectory traj;
    const std::size_t n = commands.size();
    traj.t.reserve(n + 1);
    traj.states.reserve(n + 1);
    traj.commands.reserve(n + 1);
    traj.tensions.reserve(n + 1);

    EyeState state = initial;
    for (std::size_t i = 0; i <= n; ++i) {
        const Vec6& u = commands[i < n ? i : n - 1];
        traj.t.push_back(static_cast<double>(i) * dt);
        traj.states.push_back(state);
        traj.commands.push_back(u);
        Vec6 tension;
        for (int m = 0; m < kNumMuscles; ++m) {
            tension[m] = cable_force(config, state, u, m).tension;
        }
        traj.tensions.push_back(tension);
        if (i < n) {
            state = step(config, state, u, dt);
        }
    }
    return traj;
}

Vec3 muscle_pull_probe(const PlantConfig& config, const Vec6& u0, int m,
                       double delta_u, double horizon_s) {
    Vec6 u = u0;
    u[m] += delta_u;
    const int steps = static_cast<int>(std::lround(horizon_s / config.dt));
    EyeState state;  // primary position equilibrium
    for (int i = 0; i < steps; ++i) {
        state = step(config, state, u, config.dt);
    }
    const Vec3 r = rotvec_of(state.orientation);
    const double n = r.norm();
    if (n < 1e-12) {
        return Vec3::Zero();
    }
    return r / n;
}

double mechanical_energy(const PlantConfig& config, const EyeState& state, const Vec6& u) {
    double e = 0.5 * state.omega.dot(config.inertia * state.omega);
    for (int m = 0; m < kNumMuscles; ++m) {
        const CableForce f = cable_force(config, state, u, m);
        const double stretch = f.length - config.rest_length[m];
        if (stretch > 0.0) {
            e += 0.5 * config.stiffness[m] / config.rest_length[m] * stretch * stretch;
        }
    }
    return e;
}

}  // namespace oculo
