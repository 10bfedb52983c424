#pragma once

#include "oculo/rotations.hpp"

#include <array>
#include <string>
#include <vector>

namespace oculo {

/// Muscle indices, fixed command order [IR, MR, SR, LR, IO, SO].
enum Muscle : int { IR = 0, MR = 1, SR = 2, LR = 3, IO = 4, SO = 5 };

inline constexpr int kNumMuscles = 6;
extern const std::array<const char*, kNumMuscles> kMuscleNames;

class DegenerateGeometryError : public std::runtime_error {
public:
    explicit DegenerateGeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometric and physical constants of the cable-driven eye.
///
/// Head frame: x forward (straight-ahead gaze), y left, z up. Eye-frame
/// insertion points Q lie on the globe surface. Cables run as straight
/// chords from their insertion to a head-fixed routing point; winding u_m
/// on the spindle adds r_spindle * u_m to the stretched length.
struct PlantConfig {
    Mat3 inertia = Mat3::Identity();       // kg m^2
    Mat3 damping = Mat3::Identity();       // N m s
    Vec6 stiffness = Vec6::Zero();         // k per cable, N
    Vec6 rest_length = Vec6::Zero();       // l0m, m
    double spindle_radius = 0.0;           // m
    double eye_radius = 0.0;               // m
    std::array<Vec3, kNumMuscles> insertion_eye{};    // Q_m, eye frame, m
    std::array<Vec3, kNumMuscles> routing_head{};     // P_head,m, head frame, m
    double dt = 1e-3;                      // integration step, s

    /// Default geometry/physics used throughout the toolkit.
    static PlantConfig standard();

    /// Left/right symmetric variant (no medial routing shift); used by
    /// symmetry tests only.
    static PlantConfig symmetric();

    void validate() const;  // throws std::invalid_argument on bad invariants
};

/// Orientation of the eye frame in the head frame plus angular velocity
/// expressed in the eye frame.
struct EyeState {
    Mat3 orientation = Mat3::Identity();
    Vec3 omega = Vec3::Zero();  // rad/s

    /// State as the 6-vector [r; omega] with r the rotation vector (rad/2).
    Vec6 as_vector() const;
    static EyeState from_vector(const Vec6& x);
};

struct CableForce {
    Vec3 force = Vec3::Zero();  // eye frame, N
    double tension = 0.0;       // N, >= 0 (slack clamped)
    double length = 0.0;        // stretched length, m
    bool slack = false;         // true when the Hooke tension was clamped at 0
};

/// Stretched cable length: chord from the rotated insertion point to the
/// routing point plus the wound length r_spindle * u_m.
double cable_length(const PlantConfig& config, const EyeState& state, const Vec6& u, int m);

CableForce cable_force(const PlantConfig& config, const EyeState& state, const Vec6& u, int m);

struct TorqueBreakdown {
    Vec3 net = Vec3::Zero();                       // N m, eye frame
    Vec3 elastic = Vec3::Zero();                   // sum of muscle torques
    Vec3 damping = Vec3::Zero();                   // -D omega
    std::array<Vec3, kNumMuscles> per_muscle{};
    std::array<CableForce, kNumMuscles> forces{};
};

TorqueBreakdown net_torque(const PlantConfig& config, const EyeState& state, const Vec6& u);

/// I^-1 (tau_net - omega x I omega).
Vec3 angular_acceleration(const PlantConfig& config, const EyeState& state, const Vec6& u);

/// One fixed-step RK4 step with the orientation updated on the group and
/// re-orthonormalized.
EyeState step(const PlantConfig& config, const EyeState& state, const Vec6& u, double dt);

struct Trajectory {
    std::vector<double> t;         // s
    std::vector<EyeState> states;  // states[i] at t[i]
    std::vector<Vec6> commands;    // command held from t[i] to t[i+1]
    std::vector<Vec6> tensions;    // per-cable tension at t[i], N

    std::size_t size() const { return states.size(); }
};

/// Roll the plant out under a zero-order-held command sequence. The result
/// has commands.size() + 1 samples (initial state included).
Trajectory simulate(const PlantConfig& config, const EyeState& initial,
                    const std::vector<Vec6>& commands, double dt);

/// Normalized rotation direction reached `horizon_s` after winding motor m by
/// `delta_u` from the equilibrium command `u0` (all other motors held).
Vec3 muscle_pull_probe(const PlantConfig& config, const Vec6& u0, int m,
                       double delta_u = 0.1, double horizon_s = 0.1);

/// Kinetic plus elastic energy (taut cables only), J.
double mechanical_energy(const PlantConfig& config, const EyeState& state, const Vec6& u);

}  // namespace oculo
