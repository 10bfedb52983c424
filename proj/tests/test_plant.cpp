#include "doctest.h"

#include "oculo/plant.hpp"
#include "oculo/pretension.hpp"

#include <random>

using namespace oculo;

namespace {
constexpr double kDeg = M_PI / 180.0;

Vec6 pretension_command(const PlantConfig& config) {
    PretensionProblem p;
    p.theta = 2.0;
    return solve_pretension(config, p).u0;
}
}  // namespace

TEST_CASE("config invariants") {
    const PlantConfig c = PlantConfig::standard();
    CHECK_NOTHROW(c.validate());
    for (int m = 0; m < kNumMuscles; ++m) {
        CHECK(std::abs(c.insertion_eye[m].norm() - c.eye_radius) < 1e-9);
    }
    PlantConfig bad = c;
    bad.stiffness[2] = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("cable length formula") {
    const PlantConfig c = PlantConfig::standard();
    const EyeState s;
    Vec6 u = Vec6::Zero();
    for (int m = 0; m < kNumMuscles; ++m) {
        const double straight = (c.insertion_eye[m] - c.routing_head[m]).norm();
        CHECK(cable_length(c, s, u, m) == doctest::Approx(straight).epsilon(1e-12));
    }
    Vec6 u2 = u;
    u2[LR] += 0.37;
    CHECK(cable_length(c, s, u2, LR) - cable_length(c, s, u, LR) ==
          doctest::Approx(c.spindle_radius * 0.37).epsilon(1e-12));
}

TEST_CASE("MR is shorter than LR at primary position") {
    const PlantConfig c = PlantConfig::standard();
    const EyeState s;
    const Vec6 u = Vec6::Zero();
    CHECK(cable_length(c, s, u, MR) < cable_length(c, s, u, LR));
}

TEST_CASE("cable force obeys Hooke with slack clamp") {
    PlantConfig c = PlantConfig::standard();
    const EyeState s;

    // Wound exactly to the rest length: zero tension.
    const double chord = (c.insertion_eye[MR] - c.routing_head[MR]).norm();
    Vec6 u = Vec6::Zero();
    u[MR] = (c.rest_length[MR] - chord) / c.spindle_radius;
    CHECK(cable_force(c, s, u, MR).tension == doctest::Approx(0.0).epsilon(1e-9));

    // Below rest length: clamped to zero, not negative.
    PlantConfig shrunk = c;
    shrunk.rest_length[MR] = c.rest_length[MR] * 1.5;
    const CableForce slack = cable_force(shrunk, s, Vec6::Zero(), MR);
    CHECK(slack.tension == 0.0);
    CHECK(slack.slack);
    CHECK(slack.force.norm() == 0.0);

    // Ten percent stretch gives k * 0.1 newtons of tension.
    u[MR] = (1.1 * c.rest_length[MR] - chord) / c.spindle_radius;
    const CableForce f = cable_force(c, s, u, MR);
    CHECK(f.tension == doctest::Approx(0.1 * c.stiffness[MR]).epsilon(1e-9));
    CHECK(f.force.norm() == doctest::Approx(f.tension).epsilon(1e-12));
}

TEST_CASE("net torque structure") {
    const PlantConfig c = PlantConfig::standard();
    EyeState s;

    // All slack, omega = 0 -> zero torque.
    PlantConfig loose = c;
    loose.rest_length *= 2.0;
    CHECK(net_torque(loose, s, Vec6::Zero()).net.norm() == 0.0);

    // All slack, omega != 0 -> exactly -D omega.
    s.omega = Vec3(0.5, -0.2, 1.0);
    const TorqueBreakdown tq = net_torque(loose, s, Vec6::Zero());
    CHECK((tq.net + c.damping * s.omega).norm() < 1e-15);

    // At pretension, elastic torque vanishes.
    const Vec6 u0 = pretension_command(c);
    EyeState rest;
    CHECK(net_torque(c, rest, u0).elastic.norm() < 1e-9);
}

TEST_CASE("frame consistency of the net torque") {
    const PlantConfig c = PlantConfig::standard();
    EyeState s;
    s.orientation = exp_map(Vec3(0.05, -0.2, 0.3));
    s.omega = Vec3(0.4, 0.1, -0.6);
    const Vec6 u = pretension_command(c) + Vec6::Constant(0.2);

    // Head-frame recomputation: tau_h = sum (R Q) x f_h - R D R^T (R w).
    Vec3 tau_head = Vec3::Zero();
    for (int m = 0; m < kNumMuscles; ++m) {
        const Vec3 q_head = s.orientation * c.insertion_eye[m];
        const Vec3 chord = c.routing_head[m] - q_head;
        const CableForce f = cable_force(c, s, u, m);
        tau_head += q_head.cross(f.tension * chord.normalized());
    }
    tau_head -= s.orientation * c.damping * s.omega;
    const Vec3 tau_eye = net_torque(c, s, u).net;
    CHECK((s.orientation * tau_eye - tau_head).norm() < 1e-9);
}

TEST_CASE("angular acceleration") {
    const PlantConfig c = PlantConfig::standard();
    EyeState s;
    const Vec6 u0 = pretension_command(c);
    CHECK(angular_acceleration(c, s, u0).norm() < 1e-6);

    // Spherical inertia: gyroscopic term vanishes, alpha = tau / I.
    s.omega = Vec3(1.0, -2.0, 0.5);
    const Vec3 tau = net_torque(c, s, u0).net;
    const double inertia = c.inertia(0, 0);
    CHECK((angular_acceleration(c, s, u0) - tau / inertia).norm() < 1e-9);

    // Integrator consistency: alpha matches finite-differenced omega.
    EyeState fwd = step(c, s, u0, 1e-6);
    EyeState bwd = step(c, s, u0, -1e-6);
    const Vec3 fd = (fwd.omega - bwd.omega) / 2e-6;
    const Vec3 alpha = angular_acceleration(c, s, u0);
    CHECK((fd - alpha).norm() / alpha.norm() < 1e-3);
}

TEST_CASE("step equilibrium and planar case") {
    const PlantConfig c = PlantConfig::standard();
    const Vec6 u0 = pretension_command(c);
    EyeState s;
    const EyeState next = step(c, s, u0, c.dt);
    CHECK(rotation_angle(next.orientation) < 1e-9);
    CHECK(next.omega.norm() < 1e-9);

    // Pure z torque from rest: axis stays aligned with z.
    PlantConfig loose = c;
    loose.rest_length *= 2.0;  // all cables slack: no elastic torque
    EyeState spun;
    spun.omega = Vec3(0, 0, 2.0);
    const EyeState after = step(loose, spun, Vec6::Zero(), c.dt);
    const Vec3 axis = log_map(after.orientation).normalized();
    CHECK(std::abs(axis.z()) > 1.0 - 1e-6);
}

TEST_CASE("step halving changes the 200 ms endpoint by less than 0.1%") {
    const PlantConfig c = PlantConfig::standard();
    const Vec6 u0 = pretension_command(c);
    Vec6 u = u0;
    u[LR] += 0.8;
    u[MR] -= 0.5;

    auto endpoint = [&](double dt) {
        EyeState s;
        const int n = static_cast<int>(std::lround(0.2 / dt));
        for (int i = 0; i < n; ++i) {
            s = step(c, s, u, dt);
        }
        return s;
    };
    const EyeState coarse = endpoint(1e-3);
    const EyeState fine = endpoint(5e-4);
    const double amplitude = rotation_angle(fine.orientation);
    const double diff = rotation_angle(coarse.orientation.transpose() * fine.orientation);
    CHECK(diff / amplitude < 1e-3);
}

TEST_CASE("simulate holds equilibrium and matches step composition") {
    const PlantConfig c = PlantConfig::standard();
    const Vec6 u0 = pretension_command(c);

    const std::vector<Vec6> constant(500, u0);
    const Trajectory traj = simulate(c, EyeState{}, constant, c.dt);
    REQUIRE(traj.size() == 501);
    for (const EyeState& s : traj.states) {
        CHECK(rotation_angle(s.orientation) < 0.1 * kDeg);
    }

    // Definitional: trajectory equals repeated step composition.
    std::vector<Vec6> commands;
    Vec6 u = u0;
    for (int i = 0; i < 50; ++i) {
        u[SR] += 0.01;
        commands.push_back(u);
    }
    const Trajectory t2 = simulate(c, EyeState{}, commands, c.dt);
    EyeState s;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CHECK((t2.states[i].orientation - s.orientation).norm() < 1e-15);
        s = step(c, s, commands[i], c.dt);
    }
    CHECK((t2.states.back().orientation - s.orientation).norm() < 1e-15);
}

TEST_CASE("horizontal pulse-step stays horizontal") {
    const PlantConfig c = PlantConfig::standard();
    const Vec6 u0 = pretension_command(c);

    std::vector<Vec6> commands;
    Vec6 pulse = u0;
    pulse[LR] += 0.8;
    pulse[MR] -= 0.8;
    for (int i = 0; i < 60; ++i) {
        commands.push_back(pulse);
    }
    Vec6 hold = u0;
    hold[LR] += 0.25;
    hold[MR] -= 0.25;
    for (int i = 0; i < 200; ++i) {
        commands.push_back(hold);
    }
    const Trajectory traj = simulate(c, EyeState{}, commands, c.dt);
    const Vec3 r = rotvec_of(traj.states.back().orientation);
    CHECK(r.z() < 0.0);  // rightward
    CHECK(std::abs(r.x()) < 0.1 * std::abs(r.z()));
    CHECK(std::abs(r.y()) < 0.1 * std::abs(r.z()));
}

TEST_CASE("energy dissipates while commands are held") {
    const PlantConfig c = PlantConfig::standard();
    const Vec6 u0 = pretension_command(c);
    Vec6 u = u0;
    u[LR] += 0.6;

    EyeState s;
    s.omega = Vec3(0.3, -0.5, 1.5);
    double prev = mechanical_energy(c, s, u);
    for (int i = 0; i < 300; ++i) {
        bool slack_before = false, slack_after = false;
        for (int m = 0; m < kNumMuscles; ++m) {
            slack_before |= cable_force(c, s, u, m).slack;
        }
        const EyeState next = step(c, s, u, c.dt);
        for (int m = 0; m < kNumMuscles; ++m) {
            slack_after |= cable_force(c, next, u, m).slack;
        }
        const double e = mechanical_energy(c, next, u);
        if (!slack_before && !slack_after) {
            CHECK(e <= prev * (1.0 + 1e-9) + 1e-12);
        }
        prev = e;
        s = next;
    }
}

TEST_CASE("overdamped step response has no overshoot") {
    const PlantConfig c = PlantConfig::standard();
    const Vec6 u0 = pretension_command(c);
    Vec6 u = u0;
    u[LR] += 0.05;
    u[MR] -= 0.05;

    const std::vector<Vec6> commands(1200, u);
    const Trajectory traj = simulate(c, EyeState{}, commands, c.dt);
    const double final_amp = rotvec_of(traj.states.back().orientation).norm();
    double peak = 0.0;
    for (const EyeState& s : traj.states) {
        peak = std::max(peak, rotvec_of(s.orientation).norm());
    }
    CHECK(peak <= final_amp * 1.01);
}

TEST_CASE("passive step-response time constant is in the human range") {
    const PlantConfig c = PlantConfig::standard();
    const Vec6 u0 = pretension_command(c);
    Vec6 u = u0;
    u[LR] += 0.05;
    u[MR] -= 0.05;

    const std::vector<Vec6> commands(2000, u);
    const Trajectory traj = simulate(c, EyeState{}, commands, c.dt);
    const double final_amp = rotvec_of(traj.states.back().orientation).norm();
    double t63 = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (rotvec_of(traj.states[i].orientation).norm() >= 0.632 * final_amp) {
            t63 = traj.t[i];
            break;
        }
    }
    CHECK(t63 > 0.005);
    CHECK(t63 < 0.15);
}

TEST_CASE("muscle pull probe directions") {
    const PlantConfig c = PlantConfig::standard();
    const Vec6 u0 = pretension_command(c);

    const Vec3 lr = muscle_pull_probe(c, u0, LR);
    CHECK(std::abs(lr.z()) > 0.9);
    CHECK(lr.z() < 0.0);  // rightward = negative z

    const Vec3 mr = muscle_pull_probe(c, u0, MR);
    CHECK(std::abs(mr.z()) > 0.9);
    CHECK(mr.z() > 0.0);  // leftward = positive z

    for (int m : {int(SR), int(IR), int(IO), int(SO)}) {
        const Vec3 d = muscle_pull_probe(c, u0, m);
        CHECK(std::abs(d.z()) < 0.5);  // mixed torsional/vertical pull
    }
    // SO pulls down with torsion.
    const Vec3 so = muscle_pull_probe(c, u0, SO);
    CHECK(std::abs(so.x()) > 0.2);
    const Vec3 io = muscle_pull_probe(c, u0, IO);
    CHECK(so.y() * io.y() < 0.0);  // obliques are a vertical antagonist pair
}
