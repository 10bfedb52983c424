#include "doctest.h"

#include "oculo/plant.hpp"
#include "oculo/pretension.hpp"

#include <random>

using namespace oculo;

namespace {
constexpr double kDeg = M_PI / 180.0;

// Residuals are always re-checked through the plant, never via the solver's
// own report.
void check_solution(const PlantConfig& config, const PretensionProblem& problem,
                    const PretensionResult& result) {
    const TorqueBreakdown tq = net_torque(config, problem.target, result.u0);
    CHECK(tq.elastic.norm() <= 1e-6);
    for (int m = 0; m < kNumMuscles; ++m) {
        CHECK(cable_force(config, problem.target, result.u0, m).tension >=
              problem.tension_margin - 1e-9);
    }
    for (const auto& [a, b] : antagonist_pairs()) {
        CHECK(0.5 * (result.u0[a] + result.u0[b]) >= problem.theta - 1e-9);
    }
}
}  // namespace

TEST_CASE("primary position with theta = 2 gives angles near 2 rad") {
    const PlantConfig c = PlantConfig::standard();
    PretensionProblem p;
    p.theta = 2.0;
    const PretensionResult r = solve_pretension(c, p);
    check_solution(c, p, r);
    for (int m = 0; m < kNumMuscles; ++m) {
        CHECK(r.u0[m] > 1.8);
        CHECK(r.u0[m] < 2.2);
    }
}

TEST_CASE("symmetric geometry gives equal antagonist angles") {
    const PlantConfig c = PlantConfig::symmetric();
    PretensionProblem p;
    p.theta = 2.0;
    const PretensionResult r = solve_pretension(c, p);
    check_solution(c, p, r);
    CHECK(r.u0[MR] == doctest::Approx(r.u0[LR]).epsilon(1e-9));
    CHECK(r.u0[SR] == doctest::Approx(r.u0[IR]).epsilon(1e-9));
    CHECK(r.u0[SO] == doctest::Approx(r.u0[IO]).epsilon(1e-9));
}

TEST_CASE("equilibrium holds over 500 ms") {
    const PlantConfig c = PlantConfig::standard();
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> d(-20 * kDeg, 20 * kDeg);
    for (int trial = 0; trial < 5; ++trial) {
        PretensionProblem p;
        p.theta = 2.0;
        const double pitch = d(rng);
        const double yaw = d(rng);
        p.target.orientation = matrix_of(EulerAngles{listing_torsion(pitch, yaw), pitch, yaw});
        const PretensionResult r = solve_pretension(c, p);
        check_solution(c, p, r);

        const std::vector<Vec6> constant(500, r.u0);
        const Trajectory traj = simulate(c, p.target, constant, c.dt);
        for (const EyeState& s : traj.states) {
            const double drift =
                rotation_angle(p.target.orientation.transpose() * s.orientation);
            CHECK(drift < 0.1 * kDeg);
        }
    }
}

TEST_CASE("raising theta never decreases the norm") {
    const PlantConfig c = PlantConfig::standard();
    double prev = 0.0;
    for (double theta : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        PretensionProblem p;
        p.theta = theta;
        const PretensionResult r = solve_pretension(c, p);
        check_solution(c, p, r);
        CHECK(r.objective >= prev - 1e-12);
        prev = r.objective;
    }
}

TEST_CASE("mirrored orientations give mirrored solutions on the symmetric config") {
    const PlantConfig c = PlantConfig::symmetric();
    for (double yaw : {5 * kDeg, 12 * kDeg, 20 * kDeg}) {
        PretensionProblem plus, minus;
        plus.theta = minus.theta = 2.0;
        plus.target.orientation = rot_z(yaw);
        minus.target.orientation = rot_z(-yaw);
        const Vec6 up = solve_pretension(c, plus).u0;
        const Vec6 um = solve_pretension(c, minus).u0;
        // Mirror swaps MR and LR and fixes the others.
        CHECK(std::abs(up[MR] - um[LR]) < 1e-4);
        CHECK(std::abs(up[LR] - um[MR]) < 1e-4);
        CHECK(std::abs(up[SR] - um[SR]) < 1e-4);
        CHECK(std::abs(up[IR] - um[IR]) < 1e-4);
        CHECK(std::abs(up[IO] - um[IO]) < 1e-4);
        CHECK(std::abs(up[SO] - um[SO]) < 1e-4);
    }
}

TEST_CASE("unreachable orientation reports infeasibility") {
    const PlantConfig c = PlantConfig::standard();
    PretensionProblem p;
    p.theta = 2.0;
    p.target.orientation = rot_z(85 * kDeg);
    CHECK_THROWS_AS((void)solve_pretension(c, p), InfeasiblePretensionError);
}

TEST_CASE("nonzero target velocity is rejected") {
    const PlantConfig c = PlantConfig::standard();
    PretensionProblem p;
    p.target.omega = Vec3(0, 0, 0.1);
    CHECK_THROWS_AS((void)solve_pretension(c, p), std::invalid_argument);
}
