#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oculo/control_nonlinear.hpp"
#include "oculo/pretension.hpp"

#include <cmath>
#include <random>

using namespace oculo;

namespace {

NarxWeights constant_prediction_weights(const Vec6& fixed_point) {
    NarxWeights w = init_weights(NarxConfig{}, 3);
    w.w_o.setZero();
    w.b2 = fixed_point;
    return w;
}

struct TrainedFixture {
    PlantConfig config;
    EyeState x0;
    Vec6 u0;
    NarxWeights weights;
};

const TrainedFixture& trained_fixture() {
    static const TrainedFixture fixture = [] {
        TrainedFixture f;
        f.config = PlantConfig::standard();
        f.u0 = solve_pretension(f.config, PretensionProblem{}).u0;
        f.x0 = EyeState{};
        const Dataset data = gen_dataset(f.config, 12000.0, 33);
        TrainConfig train;
        train.max_epochs = 60;
        train.patience = 60;
        f.weights = train_narx(data, NarxConfig{}, train);
        return f;
    }();
    return fixture;
}

}  // namespace

TEST_CASE("basis columns are stochastic and positive") {
    for (int horizon : {7, 21, 49, 70}) {
        const GmmBasis basis = gmm_basis(horizon, 1.0 / 1.4);
        CHECK(basis.phi.cols() == horizon + 1);
        for (int t = 0; t <= horizon; ++t) {
            CHECK(basis.phi.col(t).sum() == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(basis.phi.col(t).minCoeff() > 0.0);
        }
    }
}

TEST_CASE("basis count follows the coverage ratio") {
    const GmmBasis basis = gmm_basis(49, 1.0 / 1.4);
    CHECK(basis.count == 35);
    CHECK(basis.centers.front() == doctest::Approx(0.0));
    CHECK(basis.centers.back() == doctest::Approx(49.0));
}

TEST_CASE("a narrow basis acts as a selector at its centers") {
    const GmmBasis basis = gmm_basis(20, 0.5, 0.2);
    for (int i = 0; i < basis.count; ++i) {
        const int t = static_cast<int>(std::lround(basis.centers[(std::size_t)i]));
        CHECK(basis.phi(i, t) > 0.99);
    }
}

TEST_CASE("basis construction rejects degenerate requests") {
    CHECK_THROWS_AS(gmm_basis(1, 1.0 / 1.4), PlanningError);
    CHECK_THROWS_AS(gmm_basis(10, 0.05), PlanningError);
    CHECK_THROWS_AS(gmm_basis(4, 2.0), PlanningError);
}

TEST_CASE("constant coefficient columns expand to a constant trajectory") {
    const GmmBasis basis = gmm_basis(30, 1.0 / 1.4);
    Vec6 v;
    v << 2.0, 1.9, 2.1, 2.0, 1.5, 2.5;
    Eigen::MatrixXd coeffs(6, basis.count);
    coeffs.colwise() = v;
    const std::vector<Vec6> u = expand(coeffs, basis);
    REQUIRE(u.size() == 31);
    for (const Vec6& ut : u) {
        CHECK((ut - v).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("a single coefficient expands to a scaled basis row") {
    const GmmBasis basis = gmm_basis(30, 1.0 / 1.4);
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(6, basis.count);
    coeffs(2, 5) = 1.7;
    const std::vector<Vec6> u = expand(coeffs, basis);
    for (int t = 0; t <= 30; ++t) {
        CHECK(u[(std::size_t)t][2] == doctest::Approx(1.7 * basis.phi(5, t)).epsilon(1e-12));
        CHECK(u[(std::size_t)t][0] == 0.0);
    }
}

TEST_CASE("expansion matches an independent matrix product") {
    const GmmBasis basis = gmm_basis(42, 1.0 / 1.4);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 3.0);
    Eigen::MatrixXd coeffs(6, basis.count);
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        coeffs.data()[i] = dist(rng);
    }
    const std::vector<Vec6> u = expand(coeffs, basis);
    for (int t = 0; t <= 42; ++t) {
        Vec6 expected = Vec6::Zero();
        for (int i = 0; i < basis.count; ++i) {
            expected += coeffs.col(i) * basis.phi(i, t);
        }
        CHECK((u[(std::size_t)t] - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(expand(coeffs.leftCols(3), basis), PlanningError);
}

TEST_CASE("no-move policy cost reduces to the duration term") {
    const GmmBasis basis = gmm_basis(14, 1.0 / 1.4);
    const Vec6 x0 = Vec6::Zero();
    const NarxWeights w = constant_prediction_weights(x0);
    Vec6 u0;
    u0 << 2.0, 2.0, 2.0, 2.0, 2.0, 2.0;
    Eigen::MatrixXd coeffs(6, basis.count);
    coeffs.colwise() = u0;
    const CostWeights weights{1.0, 0.04, 0.002, 10.0, 5};
    const std::vector<Vec6> hist(4, x0);
    const PolicyEval eval = policy_cost(coeffs, basis, weights, w, hist, x0, 3e-3);
    CHECK(eval.costs.energy < 1e-20);
    CHECK(eval.costs.accuracy < 1e-20);
    CHECK(eval.clamp_penalty == 0.0);
    CHECK(eval.objective ==
          doctest::Approx(weights.lambda_duration * duration_cost(14 * 3e-3, 10.0)));
}

TEST_CASE("negative command mass is clamped and penalized") {
    const GmmBasis basis = gmm_basis(14, 1.0 / 1.4);
    const NarxWeights w = constant_prediction_weights(Vec6::Zero());
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Constant(6, basis.count, -0.5);
    const CostWeights weights{1.0, 0.04, 0.002, 10.0, 5};
    const std::vector<Vec6> hist(4, Vec6::Zero());
    const PolicyEval eval = policy_cost(coeffs, basis, weights, w, hist, Vec6::Zero(), 3e-3);
    CHECK(eval.clamp_penalty > 0.0);
    for (const Vec6& u : eval.commands) {
        CHECK(u.minCoeff() >= 0.0);
    }
}

TEST_CASE("policy cost is finite-difference consistent") {
    const GmmBasis basis = gmm_basis(21, 1.0 / 1.4);
    const NarxWeights w = init_weights(NarxConfig{}, 5);
    const CostWeights weights{1.0, 0.04, 0.002, 10.0, 5};
    const std::vector<Vec6> hist(4, Vec6::Zero());
    Vec6 goal = Vec6::Zero();
    goal[2] = 0.1;
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Constant(6, basis.count, 2.0);
    const auto f = [&](double delta) {
        Eigen::MatrixXd c = coeffs;
        c(1, 4) += delta;
        return policy_cost(c, basis, weights, w, hist, goal, 3e-3).objective;
    };
    const double g_coarse = (f(1e-3) - f(-1e-3)) / 2e-3;
    const double g_fine = (f(1e-4) - f(-1e-4)) / 2e-4;
    CHECK(g_coarse == doctest::Approx(g_fine).epsilon(1e-3));
}

TEST_CASE("goal at the start selects the shortest duration with steady commands") {
    const PlantConfig config = PlantConfig::standard();
    const EyeState x0;
    const NarxWeights w = constant_prediction_weights(x0.as_vector());
    const CostWeights weights{1.0, 0.04, 0.002, 10.0, 5};
    const SolverConfig solver;
    const NonlinearSearchResult result = optimize_traj(config, w, x0, x0, weights, solver);
    CHECK(result.best.horizon == 7);
    CHECK(result.curve.size() == 10);
    for (const DurationCurvePoint& p : result.curve) {
        CHECK(p.feasible);
    }
    for (std::size_t t = 1; t < result.best.commands.size(); ++t) {
        CHECK((result.best.commands[t] - result.best.commands[t - 1]).norm() < 1e-3);
    }
}

TEST_CASE("the optimizer improves on the constant-command start for a real goal") {
    const TrainedFixture& f = trained_fixture();
    EyeState goal;
    goal.orientation = rot_z(-12.0 * M_PI / 180.0);  // 12 degrees rightward
    const CostWeights weights{1.0, 0.04, 0.002, 10.0, 5};
    SolverConfig solver;
    solver.duration_grid = 3;
    solver.t_max = 0.063;
    const NonlinearSearchResult result =
        optimize_traj(f.config, f.weights, f.x0, goal, weights, solver);

    const std::vector<Vec6> hist(4, f.x0.as_vector());
    Vec6 goal_vec = goal.as_vector();
    goal_vec.tail<3>().setZero();
    const GmmBasis basis = gmm_basis(result.best.horizon, solver.c_ratio);
    Eigen::MatrixXd init =
        Eigen::MatrixXd::Constant(6, basis.count, solver.initial_coefficient);
    const PolicyEval start =
        policy_cost(init, basis, weights, f.weights, hist, goal_vec, solver.control_dt);
    CHECK(result.best.model_costs.total < start.costs.total);
    CHECK(result.best.costs.total == result.best.costs.total);  // finite, not NaN
    for (const Vec6& u : result.best.commands) {
        CHECK(u.minCoeff() >= 0.0);
        CHECK(u.allFinite());
    }
}
