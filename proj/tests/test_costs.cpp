#include "doctest.h"

#include "oculo/costs.hpp"

using namespace oculo;

TEST_CASE("duration cost") {
    CHECK(duration_cost(0.0, 10.0) == 0.0);
    CHECK(duration_cost(1e9, 10.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(duration_cost(0.1, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(duration_cost(0.2, 10.0) > duration_cost(0.1, 10.0));
    CHECK_THROWS_AS((void)duration_cost(-1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS((void)duration_cost(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("accuracy cost") {
    const Vec6 goal = (Vec6() << 0, 0.1, 0.2, 0, 0, 0).finished();
    std::vector<Vec6> pinned(10, goal);
    CHECK(accuracy_cost(pinned, goal, 4, 5) == 0.0);

    std::vector<Vec6> offset(10, goal);
    for (auto& x : offset) {
        x[2] += 0.03;
    }
    CHECK(accuracy_cost(offset, goal, 4, 5) == doctest::Approx(5 * 0.03 * 0.03).epsilon(1e-12));

    CHECK_THROWS_AS((void)accuracy_cost(pinned, goal, 8, 5), std::out_of_range);
}

TEST_CASE("energy cost") {
    std::vector<Vec6> constant(20, Vec6::Constant(1.5));
    CHECK(energy_cost(constant) == 0.0);

    std::vector<Vec6> stepped = constant;
    for (std::size_t t = 10; t < stepped.size(); ++t) {
        stepped[t][3] += 0.4;
    }
    CHECK(energy_cost(stepped) == doctest::Approx(0.16).epsilon(1e-12));

    std::vector<Vec6> reversed(stepped.rbegin(), stepped.rend());
    CHECK(energy_cost(reversed) == doctest::Approx(energy_cost(stepped)).epsilon(1e-15));

    std::vector<Vec6> one(1, Vec6::Zero());
    CHECK_THROWS_AS((void)energy_cost(one), std::invalid_argument);
}

TEST_CASE("total cost weighting") {
    CostWeights linear{0.33, 1.0, 0.67, 10.0, 5};
    CostBreakdown zero;
    CHECK(total_cost(zero, linear) == 0.0);

    CostBreakdown c;
    c.accuracy = 2.0;
    c.duration = 0.5;
    c.energy = 1.0;
    CHECK(total_cost(c, linear) == doctest::Approx(0.33 * 2 + 0.5 + 0.67).epsilon(1e-12));

    CostWeights nonlinear{1.0, 0.04, 0.002, 10.0, 5};
    CHECK(total_cost(c, nonlinear) == doctest::Approx(2.0 + 0.02 + 0.002).epsilon(1e-12));

    // Monotone in each sub-cost.
    CostBreakdown more = c;
    more.energy += 0.1;
    CHECK(total_cost(more, linear) > total_cost(c, linear));
}

TEST_CASE("make_costs fills the weighted total") {
    CostWeights w{0.33, 1.0, 0.67, 10.0, 5};
    const CostBreakdown c = make_costs(0.2, 0.1, 0.05, w);
    CHECK(c.duration == doctest::Approx(0.5));
    CHECK(c.total == doctest::Approx(0.33 * 0.2 + 0.5 + 0.67 * 0.05));
}
