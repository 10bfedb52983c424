#include "oculo/costs.hpp"

#include <stdexcept>

namespace oculo {

double duration_cost(double t_seconds, double beta) {
    if (t_seconds < 0.0 || beta <= 0.0) {
        throw std::invalid_argument("duration_cost: T >= 0 and beta > 0 required");
    }
    return 1.0 - 1.0 / (1.0 + beta * t_seconds);
}

double accuracy_cost(const std::vector<Vec6>& states, const Vec6& goal, int t_end, int window) {
    if (t_end < 0 || window < 1) {
        throw std::invalid_argument("accuracy_cost: T >= 0 and W >= 1 required");
    }
    if (static_cast<std::size_t>(t_end + window) >= states.size()) {
        throw std::out_of_range("accuracy_cost: trajectory too short for the window");
    }
    double cost = 0.0;
    for (int t = 1; t <= window; ++t) {
        cost += (goal - states[static_cast<std::size_t>(t_end + t)]).squaredNorm();
    }
    return cost;
}

double energy_cost(const std::vector<Vec6>& commands) {
    if (commands.size() < 2) {
        throw std::invalid_argument("energy_cost: need at least two samples");
    }
    double cost = 0.0;
    for (std::size_t t = 1; t < commands.size(); ++t) {
        cost += (commands[t] - commands[t - 1]).squaredNorm();
    }
    return cost;
}

double total_cost(const CostBreakdown& costs, const CostWeights& weights) {
    return weights.lambda_accuracy * costs.accuracy +
           weights.lambda_duration * costs.duration +
           weights.lambda_energy * costs.energy;
}

CostBreakdown make_costs(double accuracy, double t_seconds, double energy,
                         const CostWeights& weights) {
    CostBreakdown c;
    c.accuracy = accuracy;
    c.duration = duration_cost(t_seconds, weights.beta);
    c.energy = energy;
    c.total = total_cost(c, weights);
    return c;
}

}  // namespace oculo
