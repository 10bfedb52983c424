#pragma once

#include "oculo/rotations.hpp"

#include <vector>

namespace oculo {

struct CostWeights {
    double lambda_accuracy = 0.33;
    double lambda_duration = 1.0;
    double lambda_energy = 0.67;
    double beta = 10.0;    // hyperbolic discount rate, 1/s
    int window = 5;        // accuracy window W, samples
};

struct CostBreakdown {
    double accuracy = 0.0;
    double duration = 0.0;
    double energy = 0.0;
    double total = 0.0;
};

/// Hyperbolic duration discount 1 - 1/(1 + beta T), T in seconds.
double duration_cost(double t_seconds, double beta);

/// Sum over the W window samples after index T of |x_G - x_t|^2, with states
/// as 6-vectors (rotvec in rad/2, omega in rad/s).
double accuracy_cost(const std::vector<Vec6>& states, const Vec6& goal, int t_end, int window);

/// Sum of squared command increments over the trajectory.
double energy_cost(const std::vector<Vec6>& commands);

double total_cost(const CostBreakdown& costs, const CostWeights& weights);

/// Convenience: fill a breakdown and its weighted total.
CostBreakdown make_costs(double accuracy, double t_seconds, double energy,
                         const CostWeights& weights);

}  // namespace oculo
