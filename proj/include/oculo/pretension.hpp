#pragma once

#include "oculo/plant.hpp"

namespace oculo {

class InfeasiblePretensionError : public std::runtime_error {
public:
    explicit InfeasiblePretensionError(const std::string& what) : std::runtime_error(what) {}
};

/// Hold a target orientation (omega = 0) in equilibrium with taut cables.
/// Antagonist pairing is fixed as MR-LR, IR-SR, IO-SO; theta bounds the
/// average motor angle of each pair from below.
struct PretensionProblem {
    EyeState target;                 // omega must be zero
    double theta = 2.0;              // rad
    double tension_margin = 1e-3;    // N, operationalizes the strict f > 0
};

struct PretensionResult {
    Vec6 u0 = Vec6::Zero();
    Vec6 tensions = Vec6::Zero();    // N, at the solution
    double torque_residual = 0.0;    // |tau_k|, N m
    double objective = 0.0;          // |u0|^2
};

/// Minimum-norm motor angles with zero elastic torque, tensions above the
/// margin and per-pair mean angles >= theta.
///
/// With the orientation fixed, each taut tension is affine in u, so the
/// problem is a small convex QP; it is solved exactly by enumerating active
/// sets of the nine inequality constraints.
PretensionResult solve_pretension(const PlantConfig& config, const PretensionProblem& problem);

/// Antagonist pairs as (agonist, antagonist) muscle indices.
std::array<std::pair<int, int>, 3> antagonist_pairs();

}  // namespace oculo
