#pragma once

#include "oculo/costs.hpp"
#include "oculo/plant.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>

namespace oculo {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// NARX surrogate architecture.
struct NarxConfig {
    int hidden_units = 55;   // n_h
    int input_memory = 1;    // n_u
    int state_memory = 3;    // n_x
    int state_width = 6;     // s_x
    int input_width = 6;     // s_u
    double dt = 3e-3;        // sample period, s
};

struct TrainConfig {
    int max_epochs = 800;
    int batch_size = 1024;
    double learning_rate = 3e-3;
    int patience = 60;           // early stop after this many non-improving epochs
    double input_noise = 0.02;   // train-time jitter std on state-history features
    int restarts = 3;            // independent inits; keep best closed-loop fit
    unsigned seed = 7;
    double train_fraction = 0.8;
    double val_fraction = 0.1;
};

struct SolverConfig {
    int duration_grid = 10;      // d
    double t_max = 0.210;        // s
    double control_dt = 3e-3;    // planner sample period, s
    int max_iterations = 15;     // nonlinear inner solver iterations
    double c_ratio = 1.0 / 1.4;  // GMM basis count per duration sample
    double initial_coefficient = 2.0;  // M init, rad
};

struct ExperimentConfig {
    double theta = 2.0;          // pretension bound, rad
    double settle_s = 0.35;      // post-window hold for measurement, s
    double amp_min_deg = 5.0;
    double amp_max_deg = 33.0;
};

struct ToolConfig {
    PlantConfig plant = PlantConfig::standard();
    // The linear controller's duration discount rate is calibrated once so
    // the 22-degree cost-vs-duration curve keeps an interior minimum.
    CostWeights costs_linear{0.33, 1.0, 0.67, 0.05, 5};
    CostWeights costs_nonlinear{1.0, 0.04, 0.002, 10.0, 5};
    NarxConfig narx;
    TrainConfig train;
    SolverConfig solver;
    ExperimentConfig experiment;
};

nlohmann::json to_json(const ToolConfig& config);
ToolConfig config_from_json(const nlohmann::json& j);

ToolConfig load_config(const std::string& path);  // throws ConfigError
void save_config(const ToolConfig& config, const std::string& path);

/// Stable FNV-1a digest of the canonical JSON form, hex encoded.
std::string config_digest(const ToolConfig& config);

}  // namespace oculo
