#include "oculo/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace oculo {

namespace {

using nlohmann::json;

json mat3_to_json(const Mat3& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
        rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
    }
    return rows;
}

Mat3 mat3_from_json(const json& j) {
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            m(r, c) = j.at(r).at(c).get<double>();
        }
    }
    return m;
}

json vec3_to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vec3_from_json(const json& j) {
    return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

json vec6_to_json(const Vec6& v) {
    json out = json::array();
    for (int i = 0; i < 6; ++i) {
        out.push_back(v[i]);
    }
    return out;
}

Vec6 vec6_from_json(const json& j) {
    Vec6 v;
    for (int i = 0; i < 6; ++i) {
        v[i] = j.at(i).get<double>();
    }
    return v;
}

json weights_to_json(const CostWeights& w) {
    return {{"lambda_accuracy", w.lambda_accuracy},
            {"lambda_duration", w.lambda_duration},
            {"lambda_energy", w.lambda_energy},
            {"beta", w.beta},
            {"window", w.window}};
}

CostWeights weights_from_json(const json& j) {
    CostWeights w;
    w.lambda_accuracy = j.at("lambda_accuracy").get<double>();
    w.lambda_duration = j.at("lambda_duration").get<double>();
    w.lambda_energy = j.at("lambda_energy").get<double>();
    w.beta = j.at("beta").get<double>();
    w.window = j.at("window").get<int>();
    return w;
}

}  // namespace

json to_json(const ToolConfig& config) {
    const PlantConfig& p = config.plant;
    json plant{{"inertia", mat3_to_json(p.inertia)},
               {"damping", mat3_to_json(p.damping)},
               {"stiffness", vec6_to_json(p.stiffness)},
               {"rest_length", vec6_to_json(p.rest_length)},
               {"spindle_radius", p.spindle_radius},
               {"eye_radius", p.eye_radius},
               {"dt", p.dt}};
    json insertions = json::object();
    json routings = json::object();
    for (int m = 0; m < kNumMuscles; ++m) {
        insertions[kMuscleNames[m]] = vec3_to_json(p.insertion_eye[m]);
        routings[kMuscleNames[m]] = vec3_to_json(p.routing_head[m]);
    }
    plant["insertion_eye"] = insertions;
    plant["routing_head"] = routings;
    plant["muscle_order"] = json::array({"IR", "MR", "SR", "LR", "IO", "SO"});

    json narx{{"hidden_units", config.narx.hidden_units},
              {"input_memory", config.narx.input_memory},
              {"state_memory", config.narx.state_memory},
              {"state_width", config.narx.state_width},
              {"input_width", config.narx.input_width},
              {"dt", config.narx.dt}};
    json train{{"max_epochs", config.train.max_epochs},
               {"batch_size", config.train.batch_size},
               {"learning_rate", config.train.learning_rate},
               {"patience", config.train.patience},
               {"input_noise", config.train.input_noise},
               {"restarts", config.train.restarts},
               {"seed", config.train.seed},
               {"train_fraction", config.train.train_fraction},
               {"val_fraction", config.train.val_fraction}};
    json solver{{"duration_grid", config.solver.duration_grid},
                {"t_max", config.solver.t_max},
                {"control_dt", config.solver.control_dt},
                {"max_iterations", config.solver.max_iterations},
                {"c_ratio", config.solver.c_ratio},
                {"initial_coefficient", config.solver.initial_coefficient}};
    json experiment{{"theta", config.experiment.theta},
                    {"settle_s", config.experiment.settle_s},
                    {"amp_min_deg", config.experiment.amp_min_deg},
                    {"amp_max_deg", config.experiment.amp_max_deg}};

    return json{{"plant", plant},
                {"costs", {{"linear", weights_to_json(config.costs_linear)},
                           {"nonlinear", weights_to_json(config.costs_nonlinear)}}},
                {"narx", narx},
                {"train", train},
                {"solver", solver},
                {"experiment", experiment}};
}

ToolConfig config_from_json(const json& j) {
    try {
        ToolConfig c;
        const json& plant = j.at("plant");
        c.plant.inertia = mat3_from_json(plant.at("inertia"));
        c.plant.damping = mat3_from_json(plant.at("damping"));
        c.plant.stiffness = vec6_from_json(plant.at("stiffness"));
        c.plant.rest_length = vec6_from_json(plant.at("rest_length"));
        c.plant.spindle_radius = plant.at("spindle_radius").get<double>();
        c.plant.eye_radius = plant.at("eye_radius").get<double>();
        c.plant.dt = plant.at("dt").get<double>();
        for (int m = 0; m < kNumMuscles; ++m) {
            c.plant.insertion_eye[m] = vec3_from_json(plant.at("insertion_eye").at(kMuscleNames[m]));
            c.plant.routing_head[m] = vec3_from_json(plant.at("routing_head").at(kMuscleNames[m]));
        }
        c.plant.validate();

        c.costs_linear = weights_from_json(j.at("costs").at("linear"));
        c.costs_nonlinear = weights_from_json(j.at("costs").at("nonlinear"));

        const json& narx = j.at("narx");
        c.narx.hidden_units = narx.at("hidden_units").get<int>();
        c.narx.input_memory = narx.at("input_memory").get<int>();
        c.narx.state_memory = narx.at("state_memory").get<int>();
        c.narx.state_width = narx.at("state_width").get<int>();
        c.narx.input_width = narx.at("input_width").get<int>();
        c.narx.dt = narx.at("dt").get<double>();

        const json& train = j.at("train");
        c.train.max_epochs = train.at("max_epochs").get<int>();
        c.train.batch_size = train.at("batch_size").get<int>();
        c.train.learning_rate = train.at("learning_rate").get<double>();
        c.train.patience = train.at("patience").get<int>();
        c.train.input_noise = train.at("input_noise").get<double>();
        c.train.restarts = train.at("restarts").get<int>();
        c.train.seed = train.at("seed").get<unsigned>();
        c.train.train_fraction = train.at("train_fraction").get<double>();
        c.train.val_fraction = train.at("val_fraction").get<double>();

        const json& solver = j.at("solver");
        c.solver.duration_grid = solver.at("duration_grid").get<int>();
        c.solver.t_max = solver.at("t_max").get<double>();
        c.solver.control_dt = solver.at("control_dt").get<double>();
        c.solver.max_iterations = solver.at("max_iterations").get<int>();
        c.solver.c_ratio = solver.at("c_ratio").get<double>();
        c.solver.initial_coefficient = solver.at("initial_coefficient").get<double>();

        const json& exp = j.at("experiment");
        c.experiment.theta = exp.at("theta").get<double>();
        c.experiment.settle_s = exp.at("settle_s").get<double>();
        c.experiment.amp_min_deg = exp.at("amp_min_deg").get<double>();
        c.experiment.amp_max_deg = exp.at("amp_max_deg").get<double>();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

ToolConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
    return config_from_json(j);
}

void save_config(const ToolConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write config file: " + path);
    }
    out << to_json(config).dump(2) << "\n";
}

std::string config_digest(const ToolConfig& config) {
    const std::string s = to_json(config).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace oculo
