#include "oculo/io.hpp"

#include <nlohmann/json.hpp>

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace oculo {

namespace {

// Shortest round-trip representation keeps CSVs byte-stable across runs.
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write trajectory csv: " + path);
    }
    out << "t_ms,rx,ry,rz,wx,wy,wz";
    for (const char* n : kMuscleNames) {
        out << ",u_" << n;
    }
    for (const char* n : kMuscleNames) {
        out << ",f_" << n;
    }
    out << "\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Vec6 x = traj.states[i].as_vector();
        out << fmt(traj.t[i] * 1e3);
        for (int k = 0; k < 6; ++k) {
            out << "," << fmt(x[k]);
        }
        for (int m = 0; m < kNumMuscles; ++m) {
            out << "," << fmt(traj.commands[i][m]);
        }
        for (int m = 0; m < kNumMuscles; ++m) {
            out << "," << fmt(traj.tensions[i][m]);
        }
        out << "\n";
    }
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read trajectory csv: " + path);
    }
    Trajectory traj;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<double> v;
        while (std::getline(ss, field, ',')) {
            v.push_back(std::stod(field));
        }
        if (v.size() != 1 + 6 + 6 + 6) {
            throw std::runtime_error("bad trajectory csv row in " + path);
        }
        traj.t.push_back(v[0] * 1e-3);
        Vec6 x, u, f;
        for (int k = 0; k < 6; ++k) {
            x[k] = v[1 + k];
            u[k] = v[7 + k];
            f[k] = v[13 + k];
        }
        traj.states.push_back(EyeState::from_vector(x));
        traj.commands.push_back(u);
        traj.tensions.push_back(f);
    }
    return traj;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    nlohmann::json j{{"command", manifest.command},
                     {"config_digest", manifest.config_digest},
                     {"seeds", manifest.seeds},
                     {"version", manifest.version},
                     {"timestamp", manifest.timestamp},
                     {"outputs", manifest.outputs}};
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write manifest: " + path);
    }
    out << j.dump(2) << "\n";
}

std::string iso_timestamp_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return std::string(buf);
}

}  // namespace oculo
