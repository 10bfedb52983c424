#pragma once

#include "oculo/config.hpp"
#include "oculo/plant.hpp"

#include <string>
#include <vector>

namespace oculo {

/// Writes the fixed trajectory CSV schema:
/// t_ms, rx, ry, rz (rad/2), wx, wy, wz (rad/s), u_IR..u_SO (rad), f_IR..f_SO (N).
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

Trajectory read_trajectory_csv(const std::string& path);

/// Per-run provenance record, written before any data output.
struct RunManifest {
    std::string command;
    std::string config_digest;
    std::vector<unsigned> seeds;
    std::string version = "oculo 0.1.0";
    std::string timestamp;  // ISO 8601, informational only
    std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

std::string iso_timestamp_now();

}  // namespace oculo
