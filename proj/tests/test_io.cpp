#include "doctest.h"

#include "oculo/config.hpp"
#include "oculo/io.hpp"
#include "oculo/plant.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace oculo;
namespace fs = std::filesystem;

namespace {
Trajectory random_trajectory(unsigned seed, int steps) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Trajectory traj;
    for (int i = 0; i <= steps; ++i) {
        traj.t.push_back(i * 3e-3);
        EyeState s;
        s.orientation = exp_map(Vec3(d(rng), d(rng), d(rng)) * 0.3);
        s.omega = Vec3(d(rng), d(rng), d(rng));
        traj.states.push_back(s);
        Vec6 u, f;
        for (int k = 0; k < 6; ++k) {
            u[k] = 2.0 + 0.3 * d(rng);
            f[k] = 1.0 + 0.5 * d(rng);
        }
        traj.commands.push_back(u);
        traj.tensions.push_back(f);
    }
    return traj;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("trajectory CSV round-trips exactly") {
    const fs::path path = fs::temp_directory_path() / "oculo_io_roundtrip.csv";
    const Trajectory traj = random_trajectory(5, 40);
    write_trajectory_csv(traj, path.string());
    const Trajectory back = read_trajectory_csv(path.string());

    REQUIRE(back.t.size() == traj.t.size());
    for (size_t i = 0; i < traj.t.size(); ++i) {
        // t is stored in ms; s -> ms -> s costs at most one ulp.
        CHECK(back.t[i] == doctest::Approx(traj.t[i]).epsilon(1e-14));
        CHECK((rotvec_of(back.states[i].orientation) -
               rotvec_of(traj.states[i].orientation)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((back.states[i].omega - traj.states[i].omega).norm() == 0.0);
        CHECK((back.commands[i] - traj.commands[i]).norm() == 0.0);
        CHECK((back.tensions[i] - traj.tensions[i]).norm() == 0.0);
    }
    fs::remove(path);
}

TEST_CASE("identical runs produce byte-identical CSV files") {
    const fs::path a = fs::temp_directory_path() / "oculo_io_a.csv";
    const fs::path b = fs::temp_directory_path() / "oculo_io_b.csv";
    write_trajectory_csv(random_trajectory(9, 25), a.string());
    write_trajectory_csv(random_trajectory(9, 25), b.string());
    CHECK(slurp(a.string()) == slurp(b.string()));
    fs::remove(a);
    fs::remove(b);
}

TEST_CASE("CSV header names the fixed column schema") {
    const fs::path path = fs::temp_directory_path() / "oculo_io_header.csv";
    write_trajectory_csv(random_trajectory(1, 2), path.string());
    std::ifstream in(path.string());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t_ms,rx,ry,rz,wx,wy,wz,"
          "u_IR,u_MR,u_SR,u_LR,u_IO,u_SO,"
          "f_IR,f_MR,f_SR,f_LR,f_IO,f_SO");
    fs::remove(path);
}

TEST_CASE("reading a malformed file fails loudly") {
    const fs::path path = fs::temp_directory_path() / "oculo_io_bad.csv";
    {
        std::ofstream out(path.string());
        out << "t_ms,rx\n0,not_a_number\n";
    }
    CHECK_THROWS((void)read_trajectory_csv(path.string()));
    fs::remove(path);
    CHECK_THROWS((void)read_trajectory_csv("/nonexistent/oculo.csv"));
}

TEST_CASE("config serialization round-trips and digests are stable") {
    ToolConfig cfg;
    cfg.train.seed = 123;
    cfg.solver.duration_grid = 12;
    const fs::path path = fs::temp_directory_path() / "oculo_cfg.json";
    save_config(cfg, path.string());
    const ToolConfig back = load_config(path.string());
    CHECK(back.train.seed == 123);
    CHECK(back.solver.duration_grid == 12);
    CHECK(config_digest(back) == config_digest(cfg));
    ToolConfig other = cfg;
    other.train.seed = 124;
    CHECK(config_digest(other) != config_digest(cfg));
    fs::remove(path);
}

TEST_CASE("manifest contains command, digest, and seeds") {
    RunManifest m;
    m.command = "simulate --seed 7";
    m.config_digest = "deadbeef";
    m.seeds = {7};
    m.timestamp = iso_timestamp_now();
    m.outputs = {"traj.csv"};
    const fs::path path = fs::temp_directory_path() / "oculo_manifest.json";
    write_manifest(m, path.string());
    const std::string text = slurp(path.string());
    CHECK(text.find("simulate --seed 7") != std::string::npos);
    CHECK(text.find("deadbeef") != std::string::npos);
    CHECK(text.find("\"seeds\"") != std::string::npos);
    fs::remove(path);
}
