#pragma once

#include "oculo/config.hpp"
#include "oculo/control_linear.hpp"
#include "oculo/control_nonlinear.hpp"

#include <array>
#include <string>
#include <vector>

namespace oculo {

class AnalysisError : public std::runtime_error {
public:
    explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

/// Deviation of one motor channel from its pre-saccade value: the extremal
/// (signed) pulse during the movement, the span where the deviation exceeds
/// half the pulse, and the settled post-saccade step.
struct PulseMetrics {
    double pulse = 0.0;             // extremal u(t) - u(0), rad
    double pulse_duration_s = 0.0;  // span with |du| > 0.5 |pulse|
    double step = 0.0;              // settled final deviation, rad
};

/// One executed saccade with the raw trajectories and every derived metric.
struct SaccadeRecord {
    std::string controller;
    Vec3 start_rotvec = Vec3::Zero();  // rad/2
    Vec3 goal_rotvec = Vec3::Zero();   // rad/2
    Trajectory trajectory;             // plant states at the plant step
    std::vector<Vec6> commands;        // control samples, rad
    double control_dt = 0.0;

    double amplitude_deg = 0.0;        // angular distance start -> goal
    double duration_ms = 0.0;          // 0.1-peak-velocity rule
    double peak_velocity_deg_s = 0.0;
    double endpoint_error_deg = 0.0;
    double relative_error = 0.0;
    double straightness = 0.0;         // |Pearson| of the two frontal velocity components
    double skewness = 0.0;             // velocity-profile asymmetry, reported only
    std::array<PulseMetrics, 6> pulses{};
    CostBreakdown costs;

    bool ok = false;
    std::string error;
};

enum class SequenceMode { zero_initial, continuous };

struct TargetSet {
    /// Goal directions as (direction angle deg, amplitude deg): direction 0
    /// is rightward, 90 is upward; goals are zero-torsion rotations.
    std::vector<std::pair<double, double>> targets;
    unsigned seed = 0;

    Mat3 orientation(std::size_t index) const;
};

/// Deterministic 24-target battery over 5-33 degree amplitudes covering the
/// cardinal and oblique directions.
TargetSet generate_target_set(unsigned seed);

/// Compute every metric of a saccade from its executed trajectories. Throws
/// if the trajectory has not settled at the end.
SaccadeRecord measure_saccade(const Trajectory& trajectory, const std::vector<Vec6>& commands,
                              double control_dt, const Mat3& start, const Mat3& goal);

/// Per-muscle pulse/step decomposition of a record's motor trajectory.
std::array<PulseMetrics, 6> synergy_report(const SaccadeRecord& record);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct MainSequence {
    LineFit duration_vs_amplitude;   // D [ms] = a A [deg] + b
    LineFit vpkd_vs_amplitude;       // V_pk * D [deg] vs A [deg]
};

MainSequence main_sequence_fit(const std::vector<SaccadeRecord>& records);

struct ListingBin {
    double amplitude_min_deg = 0.0;
    double amplitude_max_deg = 0.0;
    double std_deg = 0.0;   // aligned torsion STD
    double max_deg = 0.0;   // aligned torsion max |.|
    long count = 0;
};

struct ListingStats {
    double alignment_deg = 0.0;            // z-rotation into the best-fit plane
    double aligned_std_deg = 0.0;          // pooled, all samples
    std::array<ListingBin, 3> bins{};      // <10, 10-20, 20-35 degrees
};

/// Pool instantaneous rotation vectors from all records, search the z-rotation
/// minimizing the variance of the torsion component, and report binned stats.
ListingStats listing_fit(const std::vector<SaccadeRecord>& records);

struct ExperimentReport {
    std::string controller;
    std::string mode;
    std::vector<SaccadeRecord> records;
    MainSequence main_sequence;
    ListingStats listing;
    double mean_relative_error = 0.0;
    double mean_straightness = 0.0;
    int failures = 0;
    int probe_index = -1;                        // record whose curve is kept
    std::vector<DurationCurvePoint> probe_curve;  // cost vs duration
};

enum class ControllerKind { linear, nonlinear };

/// Run the 24-saccade battery. The linear controller re-solves pretension and
/// re-linearizes at each start; the nonlinear controller uses the supplied
/// learned model (required) with a single primary-position pretension. In
/// continuous mode each saccade starts from the previous settled endpoint.
ExperimentReport run_experiment(const ToolConfig& config, ControllerKind kind,
                                const TargetSet& targets, SequenceMode mode,
                                const NarxWeights* narx = nullptr);

}  // namespace oculo
