#include "oculo/analysis.hpp"

#include "oculo/pretension.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oculo {

namespace {

constexpr double kDeg = 180.0 / M_PI;

Vec3 direction_axis(double direction_deg) {
    // Direction 0 = rightward (about -z), 90 = upward (about -y); the axis
    // stays in the frontal plane, so targets are zero-torsion rotations.
    const double phi = direction_deg / kDeg;
    return -std::cos(phi) * Vec3::UnitZ() - std::sin(phi) * Vec3::UnitY();
}

double pearson_abs(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    // A cardinal saccade has one essentially silent component; treat it as
    // perfectly straight rather than dividing by a vanishing variance.
    const double floor_ratio = 1e-4;
    if (saa < floor_ratio * sbb || sbb < floor_ratio * saa) {
        return 1.0;
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        return 1.0;
    }
    return std::abs(sab / std::sqrt(saa * sbb));
}

double torsion_deg(double r_x) { return 2.0 * std::atan(r_x) * kDeg; }

double aligned_torsion_variance(const std::vector<Vec3>& rotvecs, double angle_rad) {
    const std::vector<Vec3> aligned = rotate_about_z(rotvecs, angle_rad);
    double mean = 0.0;
    for (const Vec3& r : aligned) {
        mean += torsion_deg(r.x());
    }
    mean /= static_cast<double>(aligned.size());
    double var = 0.0;
    for (const Vec3& r : aligned) {
        const double d = torsion_deg(r.x()) - mean;
        var += d * d;
    }
    return var / static_cast<double>(aligned.size());
}

}  // namespace

Mat3 TargetSet::orientation(std::size_t index) const {
    const auto& [direction_deg, amplitude_deg] = targets.at(index);
    const Vec3 rotvec = std::tan(0.5 * amplitude_deg / kDeg) * direction_axis(direction_deg);
    return matrix_of(rotvec);
}

TargetSet generate_target_set(unsigned seed) {
    TargetSet set;
    set.seed = seed;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> jitter(-1.5, 1.5);
    // Horizontal reach extends to the envelope edge; vertical and oblique
    // amplitudes stay inside the smaller vertical oculomotor range.
    const double horizontal[3] = {6.0, 18.0, 33.0};
    const double vertical[3] = {5.0, 12.0, 18.0};
    const double oblique[3] = {8.0, 16.0, 24.0};
    for (int k = 0; k < 3; ++k) {
        set.targets.emplace_back(0.0, horizontal[k]);
        set.targets.emplace_back(180.0, horizontal[k]);
        set.targets.emplace_back(90.0, vertical[k]);
        set.targets.emplace_back(270.0, vertical[k]);
        for (double direction : {45.0, 135.0, 225.0, 315.0}) {
            set.targets.emplace_back(direction, oblique[k] + jitter(rng));
        }
    }
    return set;
}

SaccadeRecord measure_saccade(const Trajectory& trajectory, const std::vector<Vec6>& commands,
                              double control_dt, const Mat3& start, const Mat3& goal) {
    if (trajectory.size() < 3) {
        throw AnalysisError("measure_saccade: trajectory too short");
    }
    SaccadeRecord rec;
    rec.trajectory = trajectory;
    rec.commands = commands;
    rec.control_dt = control_dt;
    rec.start_rotvec = rotvec_of(start);
    rec.goal_rotvec = rotvec_of(goal);

    const std::size_t n = trajectory.size();
    std::vector<double> speed(n);
    std::size_t peak_idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        speed[i] = trajectory.states[i].omega.norm() * kDeg;
        if (speed[i] > speed[peak_idx]) {
            peak_idx = i;
        }
    }
    rec.peak_velocity_deg_s = speed[peak_idx];
    const double threshold = 0.1 * rec.peak_velocity_deg_s;
    if (speed.back() > threshold && speed.back() > 1.0) {
        throw AnalysisError("measure_saccade: trajectory has not settled");
    }

    std::size_t onset = 0;
    while (onset < n && speed[onset] < threshold) {
        ++onset;
    }
    std::size_t offset = n - 1;
    while (offset > onset && speed[offset] < threshold) {
        --offset;
    }
    if (onset >= offset) {  // no movement above threshold
        onset = 0;
        offset = 1;
    }
    rec.duration_ms = (trajectory.t[offset] - trajectory.t[onset]) * 1e3;

    rec.amplitude_deg = log_map(start.transpose() * goal).norm() * kDeg;
    rec.endpoint_error_deg =
        log_map(trajectory.states.back().orientation.transpose() * goal).norm() * kDeg;
    rec.relative_error =
        rec.amplitude_deg > 1e-9 ? rec.endpoint_error_deg / rec.amplitude_deg : 0.0;

    std::vector<double> vy, vz;
    for (std::size_t i = onset; i < offset; ++i) {
        const Vec3 r0 = rotvec_of(trajectory.states[i].orientation);
        const Vec3 r1 = rotvec_of(trajectory.states[i + 1].orientation);
        const double dt = trajectory.t[i + 1] - trajectory.t[i];
        vy.push_back((r1.y() - r0.y()) / dt);
        vz.push_back((r1.z() - r0.z()) / dt);
    }
    rec.straightness = vy.size() >= 3 ? pearson_abs(vy, vz) : 1.0;
    rec.skewness = rec.duration_ms > 0.0
                       ? (trajectory.t[peak_idx] - trajectory.t[onset]) * 1e3 / rec.duration_ms
                       : 0.0;

    rec.pulses = synergy_report(rec);
    rec.ok = true;
    return rec;
}

std::array<PulseMetrics, 6> synergy_report(const SaccadeRecord& record) {
    std::array<PulseMetrics, 6> out{};
    const std::vector<Vec6>& u = record.commands;
    if (u.size() < 2) {
        return out;
    }
    const std::size_t n = u.size();
    const std::size_t tail = std::min<std::size_t>(5, n);
    for (int m = 0; m < 6; ++m) {
        double pulse = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double du = u[t][m] - u[0][m];
            if (std::abs(du) > std::abs(pulse)) {
                pulse = du;
            }
        }
        out[(std::size_t)m].pulse = pulse;
        double step = 0.0;
        for (std::size_t t = n - tail; t < n; ++t) {
            step += u[t][m] - u[0][m];
        }
        out[(std::size_t)m].step = step / static_cast<double>(tail);
        const double half = 0.5 * std::abs(pulse);
        std::size_t first = n, last = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (std::abs(u[t][m] - u[0][m]) > half) {
                first = std::min(first, t);
                last = t;
            }
        }
        out[(std::size_t)m].pulse_duration_s =
            first <= last ? (last - first + 1) * record.control_dt : 0.0;
    }
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw AnalysisError("fit_line: need at least two paired samples");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx < 1e-12) {
        throw AnalysisError("fit_line: degenerate abscissa spread");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

MainSequence main_sequence_fit(const std::vector<SaccadeRecord>& records) {
    std::vector<double> amp, dur, vpkd;
    for (const SaccadeRecord& r : records) {
        if (!r.ok) {
            continue;
        }
        amp.push_back(r.amplitude_deg);
        dur.push_back(r.duration_ms);
        vpkd.push_back(r.peak_velocity_deg_s * r.duration_ms * 1e-3);
    }
    if (amp.size() < 10) {
        throw AnalysisError("main_sequence_fit: need at least 10 successful records");
    }
    MainSequence seq;
    seq.duration_vs_amplitude = fit_line(amp, dur);
    seq.vpkd_vs_amplitude = fit_line(amp, vpkd);
    return seq;
}

ListingStats listing_fit(const std::vector<SaccadeRecord>& records) {
    std::vector<Vec3> rotvecs;
    std::vector<double> amplitudes;  // owning record's amplitude, per sample
    for (const SaccadeRecord& r : records) {
        if (!r.ok) {
            continue;
        }
        for (const EyeState& s : r.trajectory.states) {
            rotvecs.push_back(rotvec_of(s.orientation));
            amplitudes.push_back(r.amplitude_deg);
        }
    }
    if (rotvecs.empty()) {
        throw AnalysisError("listing_fit: no samples");
    }

    // Golden-section search of the variance objective over +-30 degrees.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -30.0 / kDeg, hi = 30.0 / kDeg;
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = aligned_torsion_variance(rotvecs, c);
    double fd = aligned_torsion_variance(rotvecs, d);
    while ((hi - lo) * kDeg > 0.005) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = aligned_torsion_variance(rotvecs, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = aligned_torsion_variance(rotvecs, d);
        }
    }
    ListingStats stats;
    const double angle = 0.5 * (lo + hi);
    stats.alignment_deg = angle * kDeg;
    stats.aligned_std_deg = std::sqrt(aligned_torsion_variance(rotvecs, angle));

    const std::vector<Vec3> aligned = rotate_about_z(rotvecs, angle);
    stats.bins[0] = {0.0, 10.0, 0.0, 0.0, 0};
    stats.bins[1] = {10.0, 20.0, 0.0, 0.0, 0};
    stats.bins[2] = {20.0, 35.0, 0.0, 0.0, 0};
    for (ListingBin& bin : stats.bins) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < aligned.size(); ++i) {
            if (amplitudes[i] >= bin.amplitude_min_deg && amplitudes[i] < bin.amplitude_max_deg) {
                const double v = torsion_deg(aligned[i].x());
                sum += v;
                sum2 += v * v;
                bin.max_deg = std::max(bin.max_deg, std::abs(v));
                ++bin.count;
            }
        }
        if (bin.count > 0) {
            const double mean = sum / bin.count;
            bin.std_deg = std::sqrt(std::max(0.0, sum2 / bin.count - mean * mean));
        }
    }
    return stats;
}

ExperimentReport run_experiment(const ToolConfig& config, ControllerKind kind,
                                const TargetSet& targets, SequenceMode mode,
                                const NarxWeights* narx) {
    if (kind == ControllerKind::nonlinear && narx == nullptr) {
        throw AnalysisError("run_experiment: the nonlinear controller needs a learned model");
    }
    ExperimentReport report;
    report.controller = kind == ControllerKind::linear ? "linear" : "nonlinear";
    report.mode = mode == SequenceMode::zero_initial ? "zero-initial" : "continuous";

    const CostWeights& weights =
        kind == ControllerKind::linear ? config.costs_linear : config.costs_nonlinear;
    const int settle_samples = static_cast<int>(
        std::lround(config.experiment.settle_s / config.solver.control_dt));

    // Keep the duration curve of the target closest to a 22-degree rightward
    // saccade, mirroring the single-saccade cost-vs-duration illustration.
    double probe_score = 1e18;
    for (std::size_t i = 0; i < targets.targets.size(); ++i) {
        const auto& [dir, amp] = targets.targets[i];
        const double score = std::abs(amp - 22.0) + std::min(dir, 360.0 - dir);
        if (score < probe_score) {
            probe_score = score;
            report.probe_index = static_cast<int>(i);
        }
    }

    Mat3 cursor = Mat3::Identity();  // continuous-mode start orientation
    for (std::size_t i = 0; i < targets.targets.size(); ++i) {
        const Mat3 start = mode == SequenceMode::continuous ? cursor : Mat3::Identity();
        const Mat3 goal_abs = targets.orientation(i);
        SaccadeRecord rec;
        rec.controller = report.controller;
        try {
            EyeState start_state;
            start_state.orientation = start;
            EyeState goal_state;
            goal_state.orientation = goal_abs;

            std::vector<Vec6> commands;
            CostBreakdown planned_costs;
            std::vector<DurationCurvePoint> curve;
            if (kind == ControllerKind::linear) {
                PretensionProblem problem;
                problem.target = start_state;
                problem.theta = config.experiment.theta;
                const Vec6 u0 = solve_pretension(config.plant, problem).u0;
                const LinearModel model =
                    linearize(config.plant, start_state, u0, config.solver.control_dt);
                const PlanSearchResult plan = plan_saccade(config.plant, model, goal_state,
                                                           weights, config.solver);
                commands = plan.best.commands;
                planned_costs = plan.best.costs;
                curve = plan.curve;
            } else {
                const NonlinearSearchResult plan = optimize_traj(
                    config.plant, *narx, start_state, goal_state, weights, config.solver);
                commands = plan.best.commands;
                planned_costs = plan.best.costs;
                curve = plan.curve;
            }

            const Trajectory rollout =
                replay_on_plant(config.plant, start_state, commands, config.solver.control_dt,
                                weights.window + settle_samples);
            rec = measure_saccade(rollout, commands, config.solver.control_dt, start, goal_abs);
            rec.controller = report.controller;
            rec.costs = planned_costs;
            cursor = rollout.states.back().orientation;
            if (static_cast<int>(i) == report.probe_index) {
                report.probe_curve = curve;
            }
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
            rec.start_rotvec = rotvec_of(start);
            rec.goal_rotvec = rotvec_of(goal_abs);
            ++report.failures;
        }
        report.records.push_back(std::move(rec));
    }

    double rel = 0.0, straight = 0.0;
    int ok_count = 0;
    for (const SaccadeRecord& r : report.records) {
        if (r.ok) {
            rel += r.relative_error;
            straight += r.straightness;
            ++ok_count;
        }
    }
    if (ok_count > 0) {
        report.mean_relative_error = rel / ok_count;
        report.mean_straightness = straight / ok_count;
    }
    if (ok_count >= 10) {
        report.main_sequence = main_sequence_fit(report.records);
        report.listing = listing_fit(report.records);
    }
    return report;
}

}  // namespace oculo
