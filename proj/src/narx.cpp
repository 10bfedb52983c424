#include "oculo/narx.hpp"

#include "oculo/pretension.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace oculo {

namespace {

inline Eigen::ArrayXXd logistic(const Eigen::ArrayXXd& z) {
    return 1.0 / (1.0 + (-z).exp());
}

int input_cols_u(const NarxConfig& c) { return c.input_width * (c.input_memory + 1); }
int input_cols_x(const NarxConfig& c) { return c.state_width * (c.state_memory + 1); }

}  // namespace

int NarxWeights::num_parameters() const {
    return static_cast<int>(w_u.size() + w_x.size() + w_o.size() + b1.size() + b2.size());
}

Eigen::VectorXd NarxWeights::flatten() const {
    Eigen::VectorXd theta(num_parameters());
    int at = 0;
    auto put = [&](const Eigen::MatrixXd& m) {
        theta.segment(at, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
        at += static_cast<int>(m.size());
    };
    put(w_u);
    put(w_x);
    put(w_o);
    theta.segment(at, b1.size()) = b1;
    at += static_cast<int>(b1.size());
    theta.segment(at, b2.size()) = b2;
    return theta;
}

void NarxWeights::unflatten(const Eigen::VectorXd& theta) {
    if (theta.size() != num_parameters()) {
        throw NarxError("unflatten: parameter count mismatch");
    }
    int at = 0;
    auto take = [&](Eigen::MatrixXd& m) {
        m = Eigen::Map<const Eigen::MatrixXd>(theta.data() + at, m.rows(), m.cols());
        at += static_cast<int>(m.size());
    };
    take(w_u);
    take(w_x);
    take(w_o);
    b1 = theta.segment(at, b1.size());
    at += static_cast<int>(b1.size());
    b2 = theta.segment(at, b2.size());
}

NarxWeights init_weights(const NarxConfig& config, unsigned seed) {
    NarxWeights w;
    w.config = config;
    w.x_scale << 1.0, 1.0, 1.0, 5.0, 5.0, 5.0;  // rotvec vs omega magnitudes
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const int cu = input_cols_u(config);
    const int cx = input_cols_x(config);
    const double fan_in = 1.0 / std::sqrt(static_cast<double>(cu + cx));
    w.w_u = Eigen::MatrixXd::NullaryExpr(config.hidden_units, cu,
                                         [&] { return u(rng) * fan_in; });
    w.w_x = Eigen::MatrixXd::NullaryExpr(config.hidden_units, cx,
                                         [&] { return u(rng) * fan_in; });
    const double fan_h = 1.0 / std::sqrt(static_cast<double>(config.hidden_units));
    w.w_o = Eigen::MatrixXd::NullaryExpr(config.state_width, config.hidden_units,
                                         [&] { return u(rng) * fan_h; });
    w.b1 = Eigen::VectorXd::Zero(config.hidden_units);
    w.b2 = Eigen::VectorXd::Zero(config.state_width);
    return w;
}

Dataset gen_dataset(const PlantConfig& config, double total_ms, unsigned seed,
                    double control_dt) {
    if (total_ms < 10000.0) {
        throw std::invalid_argument("gen_dataset: need at least 10,000 ms");
    }
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> pitch_d(-18.0 * M_PI / 180.0, 18.0 * M_PI / 180.0);
    std::uniform_real_distribution<double> yaw_d(-30.0 * M_PI / 180.0, 30.0 * M_PI / 180.0);
    std::uniform_int_distribution<int> pulse_ms(20, 80);
    std::uniform_int_distribution<int> hold_ms(80, 250);
    std::uniform_real_distribution<double> overdrive(0.5, 2.0);
    std::uniform_real_distribution<double> twist_d(-0.2, 0.2);
    std::bernoulli_distribution twist_on(0.7);

    PretensionProblem primary;
    primary.theta = 2.0;
    const Vec6 u_start = solve_pretension(config, primary).u0;
    EyeState x = primary.target;

    const int steps_per_ms = static_cast<int>(std::round(1e-3 / config.dt));
    const int total_steps = static_cast<int>(std::round(total_ms)) * steps_per_ms;
    std::vector<Vec6> commands;
    commands.reserve(total_steps);

    Vec6 u_hold = u_start;
    auto clip = [](Vec6 u) { return u.cwiseMax(0.0).cwiseMin(3.0).eval(); };
    while (static_cast<int>(commands.size()) < total_steps) {
        // Pick a reachable random goal and its holding command.
        Vec6 u_goal = u_hold;
        for (int attempt = 0; attempt < 20; ++attempt) {
            const double pitch = pitch_d(rng);
            const double yaw = yaw_d(rng);
            PretensionProblem p;
            p.theta = 2.0;
            // Off-Listing torsion on half the goals: saccades between
            // Listing-plane targets barely move the torsion channel, leaving
            // its dynamics unidentifiable from the data.
            const double torsion =
                listing_torsion(pitch, yaw) + (twist_on(rng) ? twist_d(rng) : 0.0);
            p.target.orientation = matrix_of(EulerAngles{torsion, pitch, yaw});
            try {
                u_goal = solve_pretension(config, p).u0;
                break;
            } catch (const InfeasiblePretensionError&) {
                continue;
            }
        }
        // A hard overdriven pulse can slacken enough cables to let the globe
        // tumble past its stable envelope; screen each candidate segment and
        // redraw the overdrive until the excursion stays bounded.
        std::vector<Vec6> segment;
        Trajectory seg_traj;
        bool accepted = false;
        for (int attempt = 0; attempt < 20 && !accepted; ++attempt) {
            const Vec6 u_pulse = clip(u_goal + overdrive(rng) * (u_goal - u_hold));
            const Vec6 u_step = clip(u_goal);
            const int np = pulse_ms(rng) * steps_per_ms;
            const int nh = hold_ms(rng) * steps_per_ms;
            segment.assign(static_cast<std::size_t>(np), u_pulse);
            segment.insert(segment.end(), static_cast<std::size_t>(nh), u_step);
            seg_traj = simulate(config, x, segment, config.dt);
            accepted = true;
            for (const EyeState& s : seg_traj.states) {
                if (rotation_angle(s.orientation) > 0.9) {
                    accepted = false;
                    break;
                }
            }
        }
        if (!accepted) {
            // Fall back to the overdrive-free step, which lands on a solved
            // equilibrium and cannot leave the envelope.
            segment.assign(segment.size(), clip(u_goal));
            seg_traj = simulate(config, x, segment, config.dt);
        }
        commands.insert(commands.end(), segment.begin(), segment.end());
        x = seg_traj.states.back();
        u_hold = u_goal;
    }
    commands.resize(total_steps);

    const Trajectory traj = simulate(config, primary.target, commands, config.dt);

    Dataset out;
    out.seed = seed;
    const int sub = static_cast<int>(std::round(control_dt / config.dt));
    for (int i = 0; i + 1 < static_cast<int>(traj.size()); i += sub) {
        out.x.push_back(traj.states[i].as_vector());
        out.u.push_back(traj.commands[i]);
    }
    out.train_end = static_cast<std::size_t>(0.8 * out.x.size());
    out.val_end = static_cast<std::size_t>(0.9 * out.x.size());
    return out;
}

namespace {

struct Batches {
    Eigen::MatrixXd u_in;   // (s_u*(n_u+1)) x N, normalized
    Eigen::MatrixXd x_in;   // (s_x*(n_x+1)) x N, normalized
    Eigen::MatrixXd target; // s_x x N, natural units
    std::vector<int> train_idx, val_idx, test_idx;
};

Eigen::VectorXd stack_hist(const std::vector<Vec6>& seq, int t, int taps, const Vec6& scale) {
    Eigen::VectorXd v(6 * taps);
    for (int k = 0; k < taps; ++k) {  // oldest first
        v.segment<6>(6 * k) = seq[t - taps + 1 + k].cwiseQuotient(scale);
    }
    return v;
}

Batches prepare(const Dataset& data, const NarxConfig& cfg, const NarxWeights& w) {
    const int n = static_cast<int>(data.x.size());
    const int t0 = std::max(cfg.input_memory, cfg.state_memory);
    Batches b;
    const int count = n - 1 - t0;
    if (count <= 0) {
        throw NarxError("prepare: dataset too short for the configured memory");
    }
    b.u_in.resize(input_cols_u(cfg), count);
    b.x_in.resize(input_cols_x(cfg), count);
    b.target.resize(6, count);
    for (int s = 0; s < count; ++s) {
        const int t = t0 + s;
        b.u_in.col(s) = stack_hist(data.u, t, cfg.input_memory + 1, w.u_scale);
        b.x_in.col(s) = stack_hist(data.x, t, cfg.state_memory + 1, w.x_scale);
        // The network predicts the state increment; residual targets keep the
        // map near-identity, which stabilizes long closed-loop rollouts.
        b.target.col(s) = data.x[t + 1] - data.x[t];
        if (static_cast<std::size_t>(t + 1) < data.train_end) {
            b.train_idx.push_back(s);
        } else if (static_cast<std::size_t>(t + 1) < data.val_end) {
            b.val_idx.push_back(s);
        } else {
            b.test_idx.push_back(s);
        }
    }
    return b;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<int>& idx,
                       int begin, int end) {
    Eigen::MatrixXd out(m.rows(), end - begin);
    for (int i = begin; i < end; ++i) {
        out.col(i - begin) = m.col(idx[i]);
    }
    return out;
}

/// Per-channel-normalized mean squared error and (optionally) its gradient.
double loss_and_grad(const NarxWeights& w, const Eigen::MatrixXd& u_in,
                     const Eigen::MatrixXd& x_in, const Eigen::MatrixXd& target,
                     NarxWeights* grad) {
    const int batch = static_cast<int>(target.cols());
    const Eigen::MatrixXd z =
        ((w.w_u * u_in + w.w_x * x_in).colwise() + w.b1);
    const Eigen::MatrixXd h = logistic(z.array()).matrix();
    const Eigen::MatrixXd y = (w.w_o * h).colwise() + w.b2;
    const Eigen::MatrixXd resid =
        (y - target).array().colwise() / w.x_scale.array();
    const double loss = resid.squaredNorm() / (batch * resid.rows());
    if (grad != nullptr) {
        const Eigen::MatrixXd dy =
            (2.0 / (batch * resid.rows())) *
            (resid.array().colwise() / w.x_scale.array()).matrix();
        grad->w_o = dy * h.transpose();
        grad->b2 = dy.rowwise().sum();
        const Eigen::MatrixXd dh = w.w_o.transpose() * dy;
        const Eigen::MatrixXd dz =
            (dh.array() * h.array() * (1.0 - h.array())).matrix();
        grad->w_u = dz * u_in.transpose();
        grad->w_x = dz * x_in.transpose();
        grad->b1 = dz.rowwise().sum();
        grad->config = w.config;
    }
    return loss;
}

}  // namespace

Vec6 narx_forward(const NarxWeights& w, const std::vector<Vec6>& u_hist,
                  const std::vector<Vec6>& x_hist) {
    const NarxConfig& c = w.config;
    if (static_cast<int>(u_hist.size()) != c.input_memory + 1 ||
        static_cast<int>(x_hist.size()) != c.state_memory + 1) {
        throw NarxError("narx_forward: history lengths must be n_u+1 and n_x+1");
    }
    Eigen::VectorXd u_in(input_cols_u(c));
    Eigen::VectorXd x_in(input_cols_x(c));
    for (int k = 0; k <= c.input_memory; ++k) {
        u_in.segment<6>(6 * k) = u_hist[k].cwiseQuotient(w.u_scale);
    }
    for (int k = 0; k <= c.state_memory; ++k) {
        x_in.segment<6>(6 * k) = x_hist[k].cwiseQuotient(w.x_scale);
    }
    const Eigen::VectorXd z = w.w_u * u_in + w.w_x * x_in + w.b1;
    const Eigen::VectorXd h = logistic(z.array()).matrix();
    return x_hist.back() + w.b2 + w.w_o * h;
}

std::vector<Vec6> narx_rollout(const NarxWeights& w, const std::vector<Vec6>& u_traj,
                               const std::vector<Vec6>& x0_hist) {
    const NarxConfig& c = w.config;
    if (static_cast<int>(x0_hist.size()) != c.state_memory + 1) {
        throw NarxError("narx_rollout: initial state history must have n_x+1 entries");
    }
    std::vector<Vec6> x_hist = x0_hist;
    std::vector<Vec6> out;
    out.reserve(u_traj.size());
    out.push_back(x_hist.back());
    for (std::size_t t = 0; t + 1 < u_traj.size(); ++t) {
        std::vector<Vec6> u_hist;  // oldest first: u_{t-n_u} .. u_t
        for (int k = c.input_memory; k >= 0; --k) {
            const std::size_t idx = t >= static_cast<std::size_t>(k) ? t - k : 0;
            u_hist.push_back(u_traj[idx]);
        }
        const Vec6 next = narx_forward(w, u_hist, x_hist);
        if (!next.allFinite()) {
            throw NarxError("narx_rollout: non-finite prediction at step " + std::to_string(t));
        }
        x_hist.erase(x_hist.begin());
        x_hist.push_back(next);
        out.push_back(next);
    }
    return out;
}

namespace {

/// Worst-channel normalized closed-loop error over validation windows.
double rollout_validation_score(const NarxWeights& model, const Dataset& data) {
    const NarxConfig& config = model.config;
    const int n_x = config.state_memory;
    const int lo = static_cast<int>(data.train_end) + n_x;
    const int hi = static_cast<int>(data.val_end);
    const int len = std::min(1000, (hi - lo) / 3);
    if (len < 50) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    Vec6 sq = Vec6::Zero();
    int total = 0;
    for (int win = 0; win < 3; ++win) {
        const int start = lo + win * ((hi - lo - len) / 2);
        std::vector<Vec6> u_traj(data.u.begin() + start, data.u.begin() + start + len);
        std::vector<Vec6> x_hist(data.x.begin() + start - n_x,
                                 data.x.begin() + start + 1);
        for (int t = 0; t + 1 < len; ++t) {
            std::vector<Vec6> u_hist;
            for (int k = config.input_memory; k >= 0; --k) {
                u_hist.push_back(u_traj[t >= k ? t - k : 0]);
            }
            const Vec6 next = narx_forward(model, u_hist, x_hist);
            if (!next.allFinite()) {
                return std::numeric_limits<double>::infinity();
            }
            x_hist.erase(x_hist.begin());
            x_hist.push_back(next);
            sq += (next - data.x[start + t + 1]).cwiseAbs2();
            ++total;
        }
    }
    const Vec6 norm = (sq / total).cwiseQuotient(model.x_scale.cwiseAbs2());
    return norm.maxCoeff();
}

/// One Adam run from a given init seed; returns final weights (best epoch by
/// the rollout score) and fills the per-epoch report curves.
NarxWeights train_once(const Dataset& data, const Batches& b, const NarxConfig& config,
                       const TrainConfig& train, const Vec6& x_scale, unsigned seed,
                       TrainReport& rep) {
    NarxWeights w = init_weights(config, seed);
    w.x_scale = x_scale;

    const Eigen::MatrixXd val_u = gather(b.u_in, b.val_idx, 0, (int)b.val_idx.size());
    const Eigen::MatrixXd val_x = gather(b.x_in, b.val_idx, 0, (int)b.val_idx.size());
    const Eigen::MatrixXd val_t = gather(b.target, b.val_idx, 0, (int)b.val_idx.size());

    Eigen::VectorXd theta = w.flatten();
    Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    std::mt19937 rng(seed + 1);
    std::vector<int> order = b.train_idx;

    double best_score = std::numeric_limits<double>::infinity();
    double best_onestep = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta = theta;
    int since_best = 0;

    NarxWeights g = w;  // gradient scratch with matching shapes
    for (int epoch = 0; epoch < train.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        // Halve the step size periodically; the late fine-tuning phase decides
        // closed-loop stability.
        const double lr = train.learning_rate * std::pow(0.5, epoch / 150);
        double epoch_loss = 0.0;
        int batches = 0;
        for (int at = 0; at < static_cast<int>(order.size()); at += train.batch_size) {
            const int end = std::min<int>(at + train.batch_size, (int)order.size());
            const Eigen::MatrixXd bu = gather(b.u_in, order, at, end);
            Eigen::MatrixXd bx = gather(b.x_in, order, at, end);
            const Eigen::MatrixXd bt = gather(b.target, order, at, end);
            if (train.input_noise > 0.0) {
                // Jitter the fed-back state features so the one-step map stays
                // contractive when its own predictions are recycled in rollout.
                std::normal_distribution<double> dist(0.0, train.input_noise);
                for (int r = 0; r < bx.rows(); ++r) {
                    for (int cidx = 0; cidx < bx.cols(); ++cidx) {
                        bx(r, cidx) += dist(rng);
                    }
                }
            }
            w.unflatten(theta);
            epoch_loss += loss_and_grad(w, bu, bx, bt, &g);
            ++batches;
            const Eigen::VectorXd grad = g.flatten();
            ++step;
            m = beta1 * m + (1 - beta1) * grad;
            v = beta2 * v + (1 - beta2) * grad.cwiseProduct(grad);
            const double bc1 = 1 - std::pow(beta1, (double)step);
            const double bc2 = 1 - std::pow(beta2, (double)step);
            theta -= (lr / bc1) *
                     (m.array() / ((v.array() / bc2).sqrt() + eps)).matrix();
        }
        w.unflatten(theta);
        const double val = loss_and_grad(w, val_u, val_x, val_t, nullptr);
        rep.train_mse.push_back(epoch_loss / std::max(batches, 1));
        rep.val_mse.push_back(val);
        // Select weights by closed-loop rollout accuracy on validation
        // windows: one-step loss alone is blind to compounding drift.
        double score = std::numeric_limits<double>::infinity();
        if (std::isfinite(val) && val < 10.0 * best_onestep) {
            best_onestep = std::min(best_onestep, val);
            score = rollout_validation_score(w, data);
        }
        if (score < best_score) {
            best_score = score;
            best_theta = theta;
            rep.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= train.patience) {
            break;
        }
    }
    w.unflatten(best_theta);
    return w;
}

}  // namespace

NarxWeights train_narx(const Dataset& data, const NarxConfig& config,
                       const TrainConfig& train, TrainReport* report) {
    // Data-driven channel scales: normalizing features and loss by the
    // per-channel std of the training split balances the weak torsion
    // channel against the dominant horizontal/vertical ones.
    Vec6 x_scale;
    {
        Vec6 mean = Vec6::Zero(), sq = Vec6::Zero();
        const auto n = static_cast<double>(data.train_end);
        for (std::size_t i = 0; i < data.train_end; ++i) {
            mean += data.x[i];
        }
        mean /= n;
        for (std::size_t i = 0; i < data.train_end; ++i) {
            sq += (data.x[i] - mean).cwiseAbs2();
        }
        x_scale = (sq / n).cwiseSqrt().cwiseMax(1e-3);
    }

    NarxWeights probe = init_weights(config, train.seed);
    probe.x_scale = x_scale;
    const Batches b = prepare(data, config, probe);
    if (b.train_idx.empty() || b.val_idx.empty() || b.test_idx.empty()) {
        throw NarxError("train_narx: empty split");
    }

    TrainReport local;
    TrainReport& rep = report != nullptr ? *report : local;
    NarxWeights best;
    double best_score = std::numeric_limits<double>::infinity();
    const int restarts = std::max(1, train.restarts);
    for (int rs = 0; rs < restarts; ++rs) {
        TrainReport r;
        NarxWeights w = train_once(data, b, config, train, x_scale,
                                   train.seed + 1000u * static_cast<unsigned>(rs), r);
        const double score = rollout_validation_score(w, data);
        if (rs == 0 || score < best_score) {
            best_score = score;
            best = w;
            rep.train_mse = r.train_mse;
            rep.val_mse = r.val_mse;
            rep.best_epoch = r.best_epoch;
        }
    }

    // Test-split one-step MSE over the orientation channels, (rad/2)^2.
    const Eigen::MatrixXd tu = gather(b.u_in, b.test_idx, 0, (int)b.test_idx.size());
    const Eigen::MatrixXd tx = gather(b.x_in, b.test_idx, 0, (int)b.test_idx.size());
    const Eigen::MatrixXd tt = gather(b.target, b.test_idx, 0, (int)b.test_idx.size());
    const Eigen::MatrixXd z = ((best.w_u * tu + best.w_x * tx).colwise() + best.b1);
    const Eigen::MatrixXd y = (best.w_o * logistic(z.array()).matrix()).colwise() + best.b2;
    rep.test_mse = (y - tt).topRows<3>().squaredNorm() / (3.0 * tt.cols());
    return best;
}

double gradient_check(const NarxWeights& w, const Dataset& data, int count, unsigned seed) {
    const Batches b = prepare(data, w.config, w);
    const int n = std::min<int>(512, (int)b.train_idx.size());
    const Eigen::MatrixXd bu = gather(b.u_in, b.train_idx, 0, n);
    const Eigen::MatrixXd bx = gather(b.x_in, b.train_idx, 0, n);
    const Eigen::MatrixXd bt = gather(b.target, b.train_idx, 0, n);

    NarxWeights g = w;
    NarxWeights probe = w;
    loss_and_grad(w, bu, bx, bt, &g);
    const Eigen::VectorXd analytic = g.flatten();
    Eigen::VectorXd theta = w.flatten();

    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(theta.size()) - 1);
    double worst = 0.0;
    const double h = 1e-4;  // loss curvature is mild; larger h beats roundoff
    for (int c = 0; c < count; ++c) {
        const int i = pick(rng);
        Eigen::VectorXd tp = theta;
        tp[i] += h;
        probe.unflatten(tp);
        const double lp = loss_and_grad(probe, bu, bx, bt, nullptr);
        tp[i] = theta[i] - h;
        probe.unflatten(tp);
        const double lm = loss_and_grad(probe, bu, bx, bt, nullptr);
        const double fd = (lp - lm) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-10});
        worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
    }
    return worst;
}

Vec6 r_squared(const std::vector<Vec6>& predicted, const std::vector<Vec6>& truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw std::invalid_argument("r_squared: length mismatch");
    }
    Vec6 mean = Vec6::Zero();
    for (const Vec6& x : truth) mean += x;
    mean /= static_cast<double>(truth.size());
    Vec6 ss_res = Vec6::Zero();
    Vec6 ss_tot = Vec6::Zero();
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (predicted[i] - truth[i]).cwiseAbs2();
        ss_tot += (truth[i] - mean).cwiseAbs2();
    }
    Vec6 out;
    for (int k = 0; k < 6; ++k) {
        out[k] = ss_tot[k] > 0 ? 1.0 - ss_res[k] / ss_tot[k] : 1.0;
    }
    return out;
}

void save_weights(const NarxWeights& w, const std::string& path) {
    nlohmann::json j;
    j["hidden_units"] = w.config.hidden_units;
    j["input_memory"] = w.config.input_memory;
    j["state_memory"] = w.config.state_memory;
    j["state_width"] = w.config.state_width;
    j["input_width"] = w.config.input_width;
    j["dt"] = w.config.dt;
    auto mat = [](const Eigen::MatrixXd& m) {
        std::vector<double> v(m.data(), m.data() + m.size());
        return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", v}};
    };
    j["w_u"] = mat(w.w_u);
    j["w_x"] = mat(w.w_x);
    j["w_o"] = mat(w.w_o);
    j["b1"] = std::vector<double>(w.b1.data(), w.b1.data() + w.b1.size());
    j["b2"] = std::vector<double>(w.b2.data(), w.b2.data() + w.b2.size());
    j["u_scale"] = std::vector<double>(w.u_scale.data(), w.u_scale.data() + 6);
    j["x_scale"] = std::vector<double>(w.x_scale.data(), w.x_scale.data() + 6);
    std::ofstream out(path);
    if (!out) {
        throw NarxError("save_weights: cannot open " + path);
    }
    out << j.dump(2) << "\n";
}

NarxWeights load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw NarxError("load_weights: cannot open " + path);
    }
    nlohmann::json j;
    in >> j;
    NarxWeights w;
    w.config.hidden_units = j.at("hidden_units");
    w.config.input_memory = j.at("input_memory");
    w.config.state_memory = j.at("state_memory");
    w.config.state_width = j.at("state_width");
    w.config.input_width = j.at("input_width");
    w.config.dt = j.at("dt");
    auto mat = [](const nlohmann::json& m) {
        const std::vector<double> v = m.at("data");
        Eigen::MatrixXd out(m.at("rows").get<int>(), m.at("cols").get<int>());
        std::copy(v.begin(), v.end(), out.data());
        return out;
    };
    w.w_u = mat(j.at("w_u"));
    w.w_x = mat(j.at("w_x"));
    w.w_o = mat(j.at("w_o"));
    const std::vector<double> b1 = j.at("b1");
    const std::vector<double> b2 = j.at("b2");
    w.b1 = Eigen::Map<const Eigen::VectorXd>(b1.data(), b1.size());
    w.b2 = Eigen::Map<const Eigen::VectorXd>(b2.data(), b2.size());
    const std::vector<double> us = j.at("u_scale");
    const std::vector<double> xs = j.at("x_scale");
    w.u_scale = Eigen::Map<const Vec6>(us.data());
    w.x_scale = Eigen::Map<const Vec6>(xs.data());
    return w;
}

}  // namespace oculo
