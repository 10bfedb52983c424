#include "doctest.h"

#include "oculo/narx.hpp"
#include "oculo/pretension.hpp"

#include <random>

using namespace oculo;

namespace {

// Independent scalar-loop reimplementation of the predictor, written straight
// from the layer equations with no shared code.
Vec6 oracle_forward(const NarxWeights& w, const std::vector<Vec6>& u_hist,
                    const std::vector<Vec6>& x_hist) {
    const int nh = w.config.hidden_units;
    Vec6 y;
    std::vector<double> hidden(nh);
    for (int i = 0; i < nh; ++i) {
        double z = w.b1[i];
        int col = 0;
        for (std::size_t k = 0; k < u_hist.size(); ++k) {
            for (int c = 0; c < 6; ++c, ++col) {
                z += w.w_u(i, col) * u_hist[k][c] / w.u_scale[c];
            }
        }
        col = 0;
        for (std::size_t k = 0; k < x_hist.size(); ++k) {
            for (int c = 0; c < 6; ++c, ++col) {
                z += w.w_x(i, col) * x_hist[k][c];
            }
        }
        hidden[i] = 1.0 / (1.0 + std::exp(-z));
    }
    for (int o = 0; o < 6; ++o) {
        double v = w.b2[o];
        for (int i = 0; i < nh; ++i) {
            v += w.w_o(o, i) * hidden[i];
        }
        y[o] = v;
    }
    return y;
}

Dataset tiny_dataset(unsigned seed) {
    static Dataset cache = gen_dataset(PlantConfig::standard(), 12000, 33);
    Dataset d = cache;
    d.seed = seed;
    return d;
}

std::vector<Vec6> rand_hist(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> d(-0.4, 0.4);
    std::vector<Vec6> out;
    for (int i = 0; i < n; ++i) {
        Vec6 v;
        for (int k = 0; k < 6; ++k) v[k] = d(rng);
        out.push_back(v);
    }
    return out;
}

}  // namespace

TEST_CASE("forward degenerate weight cases") {
    NarxConfig cfg;
    NarxWeights w = init_weights(cfg, 1);
    w.w_u.setZero();
    w.w_x.setZero();
    w.w_o.setZero();
    w.b2 << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6;

    std::mt19937 rng(5);
    const Vec6 y = narx_forward(w, rand_hist(rng, cfg.input_memory + 1),
                                rand_hist(rng, cfg.state_memory + 1));
    CHECK((y - w.b2).norm() == 0.0);

    // Nonzero hidden weights but zero output weights still give b2.
    NarxWeights w2 = init_weights(cfg, 2);
    w2.w_o.setZero();
    w2.b2 = w.b2;
    const Vec6 y2 = narx_forward(w2, rand_hist(rng, cfg.input_memory + 1),
                                 rand_hist(rng, cfg.state_memory + 1));
    CHECK((y2 - w.b2).norm() == 0.0);
}

TEST_CASE("forward matches the scalar-loop oracle") {
    NarxConfig cfg;
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        NarxWeights w = init_weights(cfg, 100 + trial);
        const auto uh = rand_hist(rng, cfg.input_memory + 1);
        const auto xh = rand_hist(rng, cfg.state_memory + 1);
        CHECK((narx_forward(w, uh, xh) - oracle_forward(w, uh, xh)).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("forward validates history lengths") {
    NarxConfig cfg;
    NarxWeights w = init_weights(cfg, 1);
    std::mt19937 rng(9);
    CHECK_THROWS_AS((void)narx_forward(w, rand_hist(rng, cfg.input_memory + 2),
                                       rand_hist(rng, cfg.state_memory + 1)),
                    NarxError);
}

TEST_CASE("dataset generation is deterministic and in range") {
    const PlantConfig c = PlantConfig::standard();
    const Dataset a = gen_dataset(c, 12000, 33);
    const Dataset b = gen_dataset(c, 12000, 33);
    REQUIRE(a.u.size() == b.u.size());
    for (std::size_t i = 0; i < a.u.size(); ++i) {
        CHECK((a.u[i] - b.u[i]).norm() == 0.0);
        CHECK((a.x[i] - b.x[i]).norm() == 0.0);
        CHECK(a.u[i].minCoeff() >= 0.0);
        CHECK(a.u[i].maxCoeff() <= 3.0);
    }
    const Dataset other = gen_dataset(c, 12000, 34);
    double diff = 0.0;
    for (std::size_t i = 0; i < other.u.size() && i < a.u.size(); ++i) {
        diff += (a.u[i] - other.u[i]).norm();
    }
    CHECK(diff > 0.0);
    CHECK(a.train_end < a.val_end);
    CHECK(a.val_end < a.x.size());
}

TEST_CASE("dataset covers more horizontal than vertical or torsional range") {
    const Dataset d = tiny_dataset(33);
    Vec3 lo = Vec3::Constant(1e9), hi = Vec3::Constant(-1e9);
    for (const Vec6& x : d.x) {
        for (int k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], x[k]);
            hi[k] = std::max(hi[k], x[k]);
        }
    }
    const Vec3 span = hi - lo;
    CHECK(span[2] > span[1]);  // horizontal (z) wider than vertical (y)
    CHECK(span[2] > span[0]);  // and wider than torsion (x)
}

TEST_CASE("analytic gradient matches finite differences") {
    const Dataset d = tiny_dataset(33);
    NarxConfig cfg;
    const NarxWeights w = init_weights(cfg, 7);
    CHECK(gradient_check(w, d, 100, 11) < 1e-4);
}

TEST_CASE("training learns a short dataset") {
    const Dataset d = tiny_dataset(33);
    NarxConfig cfg;
    TrainConfig tc;
    tc.max_epochs = 60;
    TrainReport rep;
    const NarxWeights w = train_narx(d, cfg, tc, &rep);
    REQUIRE(!rep.train_mse.empty());
    CHECK(rep.train_mse.back() < rep.train_mse.front());
    CHECK(rep.test_mse < 0.02);  // loose: 12 s of data only
    CHECK(rep.best_epoch >= 0);
}

TEST_CASE("rollout holds an equilibrium and stays finite") {
    const PlantConfig c = PlantConfig::standard();
    const Dataset d = tiny_dataset(33);
    NarxConfig cfg;
    TrainConfig tc;
    tc.max_epochs = 60;
    const NarxWeights w = train_narx(d, cfg, tc, nullptr);

    PretensionProblem p;
    p.theta = 2.0;
    const Vec6 u0 = solve_pretension(c, p).u0;
    const Vec6 x0 = p.target.as_vector();
    const std::vector<Vec6> u_traj(167, u0);  // 500 ms at 3 ms
    const std::vector<Vec6> x_hist(cfg.state_memory + 1, x0);
    const std::vector<Vec6> roll = narx_rollout(w, u_traj, x_hist);
    REQUIRE(roll.size() == u_traj.size());
    for (const Vec6& x : roll) {
        CHECK(x.allFinite());
    }
    // 12 s of training data only; the full-dataset model is held to a much
    // tighter drift bound in the acceptance run.
    CHECK((roll.back().head<3>() - x0.head<3>()).norm() < 0.15);
}

TEST_CASE("weights round-trip through JSON") {
    NarxConfig cfg;
    NarxWeights w = init_weights(cfg, 21);
    const std::string path = "/tmp/oculo_nx_weights.json";
    save_weights(w, path);
    const NarxWeights back = load_weights(path);
    CHECK((back.w_u - w.w_u).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.w_x - w.w_x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.w_o - w.w_o).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.b1 - w.b1).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.b2 - w.b2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.u_scale - w.u_scale).norm() == 0.0);
    CHECK((back.x_scale - w.x_scale).norm() == 0.0);
    std::mt19937 rng(3);
    const auto uh = rand_hist(rng, cfg.input_memory + 1);
    const auto xh = rand_hist(rng, cfg.state_memory + 1);
    CHECK((narx_forward(back, uh, xh) - narx_forward(w, uh, xh)).norm() == 0.0);
}

TEST_CASE("r_squared sanity") {
    std::vector<Vec6> truth, pred;
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> dd(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        Vec6 v;
        for (int k = 0; k < 6; ++k) v[k] = dd(rng);
        truth.push_back(v);
        pred.push_back(v);
    }
    CHECK((r_squared(pred, truth) - Vec6::Ones()).norm() < 1e-12);
    // Predicting the mean gives R^2 ~ 0.
    Vec6 mean = Vec6::Zero();
    for (const Vec6& v : truth) mean += v;
    mean /= 100.0;
    std::vector<Vec6> flat(100, mean);
    CHECK(r_squared(flat, truth).cwiseAbs().maxCoeff() < 1e-12);
}
