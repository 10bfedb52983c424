#include "oculo/pretension.hpp"

#include <limits>
#include <vector>

namespace oculo {

std::array<std::pair<int, int>, 3> antagonist_pairs() {
    return {{{MR, LR}, {IR, SR}, {IO, SO}}};
}

namespace {

// Tension of a taut cable is affine in u: T_m(u) = g_m * u_m + t0_m with
// g_m = k_m r / l0_m and t0_m the tension at zero winding. The elastic torque
// is then G u + b with G's columns g_m * (Q_m x phi_m).
struct AffineModel {
    Eigen::Matrix<double, 3, 6> torque_gain;   // G
    Vec3 torque_offset;                        // b
    Vec6 tension_gain;                         // g
    Vec6 tension_offset;                       // t0
};

AffineModel build_affine(const PlantConfig& config, const EyeState& state) {
    AffineModel m;
    m.torque_offset = Vec3::Zero();
    for (int i = 0; i < kNumMuscles; ++i) {
        const Vec3 insertion_head = state.orientation * config.insertion_eye[i];
        const Vec3 chord = config.routing_head[i] - insertion_head;
        const double chord_len = chord.norm();
        if (chord_len < 1e-9) {
            throw DegenerateGeometryError("pretension: degenerate cable geometry");
        }
        const Vec3 dir_eye = state.orientation.transpose() * (chord / chord_len);
        const Vec3 arm = config.insertion_eye[i].cross(dir_eye);
        const double c = config.stiffness[i] / config.rest_length[i];
        m.tension_gain[i] = c * config.spindle_radius;
        m.tension_offset[i] = c * (chord_len - config.rest_length[i]);
        m.torque_gain.col(i) = m.tension_gain[i] * arm;
        m.torque_offset += m.tension_offset[i] * arm;
    }
    return m;
}

}  // namespace

PretensionResult solve_pretension(const PlantConfig& config, const PretensionProblem& problem) {
    if (problem.target.omega.norm() > 1e-12) {
        throw std::invalid_argument("solve_pretension: target velocity must be zero");
    }
    const AffineModel aff = build_affine(config, problem.target);

    // Inequalities C u >= d: six tension bounds (u_m >= lb_m) and three pair
    // sums (u_i + u_j >= 2 theta).
    constexpr int kNumIneq = 9;
    Eigen::Matrix<double, kNumIneq, 6> C = Eigen::Matrix<double, kNumIneq, 6>::Zero();
    Eigen::Matrix<double, kNumIneq, 1> d;
    for (int m = 0; m < kNumMuscles; ++m) {
        C(m, m) = 1.0;
        d[m] = (problem.tension_margin - aff.tension_offset[m]) / aff.tension_gain[m];
    }
    const auto pairs = antagonist_pairs();
    for (int p = 0; p < 3; ++p) {
        C(6 + p, pairs[p].first) = 1.0;
        C(6 + p, pairs[p].second) = 1.0;
        d[6 + p] = 2.0 * problem.theta;
    }

    // min u'u  s.t.  G u = -b,  C u >= d. Enumerate candidate active sets
    // (at most three independent inequalities can be active on top of the
    // three equality rows) and keep the KKT point with all multipliers and
    // primal residuals valid.
    const Eigen::Matrix<double, 3, 6>& G = aff.torque_gain;
    const Vec3 beq = -aff.torque_offset;

    // Some geometries span fewer than three torque directions (e.g. a plant
    // where no cable can produce torsion). Keep only an independent subset of
    // the equality rows; the dropped rows are re-checked on every candidate.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> row_qr(G.transpose());
    row_qr.setThreshold(1e-10);
    const int rank = static_cast<int>(row_qr.rank());
    Eigen::MatrixXd Geq(rank, 6);
    Eigen::VectorXd beq_r(rank);
    for (int r = 0; r < rank; ++r) {
        const int row = row_qr.colsPermutation().indices()[r];
        Geq.row(r) = G.row(row);
        beq_r[r] = beq[row];
    }

    double best_obj = std::numeric_limits<double>::infinity();
    Vec6 best_u = Vec6::Zero();
    bool found = false;

    std::vector<std::vector<int>> subsets;
    subsets.push_back({});
    for (int i = 0; i < kNumIneq; ++i) {
        subsets.push_back({i});
        for (int j = i + 1; j < kNumIneq; ++j) {
            subsets.push_back({i, j});
            for (int k = j + 1; k < kNumIneq; ++k) {
                subsets.push_back({i, j, k});
            }
        }
    }

    for (const auto& active : subsets) {
        const int na = static_cast<int>(active.size());
        const int dim = 6 + rank + na;
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
        kkt.topLeftCorner(6, 6) = 2.0 * Eigen::MatrixXd::Identity(6, 6);
        kkt.block(0, 6, 6, rank) = -Geq.transpose();
        kkt.block(6, 0, rank, 6) = Geq;
        rhs.segment(6, rank) = beq_r;
        for (int a = 0; a < na; ++a) {
            kkt.block(0, 6 + rank + a, 6, 1) = -C.row(active[a]).transpose();
            kkt.block(6 + rank + a, 0, 1, 6) = C.row(active[a]);
            rhs[6 + rank + a] = d[active[a]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible()) {
            continue;
        }
        const Eigen::VectorXd sol = lu.solve(rhs);
        const Vec6 u = sol.head<6>();
        // Dual feasibility on the active inequalities.
        bool ok = true;
        for (int a = 0; a < na; ++a) {
            if (sol[6 + rank + a] < -1e-9) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        // Primal feasibility on the inactive inequalities, plus the equality
        // rows dropped by the rank reduction.
        const Eigen::Matrix<double, kNumIneq, 1> slack = C * u - d;
        if (slack.minCoeff() < -1e-9 || (G * u - beq).norm() > 1e-8) {
            continue;
        }
        const double obj = u.squaredNorm();
        if (obj < best_obj) {
            best_obj = obj;
            best_u = u;
            found = true;
        }
    }

    if (!found) {
        std::string msg = "solve_pretension: no positive-tension equilibrium at the requested "
                          "orientation (torque equality with tension/pair bounds infeasible)";
        throw InfeasiblePretensionError(msg);
    }

    PretensionResult out;
    out.u0 = best_u;
    out.objective = best_obj;
    const TorqueBreakdown tq = net_torque(config, problem.target, best_u);
    for (int m = 0; m < kNumMuscles; ++m) {
        out.tensions[m] = tq.forces[m].tension;
    }
    out.torque_residual = tq.elastic.norm();
    return out;
}

}  // namespace oculo
