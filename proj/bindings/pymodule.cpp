// Python bindings for the cable-driven eye toolkit. The surface mirrors the
// C++ pipeline: plant simulation, pretension, linearization, both planners,
// the learned one-step predictor, and the experiment battery.

#include "oculo/analysis.hpp"
#include "oculo/config.hpp"
#include "oculo/control_linear.hpp"
#include "oculo/control_nonlinear.hpp"
#include "oculo/costs.hpp"
#include "oculo/linearize.hpp"
#include "oculo/narx.hpp"
#include "oculo/parallel.hpp"
#include "oculo/plant.hpp"
#include "oculo/pretension.hpp"
#include "oculo/rotations.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace oculo;

namespace {

Mat3 orientation_from_rotvec(const Vec3& rotvec) { return matrix_of(rotvec); }

}  // namespace

PYBIND11_MODULE(_oculo, m) {
    m.doc() = "Simulation and optimal control of a six-cable biomimetic eye";

    py::register_exception<OutOfChartError>(m, "OutOfChartError");
    py::register_exception<InfeasiblePretensionError>(m, "InfeasiblePretensionError");
    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<PlanningError>(m, "PlanningError");
    py::register_exception<NarxError>(m, "NarxError");
    py::register_exception<AnalysisError>(m, "AnalysisError");

    // --- rotations -------------------------------------------------------
    m.def("exp_map", &exp_map, py::arg("eta"));
    m.def("log_map", &log_map, py::arg("rotation"));
    m.def("rotvec_of", py::overload_cast<const Mat3&>(&rotvec_of), py::arg("rotation"));
    m.def("matrix_of_rotvec", &orientation_from_rotvec, py::arg("rotvec"));
    m.def("listing_torsion", &listing_torsion, py::arg("pitch"), py::arg("yaw"));
    m.def("rotate_about_z", &rotate_about_z, py::arg("rotvecs"), py::arg("angle"));

    // --- plant -----------------------------------------------------------
    py::class_<PlantConfig>(m, "PlantConfig")
        .def(py::init<>())
        .def_static("standard", &PlantConfig::standard)
        .def_readwrite("inertia", &PlantConfig::inertia)
        .def_readwrite("damping", &PlantConfig::damping)
        .def_readwrite("stiffness", &PlantConfig::stiffness)
        .def_readwrite("rest_length", &PlantConfig::rest_length)
        .def_readwrite("spindle_radius", &PlantConfig::spindle_radius)
        .def_readwrite("eye_radius", &PlantConfig::eye_radius)
        .def_readwrite("dt", &PlantConfig::dt);

    py::class_<EyeState>(m, "EyeState")
        .def(py::init<>())
        .def_readwrite("orientation", &EyeState::orientation)
        .def_readwrite("omega", &EyeState::omega)
        .def_property(
            "rotvec", [](const EyeState& s) { return rotvec_of(s.orientation); },
            [](EyeState& s, const Vec3& r) { s.orientation = matrix_of(r); })
        .def("as_vector", &EyeState::as_vector)
        .def_static("from_vector", &EyeState::from_vector);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("t", &Trajectory::t)
        .def_readonly("commands", &Trajectory::commands)
        .def_readonly("tensions", &Trajectory::tensions)
        .def("__len__", &Trajectory::size)
        .def("state", [](const Trajectory& tr, std::size_t i) { return tr.states.at(i); })
        .def("rotvecs", [](const Trajectory& tr) {
            std::vector<Vec3> out;
            out.reserve(tr.size());
            for (const EyeState& s : tr.states) {
                out.push_back(rotvec_of(s.orientation));
            }
            return out;
        });

    m.def("simulate", &simulate, py::arg("config"), py::arg("initial"), py::arg("commands"),
          py::arg("dt"));
    m.def("muscle_pull_probe", &muscle_pull_probe, py::arg("config"), py::arg("u0"),
          py::arg("muscle"), py::arg("delta_u") = 0.1, py::arg("horizon_s") = 0.1);
    m.def("muscle_names", [] {
        return std::vector<std::string>(kMuscleNames.begin(), kMuscleNames.end());
    });

    // --- pretension ------------------------------------------------------
    py::class_<PretensionResult>(m, "PretensionResult")
        .def_readonly("u0", &PretensionResult::u0)
        .def_readonly("tensions", &PretensionResult::tensions)
        .def_readonly("torque_residual", &PretensionResult::torque_residual)
        .def_readonly("objective", &PretensionResult::objective);

    m.def(
        "solve_pretension",
        [](const PlantConfig& config, const Vec3& rotvec, double theta) {
            PretensionProblem problem;
            problem.target.orientation = matrix_of(rotvec);
            problem.theta = theta;
            return solve_pretension(config, problem);
        },
        py::arg("config"), py::arg("rotvec") = Vec3::Zero().eval(), py::arg("theta") = 2.0);

    // --- costs -----------------------------------------------------------
    py::class_<CostWeights>(m, "CostWeights")
        .def(py::init<>())
        .def_readwrite("lambda_accuracy", &CostWeights::lambda_accuracy)
        .def_readwrite("lambda_duration", &CostWeights::lambda_duration)
        .def_readwrite("lambda_energy", &CostWeights::lambda_energy)
        .def_readwrite("beta", &CostWeights::beta)
        .def_readwrite("window", &CostWeights::window);

    py::class_<CostBreakdown>(m, "CostBreakdown")
        .def_readonly("accuracy", &CostBreakdown::accuracy)
        .def_readonly("duration", &CostBreakdown::duration)
        .def_readonly("energy", &CostBreakdown::energy)
        .def_readonly("total", &CostBreakdown::total);

    // --- configuration ---------------------------------------------------
    py::class_<NarxConfig>(m, "NarxConfig")
        .def(py::init<>())
        .def_readwrite("hidden_units", &NarxConfig::hidden_units)
        .def_readwrite("input_memory", &NarxConfig::input_memory)
        .def_readwrite("state_memory", &NarxConfig::state_memory)
        .def_readwrite("dt", &NarxConfig::dt);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("patience", &TrainConfig::patience)
        .def_readwrite("input_noise", &TrainConfig::input_noise)
        .def_readwrite("restarts", &TrainConfig::restarts)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("duration_grid", &SolverConfig::duration_grid)
        .def_readwrite("t_max", &SolverConfig::t_max)
        .def_readwrite("control_dt", &SolverConfig::control_dt)
        .def_readwrite("max_iterations", &SolverConfig::max_iterations)
        .def_readwrite("c_ratio", &SolverConfig::c_ratio)
        .def_readwrite("initial_coefficient", &SolverConfig::initial_coefficient);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("theta", &ExperimentConfig::theta)
        .def_readwrite("settle_s", &ExperimentConfig::settle_s);

    py::class_<ToolConfig>(m, "ToolConfig")
        .def(py::init<>())
        .def_readwrite("plant", &ToolConfig::plant)
        .def_readwrite("costs_linear", &ToolConfig::costs_linear)
        .def_readwrite("costs_nonlinear", &ToolConfig::costs_nonlinear)
        .def_readwrite("narx", &ToolConfig::narx)
        .def_readwrite("train", &ToolConfig::train)
        .def_readwrite("solver", &ToolConfig::solver)
        .def_readwrite("experiment", &ToolConfig::experiment);

    m.def("load_config", &load_config, py::arg("path"));
    m.def("save_config", &save_config, py::arg("config"), py::arg("path"));
    m.def("config_digest", &config_digest, py::arg("config"));
    m.def("set_max_workers", &set_max_workers, py::arg("n"));

    // --- linearization ---------------------------------------------------
    py::class_<LinearModel>(m, "LinearModel")
        .def_readonly("a", &LinearModel::a)
        .def_readonly("b", &LinearModel::b)
        .def_readonly("a_d", &LinearModel::a_d)
        .def_readonly("b_d", &LinearModel::b_d)
        .def_readonly("equilibrium_command", &LinearModel::equilibrium_command)
        .def_readonly("dt", &LinearModel::dt);

    m.def(
        "linearize",
        [](const PlantConfig& config, const EyeState& x_bar, const Vec6& u_bar, double dt) {
            return linearize(config, x_bar, u_bar, dt);
        },
        py::arg("config"), py::arg("x_bar"), py::arg("u_bar"), py::arg("dt") = 3e-3);

    // --- linear planner --------------------------------------------------
    py::class_<DurationCurvePoint>(m, "DurationCurvePoint")
        .def_readonly("horizon", &DurationCurvePoint::horizon)
        .def_readonly("duration_s", &DurationCurvePoint::duration_s)
        .def_readonly("costs", &DurationCurvePoint::costs)
        .def_readonly("feasible", &DurationCurvePoint::feasible);

    py::class_<LinearPlan>(m, "LinearPlan")
        .def_readonly("commands", &LinearPlan::commands)
        .def_readonly("horizon", &LinearPlan::horizon)
        .def_readonly("duration_s", &LinearPlan::duration_s)
        .def_readonly("costs", &LinearPlan::costs)
        .def_readonly("rollout", &LinearPlan::rollout)
        .def_readonly("kkt_residual", &LinearPlan::kkt_residual);

    py::class_<PlanSearchResult>(m, "PlanSearchResult")
        .def_readonly("best", &PlanSearchResult::best)
        .def_readonly("curve", &PlanSearchResult::curve);

    m.def("plan_saccade", &plan_saccade, py::arg("config"), py::arg("model"), py::arg("goal"),
          py::arg("weights"), py::arg("solver"));
    m.def("replay_on_plant", &replay_on_plant, py::arg("config"), py::arg("x0"),
          py::arg("commands"), py::arg("control_dt"), py::arg("extra_samples"));

    // --- learned model ---------------------------------------------------
    py::class_<Dataset>(m, "Dataset")
        .def_readonly("u", &Dataset::u)
        .def_readonly("x", &Dataset::x)
        .def_readonly("train_end", &Dataset::train_end)
        .def_readonly("val_end", &Dataset::val_end)
        .def_readonly("seed", &Dataset::seed);

    py::class_<NarxWeights>(m, "NarxWeights")
        .def("num_parameters", &NarxWeights::num_parameters);

    py::class_<TrainReport>(m, "TrainReport")
        .def(py::init<>())
        .def_readonly("train_mse", &TrainReport::train_mse)
        .def_readonly("val_mse", &TrainReport::val_mse)
        .def_readonly("best_epoch", &TrainReport::best_epoch)
        .def_readonly("test_mse", &TrainReport::test_mse);

    m.def("gen_dataset", &gen_dataset, py::arg("config"), py::arg("total_ms"), py::arg("seed"),
          py::arg("control_dt") = 3e-3);
    m.def(
        "train_narx",
        [](const Dataset& data, const NarxConfig& config, const TrainConfig& train) {
            TrainReport report;
            NarxWeights w = train_narx(data, config, train, &report);
            return py::make_tuple(std::move(w), report);
        },
        py::arg("data"), py::arg("config"), py::arg("train"));
    m.def("narx_rollout", &narx_rollout, py::arg("weights"), py::arg("u_traj"),
          py::arg("x0_hist"));
    m.def("gradient_check", &gradient_check, py::arg("weights"), py::arg("data"),
          py::arg("count"), py::arg("seed"));
    m.def("r_squared", &r_squared, py::arg("predicted"), py::arg("truth"));
    m.def("save_weights", &save_weights, py::arg("weights"), py::arg("path"));
    m.def("load_weights", &load_weights, py::arg("path"));

    // --- nonlinear planner -----------------------------------------------
    py::class_<NonlinearPlan>(m, "NonlinearPlan")
        .def_readonly("commands", &NonlinearPlan::commands)
        .def_readonly("horizon", &NonlinearPlan::horizon)
        .def_readonly("duration_s", &NonlinearPlan::duration_s)
        .def_readonly("model_costs", &NonlinearPlan::model_costs)
        .def_readonly("costs", &NonlinearPlan::costs)
        .def_readonly("rollout", &NonlinearPlan::rollout);

    py::class_<NonlinearSearchResult>(m, "NonlinearSearchResult")
        .def_readonly("best", &NonlinearSearchResult::best)
        .def_readonly("curve", &NonlinearSearchResult::curve);

    m.def("optimize_traj", &optimize_traj, py::arg("config"), py::arg("narx"), py::arg("x0"),
          py::arg("goal"), py::arg("weights"), py::arg("solver"),
          py::call_guard<py::gil_scoped_release>());

    // --- analysis --------------------------------------------------------
    py::class_<SaccadeRecord>(m, "SaccadeRecord")
        .def_readonly("controller", &SaccadeRecord::controller)
        .def_readonly("amplitude_deg", &SaccadeRecord::amplitude_deg)
        .def_readonly("duration_ms", &SaccadeRecord::duration_ms)
        .def_readonly("peak_velocity_deg_s", &SaccadeRecord::peak_velocity_deg_s)
        .def_readonly("endpoint_error_deg", &SaccadeRecord::endpoint_error_deg)
        .def_readonly("relative_error", &SaccadeRecord::relative_error)
        .def_readonly("straightness", &SaccadeRecord::straightness)
        .def_readonly("skewness", &SaccadeRecord::skewness)
        .def_readonly("costs", &SaccadeRecord::costs)
        .def_readonly("ok", &SaccadeRecord::ok)
        .def_readonly("error", &SaccadeRecord::error);

    py::class_<TargetSet>(m, "TargetSet")
        .def_readonly("targets", &TargetSet::targets)
        .def_readonly("seed", &TargetSet::seed)
        .def("orientation", &TargetSet::orientation, py::arg("index"));

    py::class_<LineFit>(m, "LineFit")
        .def_readonly("slope", &LineFit::slope)
        .def_readonly("intercept", &LineFit::intercept)
        .def_readonly("r_squared", &LineFit::r_squared);

    py::class_<MainSequence>(m, "MainSequence")
        .def_readonly("duration_vs_amplitude", &MainSequence::duration_vs_amplitude)
        .def_readonly("vpkd_vs_amplitude", &MainSequence::vpkd_vs_amplitude);

    py::class_<ListingBin>(m, "ListingBin")
        .def_readonly("std_deg", &ListingBin::std_deg)
        .def_readonly("max_deg", &ListingBin::max_deg)
        .def_readonly("count", &ListingBin::count);

    py::class_<ListingStats>(m, "ListingStats")
        .def_readonly("alignment_deg", &ListingStats::alignment_deg)
        .def_readonly("aligned_std_deg", &ListingStats::aligned_std_deg)
        .def_readonly("bins", &ListingStats::bins);

    py::class_<ExperimentReport>(m, "ExperimentReport")
        .def_readonly("controller", &ExperimentReport::controller)
        .def_readonly("mode", &ExperimentReport::mode)
        .def_readonly("records", &ExperimentReport::records)
        .def_readonly("main_sequence", &ExperimentReport::main_sequence)
        .def_readonly("listing", &ExperimentReport::listing)
        .def_readonly("mean_relative_error", &ExperimentReport::mean_relative_error)
        .def_readonly("mean_straightness", &ExperimentReport::mean_straightness)
        .def_readonly("failures", &ExperimentReport::failures)
        .def_readonly("probe_curve", &ExperimentReport::probe_curve);

    m.def("generate_target_set", &generate_target_set, py::arg("seed"));
    m.def(
        "run_experiment",
        [](const ToolConfig& config, const std::string& controller, const TargetSet& targets,
           const std::string& mode, const NarxWeights* narx) {
            const ControllerKind kind =
                controller == "linear" ? ControllerKind::linear : ControllerKind::nonlinear;
            const SequenceMode seq =
                mode == "continuous" ? SequenceMode::continuous : SequenceMode::zero_initial;
            return run_experiment(config, kind, targets, seq, narx);
        },
        py::arg("config"), py::arg("controller"), py::arg("targets"),
        py::arg("mode") = "zero-initial", py::arg("narx") = nullptr,
        py::call_guard<py::gil_scoped_release>());
}
