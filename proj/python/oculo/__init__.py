"""Simulation and optimal control of a six-cable biomimetic eye.

Thin Python layer over the compiled core: plant simulation, quiet-stance
pretension, linearized and learned-model saccade planners, and the
saccade-battery analysis pipeline.
"""

from ._oculo import (  # noqa: F401
    AnalysisError,
    ConfigError,
    CostBreakdown,
    CostWeights,
    Dataset,
    DurationCurvePoint,
    ExperimentConfig,
    ExperimentReport,
    EyeState,
    InfeasiblePretensionError,
    LinearModel,
    LinearPlan,
    LineFit,
    ListingBin,
    ListingStats,
    MainSequence,
    NarxConfig,
    NarxError,
    NarxWeights,
    NonlinearPlan,
    NonlinearSearchResult,
    OutOfChartError,
    PlanningError,
    PlanSearchResult,
    PlantConfig,
    PretensionResult,
    SaccadeRecord,
    SolverConfig,
    TargetSet,
    ToolConfig,
    TrainConfig,
    TrainReport,
    Trajectory,
    config_digest,
    exp_map,
    gen_dataset,
    generate_target_set,
    gradient_check,
    linearize,
    listing_torsion,
    load_config,
    load_weights,
    log_map,
    matrix_of_rotvec,
    muscle_names,
    muscle_pull_probe,
    narx_rollout,
    optimize_traj,
    plan_saccade,
    r_squared,
    replay_on_plant,
    rotate_about_z,
    rotvec_of,
    run_experiment,
    save_config,
    save_weights,
    set_max_workers,
    simulate,
    solve_pretension,
    train_narx,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
