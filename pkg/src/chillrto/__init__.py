"""Safe exploratory real-time optimization of compressor dispatch.

A desk-scale study system: five simulated refrigeration compressors
with unknown power curves, Gaussian-process models learned from gated
steady-state measurements, and a periodic dispatcher that tracks
cooling demand, minimizes power, explores when it is provably safe to
do so, and keeps an upper confidence bound on total power under a
hard cap.
"""

from .gp import (
    GpModel,
    KernelParams,
    Observation,
    fit_hyperparams,
    gp_fit,
    gp_predict,
    gp_predict_scalar,
    gp_update,
    kernel,
    log_marginal_likelihood,
    prior_model,
)
from .plant import (
    CompressorSpec,
    PlantState,
    default_plant,
    initial_state,
    measure_power,
    plant_boxes,
    step,
    true_power,
    true_total_power,
)
from .steady import SsdConfig, is_steady, steady_all, window_means
from .scenarios import Scenario, builtin, builtin_names, load_csv, save_csv
from .solver import SolveReport, grid_oracle, minimize
from .rto import (
    AlgoConfig,
    ExploreConfig,
    RtoDecision,
    SafetyConfig,
    adapt_z,
    beta_schedule,
    feasible_demand_point_exists,
    initialize_safe_seeds,
    safety_ucb,
    sigma_sum,
    solve_instance,
    utility,
)
from .config import ConfigError, load_algo_config, load_plant, save_algo_config, save_plant
from .harness import (
    RunResult,
    TruthCurve,
    compute_metrics,
    emit,
    run,
    run_oracle,
    time_to_half,
    violation_episodes,
    z_ablation,
)

__version__ = "0.1.0"

__all__ = [
    "GpModel",
    "KernelParams",
    "Observation",
    "fit_hyperparams",
    "gp_fit",
    "gp_predict",
    "gp_predict_scalar",
    "gp_update",
    "kernel",
    "log_marginal_likelihood",
    "prior_model",
    "CompressorSpec",
    "PlantState",
    "default_plant",
    "initial_state",
    "measure_power",
    "plant_boxes",
    "step",
    "true_power",
    "true_total_power",
    "SsdConfig",
    "is_steady",
    "steady_all",
    "window_means",
    "Scenario",
    "builtin",
    "builtin_names",
    "load_csv",
    "save_csv",
    "SolveReport",
    "grid_oracle",
    "minimize",
    "AlgoConfig",
    "ExploreConfig",
    "RtoDecision",
    "SafetyConfig",
    "adapt_z",
    "beta_schedule",
    "feasible_demand_point_exists",
    "initialize_safe_seeds",
    "safety_ucb",
    "sigma_sum",
    "solve_instance",
    "utility",
    "ConfigError",
    "load_algo_config",
    "load_plant",
    "save_algo_config",
    "save_plant",
    "RunResult",
    "TruthCurve",
    "compute_metrics",
    "emit",
    "run",
    "run_oracle",
    "time_to_half",
    "violation_episodes",
    "z_ablation",
    "__version__",
]
