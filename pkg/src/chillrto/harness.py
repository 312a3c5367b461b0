"""Closed-loop simulation harness.

Wires the plant, the steady-state gate, and the dispatch optimizer
into a 1 Hz loop:

  * every rto_period_s (default 250 s) a dispatch instance runs:
    gated measurements collected since the previous instance are folded
    into the power-curve models, the exploration switch is evaluated,
    and new setpoints are optimized under the power-cap bound;
  * every second the plant slews toward the setpoints, power is
    metered with noise, and the steady-state detector decides whether
    the current measurement window is clean enough to keep.

Conventions: the trace has one row per simulated second; row t holds
the setpoints in force during [t, t+1) and the plant state and
measurements at the end of that second.  Dispatch instance k runs at
t = k * rto_period_s with 1-based period index k+1 in the confidence
schedule.

Runs are deterministic: all randomness flows from one integer seed
through separate metering and solver streams, so identical inputs
reproduce traces byte for byte.

The oracle variant runs the same loop with the true power curves,
exact power knowledge, and no exploration; it is the clairvoyant
benchmark that run metrics are scored against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .gp import GpModel, Observation, gp_update
from .plant import CompressorSpec, initial_state, plant_boxes, true_power
from .rto import (
    AlgoConfig,
    RtoDecision,
    adapt_z,
    beta_schedule,
    initialize_safe_seeds,
    solve_instance,
)
from .scenarios import Scenario
from .steady import steady_all, window_means

__all__ = [
    "TruthCurve",
    "RunResult",
    "run",
    "run_oracle",
    "z_ablation",
    "time_to_half",
    "compute_metrics",
    "violation_episodes",
    "emit",
]

_CURVE_GRID_N = 101


class TruthCurve:
    """Model stand-in that knows the real curve exactly.

    Used by the oracle benchmark: posterior mean is the true quadratic
    and the std is identically zero, so the safety bound degenerates
    to the true total power.
    """

    def __init__(self, spec: CompressorSpec):
        self.spec = spec

    def predict(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        return np.asarray(true_power(self.spec, x)), np.zeros_like(x)

    def predict_scalar(self, x: float) -> Tuple[float, float, float, float]:
        a, b, c = self.spec.power_poly
        return a + b * x + c * x * x, 0.0, b + 2.0 * c * x, 0.0


@dataclass
class RunResult:
    """Everything a closed-loop run produced."""

    scenario: Scenario
    specs: List[CompressorSpec]
    algo: AlgoConfig
    seed: int
    oracle: bool
    z_override: Optional[float]
    trace: Dict[str, np.ndarray]
    instances: Dict[str, np.ndarray]
    models: List
    observations: List[List[Observation]]


def _uncertainty_integral(models, boxes) -> float:
    """Sum over compressors of the box-averaged posterior std (kW).

    Each machine's std is integrated over its load box with the
    trapezoid rule on the standard 101-point grid and divided by the
    box width, so machines with different ranges contribute
    comparably; the total is in kW of power uncertainty.
    """
    total = 0.0
    for m, (lo, hi) in zip(models, boxes):
        g = np.linspace(lo, hi, _CURVE_GRID_N)
        _, sd = m.predict(g)
        total += float(np.trapezoid(sd, g) / (hi - lo))
    return total


def run(
    scenario: Scenario,
    specs: Sequence[CompressorSpec],
    algo: AlgoConfig,
    seed: int,
    oracle: bool = False,
    z_override: Optional[float] = None,
) -> RunResult:
    """Simulate one scenario end to end and return the full record.

    z_override forces the exploration weight to a constant for every
    instance (ablation runs); None leaves it to the adaptive switch.
    In oracle mode models are the true curves, no learning happens,
    and exploration stays off.
    """
    scenario.validate()
    algo.validate()
    for s in specs:
        s.validate()
    specs = list(specs)
    n = len(specs)
    boxes = plant_boxes(specs)

    ss = np.random.SeedSequence(seed)
    noise_rng, solver_rng = (np.random.default_rng(c) for c in ss.spawn(2))

    if oracle:
        models: List = [TruthCurve(s) for s in specs]
        observations: List[List[Observation]] = [[] for _ in specs]
    else:
        observations, models = initialize_safe_seeds(specs, algo.noise_std_kw)
        observations = [list(o) for o in observations]

    # vectorized truth evaluation for the per-second loop
    poly_a = np.array([s.power_poly[0] for s in specs])
    poly_b = np.array([s.power_poly[1] for s in specs])
    poly_c = np.array([s.power_poly[2] for s in specs])
    tau = np.array([s.tau_s for s in specs])
    lo = np.array([b[0] for b in boxes])
    hi = np.array([b[1] for b in boxes])
    gain = 1.0 - np.exp(-1.0 / tau)

    horizon = int(round(scenario.horizon_s))
    period = int(round(algo.rto_period_s))
    window = algo.ssd.window_s
    cap = algo.safety.power_cap_kw

    state = initial_state(specs).actual_loads.copy()
    prev_setpoints = state.copy()
    demand_history: List[float] = []

    buf = np.zeros((n, window))
    buf_filled = 0
    pending: Optional[Tuple[np.ndarray, np.ndarray]] = None

    n_inst = (horizon + period - 1) // period
    inst = {
        "t_s": np.zeros(n_inst),
        "t_index": np.zeros(n_inst, dtype=int),
        "demand_kw": np.zeros(n_inst),
        "z": np.zeros(n_inst),
        "beta": np.zeros(n_inst),
        "predicted_power_kw": np.zeros(n_inst),
        "predicted_ucb_kw": np.zeros(n_inst),
        "sigma_sum_kw": np.zeros(n_inst),
        "utility": np.zeros(n_inst),
        "demand_gap_kw": np.zeros(n_inst),
        "total_uncertainty_kw": np.zeros(n_inst),
        "n_new_obs": np.zeros(n_inst, dtype=int),
        "containment_checked": np.zeros(n_inst, dtype=int),
        "containment_outside": np.zeros(n_inst, dtype=int),
        "status": np.empty(n_inst, dtype=object),
    }
    for i in range(n):
        inst[f"setpoint_{i + 1}_kw"] = np.zeros(n_inst)

    tr = {
        "t_s": np.arange(horizon, dtype=float),
        "demand_kw": np.zeros(horizon),
        "true_total_kw": np.zeros(horizon),
        "ucb_total_kw": np.zeros(horizon),
        "z": np.zeros(horizon),
        "sigma_sum_kw": np.zeros(horizon),
        "total_uncertainty_kw": np.zeros(horizon),
        "steady": np.zeros(horizon, dtype=int),
        "status": np.empty(horizon, dtype=object),
    }
    for i in range(n):
        tr[f"setpoint_{i + 1}_kw"] = np.zeros(horizon)
        tr[f"actual_{i + 1}_kw"] = np.zeros(horizon)
        tr[f"measured_{i + 1}_kw"] = np.zeros(horizon)

    decision: Optional[RtoDecision] = None
    uncertainty_now = 0.0
    ki = -1

    for t in range(horizon):
        if t % period == 0:
            ki += 1
            t_index = ki + 1
            demand = scenario.demand_at(float(t))

            beta = beta_schedule(algo.safety, t_index)

            # Fold in the latest gated steady-state observations.  Before
            # the update, audit whether the truth sat inside the band the
            # previous decisions relied on (containment bookkeeping).
            n_new = 0
            checked = outside = 0
            if pending is not None and not oracle:
                loads_obs, powers_obs = pending
                sqrt_beta = np.sqrt(beta)
                for i in range(n):
                    xo = float(loads_obs[i])
                    mu_o, sd_o, _, _ = models[i].predict_scalar(xo)
                    truth_o = float(true_power(specs[i], xo))
                    checked += 1
                    if abs(truth_o - mu_o) > sqrt_beta * sd_o:
                        outside += 1
                    ob = Observation(load=xo, power=float(powers_obs[i]), noise_std=None)
                    observations[i].append(ob)
                    models[i] = gp_update(models[i], [ob])
                n_new = n
            pending = None

            uncertainty_now = 0.0 if oracle else _uncertainty_integral(models, boxes)

            if oracle:
                z = 0.0
            elif z_override is not None:
                z = float(z_override)
            else:
                z = adapt_z(
                    models, boxes, demand, demand_history,
                    beta, algo.safety, algo.explore,
                )
            demand_history.append(demand)

            decision = solve_instance(
                models, boxes, demand, prev_setpoints, t_index, z, algo, solver_rng,
            )
            prev_setpoints = decision.setpoints

            inst["t_s"][ki] = t
            inst["t_index"][ki] = t_index
            inst["demand_kw"][ki] = demand
            inst["z"][ki] = z
            inst["beta"][ki] = beta
            inst["predicted_power_kw"][ki] = decision.predicted_power_kw
            inst["predicted_ucb_kw"][ki] = decision.predicted_ucb_kw
            inst["sigma_sum_kw"][ki] = decision.sigma_sum_kw
            inst["utility"][ki] = decision.utility_value
            inst["demand_gap_kw"][ki] = decision.demand_gap_kw
            inst["total_uncertainty_kw"][ki] = uncertainty_now
            inst["n_new_obs"][ki] = n_new
            inst["containment_checked"][ki] = checked
            inst["containment_outside"][ki] = outside
            inst["status"][ki] = decision.solver_status
            for i in range(n):
                inst[f"setpoint_{i + 1}_kw"][ki] = decision.setpoints[i]

        # plant dynamics over one second, then metering
        cmd = np.clip(decision.setpoints, lo, hi)
        state = state + (cmd - state) * gain
        truth = poly_a + poly_b * state + poly_c * state**2
        measured = truth + noise_rng.normal(0.0, algo.noise_std_kw, size=n) \
            if algo.noise_std_kw > 0.0 else truth.copy()

        buf[:, :-1] = buf[:, 1:]
        buf[:, -1] = measured
        buf_filled = min(buf_filled + 1, window)
        all_steady = False
        if buf_filled == window:
            flags = steady_all(buf, algo.ssd)
            all_steady = bool(np.all(flags))
            if all_steady:
                pending = (state.copy(), window_means(buf))

        tr["demand_kw"][t] = inst["demand_kw"][ki]
        tr["true_total_kw"][t] = float(truth.sum())
        tr["ucb_total_kw"][t] = decision.predicted_ucb_kw
        tr["z"][t] = decision.z_used
        tr["sigma_sum_kw"][t] = decision.sigma_sum_kw
        tr["total_uncertainty_kw"][t] = uncertainty_now
        tr["steady"][t] = int(all_steady)
        tr["status"][t] = decision.solver_status
        for i in range(n):
            tr[f"setpoint_{i + 1}_kw"][t] = decision.setpoints[i]
            tr[f"actual_{i + 1}_kw"][t] = state[i]
            tr[f"measured_{i + 1}_kw"][t] = measured[i]

    return RunResult(
        scenario=scenario,
        specs=specs,
        algo=algo,
        seed=seed,
        oracle=oracle,
        z_override=z_override,
        trace=tr,
        instances=inst,
        models=models,
        observations=observations,
    )


def run_oracle(
    scenario: Scenario,
    specs: Sequence[CompressorSpec],
    algo: AlgoConfig,
    seed: int,
) -> RunResult:
    """Clairvoyant benchmark run: true curves, no uncertainty."""
    return run(scenario, specs, algo, seed, oracle=True)


_VIOLATION_TOL_KW = 1e-3  # one watt; excess below metering resolution is not a breach


def violation_episodes(
    true_total: np.ndarray, cap_kw: float, tol_kw: float = _VIOLATION_TOL_KW
) -> List[Tuple[int, int]]:
    """Contiguous stretches of seconds with true power above the cap.

    Returns inclusive (start, end) second indices.  A benchmark run
    that rides the cap exactly leaves float dust around the boundary,
    so excess under tol_kw does not count.
    """
    over = np.asarray(true_total) > cap_kw + tol_kw
    episodes = []
    start = None
    for i, flag in enumerate(over):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            episodes.append((start, i - 1))
            start = None
    if start is not None:
        episodes.append((start, len(over) - 1))
    return episodes


def compute_metrics(
    result: RunResult,
    oracle_result: Optional[RunResult] = None,
    burn_in_s: float = 10000.0,
) -> dict:
    """Score a run; include the oracle comparison when one is given.

    Energy figures integrate true total power over time; the oracle
    gap compares energies after the burn-in so the learning transient
    does not dominate the comparison.
    """
    tr = result.trace
    cap = result.algo.safety.power_cap_kw
    horizon = tr["t_s"].size
    n = len(result.specs)

    setp_total = sum(tr[f"setpoint_{i + 1}_kw"] for i in range(n))
    gap = setp_total - tr["demand_kw"]
    demand_rmse = float(np.sqrt(np.mean(gap**2))) if horizon else 0.0

    excess = tr["true_total_kw"] - cap
    over = np.where(excess > _VIOLATION_TOL_KW, excess, 0.0)
    episodes = violation_episodes(tr["true_total_kw"], cap)
    energy_kwh = float(np.sum(tr["true_total_kw"]) / 3600.0)

    # Curve error on the standard box grid restricted to the loads the
    # run actually visited (plus half a grid step so the window is
    # never empty).  Using the fixed grid keeps this recomputable from
    # curves.csv and the trace alone.
    curve_rmse: Dict[str, float] = {}
    visited: Dict[str, Tuple[float, float]] = {}
    if not result.oracle and horizon:
        for i, spec in enumerate(result.specs):
            actual = tr[f"actual_{i + 1}_kw"]
            vlo, vhi = float(actual.min()), float(actual.max())
            g = np.linspace(spec.min_load_kw, spec.max_load_kw, _CURVE_GRID_N)
            half_step = 0.5 * (g[1] - g[0])
            mask = (g >= vlo - half_step) & (g <= vhi + half_step)
            mu, _ = result.models[i].predict(g[mask])
            err = mu - true_power(spec, g[mask])
            curve_rmse[spec.name] = float(np.sqrt(np.mean(err**2)))
            visited[spec.name] = (vlo, vhi)

    metrics = {
        "scenario": result.scenario.name,
        "seed": result.seed,
        "oracle": result.oracle,
        "horizon_s": float(horizon),
        "demand_rmse_kw": demand_rmse,
        "violation_count_s": int(np.count_nonzero(over)),
        "max_violation_kw": float(over.max()) if horizon else 0.0,
        "violation_episodes_s": [[int(a), int(b)] for a, b in episodes],
        "energy_kwh": energy_kwh,
        "curve_rmse_kw": curve_rmse,
        "visited_range_kw": {k: [a, b] for k, (a, b) in visited.items()},
        "final_total_uncertainty_kw": (
            float(result.instances["total_uncertainty_kw"][-1])
            if result.instances["t_s"].size
            else 0.0
        ),
        "z_on_instances": int(np.count_nonzero(result.instances["z"] > 0.0)),
        "containment_checked": int(result.instances["containment_checked"].sum()),
        "containment_outside": int(result.instances["containment_outside"].sum()),
        "solver_statuses": {
            s: int(c)
            for s, c in zip(*np.unique(result.instances["status"].astype(str), return_counts=True))
        },
    }

    if oracle_result is not None:
        mask = tr["t_s"] >= burn_in_s
        e_run = float(np.sum(tr["true_total_kw"][mask]) / 3600.0)
        e_orc = float(np.sum(oracle_result.trace["true_total_kw"][mask]) / 3600.0)
        metrics["post_burn_in_energy_kwh"] = e_run
        metrics["oracle_post_burn_in_energy_kwh"] = e_orc
        metrics["oracle_power_gap"] = abs(e_run - e_orc) / e_orc
    return metrics


def z_ablation(
    scenario: Scenario,
    specs: Sequence[CompressorSpec],
    algo: AlgoConfig,
    seeds: Sequence[int],
    z_values: Sequence[float] = (0.0, 1000.0),
) -> dict:
    """Paired fixed-z runs over shared seeds.

    For each seed and each forced exploration weight, runs the
    scenario and records the per-instance total uncertainty, its final
    value, and the time to reach half of its initial value (None if
    never reached).  Uncertainty is sampled once per dispatch period,
    so the crossing time is linearly interpolated between the two
    bracketing instances rather than snapped to the period grid.
    """
    out: dict = {"scenario": scenario.name, "z_values": list(map(float, z_values)), "runs": []}
    for seed in seeds:
        entry = {"seed": int(seed), "by_z": {}}
        for z in z_values:
            res = run(scenario, specs, algo, seed, z_override=float(z))
            u = res.instances["total_uncertainty_kw"]
            t_inst = res.instances["t_s"]
            entry["by_z"][str(float(z))] = {
                "uncertainty_kw": [float(v) for v in u],
                "final_uncertainty_kw": float(u[-1]),
                "time_to_half_s": time_to_half(t_inst, u),
            }
        out["runs"].append(entry)
    return out


def time_to_half(t_s: np.ndarray, u: np.ndarray) -> Optional[float]:
    """First time the series drops to half its initial value.

    The series is step-sampled; the crossing is linearly interpolated
    inside the bracketing interval.  None if the series never halves.
    """
    half = 0.5 * float(u[0])
    if u[0] <= 0.0:
        return 0.0
    for k in range(1, len(u)):
        if u[k] <= half:
            if u[k - 1] <= half:
                return float(t_s[k - 1])
            frac = (u[k - 1] - half) / (u[k - 1] - u[k])
            return float(t_s[k - 1] + frac * (t_s[k] - t_s[k - 1]))
    return None


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path: Path, columns: Dict[str, np.ndarray]) -> None:
    names = list(columns)
    rows = len(next(iter(columns.values())))
    lines = [",".join(names)]
    cols = [columns[c] for c in names]
    for r in range(rows):
        lines.append(",".join(_fmt(col[r]) for col in cols))
    path.write_text("\n".join(lines) + "\n")


def emit(result: RunResult, outdir, metrics: Optional[dict] = None) -> dict:
    """Write trace.csv, curves.csv and metrics.json into outdir.

    Returns the metrics written.  File contents are deterministic
    functions of the run, so reruns with the same seed produce
    byte-identical artifacts.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if metrics is None:
        metrics = compute_metrics(result)

    _write_csv(outdir / "trace.csv", result.trace)

    boxes = plant_boxes(result.specs)
    curve_cols: Dict[str, list] = {
        "compressor": [],
        "load_kw": [],
        "mean_kw": [],
        "std_kw": [],
        "true_kw": [],
    }
    for spec, m, (blo, bhi) in zip(result.specs, result.models, boxes):
        g = np.linspace(blo, bhi, _CURVE_GRID_N)
        mu, sd = m.predict(g)
        truth = true_power(spec, g)
        for j in range(g.size):
            curve_cols["compressor"].append(spec.name)
            curve_cols["load_kw"].append(float(g[j]))
            curve_cols["mean_kw"].append(float(mu[j]))
            curve_cols["std_kw"].append(float(sd[j]))
            curve_cols["true_kw"].append(float(truth[j]))
    _write_csv(outdir / "curves.csv", {k: np.array(v, dtype=object) for k, v in curve_cols.items()})

    (outdir / "metrics.json").write_text(
        json.dumps(metrics, indent=2, sort_keys=True) + "\n"
    )
    return metrics
