"""Safe exploratory dispatch of compressor loads under a power cap.

Every dispatch period the optimizer picks per-compressor cooling
setpoints by minimizing

    (predicted total power / 1000)^2        power cost, MW scale
  + (demand - total setpoint)^2             demand tracking, kW scale
  - z * (sum of posterior stds)             exploration bonus

subject to each machine's load box and the probabilistic power-cap
constraint

    sum_i ( mu_i(x_i) + sqrt(beta_t) * sigma_i(x_i) ) <= cap.

The power term is squared in MW so that its gradient stays far below
the tracking term's: meeting demand is the plant's job, and cheaper
dispatch only arbitrates between load splits that serve it equally
well.  The exploration weight z is not a tuning dial but a switch: it
turns on only when demand has sat still for consecutive periods and
the cap leaves verified room at the demand level, i.e. exactly when
curiosity is free.

beta follows a slowly growing schedule in the period index, so the
confidence envelope widens over time and early optimism about never
revisited load regions eventually expires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .gp import GpModel, KernelParams, Observation, fit_hyperparams, gp_fit
from .plant import CompressorSpec, true_power
from .steady import SsdConfig
from . import solver as _solver

__all__ = [
    "SafetyConfig",
    "ExploreConfig",
    "AlgoConfig",
    "RtoDecision",
    "beta_schedule",
    "safety_ucb",
    "sigma_sum",
    "predicted_power",
    "utility",
    "feasible_demand_point_exists",
    "adapt_z",
    "initialize_safe_seeds",
    "solve_instance",
]

_POWER_SCALE = 1e-3  # kW -> MW inside the squared power-cost term
_DP_BUCKET_KW = 0.5  # total-load quantization in the feasibility check
_SEED_FRACTIONS = (0.0, 0.5, 0.25)  # of box range, per compressor


@dataclass(frozen=True)
class SafetyConfig:
    """Power-cap constraint settings."""

    power_cap_kw: float = 1580.0
    delta: float = 0.05
    beta_override: Optional[float] = None
    grid_size: int = 100

    def validate(self) -> None:
        if self.power_cap_kw <= 0.0:
            raise ValueError("power_cap_kw must be positive")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must be in (0, 1)")
        if self.beta_override is not None and self.beta_override < 0.0:
            raise ValueError("beta_override must be non-negative")
        if self.grid_size < 2:
            raise ValueError("grid_size must be at least 2")


@dataclass(frozen=True)
class ExploreConfig:
    """Exploration-switch settings."""

    z_active: float = 1000.0
    alpha_demand_kw: float = 10.0

    def validate(self) -> None:
        if self.z_active < 0.0:
            raise ValueError("z_active must be non-negative")
        if self.alpha_demand_kw <= 0.0:
            raise ValueError("alpha_demand_kw must be positive")


@dataclass(frozen=True)
class AlgoConfig:
    """Everything the dispatch layer needs besides the models."""

    safety: SafetyConfig = field(default_factory=SafetyConfig)
    explore: ExploreConfig = field(default_factory=ExploreConfig)
    ssd: SsdConfig = field(default_factory=SsdConfig)
    noise_std_kw: float = 5.0
    multistart_count: int = 8
    trust_region_kw: Optional[float] = None
    rto_period_s: float = 250.0

    def validate(self) -> None:
        self.safety.validate()
        self.explore.validate()
        self.ssd.validate()
        if self.noise_std_kw < 0.0:
            raise ValueError("noise_std_kw must be non-negative")
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be at least 1")
        if self.trust_region_kw is not None and self.trust_region_kw <= 0.0:
            raise ValueError("trust_region_kw must be positive")
        if self.rto_period_s <= 0.0:
            raise ValueError("rto_period_s must be positive")


@dataclass(frozen=True)
class RtoDecision:
    """One dispatch period's outcome."""

    setpoints: np.ndarray
    z_used: float
    beta: float
    predicted_power_kw: float
    predicted_ucb_kw: float
    sigma_sum_kw: float
    utility_value: float
    solver_status: str  # optimal | feasible_suboptimal | infeasible_relaxed
    demand_gap_kw: float
    n_evals: int


def beta_schedule(safety: SafetyConfig, t: int) -> float:
    """Confidence multiplier beta for dispatch period t (1-based).

    beta_t = 2 * ln( grid_size * t^2 * pi^2 / (6 * delta) ), the usual
    discretized union bound over the candidate grid and periods; an
    override pins beta for ablations.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if safety.beta_override is not None:
        return float(safety.beta_override)
    return 2.0 * math.log(safety.grid_size * t * t * math.pi**2 / (6.0 * safety.delta))


class _EvalCache:
    """Memoized scalar predictions shared by objective and constraint.

    SLSQP evaluates the objective and the constraint at the same
    iterates, and multistart revisits neighbourhoods; caching per
    (model, load) makes each posterior evaluation pay once.
    """

    def __init__(self, models: Sequence) -> None:
        self.models = models
        self._store = [dict() for _ in models]

    def at(self, i: int, x: float) -> Tuple[float, float, float, float]:
        c = self._store[i]
        v = c.get(x)
        if v is None:
            v = self.models[i].predict_scalar(x)
            c[x] = v
        return v


def predicted_power(models: Sequence, loads: Sequence[float]) -> float:
    """Sum of posterior mean powers at the given loads."""
    return float(sum(m.predict_scalar(float(x))[0] for m, x in zip(models, loads)))


def sigma_sum(models: Sequence, loads: Sequence[float]) -> float:
    """Sum of posterior stds at the given loads."""
    return float(sum(m.predict_scalar(float(x))[1] for m, x in zip(models, loads)))


def safety_ucb(models: Sequence, loads: Sequence[float], beta: float) -> float:
    """Upper confidence bound on total power at the given loads."""
    sqrt_beta = math.sqrt(beta)
    total = 0.0
    for m, x in zip(models, loads):
        mu, sd, _, _ = m.predict_scalar(float(x))
        total += mu + sqrt_beta * sd
    return float(total)


def utility(
    models: Sequence,
    loads: Sequence[float],
    demand_kw: float,
    z: float,
) -> float:
    """Dispatch objective value at a load vector (lower is better)."""
    mu = predicted_power(models, loads)
    sd = sigma_sum(models, loads)
    total = float(np.sum(loads))
    return (mu * _POWER_SCALE) ** 2 + (demand_kw - total) ** 2 - z * sd


def _per_comp_grids(
    models: Sequence,
    boxes: Sequence[Tuple[float, float]],
    grid_size: int,
) -> Tuple[List[np.ndarray], List[np.ndarray], List[np.ndarray]]:
    loads, means, stds = [], [], []
    for m, (lo, hi) in zip(models, boxes):
        g = np.linspace(lo, hi, grid_size)
        mu, sd = m.predict(g)
        loads.append(g)
        means.append(mu)
        stds.append(sd)
    return loads, means, stds


def feasible_demand_point_exists(
    models: Sequence,
    boxes: Sequence[Tuple[float, float]],
    demand_kw: float,
    beta: float,
    safety: SafetyConfig,
    explore: ExploreConfig,
) -> bool:
    """Can some load split meet demand while its UCB clears the cap?

    Checked on per-compressor grids of safety.grid_size points.  The
    sum over compressors is quantized into half-kW buckets and a
    min-plus dynamic program tracks, for each reachable quantized
    total load, the smallest achievable total UCB; the answer is
    whether any total within alpha_demand_kw of demand attains UCB at
    or under the cap.  Quantization error is bounded by a bucket per
    compressor, far inside the demand tolerance.
    """
    sqrt_beta = math.sqrt(beta)
    grids, means, stds = _per_comp_grids(models, boxes, safety.grid_size)
    ucbs = [mu + sqrt_beta * sd for mu, sd in zip(means, stds)]

    base = sum(b[0] for b in boxes)
    span = sum(b[1] for b in boxes) - base
    n_buckets = int(round(span / _DP_BUCKET_KW)) + 1
    inf = np.inf

    dp = np.full(1, 0.0)
    for g, u, (lo, _hi) in zip(grids, ucbs, boxes):
        offsets = np.rint((g - lo) / _DP_BUCKET_KW).astype(int)
        new_len = min(dp.size + offsets[-1], n_buckets)
        new_dp = np.full(new_len, inf)
        for off, ucb in zip(offsets, u):
            hi_idx = min(dp.size, new_len - off)
            if hi_idx <= 0:
                continue
            seg = new_dp[off : off + hi_idx]
            np.minimum(seg, dp[:hi_idx] + ucb, out=seg)
        dp = new_dp

    totals = base + _DP_BUCKET_KW * np.arange(dp.size)
    window = np.abs(totals - demand_kw) <= explore.alpha_demand_kw
    if not np.any(window):
        return False
    return bool(np.min(dp[window]) <= safety.power_cap_kw)


def adapt_z(
    models: Sequence,
    boxes: Sequence[Tuple[float, float]],
    demand_kw: float,
    recent_demands: Sequence[float],
    beta: float,
    safety: SafetyConfig,
    explore: ExploreConfig,
) -> float:
    """Exploration weight for this period: z_active or 0.

    Exploration turns on only when demand matched the previous two
    periods' demands exactly (the plant is in a plateau, not mid
    transition) and a verified-feasible load split at the demand
    level exists under the cap.  Otherwise all weight stays on
    tracking and cost.
    """
    if len(recent_demands) < 2:
        return 0.0
    if recent_demands[-1] != demand_kw or recent_demands[-2] != demand_kw:
        return 0.0
    if not feasible_demand_point_exists(models, boxes, demand_kw, beta, safety, explore):
        return 0.0
    return explore.z_active


def initialize_safe_seeds(
    specs: Sequence[CompressorSpec],
    noise_std_kw: float = 5.0,
) -> Tuple[List[List[Observation]], List[GpModel]]:
    """Commissioning data and first models for each compressor.

    Three exact observations per machine, taken at its minimum load,
    the box midpoint, and a quarter of the way up: the short low-load
    segment a commissioning engineer can sweep without risking the
    cap.  Kernel hyperparameters are fitted on these seeds once and
    stay frozen; the noise level is pinned to the plant's metering
    noise rather than fitted, since three exact points say nothing
    about it.
    """
    if noise_std_kw < 0.0:
        raise ValueError("noise_std_kw must be non-negative")
    all_obs: List[List[Observation]] = []
    models: List[GpModel] = []
    for spec in specs:
        r = spec.max_load_kw - spec.min_load_kw
        loads = [spec.min_load_kw + f * r for f in _SEED_FRACTIONS]
        obs = [
            Observation(load=x, power=float(true_power(spec, x)), noise_std=0.0)
            for x in loads
        ]
        span = max(loads) - min(loads)
        powers = np.array([o.power for o in obs])
        init = KernelParams(
            lengthscale=span / 2.0,
            signal_std=float(np.std(powers)),
            noise_std=noise_std_kw,
        )
        params = fit_hyperparams(obs, init)
        models.append(gp_fit(params, obs))
        all_obs.append(obs)
    return all_obs, models


_PROBE_POINTS = 5  # per-dimension resolution of the coarse start probe


def _coarse_probe(
    models: Sequence,
    bounds: Sequence[Tuple[float, float]],
    demand_kw: float,
    z: float,
    sqrt_beta: float,
    cap_kw: float,
    n_best: int = 2,
) -> List[np.ndarray]:
    """Best corners of a coarse tensor grid, used to seed the solver.

    The exploration bonus makes the objective multimodal, and local
    polishing from generic starts can settle in the wrong basin.  A
    full scan of a small per-machine grid (5^n points, all evaluated
    with vectorized posterior calls) is cheap and reliably lands a
    start in the winning basin; the local solver does the rest.
    Returns the n_best cap-feasible grid points by objective, or the
    least-violating point when the whole grid is infeasible.
    """
    n = len(models)
    grids = [np.linspace(lo, hi, _PROBE_POINTS) for lo, hi in bounds]
    mu_t = np.zeros((1,) * n)
    sd_t = np.zeros((1,) * n)
    x_t = np.zeros((1,) * n)
    for i, (m, g) in enumerate(zip(models, grids)):
        mu, sd = m.predict(g)
        shape = [1] * n
        shape[i] = _PROBE_POINTS
        mu_t = mu_t + mu.reshape(shape)
        sd_t = sd_t + sd.reshape(shape)
        x_t = x_t + g.reshape(shape)
    obj = (mu_t * _POWER_SCALE) ** 2 + (demand_kw - x_t) ** 2 - z * sd_t
    viol = mu_t + sqrt_beta * sd_t - cap_kw
    feasible = viol <= 0.0

    picks: List[np.ndarray] = []
    if np.any(feasible):
        masked = np.where(feasible, obj, np.inf)
        flat_order = np.argsort(masked, axis=None)[:n_best]
        for flat in flat_order:
            if not np.isfinite(masked.flat[flat]):
                break
            idx = np.unravel_index(flat, masked.shape)
            picks.append(np.array([grids[i][idx[i]] for i in range(n)]))
    else:
        idx = np.unravel_index(int(np.argmin(viol)), viol.shape)
        picks.append(np.array([grids[i][idx[i]] for i in range(n)]))
    return picks


def _starts(
    bounds: Sequence[Tuple[float, float]],
    prev: np.ndarray,
    boxes: Sequence[Tuple[float, float]],
    count: int,
    rng: np.random.Generator,
    probe: Sequence[np.ndarray] = (),
) -> List[np.ndarray]:
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    mids = np.array([b[0] + 0.5 * (b[1] - b[0]) for b in boxes])
    quarters = np.array([b[0] + 0.25 * (b[1] - b[0]) for b in boxes])
    fixed = [np.asarray(p, dtype=float) for p in probe]
    fixed += [
        np.clip(prev, lo, hi),
        lo.copy(),
        np.clip(mids, lo, hi),
        np.clip(quarters, lo, hi),
    ]
    starts = fixed[:count]
    while len(starts) < count:
        starts.append(rng.uniform(lo, hi))
    return starts


def solve_instance(
    models: Sequence,
    boxes: Sequence[Tuple[float, float]],
    demand_kw: float,
    prev_setpoints: np.ndarray,
    t: int,
    z: float,
    algo: AlgoConfig,
    rng: np.random.Generator,
) -> RtoDecision:
    """Solve one dispatch period and report the decision.

    When no start yields a cap-feasible point the previous setpoints
    are held: the plant keeps its last verified dispatch rather than
    jumping to the least-bad infeasible candidate.
    """
    algo.validate()
    beta = beta_schedule(algo.safety, t)
    sqrt_beta = math.sqrt(beta)
    cap = algo.safety.power_cap_kw
    prev = np.asarray(prev_setpoints, dtype=float)

    bounds = list(boxes)
    if algo.trust_region_kw is not None:
        tr = algo.trust_region_kw
        bounds = [
            (max(lo, p - tr), min(hi, p + tr))
            for (lo, hi), p in zip(boxes, prev)
        ]

    cache = _EvalCache(models)
    n = len(models)

    def objective(x: np.ndarray) -> float:
        vals = [cache.at(i, float(x[i])) for i in range(n)]
        mu = sum(v[0] for v in vals)
        sd = sum(v[1] for v in vals)
        total = float(np.sum(x))
        return (mu * _POWER_SCALE) ** 2 + (demand_kw - total) ** 2 - z * sd

    def objective_grad(x: np.ndarray) -> np.ndarray:
        vals = [cache.at(i, float(x[i])) for i in range(n)]
        mu = sum(v[0] for v in vals)
        total = float(np.sum(x))
        g = np.empty(n)
        for i, (_, _, dmu, dsd) in enumerate(vals):
            g[i] = (
                2.0 * mu * _POWER_SCALE**2 * dmu
                - 2.0 * (demand_kw - total)
                - z * dsd
            )
        return g

    def inequality(x: np.ndarray) -> float:
        vals = [cache.at(i, float(x[i])) for i in range(n)]
        return sum(v[0] + sqrt_beta * v[1] for v in vals) - cap

    def inequality_grad(x: np.ndarray) -> np.ndarray:
        vals = [cache.at(i, float(x[i])) for i in range(n)]
        return np.array([dmu + sqrt_beta * dsd for _, _, dmu, dsd in vals])

    probe = _coarse_probe(models, bounds, demand_kw, z, sqrt_beta, cap)
    report = _solver.minimize(
        objective,
        bounds,
        _starts(bounds, prev, boxes, algo.multistart_count, rng, probe),
        inequality=inequality,
        objective_grad=objective_grad,
        inequality_grad=inequality_grad,
        constraint_scale=cap,
    )

    if report.feasible:
        setpoints = report.x
        status = "optimal" if report.converged else "feasible_suboptimal"
    else:
        setpoints = prev.copy()
        status = "infeasible_relaxed"

    mu = predicted_power(models, setpoints)
    sd = sigma_sum(models, setpoints)
    return RtoDecision(
        setpoints=setpoints,
        z_used=float(z),
        beta=float(beta),
        predicted_power_kw=mu,
        predicted_ucb_kw=mu + sqrt_beta * sd,
        sigma_sum_kw=sd,
        utility_value=utility(models, setpoints, demand_kw, z),
        solver_status=status,
        demand_gap_kw=float(np.sum(setpoints)) - demand_kw,
        n_evals=report.n_evals,
    )
