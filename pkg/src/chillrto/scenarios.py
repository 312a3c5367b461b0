"""Cooling-demand scenarios: piecewise-constant profiles over a horizon.

A scenario is a sorted list of (t_start_s, demand_kw) steps; demand
holds from each step's start until the next step begins (left-closed
intervals), and the final step holds until the horizon.  Profiles can
be loaded from and saved to a two-column CSV so that site-recorded
demand traces drop in next to the built-ins.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np

__all__ = ["Scenario", "builtin", "builtin_names", "load_csv", "save_csv"]

_CSV_HEADER = ["t_start_s", "demand_kw"]


@dataclass(frozen=True)
class Scenario:
    """Piecewise-constant demand profile."""

    name: str
    steps: Tuple[Tuple[float, float], ...]
    horizon_s: float

    def validate(self) -> None:
        if not self.name:
            raise ValueError("scenario name must be non-empty")
        if not self.steps:
            raise ValueError("scenario must have at least one step")
        if self.horizon_s <= 0.0:
            raise ValueError("horizon_s must be positive")
        times = [t for t, _ in self.steps]
        if times[0] != 0.0:
            raise ValueError("first step must start at t=0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("step times must be strictly increasing")
        if times[-1] >= self.horizon_s:
            raise ValueError("last step must start before the horizon")
        for t, d in self.steps:
            if not (np.isfinite(t) and np.isfinite(d)):
                raise ValueError("step entries must be finite")
            if d <= 0.0:
                raise ValueError(f"demand at t={t} must be positive")

    def demand_at(self, t_s: float) -> float:
        """Demand in force at time t_s (0 <= t_s <= horizon)."""
        if not (0.0 <= t_s <= self.horizon_s):
            raise ValueError(f"t_s={t_s} outside [0, {self.horizon_s}]")
        times = np.array([s[0] for s in self.steps])
        idx = int(np.searchsorted(times, t_s, side="right")) - 1
        return self.steps[idx][1]

    def demand_series(self, times_s: np.ndarray) -> np.ndarray:
        """Vectorized demand_at over an array of times."""
        times_s = np.asarray(times_s, dtype=float)
        if np.any(times_s < 0.0) or np.any(times_s > self.horizon_s):
            raise ValueError("times outside scenario horizon")
        starts = np.array([s[0] for s in self.steps])
        demands = np.array([s[1] for s in self.steps])
        idx = np.searchsorted(starts, times_s, side="right") - 1
        return demands[idx]


# Built-in profiles.  Times are multiples of the 250 s dispatch period
# so every demand change lands exactly on an optimization instant.

# Two days of warehouse load: Friday-night low, Saturday climb to a
# peak the power cap cannot fully serve, Sunday lull, second peak,
# then the Monday-morning ramp.  Plateaus are long enough for the
# demand-repeat rule to switch exploration on in most of them.
_WEEKEND = (
    (0.0, 1050.0),
    (1500.0, 1250.0),
    (3000.0, 1450.0),
    (4500.0, 1700.0),
    (6250.0, 1950.0),
    (8000.0, 2200.0),
    (9750.0, 2400.0),
    (11500.0, 2650.0),
    (14000.0, 2800.0),
    (16500.0, 2400.0),
    (18250.0, 2100.0),
    (20000.0, 1800.0),
    (22000.0, 1500.0),
    (24500.0, 1750.0),
    (26250.0, 2000.0),
    (28000.0, 2250.0),
    (29750.0, 2400.0),
    (31500.0, 2700.0),
    (34000.0, 2300.0),
    (35750.0, 2000.0),
    (37500.0, 2150.0),
    (39000.0, 2350.0),
    (40500.0, 2600.0),
)

# A long quiet stretch followed by one abrupt cold-snap jump deep into
# cap-limited territory: the stress case for stale safety bounds.
_STEP_JUMP = (
    (0.0, 1200.0),
    (2500.0, 2600.0),
)

# Constant mid-range demand, used to compare exploration settings
# without demand effects confounding the uncertainty trajectories.
_FIXED_Z = ((0.0, 1600.0),)

_HORIZON_S = 42000.0

_BUILTINS = {
    "weekend": Scenario("weekend", _WEEKEND, _HORIZON_S),
    "step_jump": Scenario("step_jump", _STEP_JUMP, _HORIZON_S),
    "fixed_z_ablation": Scenario("fixed_z_ablation", _FIXED_Z, _HORIZON_S),
}


def builtin_names() -> Tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


def builtin(name: str) -> Scenario:
    """Look up a built-in demand profile by name."""
    try:
        return _BUILTINS[name]
    except KeyError:
        raise KeyError(
            f"unknown scenario {name!r}; built-ins: {', '.join(builtin_names())}"
        ) from None


def load_csv(path, name: str | None = None, horizon_s: float = _HORIZON_S) -> Scenario:
    """Read a scenario from a t_start_s,demand_kw CSV file."""
    path = Path(path)
    steps = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty scenario file") from None
        if [h.strip() for h in header] != _CSV_HEADER:
            raise ValueError(
                f"{path}: expected header {','.join(_CSV_HEADER)!r}, got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                t, d = float(row[0]), float(row[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric entry") from None
            steps.append((t, d))
    scn = Scenario(name or path.stem, tuple(steps), horizon_s)
    scn.validate()
    return scn


def save_csv(scenario: Scenario, path) -> None:
    """Write a scenario as a t_start_s,demand_kw CSV file."""
    scenario.validate()
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_HEADER)
        for t, d in scenario.steps:
            writer.writerow([repr(float(t)), repr(float(d))])
