"""Simulated five-compressor refrigeration plant.

The plant is the ground truth the optimizer is *not* allowed to see:
each compressor has a smooth quadratic load-to-power curve, first-order
load dynamics, and noisy power metering.  The dispatch layer only ever
observes (load, measured power) pairs; the true curves live here so
that tests and benchmark runs can score decisions against reality.

Loads and powers are in kW of cooling duty and electrical draw
respectively; time is in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np

__all__ = [
    "CompressorSpec",
    "PlantState",
    "default_plant",
    "initial_state",
    "true_power",
    "true_total_power",
    "step",
    "measure_power",
    "plant_boxes",
]


@dataclass(frozen=True)
class CompressorSpec:
    """Static description of one compressor.

    power_poly holds ascending quadratic coefficients (a, b, c):
    electrical power at cooling load x is a + b*x + c*x**2.
    tau_s is the first-order time constant of the load actuator.
    """

    name: str
    size_class: str
    min_load_kw: float
    max_load_kw: float
    power_poly: Tuple[float, float, float]
    tau_s: float

    def validate(self) -> None:
        if not self.name:
            raise ValueError("compressor name must be non-empty")
        if self.size_class not in ("small", "medium", "large"):
            raise ValueError(f"unknown size class {self.size_class!r}")
        if not (0.0 < self.min_load_kw < self.max_load_kw):
            raise ValueError(
                f"{self.name}: load box [{self.min_load_kw}, {self.max_load_kw}] invalid"
            )
        if len(self.power_poly) != 3:
            raise ValueError(f"{self.name}: power_poly must have 3 coefficients")
        if not all(np.isfinite(self.power_poly)):
            raise ValueError(f"{self.name}: power_poly must be finite")
        if self.tau_s <= 0.0:
            raise ValueError(f"{self.name}: tau_s must be positive")
        # power must be positive and strictly increasing across the box
        grid = np.arange(self.min_load_kw, self.max_load_kw + 0.5, 1.0)
        p = true_power(self, grid)
        if p[0] <= 0.0:
            raise ValueError(f"{self.name}: non-positive power at min load")
        if np.any(np.diff(p) <= 0.0):
            raise ValueError(f"{self.name}: power curve must be strictly increasing")


@dataclass(frozen=True)
class PlantState:
    """Actual per-compressor cooling loads at one instant (kW)."""

    actual_loads: np.ndarray

    def validate(self, specs: Sequence[CompressorSpec]) -> None:
        if self.actual_loads.shape != (len(specs),):
            raise ValueError("state/spec length mismatch")
        for spec, x in zip(specs, self.actual_loads):
            if not (spec.min_load_kw - 1e-9 <= x <= spec.max_load_kw + 1e-9):
                raise ValueError(f"{spec.name}: load {x} outside box")


def default_plant() -> List[CompressorSpec]:
    """The stock five-machine plant: one small, one medium, three large.

    The three large units are near-identical but not interchangeable;
    their curves differ a little, as siblings from the same product
    line do after years of wear.
    """
    return [
        CompressorSpec("C1", "small", 56.0, 220.0, (39.48, 0.40, 3.0e-4), 50.0),
        CompressorSpec("C2", "medium", 237.0, 537.0, (62.46465, 0.44, 1.5e-4), 50.0),
        CompressorSpec("C3", "large", 194.0, 795.0, (66.86525, 0.39, 1.9e-4), 50.0),
        CompressorSpec("C4", "large", 194.0, 795.0, (65.2355, 0.40, 1.8e-4), 50.0),
        CompressorSpec("C5", "large", 194.0, 795.0, (63.60575, 0.41, 1.7e-4), 50.0),
    ]


def initial_state(specs: Sequence[CompressorSpec]) -> PlantState:
    """Plant at rest: every compressor at its minimum stable load."""
    return PlantState(np.array([s.min_load_kw for s in specs], dtype=float))


def true_power(spec: CompressorSpec, load):
    """Ground-truth electrical power of one compressor at the given load."""
    a, b, c = spec.power_poly
    return a + b * np.asarray(load, dtype=float) + c * np.asarray(load, dtype=float) ** 2


def true_total_power(specs: Sequence[CompressorSpec], loads: Sequence[float]) -> float:
    """Ground-truth total electrical power for a load vector."""
    loads = np.asarray(loads, dtype=float)
    if loads.shape != (len(specs),):
        raise ValueError("loads/spec length mismatch")
    return float(sum(true_power(s, x) for s, x in zip(specs, loads)))


def step(
    state: PlantState,
    specs: Sequence[CompressorSpec],
    commanded: Sequence[float],
    dt_s: float,
) -> PlantState:
    """Advance the load dynamics by dt_s toward the commanded setpoints.

    Each compressor tracks its setpoint as a first-order lag with time
    constant tau_s.  The update uses the exact discretization of
    dx/dt = (u - x)/tau, so the step size does not bias the trajectory:

        x <- x + (u - x) * (1 - exp(-dt/tau))

    Commands are clipped to each machine's load box before tracking,
    mirroring the local controller's own limits.
    """
    if dt_s <= 0.0:
        raise ValueError("dt_s must be positive")
    cmd = np.asarray(commanded, dtype=float)
    if cmd.shape != state.actual_loads.shape:
        raise ValueError("commanded/state length mismatch")
    lo = np.array([s.min_load_kw for s in specs])
    hi = np.array([s.max_load_kw for s in specs])
    cmd = np.clip(cmd, lo, hi)
    tau = np.array([s.tau_s for s in specs])
    gain = 1.0 - np.exp(-dt_s / tau)
    new = state.actual_loads + (cmd - state.actual_loads) * gain
    return replace(state, actual_loads=new)


def measure_power(
    state: PlantState,
    specs: Sequence[CompressorSpec],
    noise_std_kw: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Noisy per-compressor power readings at the current loads.

    Metering noise is iid Gaussian with the given std; pass 0.0 for
    ideal sensors.  Draws come from the supplied generator so runs are
    reproducible end to end.
    """
    if noise_std_kw < 0.0:
        raise ValueError("noise_std_kw must be non-negative")
    truth = np.array([true_power(s, x) for s, x in zip(specs, state.actual_loads)])
    if noise_std_kw == 0.0:
        return truth
    return truth + rng.normal(0.0, noise_std_kw, size=truth.shape)


def plant_boxes(specs: Sequence[CompressorSpec]) -> List[Tuple[float, float]]:
    """Per-compressor (min, max) load boxes, the solver's bound set."""
    return [(s.min_load_kw, s.max_load_kw) for s in specs]
