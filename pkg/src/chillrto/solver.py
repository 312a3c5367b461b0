"""Constrained dispatch solver: multistart SLSQP plus a grid oracle.

The dispatch problem is a 5-dimensional box-bounded minimization with
one smooth inequality constraint.  It is nonconvex (the exploration
bonus subtracts posterior stds), so a single local solve from one
start is not trustworthy; instead several starts are polished and the
best feasible result wins.  The exhaustive grid oracle exists to keep
the local solver honest in tests, not for production use.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

__all__ = ["SolveReport", "minimize", "grid_oracle"]

_MAX_ITER = 500
_FTOL = 1e-9
_FEAS_TOL = 1e-6
_MAX_GRID_EVALS = 59049  # 9**5


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one dispatch solve.

    x: best point found (clipped to bounds).
    objective: objective value at x.
    constraint_violation: max(g(x), 0); zero when feasible.
    feasible: g(x) <= feasibility tolerance.
    converged: the winning local solve reported success.
    n_evals: objective evaluations across all starts.
    start_index: which start produced the winner (-1 for the oracle).
    """

    x: np.ndarray
    objective: float
    constraint_violation: float
    feasible: bool
    converged: bool
    n_evals: int
    start_index: int


def _clip(x: np.ndarray, bounds: Sequence[Tuple[float, float]]) -> np.ndarray:
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return np.clip(x, lo, hi)


def minimize(
    objective: Callable[[np.ndarray], float],
    bounds: Sequence[Tuple[float, float]],
    starts: Sequence[np.ndarray],
    inequality: Optional[Callable[[np.ndarray], float]] = None,
    objective_grad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    inequality_grad: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    feas_tol: float = _FEAS_TOL,
    constraint_scale: float = 1.0,
) -> SolveReport:
    """Multistart local minimization over a box with one inequality.

    The inequality uses the g(x) <= 0 convention.  Feasibility is
    judged against feas_tol * constraint_scale so callers can state
    the tolerance relative to their constraint's natural units.

    Winner selection: feasible beats infeasible; among feasible, lower
    objective wins; among infeasible, lower violation wins; remaining
    ties go to the earlier start.  The returned point is clipped to
    the box, guarding against the optimizer's last-step overshoot.
    """
    if not starts:
        raise ValueError("need at least one start")
    for b in bounds:
        if b[0] > b[1]:
            raise ValueError(f"empty bound interval {b}")
    tol = feas_tol * constraint_scale

    constraints = []
    if inequality is not None:
        con = {"type": "ineq", "fun": lambda x: -inequality(x)}
        if inequality_grad is not None:
            con["jac"] = lambda x: -inequality_grad(x)
        constraints.append(con)

    n_evals = 0
    best = None  # (key tuple, report fields)
    for si, x0 in enumerate(starts):
        x0 = _clip(np.asarray(x0, dtype=float), bounds)
        res = _scipy_minimize(
            objective,
            x0,
            jac=objective_grad,
            bounds=bounds,
            constraints=constraints,
            method="SLSQP",
            options={"maxiter": _MAX_ITER, "ftol": _FTOL},
        )
        n_evals += int(res.get("nfev", 0))
        x = _clip(np.asarray(res.x, dtype=float), bounds)
        f = float(objective(x))
        g = float(inequality(x)) if inequality is not None else 0.0
        viol = max(g, 0.0)
        feasible = g <= tol
        key = (not feasible, f if feasible else np.inf, viol, si)
        if best is None or key < best[0]:
            best = (key, x, f, viol, feasible, bool(res.success), si)

    _, x, f, viol, feasible, converged, si = best
    return SolveReport(
        x=x,
        objective=f,
        constraint_violation=viol,
        feasible=feasible,
        converged=converged,
        n_evals=n_evals,
        start_index=si,
    )


def grid_oracle(
    objective: Callable[[np.ndarray], float],
    bounds: Sequence[Tuple[float, float]],
    inequality: Optional[Callable[[np.ndarray], float]] = None,
    points_per_dim: int = 9,
    feas_tol: float = _FEAS_TOL,
    constraint_scale: float = 1.0,
) -> SolveReport:
    """Exhaustive search over a regular grid inside the box.

    Capped at 9 points per dimension / 59049 evaluations: this is a
    test-time reference, and anything finer belongs to the real
    solver.  Winner selection matches minimize(): feasible first, then
    objective, then violation; ties go to the lexicographically first
    grid point.
    """
    ndim = len(bounds)
    if points_per_dim < 2:
        raise ValueError("points_per_dim must be at least 2")
    if points_per_dim**ndim > _MAX_GRID_EVALS:
        raise ValueError(
            f"grid of {points_per_dim}^{ndim} exceeds the {_MAX_GRID_EVALS}-point cap"
        )
    axes = [np.linspace(lo, hi, points_per_dim) for lo, hi in bounds]
    tol = feas_tol * constraint_scale

    best = None
    n_evals = 0
    for combo in itertools.product(*axes):
        x = np.array(combo)
        f = float(objective(x))
        n_evals += 1
        g = float(inequality(x)) if inequality is not None else 0.0
        viol = max(g, 0.0)
        feasible = g <= tol
        key = (not feasible, f if feasible else np.inf, viol)
        if best is None or key < best[0]:
            best = (key, x, f, viol, feasible)

    _, x, f, viol, feasible = best
    return SolveReport(
        x=x,
        objective=f,
        constraint_violation=viol,
        feasible=feasible,
        converged=True,
        n_evals=n_evals,
        start_index=-1,
    )
