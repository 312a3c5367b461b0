"""Dispatch solver against analytic optima and the exhaustive grid."""

import numpy as np
import pytest

from chillrto.solver import SolveReport, grid_oracle, minimize


BOUNDS2 = [(0.0, 10.0), (0.0, 10.0)]


def test_unconstrained_quadratic_hits_analytic_optimum():
    c = np.array([3.0, 7.0])

    def f(x):
        return float(np.sum((x - c) ** 2))

    rep = minimize(f, BOUNDS2, [np.zeros(2)])
    np.testing.assert_allclose(rep.x, c, atol=1e-6)
    assert rep.feasible and rep.converged
    assert rep.objective == pytest.approx(0.0, abs=1e-10)


def test_constrained_quadratic_projects_onto_budget():
    # min ||x - c||^2  s.t.  sum(x) <= 6; optimum is the projection of c
    # onto the half-space: c - (sum(c)-6)/2 per coordinate = (2, 4)
    c = np.array([3.0, 5.0])

    def f(x):
        return float(np.sum((x - c) ** 2))

    def g(x):
        return float(np.sum(x) - 6.0)

    rep = minimize(f, BOUNDS2, [np.zeros(2)], inequality=g)
    np.testing.assert_allclose(rep.x, [2.0, 4.0], atol=1e-6)
    assert rep.feasible


def test_gradients_accepted_and_used():
    c = np.array([3.0, 7.0])

    def f(x):
        return float(np.sum((x - c) ** 2))

    def fg(x):
        return 2.0 * (x - c)

    def g(x):
        return float(np.sum(x) - 6.0)

    def gg(x):
        return np.ones(2)

    rep = minimize(f, BOUNDS2, [np.zeros(2)], inequality=g, objective_grad=fg, inequality_grad=gg)
    assert rep.feasible
    assert float(np.sum(rep.x)) <= 6.0 + 1e-6


def test_multistart_escapes_bad_basin():
    # two separated wells; the deeper one is at 8, a start at 1 finds
    # the shallow one, multistart with a start near 8 wins
    def f(x):
        v = x[0]
        return float(-(np.exp(-((v - 2.0) ** 2)) + 2.0 * np.exp(-((v - 8.0) ** 2) / 0.5)))

    single = minimize(f, [(0.0, 10.0)], [np.array([1.0])])
    multi = minimize(f, [(0.0, 10.0)], [np.array([1.0]), np.array([7.5])])
    assert single.x[0] == pytest.approx(2.0, abs=1e-3)
    assert multi.x[0] == pytest.approx(8.0, abs=1e-3)
    assert multi.objective < single.objective
    assert multi.start_index == 1


def test_infeasible_problem_reports_violation():
    def f(x):
        return float(np.sum(x))

    def g(x):  # sum >= 25 impossible inside the box
        return float(25.0 - np.sum(x))

    rep = minimize(f, BOUNDS2, [np.array([5.0, 5.0])], inequality=g)
    assert not rep.feasible
    assert rep.constraint_violation > 0.0


def test_result_clipped_to_bounds():
    def f(x):
        return float(np.sum((x - 20.0) ** 2))  # pulls outside the box

    rep = minimize(f, BOUNDS2, [np.array([5.0, 5.0])])
    assert np.all(rep.x <= 10.0 + 1e-12)
    np.testing.assert_allclose(rep.x, [10.0, 10.0], atol=1e-8)


def test_empty_starts_rejected():
    with pytest.raises(ValueError):
        minimize(lambda x: 0.0, BOUNDS2, [])


def test_bad_bounds_rejected():
    with pytest.raises(ValueError):
        minimize(lambda x: 0.0, [(5.0, 1.0)], [np.zeros(1)])


def test_grid_oracle_separable_argmin():
    # separable objective: per-dim argmin computable by hand on the grid
    def f(x):
        return float((x[0] - 2.4) ** 2 + (x[1] - 9.0) ** 2)

    rep = grid_oracle(f, BOUNDS2, points_per_dim=5)  # grid {0,2.5,5,7.5,10}
    np.testing.assert_allclose(rep.x, [2.5, 10.0])
    assert rep.n_evals == 25
    assert rep.start_index == -1


def test_grid_oracle_respects_constraint():
    def f(x):
        return float(-np.sum(x))

    def g(x):
        return float(np.sum(x) - 10.0)

    rep = grid_oracle(f, BOUNDS2, inequality=g, points_per_dim=5)
    assert rep.feasible
    assert float(np.sum(rep.x)) <= 10.0 + 1e-9


def test_grid_oracle_eval_cap():
    with pytest.raises(ValueError):
        grid_oracle(lambda x: 0.0, [(0.0, 1.0)] * 6, points_per_dim=9)
    with pytest.raises(ValueError):
        grid_oracle(lambda x: 0.0, BOUNDS2, points_per_dim=1)


def test_feasibility_tolerance_scales():
    # g(x) = sum(x) - 6 evaluated at the optimum sits at ~0; a huge
    # constraint_scale widens what counts as feasible
    def f(x):
        return float(np.sum((x - 5.0) ** 2))

    def g(x):
        return float(np.sum(x) - 9.9)

    rep = minimize(f, BOUNDS2, [np.zeros(2)], inequality=g, constraint_scale=1.0)
    assert rep.feasible
    assert float(np.sum(rep.x)) <= 9.9 + 1e-5


def test_report_is_frozen():
    rep = SolveReport(
        x=np.zeros(2), objective=0.0, constraint_violation=0.0,
        feasible=True, converged=True, n_evals=1, start_index=0,
    )
    with pytest.raises(Exception):
        rep.objective = 1.0
