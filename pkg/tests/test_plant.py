"""Plant simulator: truth curves, dynamics, metering."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chillrto.plant import (
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


def test_default_plant_shape(specs):
    assert [s.size_class for s in specs] == ["small", "medium", "large", "large", "large"]
    for s in specs:
        s.validate()
    assert len({s.name for s in specs}) == 5


def test_full_load_power_anchor(specs):
    # hand-recomputed from the quadratics: a + b*x + c*x^2 at max load
    per_machine = []
    for s in specs:
        a, b, c = s.power_poly
        per_machine.append(a + b * s.max_load_kw + c * s.max_load_kw**2)
    assert sum(per_machine) == pytest.approx(1975.0, abs=1e-9)
    assert true_total_power(specs, [s.max_load_kw for s in specs]) == pytest.approx(
        1975.0, abs=1e-9
    )


def test_efficiency_at_full_load(specs):
    for s in specs:
        cop = s.max_load_kw / true_power(s, s.max_load_kw)
        assert 1.5 <= cop <= 1.7


def test_curves_strictly_increasing(specs):
    for s in specs:
        g = np.linspace(s.min_load_kw, s.max_load_kw, 400)
        p = true_power(s, g)
        assert np.all(np.diff(p) > 0)
        assert p[0] > 0


def test_min_load_total(specs):
    assert true_total_power(specs, [s.min_load_kw for s in specs]) == pytest.approx(
        686.82074, abs=1e-5
    )
    assert sum(s.min_load_kw for s in specs) == pytest.approx(875.0)
    assert sum(s.max_load_kw for s in specs) == pytest.approx(3142.0)


def test_step_matches_exact_exponential(specs):
    state = initial_state(specs)
    cmd = [s.max_load_kw for s in specs]
    dt = 1.0
    x0 = state.actual_loads.copy()
    for k in range(1, 200):
        state = step(state, specs, cmd, dt)
        # closed form: x(t) = u + (x0 - u) * exp(-t/tau)
        for i, s in enumerate(specs):
            want = cmd[i] + (x0[i] - cmd[i]) * math.exp(-k * dt / s.tau_s)
            assert state.actual_loads[i] == pytest.approx(want, rel=1e-12, abs=1e-9)


def test_step_size_does_not_bias_trajectory(specs):
    one = initial_state(specs)
    for _ in range(10):
        one = step(one, specs, [400.0] * 5, 1.0)
    coarse = step(initial_state(specs), specs, [400.0] * 5, 10.0)
    np.testing.assert_allclose(one.actual_loads, coarse.actual_loads, rtol=1e-12)


def test_step_clips_commands_to_box(specs):
    state = initial_state(specs)
    state = step(state, specs, [1e6] * 5, 1e9)  # huge dt: lands on the clip
    for s, x in zip(specs, state.actual_loads):
        assert x == pytest.approx(s.max_load_kw)


def test_step_rejects_bad_dt(specs):
    with pytest.raises(ValueError):
        step(initial_state(specs), specs, [300.0] * 5, 0.0)


def test_measure_power_noise_free(specs, rng):
    state = initial_state(specs)
    m = measure_power(state, specs, 0.0, rng)
    want = [true_power(s, s.min_load_kw) for s in specs]
    np.testing.assert_allclose(m, want)


def test_measure_power_noise_statistics(specs):
    rng = np.random.default_rng(0)
    state = initial_state(specs)
    draws = np.array([measure_power(state, specs, 5.0, rng) for _ in range(4000)])
    truth = np.array([true_power(s, s.min_load_kw) for s in specs])
    resid = draws - truth
    assert np.abs(resid.mean(axis=0)).max() < 0.3
    assert np.abs(resid.std(axis=0) - 5.0).max() < 0.3


def test_measure_power_rejects_negative_noise(specs, rng):
    with pytest.raises(ValueError):
        measure_power(initial_state(specs), specs, -1.0, rng)


def test_state_validation(specs):
    PlantState(np.array([s.min_load_kw for s in specs])).validate(specs)
    with pytest.raises(ValueError):
        PlantState(np.array([0.0] * 5)).validate(specs)
    with pytest.raises(ValueError):
        PlantState(np.zeros(3)).validate(specs)


def test_spec_validation_rejects_bad_geometry():
    good = CompressorSpec("X", "small", 50.0, 200.0, (10.0, 0.4, 1e-4), 50.0)
    good.validate()
    with pytest.raises(ValueError):
        CompressorSpec("X", "small", 200.0, 50.0, (10.0, 0.4, 1e-4), 50.0).validate()
    with pytest.raises(ValueError):
        CompressorSpec("X", "odd", 50.0, 200.0, (10.0, 0.4, 1e-4), 50.0).validate()
    with pytest.raises(ValueError):
        # decreasing over part of the box
        CompressorSpec("X", "small", 50.0, 200.0, (10.0, -0.5, 1e-4), 50.0).validate()
    with pytest.raises(ValueError):
        CompressorSpec("X", "small", 50.0, 200.0, (10.0, 0.4, 1e-4), 0.0).validate()


def test_plant_boxes(specs):
    bx = plant_boxes(specs)
    assert bx[0] == (56.0, 220.0)
    assert bx[-1] == (194.0, 795.0)


@settings(max_examples=50, deadline=None)
@given(
    u=st.floats(min_value=56.0, max_value=220.0),
    dt=st.floats(min_value=0.1, max_value=500.0),
    x0=st.floats(min_value=56.0, max_value=220.0),
)
def test_step_contracts_toward_command(u, dt, x0):
    spec = CompressorSpec("X", "small", 56.0, 220.0, (39.48, 0.40, 3.0e-4), 50.0)
    state = PlantState(np.array([x0]))
    new = step(state, [spec], [u], dt)
    # distance to the clipped command shrinks by exactly exp(-dt/tau)
    want = abs(x0 - u) * math.exp(-dt / spec.tau_s)
    assert abs(new.actual_loads[0] - u) == pytest.approx(want, rel=1e-9, abs=1e-9)
