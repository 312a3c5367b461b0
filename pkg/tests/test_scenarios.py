"""Demand scenarios: built-ins, lookup semantics, CSV round-trips."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chillrto.scenarios import Scenario, builtin, builtin_names, load_csv, save_csv


def test_builtin_names():
    assert builtin_names() == ("fixed_z_ablation", "step_jump", "weekend")
    with pytest.raises(KeyError):
        builtin("nope")


def test_all_builtins_validate():
    for name in builtin_names():
        scn = builtin(name)
        scn.validate()
        assert scn.horizon_s == 42000.0


def test_step_jump_shape():
    scn = builtin("step_jump")
    assert scn.steps == ((0.0, 1200.0), (2500.0, 2600.0))
    assert scn.demand_at(0.0) == 1200.0
    assert scn.demand_at(2499.999) == 1200.0
    # left-closed: the new demand applies exactly at its start time
    assert scn.demand_at(2500.0) == 2600.0
    assert scn.demand_at(42000.0) == 2600.0


def test_fixed_z_is_constant():
    scn = builtin("fixed_z_ablation")
    ts = np.linspace(0, scn.horizon_s, 97)
    assert set(scn.demand_series(ts).tolist()) == {1600.0}


def test_weekend_profile_properties(specs):
    scn = builtin("weekend")
    demands = [d for _, d in scn.steps]
    lo = sum(s.min_load_kw for s in specs)
    hi = sum(s.max_load_kw for s in specs)
    assert min(demands) >= lo
    assert max(demands) <= hi
    assert min(demands) >= 1000.0  # never idles the whole plant
    assert max(demands) >= 2700.0  # reaches past what the power cap can serve
    # every change lands exactly on a dispatch boundary
    assert all(t % 250.0 == 0.0 for t, _ in scn.steps)
    # plateaus long enough for the demand-repeat rule to engage
    times = [t for t, _ in scn.steps] + [scn.horizon_s]
    assert min(np.diff(times)) >= 1500.0 - 1e-9


def test_demand_at_bounds():
    scn = builtin("weekend")
    with pytest.raises(ValueError):
        scn.demand_at(-1.0)
    with pytest.raises(ValueError):
        scn.demand_at(scn.horizon_s + 1.0)


def test_demand_series_matches_scalar():
    scn = builtin("weekend")
    ts = np.linspace(0.0, scn.horizon_s, 211)
    series = scn.demand_series(ts)
    for t, d in zip(ts, series):
        assert scn.demand_at(float(t)) == d


def test_validation_rejects_bad_profiles():
    with pytest.raises(ValueError):
        Scenario("x", (), 100.0).validate()
    with pytest.raises(ValueError):
        Scenario("x", ((10.0, 500.0),), 100.0).validate()  # must start at 0
    with pytest.raises(ValueError):
        Scenario("x", ((0.0, 500.0), (0.0, 600.0)), 100.0).validate()
    with pytest.raises(ValueError):
        Scenario("x", ((0.0, -5.0),), 100.0).validate()
    with pytest.raises(ValueError):
        Scenario("x", ((0.0, 500.0), (100.0, 600.0)), 100.0).validate()  # at horizon
    with pytest.raises(ValueError):
        Scenario("", ((0.0, 500.0),), 100.0).validate()


def test_csv_round_trip(tmp_path):
    scn = builtin("weekend")
    p = tmp_path / "weekend.csv"
    save_csv(scn, p)
    back = load_csv(p, name="weekend")
    assert back.steps == scn.steps
    assert back.horizon_s == scn.horizon_s
    # and the file is stable across writes
    q = tmp_path / "again.csv"
    save_csv(back, q)
    assert p.read_bytes() == q.read_bytes()


def test_csv_header_enforced(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("time,load\n0,1000\n")
    with pytest.raises(ValueError, match="header"):
        load_csv(p)


def test_csv_bad_rows(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t_start_s,demand_kw\n0,abc\n")
    with pytest.raises(ValueError, match="non-numeric"):
        load_csv(p)
    p.write_text("t_start_s,demand_kw\n0,1000,9\n")
    with pytest.raises(ValueError, match="2 columns"):
        load_csv(p)
    p.write_text("")
    with pytest.raises(ValueError, match="empty"):
        load_csv(p)


def test_csv_unsorted_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("t_start_s,demand_kw\n0,1000\n500,1100\n250,1200\n")
    with pytest.raises(ValueError, match="increasing"):
        load_csv(p)


@settings(max_examples=30, deadline=None)
@given(t=st.floats(min_value=0.0, max_value=42000.0, allow_nan=False))
def test_weekend_demand_is_one_of_the_steps(t):
    scn = builtin("weekend")
    assert scn.demand_at(t) in {d for _, d in scn.steps}
