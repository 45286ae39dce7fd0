from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infogap.arrivals import GAMMA
from infogap.kinematics import VehicleKinematics
from infogap.pedestrian import (
    PedestrianScenario,
    ScenarioKind,
    collision_probability,
    conflict_probability,
    conflict_speed_sweep_fig6,
    conflict_window,
    default_speed_grid,
    unavoidable_ped_distance_band,
)

FROZEN = {
    ScenarioKind.MANEUVER_TYPE1: (0.0145332, (0.062398, 1.819181)),
    ScenarioKind.MANEUVER_TYPE2: (0.0125442, (0.550554, 2.065383)),
    ScenarioKind.NO_MANEUVER: (0.0158382, (0.0, 1.684163)),
}


@pytest.mark.parametrize("kind", list(ScenarioKind))
def test_frozen_defaults(kind):
    s = PedestrianScenario.default(kind)
    p, (lo, hi) = FROZEN[kind]
    assert conflict_probability(s) == pytest.approx(p, rel=1e-5)
    band = unavoidable_ped_distance_band(s)
    assert band[0] == pytest.approx(lo, abs=1e-6)
    assert band[1] == pytest.approx(hi, abs=1e-6)


def test_window_composition():
    s = PedestrianScenario.default("type2")
    w = conflict_window(s)
    assert w.delta == pytest.approx(1.0)
    assert w.window_length == pytest.approx(w.t_acc - w.t_dec + w.delta)
    assert conflict_probability(s) == pytest.approx(1 - math.exp(-w.window_length / 60))


def test_stopping_short_gives_no_window():
    s = PedestrianScenario(ScenarioKind.MANEUVER_TYPE2, VehicleKinematics(speed=2.0), d_veh_to_crash=4.0)
    assert math.isinf(conflict_window(s).t_dec)
    assert conflict_probability(s) == 0.0
    with pytest.raises(ValueError):
        unavoidable_ped_distance_band(s)


def test_no_pedestrians_no_conflict():
    s = PedestrianScenario.default("type1").with_(ped_rate=0.0)
    assert conflict_probability(s) == 0.0


def test_collision_probability_with_implied_gamma():
    s = PedestrianScenario.default("no-maneuver")
    assert collision_probability(s, GAMMA["pedestrian_implied"]) == pytest.approx(2.8e-6, rel=0.01)


def test_invalid_scenario():
    with pytest.raises(ValueError):
        PedestrianScenario(ScenarioKind.MANEUVER_TYPE1, ped_speed=0.0)
    with pytest.raises(ValueError):
        PedestrianScenario.default("sideways")


def test_speed_grid_contains_stars():
    grid = default_speed_grid()
    assert 6.71 in grid and 11.18 in grid
    assert grid[0] == pytest.approx(0.05) and grid[-1] == pytest.approx(20.0)


def test_fig6_sweep_series_and_monotone():
    rows = conflict_speed_sweep_fig6()
    for kind in ScenarioKind:
        ps = [p for k, _, p in rows if k == kind.value]
        assert len(ps) == len(default_speed_grid())
        assert all(b >= a - 1e-15 for a, b in zip(ps, ps[1:]))


@given(v1=st.floats(0.1, 30), v2=st.floats(0.1, 30), kind=st.sampled_from(list(ScenarioKind)))
def test_probability_non_decreasing_in_speed(v1, v2, kind):
    lo, hi = sorted((v1, v2))
    base = PedestrianScenario.default(kind)
    assert conflict_probability(base.with_speed(lo)) <= conflict_probability(base.with_speed(hi)) + 1e-15


@given(rate=st.floats(0, 1), kind=st.sampled_from(list(ScenarioKind)))
def test_probability_is_a_probability(rate, kind):
    p = conflict_probability(PedestrianScenario.default(kind).with_(ped_rate=rate))
    assert 0.0 <= p <= 1.0
