from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infogap.kinematics import (
    MPH,
    STOPPED,
    UNREACHABLE,
    VehicleKinematics,
    braking_distance,
    is_reachable,
    mph_to_mps,
    mps_to_mph,
    reaction_delayed_distance,
    reaction_delayed_reach_time,
    stopping_distance,
    time_to_reach_accelerating,
    time_to_reach_decelerating,
)

speeds = st.floats(0.1, 40.0)
rates = st.floats(0.5, 10.0)
dists = st.floats(0.01, 200.0)


def test_unit_conversion_round_trip():
    assert mph_to_mps(25) == pytest.approx(11.176)
    assert mps_to_mph(mph_to_mps(17.3)) == pytest.approx(17.3)
    assert MPH == 0.44704


@pytest.mark.parametrize(
    "field,value",
    [("speed", -1.0), ("a_acc", 0.0), ("a_dec", -4.0), ("reaction_time", -0.1), ("length", 0.0), ("speed", math.nan)],
)
def test_invalid_kinematics_rejected(field, value):
    with pytest.raises(ValueError):
        VehicleKinematics(**{field: value})


def test_stopping_distance_of_reference_tmv():
    k = VehicleKinematics(speed=11.18, reaction_time=0.7)
    assert stopping_distance(k) == pytest.approx(11.18 * 0.7 + 11.18**2 / 8)
    assert stopping_distance(k) == pytest.approx(23.45, abs=0.01)


def test_accelerating_from_rest():
    k = VehicleKinematics(speed=0.0, a_acc=2.0)
    assert time_to_reach_accelerating(k, 9.0) == pytest.approx(3.0)


def test_decelerating_reaches_or_not():
    k = VehicleKinematics(speed=10.0, a_dec=4.0)
    assert time_to_reach_decelerating(k, 12.5) == pytest.approx(2.5)  # arrives exactly at rest
    assert time_to_reach_decelerating(k, 12.6) == UNREACHABLE
    assert not is_reachable(UNREACHABLE)


def test_zero_distance_is_immediate():
    k = VehicleKinematics(speed=5.0, reaction_time=1.0)
    assert time_to_reach_accelerating(k, 0.0) == 0.0
    assert time_to_reach_decelerating(k, 0.0) == 0.0
    assert reaction_delayed_reach_time(k, 0.0) == 0.0


def test_negative_distance_rejected():
    with pytest.raises(ValueError):
        time_to_reach_accelerating(VehicleKinematics(speed=1.0), -1.0)


def test_reaction_delayed_reach_time_regimes():
    k = VehicleKinematics(speed=10.0, a_dec=4.0, reaction_time=1.0)
    assert reaction_delayed_reach_time(k, 5.0) == pytest.approx(0.5)  # during reaction
    assert reaction_delayed_reach_time(k, 10.0 + 10.5) == pytest.approx(1.0 + 1.5)
    assert reaction_delayed_reach_time(k, stopping_distance(k)) == STOPPED  # boundary is stopped
    assert reaction_delayed_reach_time(k, stopping_distance(k) + 1) == STOPPED


def test_reaction_delayed_distance_clamps_at_rest():
    k = VehicleKinematics(speed=8.0, a_dec=4.0, reaction_time=0.5)
    assert reaction_delayed_distance(k, 0.25, -4.0) == pytest.approx(2.0)
    assert reaction_delayed_distance(k, 100.0, -4.0) == pytest.approx(stopping_distance(k))
    assert reaction_delayed_distance(k, 1.5, 3.0) == pytest.approx(4.0 + 8.0 + 1.5)


@given(v=speeds, a=rates, d=dists)
def test_accelerating_root_solves_motion(v, a, d):
    t = time_to_reach_accelerating(VehicleKinematics(speed=v, a_acc=a), d)
    assert v * t + 0.5 * a * t * t == pytest.approx(d, rel=1e-9)


@given(v=speeds, a=rates, d=dists)
def test_decelerating_root_solves_motion(v, a, d):
    t = time_to_reach_decelerating(VehicleKinematics(speed=v, a_dec=a), d)
    if is_reachable(t):
        assert t <= v / a + 1e-9
        assert v * t - 0.5 * a * t * t == pytest.approx(d, rel=1e-9)
    else:
        assert d > braking_distance(VehicleKinematics(speed=v, a_dec=a))


@given(v=speeds, a=rates, rho=st.floats(0, 3), d=dists)
def test_acceleration_beats_braking(v, a, rho, d):
    k = VehicleKinematics(speed=v, a_acc=a, a_dec=a, reaction_time=rho)
    assert time_to_reach_accelerating(k, d) <= time_to_reach_decelerating(k, d)


@given(v=speeds, a=rates, rho=st.floats(0, 3), frac=st.floats(0.01, 0.99))
def test_reaction_delayed_time_inverts_distance(v, a, rho, frac):
    k = VehicleKinematics(speed=v, a_dec=a, reaction_time=rho)
    d = frac * stopping_distance(k)
    t = reaction_delayed_reach_time(k, d)
    assert reaction_delayed_distance(k, t, -a) == pytest.approx(d, rel=1e-7)
