from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infogap.arrivals import (
    GAMMA,
    ArrivalModel,
    ConflictCollisionLink,
    RiskBudget,
    conflict_to_collision,
    empirical_collision_bound,
    lambda_max,
    prob_at_least_one_arrival,
    required_observation_time,
)


def test_arrival_probability_examples():
    assert prob_at_least_one_arrival(ArrivalModel(1 / 60), 0.0) == 0.0
    assert prob_at_least_one_arrival(ArrivalModel(0.0), 100.0) == 0.0
    assert prob_at_least_one_arrival(ArrivalModel(1.0), 1.0) == pytest.approx(1 - math.exp(-1))


def test_gamma_table():
    assert GAMMA["opposing_left_turn"].gamma == 1490
    assert GAMMA["through_cross"].gamma == 2040
    assert 0.0158 / GAMMA["pedestrian_implied"].gamma == pytest.approx(2.8e-6, rel=1e-3)
    with pytest.raises(ValueError):
        ConflictCollisionLink(0.5)


def test_conflict_to_collision():
    assert conflict_to_collision(0.02086, GAMMA["opposing_left_turn"]) == pytest.approx(1.4e-5)
    with pytest.raises(ValueError):
        conflict_to_collision(1.5, GAMMA["through_cross"])


def test_lambda_max_and_observation_time():
    lam = lambda_max(0.021, 1.024)
    assert lam == pytest.approx(0.0207, abs=1e-4)
    assert required_observation_time(lam, 1e-4) == pytest.approx(444, abs=2)
    assert required_observation_time(lam, 1.0) == 0.0


@pytest.mark.parametrize("p,t", [(0.0, 1.0), (1.0, 1.0), (0.5, 0.0)])
def test_lambda_max_domain(p, t):
    with pytest.raises(ValueError):
        lambda_max(p, t)


def test_observation_time_domain():
    with pytest.raises(ValueError):
        required_observation_time(0.1, 0.0)
    with pytest.raises(ValueError):
        RiskBudget(1.4e-5, 1.0)


def test_empirical_bound():
    assert empirical_collision_bound(10, 7, 100) == pytest.approx(1.3736e-5, rel=1e-4)
    assert empirical_collision_bound(0, 7, 100) == 0.0
    with pytest.raises(ValueError):
        empirical_collision_bound(1, 0, 100)


@given(p=st.floats(1e-6, 0.9), t=st.floats(0.01, 100.0))
def test_lambda_max_reproduces_probability(p, t):
    lam = lambda_max(p, t)
    assert prob_at_least_one_arrival(ArrivalModel(lam), t) == pytest.approx(p, rel=1e-9)


@given(lam=st.floats(1e-4, 10.0), alpha=st.floats(1e-8, 0.999))
def test_zero_arrival_test_has_level_alpha(lam, alpha):
    t = required_observation_time(lam, alpha)
    assert math.exp(-lam * t) == pytest.approx(alpha, rel=1e-9)


@given(lam=st.floats(0.0, 5.0), t1=st.floats(0.0, 50.0), t2=st.floats(0.0, 50.0))
def test_arrival_probability_monotone_in_window(lam, t1, t2):
    m = ArrivalModel(lam)
    lo, hi = sorted((t1, t2))
    assert prob_at_least_one_arrival(m, lo) <= prob_at_least_one_arrival(m, hi)
