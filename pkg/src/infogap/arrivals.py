"""Poisson arrival mathematics and the zero-arrival test for an unknown rate.

Arrivals (vehicles or pedestrians) form a homogeneous Poisson process.
Conflicts translate into collisions through a scenario-specific
conflict-to-collision ratio ``gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ArrivalModel:
    rate: float  # arrivals per second

    def __post_init__(self) -> None:
        if not math.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"rate must be finite and non-negative, got {self.rate!r}")


@dataclass(frozen=True)
class ConflictCollisionLink:
    """Number of traffic conflicts observed per collision."""

    gamma: float
    citation: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.gamma) or self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma!r}")


@dataclass(frozen=True)
class RiskBudget:
    p_coll_max: float
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_coll_max <= 1.0:
            raise ValueError("p_coll_max must lie in [0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


# Conflict-to-collision ratios (inverse of the accident/conflict ratios in
# Glauz, Bauer & Migletz 1985, Table 8).  The pedestrian entry is not a table
# value: it is the ratio implied by 0.0158 / 2.8e-6 and exists only so the
# published pedestrian collision bound can be reproduced.
GAMMA = {
    "opposing_left_turn": ConflictCollisionLink(
        1490, "Glauz et al. 1985, Table 8: opposing left turn"
    ),
    "through_cross": ConflictCollisionLink(
        2040, "Glauz et al. 1985, Table 8: through cross traffic"
    ),
    "pedestrian_implied": ConflictCollisionLink(
        5643, "back-computed from P(conflict)=0.0158 and P(collision)=2.8e-6"
    ),
}


def prob_at_least_one_arrival(m: ArrivalModel, window: float) -> float:
    if window < 0:
        raise ValueError("window must be non-negative")
    return -math.expm1(-m.rate * window)


def conflict_to_collision(p_conf: float, link: ConflictCollisionLink) -> float:
    if not 0.0 <= p_conf <= 1.0:
        raise ValueError("p_conf must lie in [0, 1]")
    return p_conf / link.gamma


def lambda_max(p_conf: float, t_conf: float) -> float:
    """Largest arrival rate whose conflict probability over ``t_conf`` is ``p_conf``."""
    if not 0.0 < p_conf < 1.0:
        raise ValueError("p_conf must lie in (0, 1)")
    if t_conf <= 0:
        raise ValueError("t_conf must be positive")
    return -math.log1p(-p_conf) / t_conf


def required_observation_time(lambda_max: float, alpha: float) -> float:
    """Silent observation time needed to reject ``rate >= lambda_max`` at level ``alpha``.

    Observing zero arrivals for ``t`` seconds has probability ``exp(-rate t)``
    under the null, so the test rejects once that drops to ``alpha``.
    ``alpha == 1`` needs no observation at all.
    """
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    return -math.log(alpha) / lambda_max


def empirical_collision_bound(
    crashes: float,
    years: float,
    turns_per_hour: float,
    peak_hours_per_day: float = 4.0,
    weekdays_per_year: float = 260.0,
) -> float:
    """Crashes per exposed maneuver: yearly crash count over yearly turns under occlusion."""
    if crashes < 0:
        raise ValueError("crashes must be non-negative")
    if min(years, turns_per_hour, peak_hours_per_day, weekdays_per_year) <= 0:
        raise ValueError("exposure inputs must be positive")
    turns_per_year = turns_per_hour * peak_hours_per_day * weekdays_per_year
    return (crashes / years) / turns_per_year
