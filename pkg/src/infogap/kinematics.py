"""Motion primitives shared by the scenario engines.

All quantities are SI: metres, seconds, m/s and m/s^2.  Conversions from
mph happen only at the command-line boundary (see :func:`mph_to_mps`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

MPH = 0.44704  # m/s per mph

# A time-to-reach that never happens: the vehicle stops short of the target.
# Both sentinels are +inf so they compose with ordinary arithmetic
# (e.g. ``t_acc - UNREACHABLE`` is ``-inf``).
UNREACHABLE = math.inf
STOPPED = math.inf


def mph_to_mps(speed_mph: float) -> float:
    return speed_mph * MPH


def mps_to_mph(speed_mps: float) -> float:
    return speed_mps / MPH


@dataclass(frozen=True)
class VehicleKinematics:
    """Speed, acceleration limits, reaction time and footprint of one vehicle.

    Defaults are the generic passenger-car values used throughout: 3 m/s^2
    acceleration, 4 m/s^2 braking, a 4 m x 2 m body.
    """

    speed: float = 0.0
    a_acc: float = 3.0
    a_dec: float = 4.0
    reaction_time: float = 0.0
    length: float = 4.0
    width: float = 2.0

    def __post_init__(self) -> None:
        for name in ("speed", "a_acc", "a_dec", "reaction_time", "length", "width"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.a_acc <= 0 or self.a_dec <= 0:
            raise ValueError("a_acc and a_dec must be strictly positive")
        if self.speed < 0 or self.reaction_time < 0:
            raise ValueError("speed and reaction_time must be non-negative")
        if self.length <= 0 or self.width <= 0:
            raise ValueError("length and width must be positive")

    def with_(self, **changes: float) -> VehicleKinematics:
        return replace(self, **changes)


def is_reachable(t: float) -> bool:
    return math.isfinite(t)


def braking_distance(k: VehicleKinematics) -> float:
    return k.speed * k.speed / (2.0 * k.a_dec)


def stopping_distance(k: VehicleKinematics) -> float:
    """Distance covered during the reaction time plus full braking to rest."""
    return k.speed * k.reaction_time + braking_distance(k)


def time_to_reach_accelerating(k: VehicleKinematics, distance: float) -> float:
    """Time to cover ``distance`` from ``k.speed`` under full acceleration.

    This is the positive root of ``distance = v t + a t^2 / 2``, written as
    ``2 d / (v + sqrt(v^2 + 2 a d))`` so that it stays accurate when
    ``v^2`` dwarfs ``2 a d``.
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if distance == 0:
        return 0.0
    v = k.speed
    return 2.0 * distance / (v + math.sqrt(v * v + 2.0 * k.a_acc * distance))


def time_to_reach_decelerating(k: VehicleKinematics, distance: float) -> float:
    """Time to cover ``distance`` while braking at ``k.a_dec``.

    Returns :data:`UNREACHABLE` when the vehicle comes to rest first.  Arriving
    with exactly zero speed counts as reaching.
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if distance == 0:
        return 0.0
    v = k.speed
    disc = v * v - 2.0 * k.a_dec * distance
    if disc < 0:
        return UNREACHABLE
    return 2.0 * distance / (v + math.sqrt(disc))


def reaction_delayed_reach_time(k: VehicleKinematics, distance: float) -> float:
    """Time to cover ``distance`` when cruising for the reaction time, then braking.

    Returns :data:`STOPPED` if the vehicle halts before or exactly at the
    target, so ``distance == stopping_distance(k)`` is classified as stopped.
    """
    if distance < 0:
        raise ValueError("distance must be non-negative")
    if distance == 0:
        return 0.0
    v = k.speed
    cruise = v * k.reaction_time
    if distance <= cruise:
        return distance / v
    remaining = distance - cruise
    if remaining >= braking_distance(k):
        return STOPPED
    disc = v * v - 2.0 * k.a_dec * remaining
    return k.reaction_time + 2.0 * remaining / (v + math.sqrt(disc))


def reaction_delayed_distance(k: VehicleKinematics, t: float, accel: float) -> float:
    """Distance covered in time ``t`` cruising for the reaction time, then
    applying constant ``accel`` (negative for braking; motion stops at rest)."""
    if t <= k.reaction_time:
        return k.speed * t
    tau = t - k.reaction_time
    cruise = k.speed * k.reaction_time
    if accel < 0:
        tau = min(tau, k.speed / -accel)
    return cruise + k.speed * tau + 0.5 * accel * tau * tau
