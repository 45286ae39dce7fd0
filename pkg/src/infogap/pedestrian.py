"""Occluded-pedestrian pre-crash scenarios.

Time zero is the instant the AV first detects a pedestrian.  The AV either
accelerates to pass the crosswalk before the pedestrian or brakes so that it
arrives after.  A pedestrian whose arrival at the centre of the crossing
conflict zone falls inside both branches' exposure windows cannot be avoided.

Distances to the crossing are measured from the AV's front to the near edge
of the pedestrian conflict zone; pedestrian distances are measured to the
zone centre.  These conventions reproduce all three published bands.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from . import arrivals
from .arrivals import ArrivalModel, ConflictCollisionLink
from .kinematics import (
    VehicleKinematics,
    is_reachable,
    time_to_reach_accelerating,
    time_to_reach_decelerating,
)


class ScenarioKind(enum.Enum):
    MANEUVER_TYPE1 = "type1"
    MANEUVER_TYPE2 = "type2"
    NO_MANEUVER = "no-maneuver"


# (v_AV m/s, D_veh_to_crash m)
DEFAULTS = {
    ScenarioKind.MANEUVER_TYPE1: (6.71, 3.0),
    ScenarioKind.MANEUVER_TYPE2: (6.71, 4.0),
    ScenarioKind.NO_MANEUVER: (11.18, 4.0),
}


@dataclass(frozen=True)
class PedestrianScenario:
    kind: ScenarioKind
    av: VehicleKinematics = field(default_factory=VehicleKinematics)
    d_veh_to_crash: float = 4.0
    ped_speed: float = 2.0
    ped_rate: float = 1.0 / 60.0

    def __post_init__(self) -> None:
        if self.d_veh_to_crash < 0:
            raise ValueError("d_veh_to_crash must be non-negative")
        if self.ped_speed <= 0:
            raise ValueError("ped_speed must be positive")
        if self.ped_rate < 0:
            raise ValueError("ped_rate must be non-negative")

    @classmethod
    def default(cls, kind: ScenarioKind | str) -> PedestrianScenario:
        kind = ScenarioKind(kind)
        speed, dist = DEFAULTS[kind]
        return cls(kind=kind, av=VehicleKinematics(speed=speed), d_veh_to_crash=dist)

    def with_(self, **changes) -> PedestrianScenario:
        return replace(self, **changes)

    def with_speed(self, v_av: float) -> PedestrianScenario:
        return replace(self, av=self.av.with_(speed=v_av))


@dataclass(frozen=True)
class ConflictWindow:
    t_acc: float
    t_dec: float  # inf when braking stops the AV short of the crossing
    delta: float
    window_length: float


def conflict_window(s: PedestrianScenario) -> ConflictWindow:
    delta = s.av.width / s.ped_speed
    t_acc = time_to_reach_accelerating(s.av, s.d_veh_to_crash)
    t_dec = time_to_reach_decelerating(s.av, s.d_veh_to_crash)
    if not is_reachable(t_dec):
        # stopping short avoids every pedestrian
        length = 0.0
    else:
        length = max(t_acc - t_dec + delta, 0.0)
    return ConflictWindow(t_acc=t_acc, t_dec=t_dec, delta=delta, window_length=length)


def unavoidable_ped_distance_band(s: PedestrianScenario) -> tuple[float, float]:
    """Pedestrian distances to the zone centre (at detection) that make a conflict unavoidable.

    The near end is clamped at zero.
    """
    w = conflict_window(s)
    if w.window_length <= 0:
        raise ValueError("no unavoidable-conflict window for this scenario")
    lo = (w.t_dec - w.delta / 2) * s.ped_speed
    hi = (w.t_acc + w.delta / 2) * s.ped_speed
    return max(lo, 0.0), hi


def conflict_probability(s: PedestrianScenario) -> float:
    w = conflict_window(s)
    return arrivals.prob_at_least_one_arrival(ArrivalModel(s.ped_rate), w.window_length)


def collision_probability(s: PedestrianScenario, link: ConflictCollisionLink) -> float:
    return arrivals.conflict_to_collision(conflict_probability(s), link)


def default_speed_grid() -> np.ndarray:
    """0.05 m/s steps up to 20 m/s, plus every scenario's default speed."""
    grid = np.round(np.arange(0.05, 20.0 + 1e-9, 0.05), 10)
    stars = np.array(sorted({v for v, _ in DEFAULTS.values()}))
    return np.unique(np.concatenate([grid, stars]))


def conflict_speed_sweep_fig6(
    s: PedestrianScenario | None = None,
    v_av_range: np.ndarray | list[float] | None = None,
) -> list[tuple[str, float, float]]:
    """Rows ``(scenario, v_av_mps, conflict_probability)``.

    With ``s`` omitted, emits one series per scenario kind at its defaults.
    """
    speeds = default_speed_grid() if v_av_range is None else v_av_range
    bases = [s] if s is not None else [PedestrianScenario.default(k) for k in ScenarioKind]
    rows = []
    for base in bases:
        for v in speeds:
            v = float(v)
            rows.append((base.kind.value, v, conflict_probability(base.with_speed(v))))
    return rows
