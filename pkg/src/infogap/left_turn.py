"""Unprotected left turn with the opposing through lane hidden by a queue.

Geometry (metres, origin at the centre of the AV's turning circle, the AV
starting at ``(R, 0)`` and sweeping anticlockwise)::

    through lane          x in [0, lane_width]
    opposing turn lane    x in [lane_width, 2 lane_width]
    AV on its arc         (R cos(theta), R sin(theta))
    conflict-zone edge    y = conflict_edge   (TMVs approach from +y)

Vehicles other than the AV sit at their lane centres.  The AV sees past the
queue along the ray through the queue's front corner at
``(occluder_x, conflict_edge)``; the first visible part of a TMV is its side
at ``sight_x``.  With the default dimensions this reduces to
``d(theta) = 4 (12 - 9 sin theta) / (9 cos theta - 5)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import arrivals
from .arrivals import ConflictCollisionLink, RiskBudget
from .kinematics import (
    VehicleKinematics,
    is_reachable,
    reaction_delayed_distance,
    reaction_delayed_reach_time,
    stopping_distance,
)


class NoConflictWindow(Exception):
    """The TMV can always stop before the conflict zone; waiting is unnecessary."""


class GeometryDivergence(Exception):
    """The sight line no longer meets the through lane: visibility is unlimited."""


class NoEscapeWindow(Exception):
    """Braking or accelerating averts the crash at every arc position."""


def _default_tmv() -> VehicleKinematics:
    return VehicleKinematics(speed=11.18, reaction_time=0.7)


def _default_av() -> VehicleKinematics:
    return VehicleKinematics(speed=4.5, reaction_time=0.7)


@dataclass(frozen=True)
class LeftTurnScenario:
    tmv: VehicleKinematics = field(default_factory=_default_tmv)
    av: VehicleKinematics = field(default_factory=_default_av)
    d_cz_occluded: float = 12.0
    lane_width: float = 4.0
    turn_radius: float = 9.0
    conflict_edge: float = 12.0
    theta_conf: float | None = None

    def __post_init__(self) -> None:
        if self.turn_radius <= self.lane_width:
            raise ValueError("turn_radius must exceed lane_width")
        if self.d_cz_occluded <= 0:
            raise ValueError("d_cz_occluded must be positive")
        if self.theta_conf is not None and not 0 < self.theta_conf <= math.pi / 2:
            raise ValueError("theta_conf must lie in (0, pi/2]")

    @property
    def sight_x(self) -> float:
        return self.lane_width / 2 - self.tmv.width / 2

    @property
    def occluder_x(self) -> float:
        return self.sight_x + self.lane_width

    @property
    def conflict_angle(self) -> float:
        """Arc angle at which the AV reaches the near edge of the through lane."""
        if self.theta_conf is not None:
            return self.theta_conf
        return math.acos(self.lane_width / self.turn_radius)

    def with_(self, **changes) -> LeftTurnScenario:
        return replace(self, **changes)


def guaranteed_safe_tmv_speed(s: LeftTurnScenario) -> float:
    """Largest TMV speed that can still stop before the zone after reacting.

    Positive root of ``v^2 + 2 a rho v - 2 a d = 0``.
    """
    a, rho, d = s.tmv.a_dec, s.tmv.reaction_time, s.d_cz_occluded
    b = a * rho
    # 2 a d / (b + sqrt(b^2 + 2 a d)) is the same root without cancellation
    return 2.0 * a * d / (b + math.sqrt(b * b + 2.0 * a * d))


def is_guaranteed_safe(v_th: float, rho: float, a_dec: float, d_cz: float = 12.0) -> bool:
    return v_th * v_th <= 2.0 * a_dec * (d_cz - v_th * rho)


def sensitivity_sweep_fig2(
    s: LeftTurnScenario,
    rho_range: np.ndarray | list[float],
    a_dec_set: list[float],
) -> list[tuple[float, float, float]]:
    """Safe/unsafe boundary speed for each ``(rho, a_dec)`` pair.

    Rows are ``(rho, a_dec, v_max)``, ordered by ``a_dec`` then ``rho``.
    """
    rhos = [float(r) for r in rho_range]
    if not rhos or not a_dec_set:
        raise ValueError("rho_range and a_dec_set must be non-empty")
    rows = []
    for a_dec in a_dec_set:
        for rho in rhos:
            tmv = s.tmv.with_(a_dec=float(a_dec), reaction_time=rho)
            rows.append((rho, float(a_dec), guaranteed_safe_tmv_speed(s.with_(tmv=tmv))))
    return rows


@dataclass(frozen=True)
class WaitingTime:
    d_min_cz: float
    t_conf: float
    p_conf: float
    lambda_max: float
    t_obs: float


def waiting_time_pipeline(
    s: LeftTurnScenario,
    budget: RiskBudget,
    link: ConflictCollisionLink,
) -> WaitingTime:
    """How long the AV must see an empty opposing lane before turning.

    Raises
    ------
    NoConflictWindow
        If the TMV stops in time from ``d_cz_occluded`` (the turn is safe
        without waiting).
    """
    d_min = stopping_distance(s.tmv)
    if d_min <= s.d_cz_occluded + 1e-9:
        raise NoConflictWindow(
            f"stopping distance {d_min:.3f} m <= visible distance {s.d_cz_occluded:.3f} m"
        )
    t_conf = (d_min - s.d_cz_occluded) / s.tmv.speed
    p_conf = min(budget.p_coll_max * link.gamma, 1.0)
    if p_conf >= 1.0:
        raise ValueError("collision budget times gamma must stay below 1")
    lam = arrivals.lambda_max(p_conf, t_conf)
    return WaitingTime(
        d_min_cz=d_min,
        t_conf=t_conf,
        p_conf=p_conf,
        lambda_max=lam,
        t_obs=arrivals.required_observation_time(lam, budget.alpha),
    )


def occluded_view_distance(theta: float, s: LeftTurnScenario | None = None) -> float:
    """TMV distance from the conflict zone when it and the AV first see each other.

    Raises :class:`GeometryDivergence` once the sight line stops converging on
    the through lane (the AV's view is then unobstructed).
    """
    s = s or LeftTurnScenario()
    r = s.turn_radius
    bc = r * math.cos(theta) - s.occluder_x
    if bc <= 0:
        raise GeometryDivergence(f"sight line diverges at theta={theta:.4f}")
    ac = s.conflict_edge - r * math.sin(theta)
    return ac * (s.occluder_x - s.sight_x) / bc


def divergence_angle(s: LeftTurnScenario) -> float:
    return math.acos(s.occluder_x / s.turn_radius)


def theta_max(s: LeftTurnScenario) -> float:
    """Arc angle beyond which the TMV becomes visible far enough out to stop.

    The view distance first dips then grows without bound toward
    :func:`divergence_angle`; the root is taken on the growing branch.
    """
    d_min = stopping_distance(s.tmv)
    hi = divergence_angle(s) - 1e-12
    res = minimize_scalar(
        lambda t: occluded_view_distance(t, s), bounds=(0.0, hi), method="bounded"
    )
    lo = float(res.x)
    if occluded_view_distance(lo, s) >= d_min:
        raise NoConflictWindow("TMV can stop from every visible position")
    return brentq(lambda t: occluded_view_distance(t, s) - d_min, lo, hi, xtol=1e-14)


def decel_safe_max(s: LeftTurnScenario) -> float:
    """Largest arc angle from which the AV can still stop short of the through lane."""
    av, r = s.av, s.turn_radius
    return (
        s.conflict_angle
        - av.speed**2 / (2.0 * av.a_dec * r)
        - av.speed * av.reaction_time / r
    )


def accel_clearance_margin(theta: float, s: LeftTurnScenario) -> float:
    """Metres to spare when the AV accelerates through the lane from ``theta``.

    Positive means the AV's rear clears the through lane before the braking
    TMV arrives; ``inf`` when the TMV stops short anyway.
    """
    try:
        d = occluded_view_distance(theta, s)
    except GeometryDivergence:
        return math.inf
    t_tmv = reaction_delayed_reach_time(s.tmv, d)
    if not is_reachable(t_tmv):
        return math.inf
    needed = s.turn_radius * (s.conflict_angle - theta) + s.lane_width + s.av.length
    return reaction_delayed_distance(s.av, t_tmv, s.av.a_acc) - needed


def accel_safe_min(s: LeftTurnScenario, upper: float | None = None, n_grid: int = 4001) -> float:
    """Smallest angle from which accelerating is safe all the way up to ``upper``."""
    upper = theta_max(s) if upper is None else upper
    grid = np.linspace(0.0, upper, n_grid)
    ok = np.array([accel_clearance_margin(t, s) >= 0 for t in grid])
    if ok.all():
        return 0.0
    last_bad = int(np.flatnonzero(~ok)[-1])
    if last_bad == n_grid - 1:
        return upper
    a, b = grid[last_bad], grid[last_bad + 1]
    f = lambda t: min(accel_clearance_margin(t, s), 1e6)  # noqa: E731
    return brentq(f, a, b, xtol=1e-14)


@dataclass(frozen=True)
class EvasiveInterval:
    decel_safe_max: float
    accel_safe_min: float
    theta_max: float

    @property
    def unsafe_interval(self) -> tuple[float, float]:
        return (self.decel_safe_max, self.accel_safe_min)

    @property
    def waiting_time_factor(self) -> float:
        """Ratio of the unsafe arc without evasion to the unsafe arc with it."""
        return self.theta_max / (self.accel_safe_min - self.decel_safe_max)


def evasive_theta_interval(s: LeftTurnScenario) -> EvasiveInterval:
    """Arc positions from which neither braking nor accelerating is safe.

    Raises
    ------
    NoEscapeWindow
        When the braking and accelerating regions overlap, i.e. one evasive
        action always works.
    """
    t_max = theta_max(s)
    dec = decel_safe_max(s)
    acc = accel_safe_min(s, t_max)
    if acc <= dec:
        raise NoEscapeWindow(f"accelerate from {acc:.3f} rad, brake up to {dec:.3f} rad")
    return EvasiveInterval(decel_safe_max=dec, accel_safe_min=acc, theta_max=t_max)


def adjusted_waiting_time(t_obs: float, interval: EvasiveInterval) -> float:
    return t_obs / interval.waiting_time_factor


def view_distance_sweep(
    s: LeftTurnScenario, thetas: np.ndarray | list[float]
) -> list[tuple[float, float]]:
    """Rows ``(theta, d_cz)``; diverging angles report ``inf``."""
    rows = []
    for t in thetas:
        try:
            rows.append((float(t), occluded_view_distance(float(t), s)))
        except GeometryDivergence:
            rows.append((float(t), math.inf))
    return rows

