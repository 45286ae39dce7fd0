"""Red-light violation conflicts at a signalised crossing.

Vehicle V runs the red on one approach; the ego vehicle E holds the green on
the crossing approach.  Time is measured from E's green onset, i.e. ``t_rc``
after the phase switch, so V reaches the conflict zone at
``t_star = t_d - t_rc``.  Case (a): E arrives at the stop bar at constant
speed just as its light turns green.  Case (b): E waits at the stop bar and
launches from rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Literal, Protocol

import numpy as np

from . import arrivals
from .arrivals import ConflictCollisionLink

Case = Literal["a", "b"]


class InvalidStats(ValueError):
    """Violation statistics imply a probability above one."""


class EmptyInterval(Exception):
    """No ego speed or acceleration produces co-occupancy of the zone."""


@dataclass(frozen=True)
class ViolationStats:
    expected_violations: float
    interval_length: float = 900.0
    cycle_length: float = 150.0

    def __post_init__(self) -> None:
        if self.expected_violations < 0:
            raise ValueError("expected_violations must be non-negative")
        if self.interval_length <= 0 or self.cycle_length <= 0:
            raise ValueError("interval_length and cycle_length must be positive")
        if self.cycle_length > self.interval_length:
            raise ValueError("cycle_length cannot exceed interval_length")


@dataclass(frozen=True)
class ViolationGeometry:
    d_y: float = 17.0  # violator's exposure length incl. its own length
    d_cz: float = 16.0  # ego stop bar to conflict zone
    d_x: float = 16.0  # zone width along ego path incl. ego length
    t_rc: float = 3.0  # red clearance

    def __post_init__(self) -> None:
        if min(self.d_y, self.d_cz, self.d_x, self.t_rc) < 0:
            raise ValueError("geometry values must be non-negative")


@dataclass(frozen=True)
class Interval:
    """Half-open interval ``(lo, hi]``."""

    lo: float
    hi: float

    def __contains__(self, x: float) -> bool:
        return self.lo < x <= self.hi


class EmpiricalDistribution(Protocol):
    def interval_mass(self, lo: float, hi: float) -> float: ...

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray: ...


@dataclass(frozen=True)
class Histogram:
    """Binned distribution with uniform density inside each bin."""

    edges: tuple[float, ...]
    counts: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.counts) + 1:
            raise ValueError("need exactly one more edge than counts")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError("edges must be strictly increasing")
        if any(c < 0 for c in self.counts) or sum(self.counts) <= 0:
            raise ValueError("counts must be non-negative with a positive total")

    @classmethod
    def uniform(cls, lo: float, hi: float) -> Histogram:
        return cls((lo, hi), (1.0,))

    def cdf(self, x: float) -> float:
        total = sum(self.counts)
        acc = 0.0
        for lo, hi, c in zip(self.edges, self.edges[1:], self.counts):
            if x >= hi:
                acc += c
            elif x > lo:
                acc += c * (x - lo) / (hi - lo)
                break
            else:
                break
        return acc / total

    def interval_mass(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        return max(self.cdf(hi) - self.cdf(lo), 0.0)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        counts = np.asarray(self.counts, dtype=float)
        edges = np.asarray(self.edges, dtype=float)
        idx = rng.choice(len(counts), size=n, p=counts / counts.sum())
        u = rng.random(n)
        return edges[idx] + u * (edges[idx + 1] - edges[idx])


@dataclass(frozen=True)
class Normal:
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if self.variance <= 0:
            raise ValueError("variance must be positive")

    def interval_mass(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return 0.0
        d = NormalDist(self.mean, math.sqrt(self.variance))
        return d.cdf(hi) - d.cdf(lo) if math.isfinite(hi) else 1.0 - d.cdf(lo)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.mean, math.sqrt(self.variance), n)


@dataclass(frozen=True)
class PointMass:
    value: float

    def interval_mass(self, lo: float, hi: float) -> float:
        return 1.0 if lo < self.value <= hi else 0.0

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.full(n, self.value)


# Typical launch acceleration of 1-2 m/s^2 read as mean +/- one sd.
LAUNCH_ACCEL = Normal(1.5, 0.25)


def violation_probability(stats: ViolationStats) -> float:
    """Chance that a given green-to-red switch on the approach is run."""
    p = stats.cycle_length * stats.expected_violations / stats.interval_length
    if p > 1.0:
        raise InvalidStats(f"violation probability {p:.3f} exceeds 1")
    return p


def crossing_time(g: ViolationGeometry, v_v: float, t_d: float) -> float:
    """Time from the phase switch until the violator has cleared the zone."""
    if v_v <= 0:
        raise ValueError("violator speed must be positive")
    return t_d + g.d_y / v_v


def _t_star(g: ViolationGeometry, t_d: float) -> float:
    t_star = t_d - g.t_rc
    if t_star < 0:
        raise ValueError(f"t_d={t_d} is shorter than the red clearance {g.t_rc}")
    return t_star


def conflict_speed_interval_case_a(g: ViolationGeometry, v_v: float, t_d: float) -> Interval:
    """Ego cruise speeds that put E in the zone while V is there.

    At ``t_d == t_rc`` V enters as E's light turns green, so there is no upper bound.
    """
    t_star = _t_star(g, t_d)
    lo = g.d_cz / (t_star + g.d_y / v_v)
    hi = (g.d_cz + g.d_x) / t_star if t_star > 0 else math.inf
    if lo >= hi:
        raise EmptyInterval(f"({lo}, {hi}]")
    return Interval(lo, hi)


def conflict_accel_interval_case_b(g: ViolationGeometry, v_v: float, t_d: float) -> Interval:
    """Ego launch accelerations (from rest at the stop bar) giving co-occupancy."""
    t_star = _t_star(g, t_d)
    lo = 2.0 * g.d_cz / (t_star + g.d_y / v_v) ** 2
    hi = 2.0 * (g.d_cz + g.d_x) / t_star**2 if t_star > 0 else math.inf
    if lo >= hi:
        raise EmptyInterval(f"({lo}, {hi}]")
    return Interval(lo, hi)


def conflict_interval(g: ViolationGeometry, v_v: float, t_d: float, case: Case) -> Interval:
    if case == "a":
        return conflict_speed_interval_case_a(g, v_v, t_d)
    if case == "b":
        return conflict_accel_interval_case_b(g, v_v, t_d)
    raise ValueError(f"case must be 'a' or 'b', got {case!r}")


def conditional_conflict_probability(
    g: ViolationGeometry, v_v: float, t_d: float, dist: EmpiricalDistribution, case: Case
) -> float:
    """Conflict probability given that V runs the light and E is present."""
    try:
        iv = conflict_interval(g, v_v, t_d, case)
    except EmptyInterval:
        return 0.0
    return dist.interval_mass(iv.lo, iv.hi)


def conflict_probability(
    g: ViolationGeometry,
    stats: ViolationStats,
    v_v: float,
    t_d: float,
    dist: EmpiricalDistribution,
    case: Case,
) -> float:
    return violation_probability(stats) * conditional_conflict_probability(
        g, v_v, t_d, dist, case
    )


def collision_probability(p_conf: float, link: ConflictCollisionLink) -> float:
    return arrivals.conflict_to_collision(p_conf, link)


def td_grid(lo: float = 3.0, hi: float = 15.0, step: float = 0.25) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return np.round(lo + step * np.arange(n + 1), 10)


def td_sweep(
    g: ViolationGeometry,
    stats: ViolationStats,
    v_v: float,
    dist: EmpiricalDistribution,
    case: Case,
    grid: np.ndarray | None = None,
) -> list[tuple[str, float, float]]:
    """Rows ``(case, t_d, conflict_probability)``."""
    grid = td_grid() if grid is None else grid
    return [
        (case, float(t), conflict_probability(g, stats, v_v, float(t), dist, case))
        for t in grid
    ]


def peak_td(rows: list[tuple[str, float, float]]) -> float:
    """First ``t_d`` at which the swept probability is maximal."""
    best = max(p for _, _, p in rows)
    return next(t for _, t, p in rows if p == best)


def is_unimodal(values: list[float] | np.ndarray, tol: float = 1e-12) -> bool:
    """True if the sequence rises (weakly) to its maximum and then falls (weakly)."""
    v = np.asarray(values, dtype=float)
    k = int(np.argmax(v))
    return bool(np.all(np.diff(v[: k + 1]) >= -tol) and np.all(np.diff(v[k:]) <= tol))
