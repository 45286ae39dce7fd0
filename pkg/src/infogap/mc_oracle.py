"""Monte Carlo kinematic oracle for the closed-form scenario results.

Every simulator here integrates trajectories step by step with
:func:`advance` (exact for piecewise-constant acceleration, with braking
clamped at rest) and never calls the closed-form scenario formulas.

Randomness is drawn in fixed-size chunks, each with its own Philox stream
spawned from the configured seed, so results do not depend on how chunks are
scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .left_turn import LeftTurnScenario
from .merging import MergeMode, MergeScenario
from .pedestrian import PedestrianScenario
from .red_light import Case, EmpiricalDistribution, ViolationGeometry

CHUNK = 1 << 16
CONTACT_TOL = 1e-9  # metres; arriving exactly at rest on a boundary is not contact


@dataclass(frozen=True)
class SimConfig:
    trials: int = 1_000_000
    seed: int = 0
    time_step: float = 0.01
    workers: int = 1  # execution only; results are identical for any value

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.time_step > 0:
            raise ValueError("time_step must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class SimEstimate:
    point: float
    std_error: float
    trials: int
    hits: int

    @classmethod
    def from_hits(cls, hits: int, trials: int) -> SimEstimate:
        p = hits / trials
        return cls(point=p, std_error=math.sqrt(p * (1 - p) / trials), trials=trials, hits=hits)

    def agrees_with(self, p: float, k: float = 3.0) -> bool:
        return abs(p - self.point) <= k * self.std_error + 1e-12


# -- integration ------------------------------------------------------------


def advance(x, v, a, h):
    """Exact state after ``h`` seconds at constant acceleration ``a``.

    A braking vehicle (``a < 0``) that would reverse stops at rest instead.
    Works elementwise on arrays.
    """
    x, v, a = np.asarray(x, float), np.asarray(v, float), np.asarray(a, float)
    v_end = v + a * h
    stops = (a < 0) & (v_end < 0)
    t_run = np.where(stops, v / np.where(a < 0, -a, 1.0), h)
    return x + v * t_run + 0.5 * a * t_run * t_run, np.where(stops, 0.0, v_end)


def step_times(t_end: float, dt: float, events: list[float] = ()) -> np.ndarray:
    """Fixed grid ``0, dt, 2 dt, ...`` up to ``t_end``, with event times inserted."""
    n = int(math.ceil(t_end / dt - 1e-12))
    grid = np.minimum(np.arange(n + 1) * dt, t_end)
    extra = [e for e in events if 0 < e < t_end]
    return np.unique(np.concatenate([grid, extra]))


def _run_chunks(cfg: SimConfig, work: Callable[[np.random.Generator, int], int]) -> SimEstimate:
    sizes = [CHUNK] * (cfg.trials // CHUNK)
    if cfg.trials % CHUNK:
        sizes.append(cfg.trials % CHUNK)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def one(i: int) -> int:
        return int(work(np.random.Generator(np.random.Philox(seeds[i])), sizes[i]))

    if cfg.workers == 1:
        hits = sum(one(i) for i in range(len(sizes)))
    else:
        with ThreadPoolExecutor(cfg.workers) as pool:
            hits = sum(pool.map(one, range(len(sizes))))
    return SimEstimate.from_hits(hits, cfg.trials)


# -- left turn ----------------------------------------------------------------


def simulate_left_turn_conflict(s: LeftTurnScenario, rate: float, cfg: SimConfig) -> SimEstimate:
    """Fraction of turns in which an occluded TMV cannot stop short of the zone.

    At the instant the AV becomes visible the nearest hidden TMV is one
    exponential headway beyond the visibility distance.  It cruises for its
    reaction time, then brakes at full rate; reaching the zone is a conflict
    (the AV is assumed to occupy the zone throughout).
    """
    tmv = s.tmv
    rho = tmv.reaction_time
    horizon = rho + (tmv.speed / tmv.a_dec) + cfg.time_step
    # no TMV can cover more than speed * horizon before coming to rest
    reach = tmv.speed * horizon
    times = step_times(horizon, cfg.time_step, [rho])

    def work(rng: np.random.Generator, n: int) -> int:
        if rate <= 0:
            return 0
        x0 = s.d_cz_occluded + tmv.speed * rng.exponential(1.0 / rate, n)
        x0 = x0[x0 <= reach]
        if x0.size == 0:
            return 0
        x = np.zeros_like(x0)
        v = np.full_like(x0, tmv.speed)
        hit = np.zeros(x0.size, dtype=bool)
        for t0, t1 in zip(times[:-1], times[1:]):
            a = 0.0 if t0 < rho else -tmv.a_dec
            x, v = advance(x, v, a, t1 - t0)
            hit |= x > x0 + CONTACT_TOL
            if not v.any():
                break
        return int(hit.sum())

    return _run_chunks(cfg, work)


# -- pedestrians --------------------------------------------------------------


def first_passage_time(
    v0: float, accel: float, distance: float, dt: float, t_max: float = 120.0
) -> float:
    """Time at which a vehicle starting at ``v0`` under ``accel`` has covered
    ``distance``; ``inf`` if it comes to rest first.

    Marches with step ``dt`` and bisects the crossing inside the final step.
    """
    if distance <= 0:
        return 0.0
    x, v, t = 0.0, float(v0), 0.0
    while t < t_max:
        x1, v1 = (float(q) for q in advance(x, v, accel, dt))
        if x1 >= distance:
            lo, hi = 0.0, dt
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if float(advance(x, v, accel, mid)[0]) >= distance:
                    hi = mid
                else:
                    lo = mid
            return t + hi
        if v1 == 0.0 and accel <= 0:
            return math.inf
        x, v, t = x1, v1, t + dt
    return math.inf


def simulate_pedestrian_conflict(s: PedestrianScenario, cfg: SimConfig) -> SimEstimate:
    """Fraction of detections followed by an unavoidable pedestrian conflict.

    Pedestrians cross the zone centre at Poisson times on a window around the
    AV's possible arrival times.  The AV tries both escape branches; a
    pedestrian inside the zone (within half the AV width of the centre) when
    the AV arrives defeats that branch.  A conflict needs both to fail.
    """
    av = s.av
    t_acc = first_passage_time(av.speed, av.a_acc, s.d_veh_to_crash, cfg.time_step)
    t_dec = first_passage_time(av.speed, -av.a_dec, s.d_veh_to_crash, cfg.time_step)
    half_zone = av.width / 2.0
    pad = half_zone / s.ped_speed + 1.0
    finite = [t for t in (t_acc, t_dec) if math.isfinite(t)]
    t_lo, t_hi = min([0.0, *finite]) - pad, max(finite) + pad

    def work(rng: np.random.Generator, n: int) -> int:
        counts = rng.poisson(s.ped_rate * (t_hi - t_lo), n)
        total = int(counts.sum())
        if total == 0 or not math.isfinite(t_dec):
            return 0
        owner = np.repeat(np.arange(n), counts)
        at_centre = rng.uniform(t_lo, t_hi, total)
        in_zone_acc = np.abs(s.ped_speed * (t_acc - at_centre)) <= half_zone
        in_zone_dec = np.abs(s.ped_speed * (t_dec - at_centre)) <= half_zone
        hit = np.bincount(owner[in_zone_acc & in_zone_dec], minlength=n)
        return int(np.count_nonzero(hit))

    return _run_chunks(cfg, work)


# -- red-light violation --------------------------------------------------------


def simulate_violation_conflict(
    g: ViolationGeometry,
    v_v: float,
    t_d: float,
    dist: EmpiricalDistribution,
    case: Case,
    cfg: SimConfig,
    p_violation: float = 1.0,
) -> SimEstimate:
    """Fraction of green onsets where E and V share the conflict zone.

    Samples E's cruise speed (case ``"a"``) or launch acceleration (case
    ``"b"``) from ``dist``, integrates E from the stop bar, and tests overlap
    with V's zone occupancy ``[t_star, t_star + d_y / v_v]``.  With
    ``p_violation < 1`` each trial also draws whether V runs the light.
    """
    if case not in ("a", "b"):
        raise ValueError(f"case must be 'a' or 'b', got {case!r}")
    t_enter = t_d - g.t_rc
    if t_enter < 0:
        raise ValueError("t_d is shorter than the red clearance")
    t_exit = t_enter + g.d_y / v_v
    times = step_times(t_exit, cfg.time_step, [t_enter])

    def work(rng: np.random.Generator, n: int) -> int:
        draw = dist.sample(rng, n)
        runs = rng.random(n) < p_violation
        if case == "a":
            x, v, a = np.zeros(n), np.maximum(draw, 0.0), np.zeros(n)
        else:
            x, v, a = np.zeros(n), np.zeros(n), draw
        pos_enter = x.copy() if t_enter == 0 else None
        for t0, t1 in zip(times[:-1], times[1:]):
            x, v = advance(x, v, a, t1 - t0)
            if t1 == t_enter:
                pos_enter = x.copy()
        reached = x > g.d_cz  # E entered before V left
        not_cleared = pos_enter <= g.d_cz + g.d_x  # E still there when V entered
        return int(np.count_nonzero(runs & reached & not_cleared))

    return _run_chunks(cfg, work)


# -- merging --------------------------------------------------------------------


@dataclass(frozen=True)
class MergeOutcome:
    collision: bool
    min_separation: float
    lead_min_gap: float
    lag_min_gap: float


def _pair_min_gap(front, back, gap0: float, dt: float) -> float:
    """Minimum bumper gap between two vehicles given as (speed, schedule) pairs.

    Each schedule is a list of ``(start_time, accel)``; a braking vehicle stays
    at rest once stopped.  Steps are split at schedule switches and at stop
    instants so every sub-step has constant relative acceleration, which lets
    the interior minimum be found exactly.
    """
    (vf, sched_f), (vb, sched_b) = front, back
    xf, xb = gap0, 0.0
    t = 0.0

    def acc(sched, t_now, v):
        a = [a for start, a in sched if start <= t_now + 1e-15][-1]
        return 0.0 if (v == 0.0 and a < 0) else a

    switches = sorted({start for start, _ in sched_f + sched_b if start > 0})
    best = gap0
    while True:
        af, ab = acc(sched_f, t, vf), acc(sched_b, t, vb)
        if vf == 0 and vb == 0 and af <= 0 and ab <= 0:
            break
        h = dt
        for sw in switches:
            if sw > t + 1e-15:
                h = min(h, sw - t)
                break
        for v, a in ((vf, af), (vb, ab)):
            if a < 0 and v > 0:
                h = min(h, v / -a)
        gap, dv, da = xf - xb, vf - vb, af - ab
        if dv < 0 and da > 0 and -dv / da < h:
            tau = -dv / da
            best = min(best, gap + dv * tau + 0.5 * da * tau * tau)
        xf, vf = (float(q) for q in advance(xf, vf, af, h))
        xb, vb = (float(q) for q in advance(xb, vb, ab, h))
        if vf < 1e-12:
            vf = 0.0
        if vb < 1e-12:
            vb = 0.0
        t += h
        best = min(best, xf - xb)
    return best


def simulate_merge(
    s: MergeScenario,
    d_f: float,
    d_b: float,
    mode: MergeMode = MergeMode.WORST_CASE,
    cfg: SimConfig | None = None,
) -> MergeOutcome:
    """Integrate the triggering events for a merge with gaps ``d_f`` and ``d_b``.

    Lead event: the lead brakes to rest at once; the AV cruises for its
    reaction time and then brakes.  Lag event: the AV is forced to brake at
    once while the lag vehicle accelerates (worst case) or cruises (single
    event) for its reaction time and then brakes.
    """
    dt = (cfg or SimConfig(trials=1)).time_step
    av, lead, lag = s.av, s.lead, s.lag
    lead_gap = _pair_min_gap(
        (lead.speed, [(0.0, -lead.a_dec)]),
        (av.speed, [(0.0, 0.0), (av.reaction_time, -av.a_dec)]),
        d_f,
        dt,
    )
    lag_accel = lag.a_acc if mode is MergeMode.WORST_CASE else 0.0
    lag_gap = _pair_min_gap(
        (av.speed, [(0.0, -av.a_dec)]),
        (lag.speed, [(0.0, lag_accel), (lag.reaction_time, -lag.a_dec)]),
        d_b,
        dt,
    )
    sep = min(lead_gap, lag_gap)
    return MergeOutcome(
        collision=sep < -1e-9,
        min_separation=sep,
        lead_min_gap=lead_gap,
        lag_min_gap=lag_gap,
    )
