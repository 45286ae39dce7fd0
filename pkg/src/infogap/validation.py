"""Closed-form versus Monte Carlo agreement checks."""

from __future__ import annotations

from dataclasses import dataclass

from . import pedestrian, red_light
from .arrivals import GAMMA, RiskBudget
from .ingest import DatasetKind, parse
from .left_turn import LeftTurnScenario, waiting_time_pipeline
from .mc_oracle import (
    SimConfig,
    simulate_left_turn_conflict,
    simulate_merge,
    simulate_pedestrian_conflict,
    simulate_violation_conflict,
)
from .merging import MergeMode, MergeScenario, lag_safe_gap, lead_safe_gap
from .pedestrian import PedestrianScenario, ScenarioKind
from .red_light import LAUNCH_ACCEL, ViolationGeometry

BOUNDARY_TOL = 0.05  # metres
SIGMAS = 3.0
TARGETS = ("left-turn", "pedestrian", "violation", "merge")


@dataclass(frozen=True)
class Check:
    name: str
    closed_form: float
    oracle: float
    std_error: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: closed-form {self.closed_form:.6g} "
            f"oracle {self.oracle:.6g} (se {self.std_error:.2g})"
        )


def _prob_check(name: str, p: float, est) -> Check:
    return Check(name, p, est.point, est.std_error, est.agrees_with(p, SIGMAS))


def validate_left_turn(cfg: SimConfig, s: LeftTurnScenario | None = None) -> list[Check]:
    s = s or LeftTurnScenario()
    w = waiting_time_pipeline(s, RiskBudget(1.4e-5, 1e-4), GAMMA["opposing_left_turn"])
    est = simulate_left_turn_conflict(s, w.lambda_max, cfg)
    return [_prob_check("left-turn conflict at lambda_max", w.p_conf, est)]


def validate_pedestrian(cfg: SimConfig, kinds: list[ScenarioKind] | None = None) -> list[Check]:
    checks = []
    for kind in kinds or list(ScenarioKind):
        s = PedestrianScenario.default(kind)
        est = simulate_pedestrian_conflict(s, cfg)
        checks.append(_prob_check(f"pedestrian {kind.value}", pedestrian.conflict_probability(s), est))
    return checks


def validate_violation(cfg: SimConfig, v_v: float = 10.0) -> list[Check]:
    """Both cases at the peak of their delay sweep, noon statistics."""
    g = ViolationGeometry()
    stats = parse("montrose_nb.csv", DatasetKind.VIOLATION_STATS).records[-1].stats()
    hist = parse("we_speed_hist.csv", DatasetKind.SPEED_HISTOGRAM).histogram()
    p_v = red_light.violation_probability(stats)
    checks = []
    for case, dist in (("a", hist), ("b", LAUNCH_ACCEL)):
        t_d = red_light.peak_td(red_light.td_sweep(g, stats, v_v, dist, case))
        p = red_light.conflict_probability(g, stats, v_v, t_d, dist, case)
        est = simulate_violation_conflict(g, v_v, t_d, dist, case, cfg, p_violation=p_v)
        checks.append(_prob_check(f"violation case {case} at t_d={t_d}", p, est))
    return checks


def validate_merge(cfg: SimConfig) -> list[Check]:
    """Gaps at the formula boundary leave between 0 and 5 cm of clearance."""
    records = parse("ngsim_gaps.csv", DatasetKind.MERGE_GAPS).records
    checks = []
    for rec in records:
        s = MergeScenario().with_speeds(*rec.speeds())
        for mode in MergeMode:
            out = simulate_merge(s, lead_safe_gap(s), lag_safe_gap(s, mode), mode, cfg)
            ok = not out.collision and out.min_separation <= BOUNDARY_TOL
            checks.append(
                Check(f"merge {rec.interval_label} {mode.value} boundary", 0.0, out.min_separation, 0.0, ok)
            )
    return checks


def run(target: str, cfg: SimConfig) -> list[Check]:
    if target == "all":
        return [c for t in TARGETS for c in run(t, cfg)]
    if target == "left-turn":
        return validate_left_turn(cfg)
    if target == "pedestrian":
        return validate_pedestrian(cfg)
    if target == "violation":
        return validate_violation(cfg)
    if target == "merge":
        return validate_merge(cfg)
    raise ValueError(f"unknown validation target {target!r}")
