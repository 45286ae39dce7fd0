"""Safe merging gaps for an on-ramp merge between a lead (F) and lag (B) vehicle.

Two triggering events are considered: the lead brakes to a stop (the AV
follows after its reaction time), and the lag vehicle keeps accelerating for
its reaction time before braking while the AV is itself forced to stop.
``WORST_CASE`` requires safety against both; ``SINGLE_EVENT`` assumes the lag
vehicle only cruises during its reaction time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .kinematics import VehicleKinematics, mph_to_mps


class MergeMode(enum.Enum):
    WORST_CASE = "worst"
    SINGLE_EVENT = "single"


def _av() -> VehicleKinematics:
    return VehicleKinematics(reaction_time=0.83)


def _lag() -> VehicleKinematics:
    return VehicleKinematics(reaction_time=2.5)


@dataclass(frozen=True)
class MergeScenario:
    av: VehicleKinematics = field(default_factory=_av)
    lead: VehicleKinematics = field(default_factory=VehicleKinematics)
    lag: VehicleKinematics = field(default_factory=_lag)

    @classmethod
    def from_speeds(
        cls,
        v_av: float,
        v_f: float,
        v_b: float,
        rho_av: float = 0.83,
        rho_b: float = 2.5,
        a_acc: float = 3.0,
        a_dec: float = 4.0,
        l_av: float = 4.0,
    ) -> MergeScenario:
        """All three vehicles share ``a_acc`` and ``a_dec``."""
        shared = VehicleKinematics(a_acc=a_acc, a_dec=a_dec)
        return cls(
            av=shared.with_(speed=v_av, reaction_time=rho_av, length=l_av),
            lead=shared.with_(speed=v_f),
            lag=shared.with_(speed=v_b, reaction_time=rho_b),
        )

    def with_speeds(self, v_av: float, v_f: float, v_b: float) -> MergeScenario:
        return replace(
            self,
            av=self.av.with_(speed=v_av),
            lead=self.lead.with_(speed=v_f),
            lag=self.lag.with_(speed=v_b),
        )


@dataclass(frozen=True)
class ObservedGapRecord:
    interval_label: str
    lane_speed_mph: float
    observed_gap: float
    v_av: float | None = None
    v_f: float | None = None
    v_b: float | None = None

    @property
    def lane_speed(self) -> float:
        return mph_to_mps(self.lane_speed_mph)

    def speeds(self) -> tuple[float, float, float]:
        """Per-vehicle speeds, each falling back to the lane speed."""
        lane = self.lane_speed
        return (
            lane if self.v_av is None else self.v_av,
            lane if self.v_f is None else self.v_f,
            lane if self.v_b is None else self.v_b,
        )


def lead_safe_gap(s: MergeScenario) -> float:
    av, lead = s.av, s.lead
    need = av.speed * av.reaction_time + av.speed**2 / (2 * av.a_dec)
    return max(need - lead.speed**2 / (2 * lead.a_dec), 0.0)


def lag_safe_gap_worst_case(s: MergeScenario) -> float:
    av, lag = s.av, s.lag
    rho = lag.reaction_time
    v_brake = lag.speed + rho * lag.a_acc
    lag_travel = lag.speed * rho + 0.5 * lag.a_acc * rho**2 + v_brake**2 / (2 * lag.a_dec)
    return max(lag_travel - av.speed**2 / (2 * av.a_dec), 0.0)


def lag_safe_gap_single_event(s: MergeScenario) -> float:
    av, lag = s.av, s.lag
    lag_travel = lag.speed * lag.reaction_time + lag.speed**2 / (2 * lag.a_dec)
    return max(lag_travel - av.speed**2 / (2 * av.a_dec), 0.0)


def lag_safe_gap(s: MergeScenario, mode: MergeMode) -> float:
    if mode is MergeMode.WORST_CASE:
        return lag_safe_gap_worst_case(s)
    return lag_safe_gap_single_event(s)


def safe_merging_gap(s: MergeScenario, mode: MergeMode = MergeMode.WORST_CASE) -> float:
    return lead_safe_gap(s) + lag_safe_gap(s, mode) + s.av.length


@dataclass(frozen=True)
class GapAssessment:
    interval_label: str
    lane_speed: float
    observed_gap: float
    safe_gap_worst: float
    safe_gap_single: float

    @property
    def feasible_worst(self) -> bool:
        return self.observed_gap >= self.safe_gap_worst

    @property
    def feasible_single(self) -> bool:
        return self.observed_gap >= self.safe_gap_single


def gap_feasibility_report(
    records: list[ObservedGapRecord], template: MergeScenario | None = None
) -> list[GapAssessment]:
    """Compare each observed gap with the safe gap under both modes.

    Feasibility is a closed boundary: an observed gap equal to the safe gap is safe.
    """
    template = template or MergeScenario()
    out = []
    for rec in records:
        s = template.with_speeds(*rec.speeds())
        out.append(
            GapAssessment(
                interval_label=rec.interval_label,
                lane_speed=rec.lane_speed,
                observed_gap=rec.observed_gap,
                safe_gap_worst=safe_merging_gap(s, MergeMode.WORST_CASE),
                safe_gap_single=safe_merging_gap(s, MergeMode.SINGLE_EVENT),
            )
        )
    return out


def safe_gap_sweep_fig12(
    template: MergeScenario | None = None,
    lane_speeds: np.ndarray | list[float] | None = None,
    a_dec_set: list[float] = (3.0, 4.0, 5.0, 6.0),
) -> list[tuple[float, float, float, float]]:
    """Rows ``(a_dec, lane_speed_mps, safe_gap_worst_m, safe_gap_single_m)``.

    Every vehicle moves at the lane speed and brakes at ``a_dec``.
    """
    template = template or MergeScenario()
    speeds = np.round(np.arange(0.0, 20.0 + 1e-9, 0.25), 10) if lane_speeds is None else lane_speeds
    rows = []
    for a_dec in a_dec_set:
        base = replace(
            template,
            av=template.av.with_(a_dec=float(a_dec)),
            lead=template.lead.with_(a_dec=float(a_dec)),
            lag=template.lag.with_(a_dec=float(a_dec)),
        )
        for v in speeds:
            s = base.with_speeds(float(v), float(v), float(v))
            rows.append(
                (
                    float(a_dec),
                    float(v),
                    safe_merging_gap(s, MergeMode.WORST_CASE),
                    safe_merging_gap(s, MergeMode.SINGLE_EVENT),
                )
            )
    return rows
