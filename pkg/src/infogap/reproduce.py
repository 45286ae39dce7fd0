"""Plot-ready tables for each published figure and table.

Every artifact is a CSV plus a JSON manifest recording the inputs, library
versions and the CSV's SHA-256.  Output is a pure function of the inputs so
repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, left_turn, merging, pedestrian, red_light
from .ingest import DatasetKind, parse
from .kinematics import mph_to_mps
from .left_turn import LeftTurnScenario
from .red_light import LAUNCH_ACCEL, ViolationGeometry


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[tuple]


@dataclass
class Artifact:
    id: str
    tables: list[Table]
    inputs: dict
    notes: dict = field(default_factory=dict)


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def to_records(table: Table) -> list[dict]:
    """JSON-ready rows mirroring the CSV cell for cell."""
    out = []
    for row in table.rows:
        rec = {}
        for col, v in zip(table.columns, row):
            if isinstance(v, (float, np.floating)):
                v = float(v)
                rec[col] = v if np.isfinite(v) else fmt(v)
            else:
                rec[col] = v
        out.append(rec)
    return out


def fig2(rho_step: float = 0.05, a_dec_set: tuple[float, ...] = (3.0, 4.0, 5.0, 6.0), **_) -> Artifact:
    s = LeftTurnScenario()
    rhos = np.round(np.arange(0.0, 3.0 + 1e-9, rho_step), 10)
    rows = left_turn.sensitivity_sweep_fig2(s, rhos, list(a_dec_set))
    stars = {
        "optimistic_25mph_0.7s": left_turn.is_guaranteed_safe(mph_to_mps(25), 0.7, 4.0, s.d_cz_occluded),
        "typical_30mph_1.5s": left_turn.is_guaranteed_safe(mph_to_mps(30), 1.5, 4.0, s.d_cz_occluded),
    }
    return Artifact(
        "fig2",
        [Table("fig2", ["rho", "a_dec", "v_max"], rows)],
        {"d_cz": s.d_cz_occluded, "rho_step": rho_step, "a_dec_set": list(a_dec_set)},
        {"stars_safe": stars},
    )


def appendix_a(theta_step: float = 0.005, **_) -> Artifact:
    s = LeftTurnScenario()
    top = left_turn.divergence_angle(s)
    thetas = np.round(np.arange(0.0, top, theta_step), 10)
    ev = left_turn.evasive_theta_interval(s)
    return Artifact(
        "appendix-a",
        [Table("appendix-a", ["theta", "d_cz"], left_turn.view_distance_sweep(s, thetas))],
        {"theta_step": theta_step, "v_l": s.av.speed, "rho_av": s.av.reaction_time},
        {
            "theta_max": ev.theta_max,
            "unsafe_interval": list(ev.unsafe_interval),
            "waiting_time_factor": ev.waiting_time_factor,
        },
    )


def fig6(**_) -> Artifact:
    rows = pedestrian.conflict_speed_sweep_fig6()
    stars = {
        k.value: pedestrian.conflict_probability(pedestrian.PedestrianScenario.default(k))
        for k in pedestrian.ScenarioKind
    }
    return Artifact(
        "fig6",
        [Table("fig6", ["scenario", "v_av_mps", "conflict_probability"], rows)],
        {"speed_step": 0.05, "ped_rate": 1 / 60, "ped_speed": 2.0},
        {"stars": stars},
    )


def fig9(
    stats: str = "montrose_nb.csv",
    hist: str = "we_speed_hist.csv",
    v_v: float = 10.0,
    td_step: float = 0.25,
    **_,
) -> Artifact:
    g = ViolationGeometry()
    records = parse(stats, DatasetKind.VIOLATION_STATS).records
    histogram = parse(hist, DatasetKind.SPEED_HISTOGRAM).histogram()
    grid = red_light.td_grid(step=td_step)
    tables, peaks = [], {}
    for rec in records:
        vs = rec.stats()
        rows = red_light.td_sweep(g, vs, v_v, histogram, "a", grid)
        rows += red_light.td_sweep(g, vs, v_v, LAUNCH_ACCEL, "b", grid)
        label = f"fig9-{rec.approach}-{rec.interval_start_hhmm}"
        tables.append(Table(label, ["case", "t_d", "conflict_probability"], rows))
        peaks[label] = {
            c: red_light.peak_td([r for r in rows if r[0] == c]) for c in ("a", "b")
        }
    return Artifact(
        "fig9",
        tables,
        {"stats": Path(stats).name, "hist": Path(hist).name, "v_v": v_v, "td_step": td_step},
        {"peak_t_d": peaks},
    )


def fig12(data: str = "ngsim_gaps.csv", **_) -> Artifact:
    rows = merging.safe_gap_sweep_fig12()
    rec = parse(data, DatasetKind.MERGE_GAPS).records[1]
    return Artifact(
        "fig12",
        [Table("fig12", ["a_dec", "lane_speed_mps", "safe_gap_worst_m", "safe_gap_single_m"], rows)],
        {"data": Path(data).name, "a_dec_set": [3.0, 4.0, 5.0, 6.0]},
        {"star": {"interval": rec.interval_label, "lane_speed_mps": rec.lane_speed, "observed_gap_m": rec.observed_gap}},
    )


def table1(data: str = "ngsim_gaps.csv", **_) -> Artifact:
    records = parse(data, DatasetKind.MERGE_GAPS).records
    report = merging.gap_feasibility_report(list(records))
    rows = [
        (
            r.interval_label,
            rec.lane_speed_mph,
            r.observed_gap,
            r.safe_gap_worst,
            r.safe_gap_single,
            r.feasible_worst,
            r.feasible_single,
        )
        for rec, r in zip(records, report)
    ]
    columns = [
        "interval_label",
        "lane_speed_mph",
        "observed_gap_m",
        "safe_gap_worst_m",
        "safe_gap_single_m",
        "feasible_worst",
        "feasible_single",
    ]
    return Artifact("table1", [Table("table1", columns, rows)], {"data": Path(data).name})


REGISTRY: dict[str, Callable[..., Artifact]] = {
    "fig2": fig2,
    "appendix-a": appendix_a,
    "fig6": fig6,
    "fig9": fig9,
    "fig12": fig12,
    "table1": table1,
}


def manifest(art: Artifact, csv_texts: dict[str, str]) -> str:
    doc = {
        "id": art.id,
        "inputs": art.inputs,
        "results": art.notes,
        "files": {
            f"{name}.csv": hashlib.sha256(text.encode()).hexdigest()
            for name, text in csv_texts.items()
        },
        "versions": {
            "infogap": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True, default=fmt) + "\n"


def write(art: Artifact, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    texts = {t.name: to_csv(t) for t in art.tables}
    paths = []
    for name, text in texts.items():
        p = out_dir / f"{name}.csv"
        p.write_text(text, encoding="utf-8")
        paths.append(p)
    m = out_dir / f"{art.id}.manifest.json"
    m.write_text(manifest(art, texts), encoding="utf-8")
    paths.append(m)
    return paths
