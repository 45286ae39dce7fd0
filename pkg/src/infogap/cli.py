"""Command-line interface.

Precedence for every option: built-in default < ``--config`` JSON file <
command-line flag.  Speeds accept a unit suffix (``25mph``, ``11.18mps``);
bare numbers are SI.  Exit status is 0 on success, 1 on a domain error or a
failed validation, and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__, arrivals, left_turn, merging, pedestrian, red_light, reproduce, validation
from .arrivals import GAMMA, ConflictCollisionLink, RiskBudget
from .ingest import DatasetKind, IngestError, parse
from .kinematics import MPH, VehicleKinematics
from .mc_oracle import SimConfig

_QUANTITY = re.compile(r"^\s*([-+0-9.eE]+)\s*(mph|mps|m/s)?\s*$")


def speed(text: str) -> float:
    m = _QUANTITY.match(str(text))
    if not m:
        raise argparse.ArgumentTypeError(f"not a speed: {text!r} (use e.g. 25mph or 11.18mps)")
    try:
        value = float(m.group(1))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return value * MPH if m.group(2) == "mph" else value


def number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


@dataclass(frozen=True)
class Sweep:
    name: str
    values: np.ndarray


def sweep_spec(text: str) -> tuple[str, float, float, float]:
    m = re.match(r"^([a-z_-]+)=([^:]+):([^:]+):([^:]+)$", text)
    if not m:
        raise argparse.ArgumentTypeError("sweep must look like NAME=LO:HI:STEP")
    name = m.group(1).replace("-", "_")
    lo, hi, step = (speed(g) for g in m.group(2, 3, 4))
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("sweep needs LO <= HI and STEP > 0")
    return name, lo, hi, step


class InputError(Exception):
    pass


def _sweep(args, allowed: set[str]) -> Sweep | None:
    if not getattr(args, "sweep", None):
        return None
    name, lo, hi, step = args.sweep
    if name not in allowed:
        raise InputError(f"cannot sweep {name!r}; choose from {sorted(allowed)}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return Sweep(name, np.round(lo + step * np.arange(n + 1), 10))


# -- output --------------------------------------------------------------------


def emit(columns: list[str], rows: list[tuple], args) -> None:
    table = reproduce.Table("out", columns, rows)
    if args.format == "json":
        text = json.dumps(reproduce.to_records(table), indent=2) + "\n"
    else:
        text = reproduce.to_csv(table)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------

LEFT_TURN_PARAMS = {"vth", "rho", "adec", "dcz", "gamma", "pcoll", "alpha", "vl", "rho_av", "aacc"}


def _left_turn_row(args) -> dict:
    s = left_turn.LeftTurnScenario(
        tmv=VehicleKinematics(speed=args.vth, reaction_time=args.rho, a_dec=args.adec),
        av=VehicleKinematics(
            speed=args.vl, reaction_time=args.rho_av, a_acc=args.aacc, a_dec=args.adec
        ),
        d_cz_occluded=args.dcz,
    )
    out = {"v_safe_mps": left_turn.guaranteed_safe_tmv_speed(s)}
    try:
        w = left_turn.waiting_time_pipeline(
            s, RiskBudget(args.pcoll, args.alpha), ConflictCollisionLink(args.gamma)
        )
    except left_turn.NoConflictWindow:
        out.update(d_min_cz=math.nan, t_conf=0.0, p_conf=math.nan, lambda_max=math.inf, t_obs=0.0)
        out.update(theta_unsafe_lo=math.nan, theta_unsafe_hi=math.nan, factor=math.nan, t_obs_evasive=0.0)
        return out
    out.update(
        d_min_cz=w.d_min_cz, t_conf=w.t_conf, p_conf=w.p_conf, lambda_max=w.lambda_max, t_obs=w.t_obs
    )
    try:
        ev = left_turn.evasive_theta_interval(s)
        out.update(
            theta_unsafe_lo=ev.decel_safe_max,
            theta_unsafe_hi=ev.accel_safe_min,
            factor=ev.waiting_time_factor,
            t_obs_evasive=left_turn.adjusted_waiting_time(w.t_obs, ev),
        )
    except left_turn.NoEscapeWindow:
        out.update(theta_unsafe_lo=math.nan, theta_unsafe_hi=math.nan, factor=math.inf, t_obs_evasive=0.0)
    return out


def _run_rows(args, allowed: set[str], one: Callable[[argparse.Namespace], list[dict]]) -> int:
    sw = _sweep(args, allowed)
    if sw is None:
        rows = one(args)
        if len(rows) == 1 and not getattr(args, "table", False):
            emit(["quantity", "value"], list(rows[0].items()), args)
            return 0
        cols = list(rows[0])
        emit(cols, [tuple(r.values()) for r in rows], args)
        return 0
    out_rows, cols = [], None
    for v in sw.values:
        ns = argparse.Namespace(**vars(args))
        setattr(ns, sw.name, float(v))
        for r in one(ns):
            cols = cols or [sw.name, *r]
            out_rows.append((float(v), *r.values()))
    emit(cols, out_rows, args)
    return 0


def cmd_left_turn(args) -> int:
    return _run_rows(args, LEFT_TURN_PARAMS, lambda a: [_left_turn_row(a)])


PED_PARAMS = {"vav", "dveh", "vped", "rate", "width", "aacc", "adec", "gamma"}


def cmd_pedestrian(args) -> int:
    kinds = list(pedestrian.ScenarioKind) if args.kind == "all" else [pedestrian.ScenarioKind(args.kind)]
    link = ConflictCollisionLink(args.gamma)

    def one(a) -> list[dict]:
        rows = []
        for kind in kinds:
            s = pedestrian.PedestrianScenario.default(kind)
            av = s.av.with_(a_acc=a.aacc, a_dec=a.adec, width=a.width)
            if a.vav is not None:
                av = av.with_(speed=a.vav)
            s = s.with_(
                av=av,
                d_veh_to_crash=s.d_veh_to_crash if a.dveh is None else a.dveh,
                ped_speed=a.vped,
                ped_rate=a.rate,
            )
            w = pedestrian.conflict_window(s)
            band = pedestrian.unavoidable_ped_distance_band(s) if w.window_length > 0 else (math.nan, math.nan)
            p = pedestrian.conflict_probability(s)
            rows.append(
                {
                    "scenario": kind.value,
                    "v_av_mps": s.av.speed,
                    "t_acc": w.t_acc,
                    "t_dec": w.t_dec,
                    "window": w.window_length,
                    "band_lo_m": band[0],
                    "band_hi_m": band[1],
                    "conflict_probability": p,
                    "collision_probability": arrivals.conflict_to_collision(p, link),
                }
            )
        return rows

    args.table = True
    return _run_rows(args, PED_PARAMS, one)


def cmd_violation(args) -> int:
    g = red_light.ViolationGeometry(d_y=args.dy, d_cz=args.dcz, d_x=args.dx, t_rc=args.trc)
    if args.nu is not None:
        stats = [("cli", red_light.ViolationStats(args.nu, args.dT, args.tc))]
    else:
        stats = [
            (f"{r.approach}-{r.interval_start_hhmm}", r.stats(args.dT, args.tc))
            for r in parse(args.stats, DatasetKind.VIOLATION_STATS).records
        ]
    dists = {
        "a": parse(args.hist, DatasetKind.SPEED_HISTOGRAM).histogram(),
        "b": red_light.Normal(args.accel_mean, args.accel_var),
    }
    cases = ["a", "b"] if args.case == "both" else [args.case]
    grid = np.array([args.td]) if args.td is not None else red_light.td_grid(args.td_lo, args.td_hi, args.td_step)
    link = ConflictCollisionLink(args.gamma)
    rows = []
    for label, st in stats:
        p_v = red_light.violation_probability(st)
        for case in cases:
            for t_d, p in ((t, p) for _, t, p in red_light.td_sweep(g, st, args.vv, dists[case], case, grid)):
                rows.append((label, p_v, case, t_d, p, red_light.collision_probability(p, link)))
    emit(
        ["stats", "violation_probability", "case", "t_d", "conflict_probability", "collision_probability"],
        rows,
        args,
    )
    return 0


MERGE_PARAMS = {"vav", "vf", "vb", "rho_av", "rho_b", "aacc", "adec", "lav"}


def cmd_merge(args) -> int:
    def template(a) -> merging.MergeScenario:
        return merging.MergeScenario.from_speeds(
            0.0, 0.0, 0.0, a.rho_av, a.rho_b, a.aacc, a.adec, a.lav
        )

    if args.data and args.sweep is None and args.vav is None:
        recs = list(parse(args.data, DatasetKind.MERGE_GAPS).records)
        report = merging.gap_feasibility_report(recs, template(args))
        rows = [
            (r.interval_label, rec.lane_speed_mph, r.observed_gap, r.safe_gap_worst, r.safe_gap_single,
             r.feasible_worst, r.feasible_single)
            for rec, r in zip(recs, report)
        ]
        emit(
            ["interval_label", "lane_speed_mph", "observed_gap_m", "safe_gap_worst_m",
             "safe_gap_single_m", "feasible_worst", "feasible_single"],
            rows,
            args,
        )
        return 0

    def one(a) -> list[dict]:
        if a.vav is None:
            raise InputError("give --vav (and optionally --vf/--vb) or --data")
        vf = a.vav if a.vf is None else a.vf
        vb = a.vav if a.vb is None else a.vb
        s = template(a).with_speeds(a.vav, vf, vb)
        return [
            {
                "d_f_safe": merging.lead_safe_gap(s),
                "d_b_safe_worst": merging.lag_safe_gap_worst_case(s),
                "d_b_safe_single": merging.lag_safe_gap_single_event(s),
                "safe_gap_worst_m": merging.safe_merging_gap(s, merging.MergeMode.WORST_CASE),
                "safe_gap_single_m": merging.safe_merging_gap(s, merging.MergeMode.SINGLE_EVENT),
            }
        ]

    return _run_rows(args, MERGE_PARAMS, one)


def cmd_validate(args) -> int:
    cfg = SimConfig(trials=args.trials, seed=args.seed, time_step=args.dt, workers=args.workers)
    if args.target == "pedestrian" and args.kind != "all":
        checks = validation.validate_pedestrian(cfg, [pedestrian.ScenarioKind(args.kind)])
    else:
        checks = validation.run(args.target, cfg)
    for c in checks:
        print(c.line(), file=sys.stderr)
    emit(
        ["check", "closed_form", "oracle", "std_error", "passed"],
        [(c.name, c.closed_form, c.oracle, c.std_error, c.passed) for c in checks],
        args,
    )
    return 0 if all(c.passed for c in checks) else 1


def cmd_reproduce(args) -> int:
    if args.list or not args.id:
        for name in reproduce.REGISTRY:
            print(name)
        return 0
    if args.id not in reproduce.REGISTRY:
        raise InputError(f"unknown id {args.id!r}; see --list")
    kwargs = {k: v for k, v in (("data", args.data), ("stats", args.stats), ("hist", args.hist)) if v}
    art = reproduce.REGISTRY[args.id](**kwargs)
    for p in reproduce.write(art, Path(args.out)):
        print(p)
    return 0


# -- parser ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="write results here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="infogap", description=__doc__.splitlines()[0])
    root.add_argument("--version", action="version", version=__version__)
    root.add_argument("--config", help="JSON file of per-subcommand defaults")
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("left-turn", help="occluded unprotected left turn")
    p.add_argument("--vth", type=speed, default=11.18, help="TMV speed (default 11.18 m/s = 25 mph)")
    p.add_argument("--rho", type=number, default=0.7, help="TMV reaction time, s")
    p.add_argument("--adec", type=number, default=4.0, help="braking rate, m/s^2")
    p.add_argument("--aacc", type=number, default=3.0, help="AV acceleration, m/s^2")
    p.add_argument("--dcz", type=number, default=12.0, help="visible distance to the conflict zone, m")
    p.add_argument("--gamma", type=number, default=GAMMA["opposing_left_turn"].gamma)
    p.add_argument("--pcoll", type=number, default=1.4e-5, help="tolerated collision probability")
    p.add_argument("--alpha", type=number, default=1e-4, help="test significance level")
    p.add_argument("--vl", type=speed, default=4.5, help="AV turning speed")
    p.add_argument("--rho-av", dest="rho_av", type=number, default=0.7, help="AV reaction time, s")
    p.add_argument("--sweep", type=sweep_spec, help=f"NAME=LO:HI:STEP over {sorted(LEFT_TURN_PARAMS)}")
    _common(p)
    p.set_defaults(func=cmd_left_turn)

    p = sub.add_parser("pedestrian", help="occluded pedestrian scenarios")
    p.add_argument("--kind", choices=["all"] + [k.value for k in pedestrian.ScenarioKind], default="all")
    p.add_argument("--vav", type=speed, default=None, help="AV speed (default: per scenario)")
    p.add_argument("--dveh", type=number, default=None, help="AV distance to crossing (default: per scenario)")
    p.add_argument("--vped", type=speed, default=2.0)
    p.add_argument("--rate", type=number, default=1 / 60, help="pedestrian arrivals per second")
    p.add_argument("--width", type=number, default=2.0, help="AV width, m")
    p.add_argument("--aacc", type=number, default=3.0)
    p.add_argument("--adec", type=number, default=4.0)
    p.add_argument("--gamma", type=number, default=GAMMA["pedestrian_implied"].gamma)
    p.add_argument("--sweep", type=sweep_spec, help=f"NAME=LO:HI:STEP over {sorted(PED_PARAMS)}")
    _common(p)
    p.set_defaults(func=cmd_pedestrian)

    p = sub.add_parser("violation", help="red-light violation conflicts")
    p.add_argument("--stats", default="montrose_nb.csv", help="violation statistics CSV")
    p.add_argument("--nu", type=number, default=None, help="expected violations per interval (overrides --stats)")
    p.add_argument("--tc", type=number, default=150.0, help="cycle length, s")
    p.add_argument("--dT", type=number, default=900.0, help="statistics interval, s")
    p.add_argument("--hist", default="we_speed_hist.csv", help="ego speed histogram CSV")
    p.add_argument("--accel-mean", dest="accel_mean", type=number, default=1.5)
    p.add_argument("--accel-var", dest="accel_var", type=number, default=0.25)
    p.add_argument("--vv", type=speed, default=10.0, help="violator speed")
    p.add_argument("--case", choices=["a", "b", "both"], default="both")
    p.add_argument("--td", type=number, default=None, help="single delay; otherwise sweep")
    p.add_argument("--td-lo", dest="td_lo", type=number, default=3.0)
    p.add_argument("--td-hi", dest="td_hi", type=number, default=15.0)
    p.add_argument("--td-step", dest="td_step", type=number, default=0.25)
    p.add_argument("--dy", type=number, default=17.0)
    p.add_argument("--dcz", type=number, default=16.0)
    p.add_argument("--dx", type=number, default=16.0)
    p.add_argument("--trc", type=number, default=3.0)
    p.add_argument("--gamma", type=number, default=GAMMA["through_cross"].gamma)
    _common(p)
    p.set_defaults(func=cmd_violation)

    p = sub.add_parser("merge", help="safe merging gaps")
    p.add_argument("--data", default=None, help="merge-gap CSV (e.g. ngsim_gaps.csv)")
    p.add_argument("--vav", type=speed, default=None)
    p.add_argument("--vf", type=speed, default=None)
    p.add_argument("--vb", type=speed, default=None)
    p.add_argument("--rho-av", dest="rho_av", type=number, default=0.83)
    p.add_argument("--rho-b", dest="rho_b", type=number, default=2.5)
    p.add_argument("--aacc", type=number, default=3.0)
    p.add_argument("--adec", type=number, default=4.0)
    p.add_argument("--lav", type=number, default=4.0)
    p.add_argument("--sweep", type=sweep_spec, help=f"NAME=LO:HI:STEP over {sorted(MERGE_PARAMS)}")
    _common(p)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("validate", help="closed form vs Monte Carlo oracle")
    p.add_argument("target", choices=["all", *validation.TARGETS])
    p.add_argument("--kind", choices=["all"] + [k.value for k in pedestrian.ScenarioKind], default="all")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dt", type=number, default=0.01)
    p.add_argument("--workers", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reproduce", help="regenerate a published figure or table")
    p.add_argument("id", nargs="?", help="figure/table id")
    p.add_argument("--list", action="store_true")
    p.add_argument("--out", default="artifacts", help="output directory")
    p.add_argument("--data", default=None, help="merge-gap CSV for fig12/table1")
    p.add_argument("--stats", default=None, help="violation statistics CSV for fig9")
    p.add_argument("--hist", default=None, help="speed histogram CSV for fig9")
    p.set_defaults(func=cmd_reproduce)
    return root


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        cfg = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {known.config}: {exc}")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for command, values in cfg.items():
        sp = subparsers.choices.get(command)
        if sp is None or not isinstance(values, dict):
            parser.error(f"config: unknown section {command!r}")
        dests = {a.dest: a for a in sp._actions}
        for key, value in values.items():
            dest = key.replace("-", "_")
            if dest not in dests or dest in ("help", "func"):
                parser.error(f"config: unknown key {command}.{key}")
            action = dests[dest]
            if action.type is not None and isinstance(value, str):
                try:
                    value = action.type(value)
                except argparse.ArgumentTypeError as exc:
                    parser.error(f"config: {command}.{key}: {exc}")
            sp.set_defaults(**{dest: value})


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except red_light.InvalidStats as exc:
        print(f"infogap: {exc}", file=sys.stderr)
        return 1
    except (InputError, IngestError, FileNotFoundError, ValueError) as exc:
        print(f"infogap: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
