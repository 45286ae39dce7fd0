"""CSV ingest for violation statistics, speed histograms and merge-gap summaries.

Files are UTF-8, comma separated, with a mandatory header row.  Lines whose
first non-blank character is ``#`` are comments.  Speeds given in mph are
kept as written and exposed in m/s through properties.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

from .merging import ObservedGapRecord
from .red_light import Histogram, ViolationStats

DATA_DIR_ENV = "INFOGAP_DATA_DIR"
MAX_SPEED = 100.0  # m/s
MAX_GAP = 10_000.0  # m


class IngestError(ValueError):
    pass


class SchemaMismatch(IngestError):
    pass


class UnitError(IngestError):
    pass


class EmptyFile(IngestError):
    pass


class DatasetKind(enum.Enum):
    VIOLATION_STATS = "violation-stats"
    SPEED_HISTOGRAM = "speed-histogram"
    MERGE_GAPS = "merge-gaps"


@dataclass(frozen=True)
class ViolationRecord:
    interval_start_hhmm: str
    approach: str
    expected_violations: float

    def stats(self, interval_length: float = 900.0, cycle_length: float = 150.0) -> ViolationStats:
        return ViolationStats(self.expected_violations, interval_length, cycle_length)


@dataclass(frozen=True)
class HistogramBin:
    bin_lo_mps: float
    bin_hi_mps: float
    count: float


@dataclass(frozen=True)
class Dataset:
    kind: DatasetKind
    records: tuple
    source: str = "<memory>"

    def __eq__(self, other: object) -> bool:
        # provenance is not part of a dataset's identity
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.kind == other.kind and self.records == other.records

    def __hash__(self) -> int:
        return hash((self.kind, self.records))

    def histogram(self) -> Histogram:
        if self.kind is not DatasetKind.SPEED_HISTOGRAM:
            raise TypeError("not a speed histogram")
        bins = sorted(self.records, key=lambda b: b.bin_lo_mps)
        for a, b in zip(bins, bins[1:]):
            if a.bin_hi_mps != b.bin_lo_mps:
                raise SchemaMismatch(
                    f"{self.source}: histogram bins must be contiguous "
                    f"({a.bin_hi_mps} != {b.bin_lo_mps})"
                )
        edges = tuple(b.bin_lo_mps for b in bins) + (bins[-1].bin_hi_mps,)
        return Histogram(edges, tuple(b.count for b in bins))


REQUIRED = {
    DatasetKind.VIOLATION_STATS: ("interval_start_hhmm", "approach", "expected_violations"),
    DatasetKind.SPEED_HISTOGRAM: ("bin_lo_mps", "bin_hi_mps", "count"),
    DatasetKind.MERGE_GAPS: ("interval_label", "lane_speed_mph", "observed_gap_m"),
}
OPTIONAL = {
    DatasetKind.VIOLATION_STATS: (),
    DatasetKind.SPEED_HISTOGRAM: (),
    DatasetKind.MERGE_GAPS: ("v_av_mps", "v_f_mps", "v_b_mps"),
}


def data_path(name: str) -> Path:
    """Locate a data file: as given, then under ``$INFOGAP_DATA_DIR``, then bundled."""
    p = Path(name)
    if p.exists():
        return p
    env = os.environ.get(DATA_DIR_ENV)
    if env and (Path(env) / name).exists():
        return Path(env) / name
    bundled = resources.files("infogap") / "data" / name
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(name)


def _number(raw: str, column: str, line: int, source: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise SchemaMismatch(f"{source}:{line}: column {column!r} is not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise UnitError(f"{source}:{line}: column {column!r} must be finite")
    return value


def _check(ok: bool, msg: str) -> None:
    if not ok:
        raise UnitError(msg)


def _row_record(kind: DatasetKind, row: dict[str, str], line: int, source: str):
    where = f"{source}:{line}"
    if kind is DatasetKind.VIOLATION_STATS:
        hhmm = row["interval_start_hhmm"].strip()
        if len(hhmm) != 4 or not hhmm.isdigit() or int(hhmm[:2]) > 23 or int(hhmm[2:]) > 59:
            raise SchemaMismatch(f"{where}: interval_start_hhmm must be HHMM, got {hhmm!r}")
        nu = _number(row["expected_violations"], "expected_violations", line, source)
        _check(nu >= 0, f"{where}: expected_violations must be non-negative")
        return ViolationRecord(hhmm, row["approach"].strip(), nu)
    if kind is DatasetKind.SPEED_HISTOGRAM:
        lo = _number(row["bin_lo_mps"], "bin_lo_mps", line, source)
        hi = _number(row["bin_hi_mps"], "bin_hi_mps", line, source)
        count = _number(row["count"], "count", line, source)
        _check(0 <= lo < hi < MAX_SPEED, f"{where}: need 0 <= bin_lo < bin_hi < {MAX_SPEED} m/s")
        _check(count >= 0, f"{where}: count must be non-negative")
        return HistogramBin(lo, hi, count)
    mph = _number(row["lane_speed_mph"], "lane_speed_mph", line, source)
    gap = _number(row["observed_gap_m"], "observed_gap_m", line, source)
    _check(0 <= mph * 0.44704 < MAX_SPEED, f"{where}: lane speed out of range")
    _check(0 < gap < MAX_GAP, f"{where}: observed gap must lie in (0, {MAX_GAP}) m")
    extra = {}
    for col, attr in (("v_av_mps", "v_av"), ("v_f_mps", "v_f"), ("v_b_mps", "v_b")):
        raw = (row.get(col) or "").strip()
        if raw:
            v = _number(raw, col, line, source)
            _check(0 <= v < MAX_SPEED, f"{where}: {col} out of range")
            extra[attr] = v
    return ObservedGapRecord(row["interval_label"].strip(), mph, gap, **extra)


def parse_text(text: str, kind: DatasetKind | str, source: str = "<memory>") -> Dataset:
    kind = DatasetKind(kind)
    numbered = [
        (i, line)
        for i, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not numbered:
        raise EmptyFile(f"{source}: no header or data")
    header_line, header = numbered[0]
    columns = [c.strip() for c in next(csv.reader([header]))]
    missing = [c for c in REQUIRED[kind] if c not in columns]
    unknown = [c for c in columns if c not in REQUIRED[kind] + OPTIONAL[kind]]
    if missing or unknown:
        raise SchemaMismatch(
            f"{source}:{header_line}: expected columns {list(REQUIRED[kind])}"
            + (f" plus optional {list(OPTIONAL[kind])}" if OPTIONAL[kind] else "")
            + f"; missing {missing}, unknown {unknown}"
        )
    records = []
    for line_no, line in numbered[1:]:
        values = next(csv.reader([line]))
        if len(values) != len(columns):
            raise SchemaMismatch(
                f"{source}:{line_no}: expected {len(columns)} fields, got {len(values)}"
            )
        records.append(_row_record(kind, dict(zip(columns, values)), line_no, source))
    if not records:
        raise EmptyFile(f"{source}: header only, no data rows")
    return Dataset(kind, tuple(records), source)


def parse(path: str | os.PathLike, kind: DatasetKind | str) -> Dataset:
    p = data_path(str(path))
    try:
        text = p.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise SchemaMismatch(f"{p}: not UTF-8 ({exc})") from None
    return parse_text(text, kind, source=str(p))


def serialize(d: Dataset) -> str:
    """CSV text that :func:`parse_text` maps back to an equal dataset."""
    columns = list(REQUIRED[d.kind])
    if d.kind is DatasetKind.MERGE_GAPS and any(
        r.v_av is not None or r.v_f is not None or r.v_b is not None for r in d.records
    ):
        columns += list(OPTIONAL[d.kind])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in d.records:
        if d.kind is DatasetKind.MERGE_GAPS:
            row = [r.interval_label, repr(r.lane_speed_mph), repr(r.observed_gap)]
            if len(columns) > 3:
                row += ["" if v is None else repr(v) for v in (r.v_av, r.v_f, r.v_b)]
        else:
            row = [v if isinstance(v, str) else repr(v) for v in (getattr(r, f.name) for f in fields(r))]
        w.writerow(row)
    return buf.getvalue()
