from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infogap.ingest import (
    Dataset,
    DatasetKind,
    EmptyFile,
    HistogramBin,
    SchemaMismatch,
    UnitError,
    ViolationRecord,
    data_path,
    parse,
    parse_text,
    serialize,
)
from infogap.merging import ObservedGapRecord


def test_bundled_violation_stats():
    d = parse("montrose_nb.csv", DatasetKind.VIOLATION_STATS)
    assert d.records == (ViolationRecord("0400", "NB", 0.67), ViolationRecord("1200", "NB", 1.91))


def test_bundled_gaps_convert_mph():
    d = parse("ngsim_gaps.csv", "merge-gaps")
    assert [round(r.lane_speed, 2) for r in d.records] == [13.29, 11.37, 9.68]
    assert [r.observed_gap for r in d.records] == [43.19, 35.63, 27.44]


def test_bundled_histogram_is_contiguous():
    h = parse("we_speed_hist.csv", DatasetKind.SPEED_HISTOGRAM).histogram()
    assert h.edges[0] == 2.0 and h.edges[-1] == 26.0
    assert sum(h.counts) == 1000


@pytest.mark.parametrize("text", ["", "\n\n", "# only a comment\n"])
def test_empty_file(text):
    with pytest.raises(EmptyFile):
        parse_text(text, DatasetKind.VIOLATION_STATS)


def test_header_only():
    with pytest.raises(EmptyFile):
        parse_text("interval_start_hhmm,approach,expected_violations\n", DatasetKind.VIOLATION_STATS)


def test_schema_mismatch_names_columns():
    with pytest.raises(SchemaMismatch, match="missing"):
        parse_text("a,b\n1,2\n", DatasetKind.MERGE_GAPS)


def test_row_number_in_diagnostics():
    text = "# c\ninterval_label,lane_speed_mph,observed_gap_m\nx,20,30\ny,abc,30\n"
    with pytest.raises(SchemaMismatch, match=r":4:"):
        parse_text(text, DatasetKind.MERGE_GAPS, source="f.csv")


@pytest.mark.parametrize(
    "row",
    ["x,-5,30", "x,20,-1", "x,20,20000", "x,20,inf", "x,500,30"],
)
def test_unit_errors(row):
    with pytest.raises(UnitError):
        parse_text(f"interval_label,lane_speed_mph,observed_gap_m\n{row}\n", DatasetKind.MERGE_GAPS)


def test_field_count_mismatch():
    with pytest.raises(SchemaMismatch, match="fields"):
        parse_text("bin_lo_mps,bin_hi_mps,count\n1,2\n", DatasetKind.SPEED_HISTOGRAM)


def test_bad_hhmm():
    with pytest.raises(SchemaMismatch):
        parse_text("interval_start_hhmm,approach,expected_violations\n2500,NB,1\n", "violation-stats")


def test_non_contiguous_histogram():
    d = parse_text("bin_lo_mps,bin_hi_mps,count\n0,1,3\n2,3,4\n", DatasetKind.SPEED_HISTOGRAM)
    with pytest.raises(SchemaMismatch, match="contiguous"):
        d.histogram()


def test_optional_speed_columns():
    text = "interval_label,lane_speed_mph,observed_gap_m,v_av_mps,v_f_mps,v_b_mps\nx,20,30,9,,10\n"
    rec = parse_text(text, DatasetKind.MERGE_GAPS).records[0]
    assert (rec.v_av, rec.v_f, rec.v_b) == (9.0, None, 10.0)


def test_data_dir_env(tmp_path, monkeypatch):
    (tmp_path / "mine.csv").write_text("bin_lo_mps,bin_hi_mps,count\n0,1,1\n")
    monkeypatch.setenv("INFOGAP_DATA_DIR", str(tmp_path))
    assert data_path("mine.csv") == tmp_path / "mine.csv"
    assert len(parse("mine.csv", DatasetKind.SPEED_HISTOGRAM).records) == 1
    with pytest.raises(FileNotFoundError):
        data_path("absent.csv")


def test_not_utf8(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_bytes(b"interval_label,lane_speed_mph,observed_gap_m\n\xff\xfe,1,2\n")
    with pytest.raises(SchemaMismatch, match="UTF-8"):
        parse(p, DatasetKind.MERGE_GAPS)


@pytest.mark.parametrize("name,kind", [
    ("montrose_nb.csv", DatasetKind.VIOLATION_STATS),
    ("we_speed_hist.csv", DatasetKind.SPEED_HISTOGRAM),
    ("ngsim_gaps.csv", DatasetKind.MERGE_GAPS),
])
def test_bundled_round_trip(name, kind):
    d = parse(name, kind)
    assert parse_text(serialize(d), kind) == d


finite = st.floats(0.0, 99.0, allow_nan=False)
labels = st.text(st.characters(whitelist_categories=("L", "N"), whitelist_characters=":-"), min_size=1, max_size=12)


@given(
    st.lists(
        st.builds(
            ObservedGapRecord,
            labels,
            st.floats(0.0, 200.0),
            st.floats(0.001, 9999.0),
            st.one_of(st.none(), finite),
            st.one_of(st.none(), finite),
            st.one_of(st.none(), finite),
        ),
        min_size=1,
        max_size=5,
    )
)
def test_merge_round_trip(records):
    d = Dataset(DatasetKind.MERGE_GAPS, tuple(records))
    assert parse_text(serialize(d), DatasetKind.MERGE_GAPS) == d


@given(st.lists(st.tuples(finite, st.floats(0.001, 0.9), st.floats(0, 1e6)), min_size=1, max_size=6))
def test_histogram_round_trip(bins):
    records = tuple(HistogramBin(lo, lo + w, c) for lo, w, c in bins)
    d = Dataset(DatasetKind.SPEED_HISTOGRAM, records)
    assert parse_text(serialize(d), DatasetKind.SPEED_HISTOGRAM) == d


@given(
    st.lists(
        st.builds(
            ViolationRecord,
            st.builds(lambda h, m: f"{h:02d}{m:02d}", st.integers(0, 23), st.integers(0, 59)),
            st.sampled_from(["NB", "SB", "EB", "WB"]),
            st.floats(0, 1e3),
        ),
        min_size=1,
        max_size=5,
    )
)
def test_violation_round_trip(records):
    d = Dataset(DatasetKind.VIOLATION_STATS, tuple(records))
    assert parse_text(serialize(d), DatasetKind.VIOLATION_STATS) == d
