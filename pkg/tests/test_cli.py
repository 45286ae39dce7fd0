from __future__ import annotations

import csv
import json

import pytest

from infogap.cli import main, speed


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def as_dict(text: str) -> dict[str, str]:
    return dict(list(csv.reader(text.splitlines()))[1:])


def test_speed_units():
    assert speed("25mph") == pytest.approx(11.176)
    assert speed("11.18mps") == 11.18
    assert speed("3") == 3.0


def test_left_turn_reports_waiting_time(capsys):
    code, out, _ = run(capsys, "left-turn", "--vth", "25mph", "--rho", "0.7", "--gamma", "1490",
                       "--pcoll", "1.4e-5", "--alpha", "1e-4")
    assert code == 0
    vals = as_dict(out)
    assert float(vals["t_obs"]) == pytest.approx(443, abs=5)
    assert float(vals["t_obs_evasive"]) == pytest.approx(170, abs=25)


def test_left_turn_safe_speed_is_a_result(capsys):
    code, out, _ = run(capsys, "left-turn", "--vth", "15mph")
    assert code == 0
    assert as_dict(out)["t_obs"] == "0.0"


def test_json_mirrors_csv(capsys):
    _, text_csv, _ = run(capsys, "pedestrian", "--kind", "type2")
    _, text_json, _ = run(capsys, "pedestrian", "--kind", "type2", "--format", "json")
    rows = list(csv.DictReader(text_csv.splitlines()))
    recs = json.loads(text_json)
    assert len(rows) == len(recs) == 1
    assert {k: str(v) for k, v in recs[0].items()} == rows[0]
    assert float(rows[0]["conflict_probability"]) == pytest.approx(0.0125, abs=2e-4)


def test_sweep(capsys):
    code, out, _ = run(capsys, "merge", "--vav", "11.37", "--sweep", "adec=3:6:1")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0
    assert [r["adec"] for r in rows] == ["3.0", "4.0", "5.0", "6.0"]


def test_sweep_unknown_parameter(capsys):
    code, _, err = run(capsys, "left-turn", "--sweep", "colour=1:2:1")
    assert code == 2
    assert "cannot sweep" in err and "Traceback" not in err


def test_bad_unit_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["left-turn", "--vth", "25kph"])
    assert exc.value.code == 2


def test_missing_data_file(capsys):
    code, _, err = run(capsys, "merge", "--data", "no_such_file.csv")
    assert code == 2 and "no_such_file.csv" in err


def test_malformed_data_file(capsys, tmp_path):
    p = tmp_path / "gaps.csv"
    p.write_text("interval_label,lane_speed_mph,observed_gap_m\nx,20,-3\n")
    code, _, err = run(capsys, "merge", "--data", str(p))
    assert code == 2 and ":2:" in err


def test_invalid_stats_is_domain_error(capsys):
    code, _, err = run(capsys, "violation", "--nu", "7", "--td", "5")
    assert code == 1 and "exceeds 1" in err


def test_table1(capsys):
    code, out, _ = run(capsys, "merge", "--data", "ngsim_gaps.csv")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 3
    assert all(r["feasible_worst"] == "false" and r["feasible_single"] == "false" for r in rows)


def test_violation_sweep_both_cases(capsys):
    code, out, _ = run(capsys, "violation")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0
    assert len(rows) == 2 * 2 * 49
    assert {r["stats"] for r in rows} == {"NB-0400", "NB-1200"}


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"left-turn": {"vth": "30mph", "alpha": 0.01}}))
    _, base, _ = run(capsys, "left-turn")
    _, from_cfg, _ = run(capsys, "--config", str(cfg), "left-turn")
    _, flag_wins, _ = run(capsys, "--config", str(cfg), "left-turn", "--vth", "11.18", "--alpha", "1e-4")
    assert as_dict(from_cfg)["t_obs"] != as_dict(base)["t_obs"]
    assert flag_wins == base


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"left-turn": {"speed_limit": 3}}))
    with pytest.raises(SystemExit) as exc:
        main(["--config", str(cfg), "left-turn"])
    assert exc.value.code == 2


def test_validate_pedestrian(capsys):
    code, out, err = run(capsys, "validate", "pedestrian", "--kind", "type2", "--trials", "200000", "--seed", "42")
    assert code == 0
    assert err.startswith("PASS pedestrian type2")
    assert list(csv.DictReader(out.splitlines()))[0]["passed"] == "true"


def test_reproduce_list_and_write(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "--list")
    assert code == 0 and out.split() == ["fig2", "appendix-a", "fig6", "fig9", "fig12", "table1"]
    code, out, _ = run(capsys, "reproduce", "table1", "--data", "ngsim_gaps.csv", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "table1.csv").exists() and (tmp_path / "table1.manifest.json").exists()


def test_reproduce_unknown_id(capsys):
    code, _, err = run(capsys, "reproduce", "fig99")
    assert code == 2 and "unknown id" in err


def test_out_file_identical_across_runs(capsys, tmp_path):
    for name in ("a.json", "b.json"):
        run(capsys, "validate", "left-turn", "--trials", "100000", "--seed", "5", "--workers", "3",
            "--format", "json", "--out", str(tmp_path / name))
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
