import csv
import json

import numpy as np
import pytest

from germlab.cli import parse_radii, radial_power_map, run
from germlab.report import EXIT_CODES, RunManifest, VerdictReport, dumps, emit_series, jsonable, write_outputs


def read_json(path):
    return json.loads(path.read_text())


def test_catalog(capsys, tmp_path):
    assert run(["catalog"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) >= 8 and lines[0].startswith("circle_cone")
    assert run(["catalog", "--out", str(tmp_path), "--quiet"]) == 0
    assert len(read_json(tmp_path / "catalog.json")["report"]["measured"]["germs"]) >= 8


def test_usage_errors(capsys):
    assert run([]) == 64
    assert run(["bogus"]) == 64
    assert run(["lne", "line", "--pairs", "many"]) == 64
    assert run(["verify-lemma", "st-equiv", "--germ", "line"]) == 64
    capsys.readouterr()


def test_runtime_errors(capsys):
    assert run(["lne", "no_such"]) == 1
    assert "no_such" in capsys.readouterr().err


def test_parse_radii():
    assert parse_radii("1e-3:1e-1:3", 5) == pytest.approx([1e-3, 1e-2, 1e-1])
    assert len(parse_radii("1e-3:1e-1", 5)) == 5


def test_radial_map_expressions():
    assert radial_power_map(2, 0.1) == ["x*norm(x, y)^(0.1)", "y*norm(x, y)^(0.1)"]


def test_series_columns(tmp_path):
    assert run(["st-volume", "ray", "--d", "2", "--radii", "1e-2:1e-1:4", "--trials", "5000",
                "--out", str(tmp_path), "--quiet"]) == 0
    rows = list(csv.reader(open(tmp_path / "st-volume_volume.csv")))
    assert rows[0] == ["r", "estimate", "stderr"] and len(rows) == 5
    assert run(["lne", "line", "--radii", "1e-3:1e-1:3", "--pairs", "10", "--points", "300",
                "--out", str(tmp_path), "--quiet"]) == 0
    rows = list(csv.reader(open(tmp_path / "lne_pairs.csv")))
    assert rows[0] == ["shell_r", "d_out", "d_in"]
    body = read_json(tmp_path / "lne.json")
    assert body["report"]["measured"]["verdict"] == "LNE-consistent"
    assert "wall_time_s" not in body["manifest"]
    assert "wall_time_s" in read_json(tmp_path / "lne.manifest.json")


def test_empty_series(tmp_path):
    p = emit_series(tmp_path / "e.csv", ["a", "b"], [])
    assert p.read_text() == "a,b\n"


def test_float_formatting(tmp_path):
    p = emit_series(tmp_path / "f.csv", ["x"], [[0.1], [1 / 3]])
    vals = [float(r[0]) for r in list(csv.reader(open(p)))[1:]]
    assert vals == [0.1, 1 / 3]


def test_jsonable_nonfinite():
    obj = {"a": np.float64("nan"), "b": np.inf, "c": np.arange(3), "d": (np.int64(2), np.bool_(True))}
    assert jsonable(obj) == {"a": "nan", "b": "inf", "c": [0, 1, 2], "d": [2, True]}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


def test_write_outputs_bytes(tmp_path):
    m = RunManifest("demo", {"k": 1}, 0, {"line": "abc"}, wall_time=1.5)
    r = VerdictReport("demo", {}, {"x": 0.1}, verdict="pass")
    write_outputs(tmp_path / "a", m, r)
    m.wall_time = 9.0
    write_outputs(tmp_path / "b", m, r)
    assert (tmp_path / "a" / "demo.json").read_bytes() == (tmp_path / "b" / "demo.json").read_bytes()
    assert EXIT_CODES == {"pass": 0, "complete": 0, "fail": 2, "inconclusive": 3}


def test_verify_vol_line(tmp_path):
    assert run(["verify-lemma", "vol", "--germ", "line", "--d", "1.5", "--out", str(tmp_path), "--quiet"]) == 0
    m = read_json(tmp_path / "verify-lemma-vol.json")["report"]
    assert m["verdict"] == "pass"
    assert abs(m["measured"]["e_hat"] - 2.5) <= 0.15


def test_link_and_compare(tmp_path, capsys):
    assert run(["link-topology", "plane", "--seed", "1"]) == 0
    rep = json.loads(capsys.readouterr().out)["report"]
    assert (rep["measured"]["b0"], rep["measured"]["b1"]) == (1, 1)
    assert rep["necessary_condition_only"] is True
    assert run(["compare-links", "plane", "circle_cone"]) == 0
    assert run(["compare-links", "plane", "halfline_z"]) == 2
    capsys.readouterr()


def test_extend_checks(capsys):
    assert run(["extend", "--map", "x;abs(x*log(abs(x)))", "--germ", "line", "--check", "graph",
                "--points", "400"]) == 0
    rep = json.loads(capsys.readouterr().out)["report"]
    assert rep["measured"]["graph"]["first_block_max"] <= 1e-12


def test_extend_from_csv(tmp_path, capsys):
    t = np.linspace(-0.1, 0.1, 201)
    t = t[t != 0]
    p = tmp_path / "pairs.csv"
    emit_series(p, ["x_1", "x_2", "y_1", "y_2"], np.c_[t, 0 * t, t, np.abs(t * np.log(np.abs(t)))].tolist())
    assert run(["extend", "--map", str(p), "--check", "roundtrip"]) == 0
    rep = json.loads(capsys.readouterr().out)["report"]
    assert rep["inputs"]["rows"] == 200
    assert rep["measured"]["round_trip_same_base"]["max"] <= 1e-12


def test_dim_cone_plane(tmp_path):
    code = run(["dim-cone", "plane", "--trials", "50000", "--radii", "1e-3:1e-1:5", "--out", str(tmp_path),
                "--quiet"])
    assert code == 0
    assert read_json(tmp_path / "dim-cone.json")["report"]["measured"]["a_rounded"] == 2
