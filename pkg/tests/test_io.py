import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swemac.cases import lake_at_rest_case
from swemac.fields import State
from swemac.io import (
    ConfigError,
    cell_velocity,
    line_extract,
    parse_config,
    read_grid_snapshot,
    write_grid_snapshot,
    write_line_csv,
    write_manifest,
    write_records_csv,
)
from swemac.mesh import build_uniform

from strategies import mesh_and_state


def test_parse_defaults():
    cfg = parse_config("case = vortex\nmesh = 64")
    assert cfg.mesh == [64] and cfg.scheme == "heun_muscl"
    case = cfg.build_case()
    assert case.name == "vortex" and case.params["n"] == 64
    sc = cfg.scheme_config(case)
    assert sc.kind == "heun_muscl" and sc.g == case.g


def test_parse_override_case_preset():
    cfg = parse_config("case = circular-dam-break  # comment\nzeta_stab = 0.3\nmesh = 20")
    assert cfg.scheme_config(cfg.build_case()).zeta_stab == 0.3
    cfg = parse_config("case = circular-dam-break\nmesh = 20")
    assert cfg.scheme_config(cfg.build_case()).zeta_stab == 0.1


def test_parse_riemann_keeps_entropy_safe():
    cfg = parse_config("case = riemann")
    assert cfg.scheme_config(cfg.build_case()).limiter.entropy_safe
    cfg = parse_config("case = riemann\nentropy_safe = no")
    assert not cfg.scheme_config(cfg.build_case()).limiter.entropy_safe


@pytest.mark.parametrize("text, line, fragment", [
    ("", None, "missing case"),
    ("# only a comment\n", None, "missing case"),
    ("case = vortex\ncolour = red", 2, "unknown key"),
    ("case = vortex\nmesh = big", 2, "bad value"),
    ("case = vortex\ncase = drop", 2, "duplicate"),
    ("case = vortex\njust words", 2, "expected"),
    ("\n\ncase = nowhere", 3, "unknown case"),
    ("case = vortex\nentropy_safe = maybe", 2, "bad value"),
])
def test_parse_errors(text, line, fragment):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_parse_invalid_combinations():
    for text in ("case = vortex\nmesh = 0", "case = vortex\nevery_t = -1", "case = vortex\nscheme = rk4",
                 "case = vortex\nformats = png"):
        with pytest.raises(ConfigError):
            parse_config(text)


def test_parse_dt_policies():
    cfg = parse_config("case = drop\nmesh = 10\ndt = 0.01")
    assert cfg.scheme_config(cfg.build_case()).dt_policy.dt == 0.01
    cfg = parse_config("case = drop\nmesh = 10\ncfl = 0.4")
    assert cfg.scheme_config(cfg.build_case()).dt_policy.fraction == 0.4
    cfg = parse_config("case = vortex", {"mesh": "32 64", "T": 0.5})
    assert cfg.mesh == [32, 64] and cfg.build_case(64).T == 0.5


def test_snapshot_uniform_2x2(tmp_path):
    m = build_uniform(2, 2)
    s = State(np.full((2, 2), 1.5), np.full((3, 2), 0.5), np.zeros((2, 3)))
    path = write_grid_snapshot(s, m, tmp_path / "s.vtk")
    lines = path.read_text().splitlines()
    assert lines[0] == "# vtk DataFile Version 3.0"
    assert lines[2:5] == ["ASCII", "DATASET RECTILINEAR_GRID", "DIMENSIONS 3 3 1"]
    i = lines.index("SCALARS h double 1")
    assert lines[i + 1] == "LOOKUP_TABLE default"
    assert lines[i + 2 : i + 6] == ["1.5"] * 4
    j = lines.index("VECTORS velocity double")
    assert lines[j + 1 :] == ["0.5 0 0"] * 4


def test_snapshot_rest_lake(tmp_path):
    case = lake_at_rest_case(6, level=2.0)
    out = read_grid_snapshot(write_grid_snapshot(case.initial_state(), case.mesh, tmp_path / "lake.vtk"))
    np.testing.assert_allclose(out["h_plus_z"], 2.0, rtol=1e-15)


@settings(max_examples=20)
@given(data=mesh_and_state(), t=st.floats(0, 100))
def test_snapshot_roundtrip(tmp_path_factory, data, t):
    m, s = data
    s.t = t
    path = write_grid_snapshot(s, m, tmp_path_factory.mktemp("snap") / "x.vtk")
    out = read_grid_snapshot(path)
    assert out["t"] == t
    np.testing.assert_array_equal(out["x"], m.x)
    np.testing.assert_array_equal(out["y"], m.y)
    np.testing.assert_array_equal(out["h"], s.h)
    np.testing.assert_array_equal(out["h_plus_z"], s.h + s.z)
    uc1, uc2 = cell_velocity(s)
    np.testing.assert_array_equal(out["velocity"][0], uc1)
    np.testing.assert_array_equal(out["velocity"][1], uc2)


def test_cell_data_runs_x_fastest(tmp_path):
    m = build_uniform(3, 2)
    h = np.arange(6.0).reshape(3, 2)
    s = State(h, np.zeros((4, 2)), np.zeros((3, 3)))
    lines = write_grid_snapshot(s, m, tmp_path / "o.vtk").read_text().splitlines()
    i = lines.index("SCALARS h double 1") + 2
    assert lines[i : i + 6] == ["0", "2", "4", "1", "3", "5"]


def test_line_extract(tmp_path):
    m = build_uniform(4, 4, ((-2.0, 2.0), (-2.0, 2.0)))
    h = np.add.outer(np.arange(4.0), 10 * np.arange(4.0))
    s = State(h, np.zeros((5, 4)), np.zeros((4, 5)))
    line = line_extract(s, m, "y", 0.4)
    np.testing.assert_array_equal(line["h"], h[:, 2])
    path = write_line_csv(s, m, tmp_path / "l.csv", "x", -1.5)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["y", "h", "u1", "u2"] and len(rows) == 5
    assert [float(r[1]) for r in rows[1:]] == list(h[0])


def test_records_and_manifest(tmp_path):
    path = write_records_csv(tmp_path / "m.csv", [{"step": 0, "mass": 1.0}, {"step": 1, "mass": 0.1, "dt": 0.5}])
    rows = list(csv.reader(path.open()))
    assert rows == [["step", "mass", "dt"], ["0", "1", ""], ["1", "0.10000000000000001", "0.5"]]
    cfg = parse_config("case = lake-at-rest\nmesh = 4")
    case = cfg.build_case()
    doc = json.loads(write_manifest(tmp_path / "man.json", cfg, case, cfg.scheme_config(case), {"steps": 3}).read_text())
    assert doc["config"]["case"] == "lake-at-rest"
    assert doc["mesh"]["nx"] == 4 and doc["summary"]["steps"] == 3
    assert doc["scheme"]["kind"] == "heun_muscl"


def test_outdir_env(monkeypatch, tmp_path):
    cfg = parse_config("case = drop\nmesh = 10")
    monkeypatch.setenv("SWEMAC_OUTDIR", str(tmp_path))
    assert cfg.out_dir() == tmp_path / "drop-10-heun_muscl"
    monkeypatch.delenv("SWEMAC_OUTDIR")
    assert parse_config("case = drop\noutput_dir = here").out_dir().name == "here"
