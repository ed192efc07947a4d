from __future__ import annotations

import json

import pytest

from compactharmonic.cli import main
from compactharmonic.geometry import ball_scene, road_runner_scene, save_scene, shell_scene


@pytest.fixture()
def scenes(tmp_path):
    paths = {}
    for name, sc in [("ball", ball_scene()), ("shell", shell_scene()),
                     ("thin", road_runner_scene(1.0, 0.25, 8, start=3))]:
        paths[name] = str(tmp_path / f"{name}.json")
        save_scene(sc, paths[name])
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 3, "outer": {"center": [0, 0, 0], "radius": 1}, '
                   '"deleted": [{"center": [0.9, 0, 0], "radius": 0.5}]}')
    paths["bad"] = str(bad)
    return paths


def test_classify_exit_codes(scenes, tmp_path, capsys):
    assert main(["classify", "--scene", scenes["ball"], "--point", "0,0,0"]) == 0
    assert json.loads(capsys.readouterr().out)["results"][0]["verdict"] == "FineInterior"
    out = tmp_path / "c.json"
    assert main(["classify", "--scene", scenes["thin"], "--point", "0,0,0", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["results"][0]["verdict"] == "NotFineBoundary"
    assert main(["classify", "--scene", scenes["bad"], "--point", "0,0,0"]) == 1
    assert "SceneError" in capsys.readouterr().err


def test_indeterminate_exit_code(tmp_path, capsys):
    # radii 0.2·0.48^m give Wiener terms decaying like 0.96^k: too slow to call either way at depth 20
    path = tmp_path / "slow.json"
    save_scene(road_runner_scene(0.2, 0.48, 12), path)
    assert main(["classify", "--scene", str(path), "--point", "0,0,0"]) == 2
    assert json.loads(capsys.readouterr().out)["results"][0]["verdict"] == "Indeterminate"
    assert main(["classify", "--scene", str(tmp_path / "missing.json"), "--point", "0,0,0"]) == 1


def test_hmeasure_is_byte_identical(scenes, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["hmeasure", "--scene", scenes["ball"], "--point", "0.5,0,0", "--seed", "7",
                     "--samples", "2000", "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header.startswith("# seed=7,N=2000,absorb_delta=0.001,truncation_fraction=0.0")
    assert "scene_hash=" in header and "schedule=0.1:0.5:3" in header and "version=" in header


def test_seed_is_mandatory_and_failures_leave_no_file(scenes, tmp_path):
    out = tmp_path / "x.csv"
    assert main(["hmeasure", "--scene", scenes["ball"], "--point", "0.5,0,0", "--output", str(out)]) == 1
    assert main(["hmeasure", "--scene", scenes["ball"], "--point", "3,0,0", "--seed", "1", "--output", str(out)]) == 1
    assert list(tmp_path.iterdir()) == [] or not out.exists()
    assert not any(p.name.startswith(".partial") for p in tmp_path.iterdir())


def test_bad_schedule_flag(scenes):
    assert main(["hmeasure", "--scene", scenes["ball"], "--point", "0,0,0", "--seed", "1",
                 "--schedule", "0.1:2:3"]) == 1


def test_solve_shell(scenes, tmp_path):
    out = tmp_path / "s.json"
    pts = tmp_path / "pts.txt"
    pts.write_text("# radial points\n0.75,0,0\n0,0.9,0\n")
    assert main(["solve", "--scene", scenes["shell"], "--data", "outer1", "--points-file", str(pts),
                 "--seed", "3", "--samples", "20000", "--schedule", "0.1:0.5:4", "--output", str(out)]) == 0
    rows = json.loads(out.read_text())["solution"]["points"]
    for row, exact in zip(rows, (2 / 3, 2 - 1 / 0.9)):
        assert abs(row["value"] - exact) <= 3 * row["stderr"] + row["gap"]


def test_envelope(scenes, tmp_path):
    out = tmp_path / "e.json"
    assert main(["envelope", "--scene", scenes["ball"], "--point", "0,0,0", "--seed", "1",
                 "--samples", "2000", "--output", str(out)]) == 0
    body = json.loads(out.read_text())
    assert abs(body["primal"]["value"]) < 1e-3
    assert abs(body["bracket"]["gap"]) < 1e-7
    csv = tmp_path / "e.csv"
    assert main(["envelope", "--scene", scenes["ball"], "--point", "0,0,0", "--seed", "1",
                 "--samples", "2000", "--output", str(csv)]) == 0
    assert csv.read_text().splitlines()[1] == "x_1,x_2,x_3,weight"
