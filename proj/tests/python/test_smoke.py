import json
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

import supportgraph as sg

ROOT = Path(os.environ.get("SG_ROOT", Path(__file__).resolve().parents[2]))
FIX = ROOT / "tests" / "fixtures"
DATA = ROOT / "data"
SGRAPH = os.environ.get("SG_SGRAPH")


def load(p):
    with open(p) as f:
        return json.load(f)


def test_dining_room_topology():
    sol = sg.infer(FIX / "scenes" / "dining_room.json", DATA / "priors_default.json",
                   config=DATA / "config_default.json")
    g = sg.graph_from_solution(sol)
    assert sg.validate(g) == []
    label = {v["id"]: v["label"] for v in g["vertices"]}
    parent = {label[e["from"]]: label[e["to"]] for e in g["support_edges"]}
    assert parent["cup"] == "table"
    assert parent["book"] == "table"
    assert parent["table"] == "ground"
    assert parent["picture"] == "wall"


def test_kitchen_distances():
    gt = load(FIX / "graphs" / "kitchen_gt.json")
    err = load(FIX / "graphs" / "kitchen_err.json")
    assert sg.compare(err, gt)["naive_distance"] == 0.2
    same = sg.compare(gt, gt)
    assert same["cheeger_distance"] < 1e-12
    assert same["spectral_distance"] < 1e-12


def test_cheeger_bounds_star():
    a = np.zeros((4, 4))
    a[0, 1:] = a[1:, 0] = 1
    b = sg.cheeger_bounds(a)
    assert b["lower"] == pytest.approx(0.5)
    assert b["upper"] == pytest.approx(2 ** 0.5)
    assert b["lower"] <= sg.cheeger_constant(a) <= b["upper"]


def test_naive_distance_shape_mismatch():
    with pytest.raises(sg.InputError):
        sg.naive_distance(np.zeros((2, 2), dtype=np.int32), np.zeros((3, 3), dtype=np.int32))


def test_invalid_graph_reported():
    g = load(FIX / "graphs" / "kitchen_gt.json")
    g["support_edges"].append({"from": 7, "to": 2, "kind": "below"})
    errs = sg.validate(g)
    assert errs and errs[0].startswith("single-parent")


def test_missing_scene_raises():
    with pytest.raises(sg.IoError):
        sg.infer("/nonexistent.json", DATA / "priors_default.json")


needs_cli = pytest.mark.skipif(not SGRAPH, reason="sgraph path not provided")


def run(*args):
    return subprocess.run([SGRAPH, *map(str, args)], capture_output=True, text=True)


@needs_cli
def test_cli_help():
    assert run("--help").returncode == 0


@needs_cli
def test_cli_missing_file():
    r = run("infer", "/nonexistent.json", "--priors", DATA / "priors_default.json")
    assert r.returncode == 2


@needs_cli
def test_cli_invalid_priors(tmp_path):
    bad = load(DATA / "priors_default.json")
    bad["classes"][0], bad["classes"][1] = bad["classes"][1], bad["classes"][0]
    p = tmp_path / "priors.json"
    p.write_text(json.dumps(bad))
    r = run("infer", FIX / "scenes" / "small_kitchen.json", "--priors", p)
    assert r.returncode == 3


@needs_cli
def test_cli_oracle(tmp_path):
    r = run("infer", FIX / "scenes" / "small_kitchen.json", "--priors", DATA / "priors_default.json",
            "--oracle", "-o", tmp_path / "sol.json")
    assert r.returncode == 0, r.stderr
    assert "objective match" in r.stdout + r.stderr
