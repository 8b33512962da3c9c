import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from facecover import cli
from facecover.bodies import VPolytope
from facecover.errors import BisectionStalled, DegenerateSimplex, ParseError, ValidationError
from facecover.instance import load_instance, parse_instance, serialize_instance


def doc(**over):
    base = {
        "dim": 1,
        "simplex": [[0], [1]],
        "sets": [{"type": "vpolytope", "points": [0.7, 1.0]}, {"type": "vpolytope", "points": [0.0, 0.3]}],
    }
    base.update(over)
    return json.dumps(base)


def test_minimal_1d():
    inst = parse_instance(doc())
    assert inst.dim == 1 and len(inst.bodies) == 2
    assert inst.sets[0]["points"] == [[0.7], [1.0]]
    assert inst.bodies[1].distance([0.5]) == pytest.approx(0.2)


def test_face_hull_descriptor():
    text = json.dumps({
        "dim": 2,
        "simplex": [[0, 0], [1, 0], [0, 1]],
        "sets": [{"type": "face-hull", "index": 1, "extras": [[1 / 3, 1 / 3]]}],
    })
    body = parse_instance(text).bodies[0]
    ref = VPolytope([[1, 0], [0, 1], [1 / 3, 1 / 3]])
    probes = np.random.default_rng(0).uniform(-0.5, 1.5, size=(50, 2))
    assert np.allclose(body.distances(probes), ref.distances(probes), atol=1e-12)


def test_degenerate_simplex():
    text = json.dumps({"dim": 2, "simplex": [[0, 0], [1, 0], [2, 0]], "sets": [{"type": "face", "index": 1}]})
    with pytest.raises(ValidationError, match="simplex"):
        parse_instance(text)


def test_parse_error_position():
    with pytest.raises(ParseError, match="line 3, column 2"):
        parse_instance('{"dim": 1,\n "simplex": [[0], [1]]\n "sets": []}')


@pytest.mark.parametrize(
    "over,where",
    [
        ({"sets": [{"type": "vpolytope", "points": [[0.5, 0.1]]}]}, "sets[0].points[0]"),
        ({"sets": [{"type": "vpolytope", "points": [1.5]}]}, "sets[0].points[0]"),
        ({"sets": [{"type": "ball", "center": [0.5], "radius": -1}]}, "sets[0].radius"),
        ({"sets": [{"type": "face", "index": 3}]}, "sets[0].index"),
        ({"sets": [{"type": "blob"}]}, "sets[0].type"),
        ({"sets": [{"type": "halfspaces", "normals": [[1]], "offsets": [-1]}]}, "sets[0]"),
        ({"assignment": {"1": 2}}, "assignment['1']"),
        ({"simplex": [[0]]}, "simplex"),
    ],
)
def test_validation_context(over, where):
    with pytest.raises(ValidationError) as err:
        parse_instance(doc(**over))
    assert str(err.value).startswith(where)


def test_assignment_parsed():
    inst = parse_instance(doc(assignment={"2": 2, "1": 1}))
    assert inst.assignment == {1: 1, 2: 2}


point2 = st.tuples(st.floats(0, 1), st.floats(0, 1)).map(lambda p: [p[0] * (1 - p[1]), p[1] * (1 - p[0]) * 0.5])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.one_of(
    st.builds(lambda pts: {"type": "vpolytope", "points": pts}, st.lists(point2, min_size=1, max_size=4)),
    st.builds(lambda c, r: {"type": "ball", "center": c, "radius": r}, point2, st.floats(0, 1)),
    st.builds(lambda i: {"type": "face", "index": i}, st.integers(1, 3)),
    st.builds(lambda i, ex: {"type": "face-hull", "index": i, "extras": ex}, st.integers(1, 3),
              st.lists(point2, max_size=2)),
    st.just({"type": "halfspaces", "normals": [[-1.0, -1.0]], "offsets": [-0.5]}),
), min_size=1, max_size=5))
def test_round_trip(sets):
    text = json.dumps({"dim": 2, "simplex": [[0, 0], [1, 0], [0, 1]], "sets": sets})
    inst = parse_instance(text)
    again = parse_instance(serialize_instance(inst))
    assert again == inst
    assert serialize_instance(again) == serialize_instance(inst)


def test_fixture_files_load(instance_path):
    for name in sorted(os.listdir(os.path.dirname(instance_path("x")))):
        inst = load_instance(instance_path(name))
        assert parse_instance(serialize_instance(inst)) == inst


# ---- CLI --------------------------------------------------------------------

def run(argv, capsys):
    code = cli.run_command(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_solve_gap(instance_path, capsys):
    code, out, _ = run(["solve", "--instance", instance_path("gap1d.json")], capsys)
    assert code == 0
    res = json.loads(out)
    assert set(res) == {"eps0", "v", "distances", "covering", "iterations"}
    assert res["eps0"] == pytest.approx(0.2, abs=1e-6)
    assert res["v"] == pytest.approx([0.5], abs=1e-6)
    assert res["covering"] is False


def test_helly_negative(instance_path, capsys):
    code, out, _ = run(["helly", "--instance", instance_path("helly1d-neg.json")], capsys)
    assert code == 0
    assert json.loads(out) == {"intersects": False, "counterexample": [1, 2]}


def test_oracle_faces(instance_path, capsys):
    code, out, _ = run(["oracle", "--instance", instance_path("faces2d.json"), "--grid-depth", "256"], capsys)
    res = json.loads(out)
    r = (2 - math.sqrt(2)) / 2
    assert res["maximin"] == pytest.approx(r, abs=res["mesh"])
    assert res["minimax"] == pytest.approx(r, abs=res["mesh"])
    assert set(res) == {"maximin", "minimax", "argmax", "argmin", "mesh"}


def test_cover_boundary_t0(instance_path, capsys):
    _, out, _ = run(["cover", "--instance", instance_path("faces2d.json")], capsys)
    res = json.loads(out)
    assert res["covered"] is False and len(res["witness_uncovered"]) == 2
    _, out, _ = run(["boundary", "--instance", instance_path("faces2d.json")], capsys)
    res = json.loads(out)
    assert res["covered"] is True and "witness_uncovered" not in res
    _, out, _ = run(["t0", "--instance", instance_path("unit1d.json")], capsys)
    assert json.loads(out)["t0"] == pytest.approx(0.5, abs=1e-4)


def test_homotopy_outputs(instance_path, capsys, tmp_path):
    csv_path = tmp_path / "curve.csv"
    code, out, _ = run(["homotopy", "--instance", instance_path("unit1d.json"), "--t-samples", "5",
                        "--out", str(csv_path)], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["t0"] == pytest.approx(0.5, abs=1e-4)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,eps_t,v1"
    rows = [list(map(float, ln.split(","))) for ln in lines[1:]]
    assert all(abs(e - (0.5 - t)) <= 1e-4 for t, e, _ in rows)
    assert summary["delta0"] == pytest.approx(min(e for _, e, _ in rows))
    # without --out the CSV takes stdout and the summary goes to stderr
    code, out, err = run(["homotopy", "--instance", instance_path("unit1d.json"), "--t-samples", "5"], capsys)
    assert out == csv_path.read_text()
    assert json.loads(err) == summary


def test_reals_have_17_digits(instance_path, capsys):
    _, out, _ = run(["solve", "--instance", instance_path("faces2d.json")], capsys)
    res = json.loads(out)
    assert float(f"{res['eps0']:.17g}") == res["eps0"]
    assert "0.29289321881345" in out
    assert cli.dumps({"x": 0.1, "n": 3, "b": True, "y": 1.0}) == '{"x": 0.10000000000000001, "n": 3, "b": true, "y": 1.0}\n'


def test_deterministic(instance_path, capsys):
    argv = ["solve", "--instance", instance_path("mixed2d.json")]
    first = run(argv, capsys)[1]
    assert run(argv, capsys)[1] == first


def test_exit_codes(tmp_path, instance_path, capsys, monkeypatch):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "simplex": [[0,0],[1,0],[2,0]], "sets": [{"type": "face", "index": 1}]}')
    code, _, err = run(["solve", "--instance", str(bad)], capsys)
    assert code == 1 and "simplex" in err
    code, _, _ = run(["solve", "--instance", str(tmp_path / "missing.json")], capsys)
    assert code == 1
    code, _, _ = run(["solve", "--instance", instance_path("helly1d-pos.json")], capsys)
    assert code == 1

    def stalled(*a, **k):
        raise BisectionStalled("forced", 0.0, 1.0, [])

    monkeypatch.setattr(cli.equispace, "solve", stalled)
    code, _, err = run(["solve", "--instance", instance_path("gap1d.json")], capsys)
    assert code == 2 and "forced" in err


def test_out_flag_for_json(tmp_path, instance_path, capsys):
    target = tmp_path / "res.json"
    code, out, _ = run(["t0", "--instance", instance_path("unit1d.json"), "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert "t0" in json.loads(target.read_text())


def test_module_entry_point(instance_path):
    proc = subprocess.run(
        [sys.executable, "-m", "facecover", "solve", "--instance", instance_path("gap1d.json")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["v"] == pytest.approx([0.5], abs=1e-6)
