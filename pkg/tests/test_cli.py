import json
import random
import subprocess
import sys

import pytest

from idealtri.cli import run
from idealtri.pachner import TWO_THREE, Move, apply
from idealtri.triangulation import serialize

import oracles

FIG8 = str(oracles.FIXTURES / "figure_eight.tri")
SIBLING = str(oracles.FIXTURES / "sibling.tri")
GIESEKING = str(oracles.FIXTURES / "gieseking.tri")


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def call_json(capsys, *argv):
    code, out, err = call(capsys, *argv, "--json")
    return code, json.loads(out), err


@pytest.fixture
def expanded(tmp_path):
    T = oracles.fixture("figure_eight.tri")
    path = tmp_path / "fig8_expanded.tri"
    path.write_text(serialize(apply(T.with_shapes(None), Move(TWO_THREE, (0, 0)))))
    return str(path)


def test_validate(capsys):
    code, data, _ = call_json(capsys, "validate", FIG8)
    assert code == 0
    assert data["valid"] and data["orientable"] and data["cusp_count"] == 1 and data["tet_count"] == 2
    code, out, _ = call(capsys, "validate", GIESEKING)
    assert code == 2 and "orientable: False" in out and "not orientable" in out


def test_validate_bad_file(capsys, tmp_path):
    bad = tmp_path / "bad.tri"
    bad.write_text("tetrahedra 1\ngluing 0 0 -> 0 0124\n")
    code, _, err = call(capsys, "validate", str(bad))
    assert code == 1 and "line 2" in err
    code, _, err = call(capsys, "validate", str(tmp_path / "missing.tri"))
    assert code == 1 and "cannot read" in err


def test_usage_errors(capsys):
    assert call(capsys)[0] == 1
    assert call(capsys, "frobnicate")[0] == 1
    assert call(capsys, "systole", "--theta0", "auto")[0] == 1
    assert call(capsys, "systole", "--m", "2", "--file", FIG8, "--theta0", "auto")[0] == 1
    assert call(capsys, "systole", "--m", "2", "--theta0", "auto")[0] == 1
    assert call(capsys, "bounds", "--m1", "2")[0] == 1
    assert call(capsys, "bounds", "--m1", "2", "--m2", "2", "--theta0", "1.2")[0] == 1
    assert call(capsys, "moves", "apply", FIG8)[0] == 1
    assert call(capsys, "moves", "apply", FIG8, "--move", "{bad")[0] == 1
    assert call(capsys, "search", "sphere", FIG8)[0] == 1
    assert call(capsys, "search", "connect", FIG8)[0] == 1


def test_canon_deterministic(capsys):
    first = call(capsys, "canon", FIG8)
    second = call(capsys, "canon", FIG8)
    assert first == second and first[0] == 0
    assert len(first[1].strip().splitlines()) == 1


def test_canon_compare(capsys, tmp_path):
    R, _, _ = oracles.random_relabel(oracles.fixture("figure_eight.tri"), random.Random(0))
    path = tmp_path / "relabelled.tri"
    path.write_text(serialize(R))
    code, data, _ = call_json(capsys, "canon", FIG8, str(path))
    assert code == 0 and data["isomorphic"] and len(data["mapping"]["tets"]) == 2
    code, data, _ = call_json(capsys, "canon", FIG8, SIBLING)
    assert code == 2 and not data["isomorphic"]


def test_moves(capsys):
    code, data, _ = call_json(capsys, "moves", "list", FIG8)
    assert code == 0
    assert [m["kind"] for m in data["moves"]].count("2-3") == 4
    code, data, _ = call_json(capsys, "moves", "apply", FIG8, "--move", '{"kind":"2-3","face":[0,0]}')
    assert code == 0 and data["tet_count"] == 3 and data["inverse"]["kind"] == "3-2"
    code, _, err = call(capsys, "moves", "apply", FIG8, "--move", '{"kind":"3-2","edge":[0,0,1]}')
    assert code == 1 and "inapplicable" in err


def test_search_connect(capsys, expanded):
    code, out, _ = call(capsys, "search", "connect", FIG8, expanded, "--max-moves", "4")
    assert code == 0
    seq = json.loads(out)
    assert len(seq["moves"]) == 1 and seq["moves"][0]["kind"] == "2-3"
    assert set(seq) == {"moves", "start", "end"}


def test_search_negative_and_cap(capsys):
    code, data, _ = call_json(capsys, "search", "connect", FIG8, SIBLING, "--max-moves", "1", "--max-tets", "3")
    assert code == 2 and data == {"found": False, "reason": "no-path", "message": data["message"]}
    code, data, _ = call_json(capsys, "search", "connect", FIG8, SIBLING, "--max-states", "4")
    assert code == 3 and data["reason"] == "state-cap"
    code, _, _ = call(capsys, "search", "connect", FIG8, SIBLING, "--max-tets", "1")
    assert code == 1


def test_search_sphere(capsys):
    code, data, _ = call_json(capsys, "search", "sphere", FIG8, "--radius", "1", "--max-tets", "5")
    assert code == 0 and data["counts"]["0"] == 1 and not data["truncated"]
    code, data, _ = call_json(capsys, "search", "sphere", FIG8, "--radius", "3", "--max-states", "3")
    assert code == 3 and data["truncated"]


def test_bounds(capsys):
    code, data, _ = call_json(capsys, "bounds", "--m1", "2", "--m2", "2", "--theta0", "1.0471975512")
    assert code == 0
    fields = data["fields"]
    assert fields["N_simplified"]["mantissa"] == pytest.approx(3.98, abs=0.01)
    assert fields["N_simplified"]["exponent"] == 19
    assert all("reference" in entry for entry in fields.values())
    code, data, _ = call_json(capsys, "bounds", "--m1", "1", "--m2", "1", "--theta0", "1.0")
    assert code == 0 and fields and data["fields"]["N_simplified"]["value"] is None
    code, out, _ = call(capsys, "bounds", "--m1", "1", "--m2", "1", "--theta0", "1.0")
    assert "n/a" in out


def test_bounds_from_files(capsys):
    code, data, _ = call_json(capsys, "bounds", "--file", FIG8, "--file", FIG8)
    assert code == 0 and data["m"] == 4
    assert data["theta0"] == pytest.approx(3.141592653589793 / 3)
    code, _, _ = call(capsys, "bounds", "--file", SIBLING)
    assert code == 1  # no shapes to measure


def test_systole_acceptance(capsys):
    code, data, _ = call_json(capsys, "systole", "--file", FIG8, "--theta0", "auto")
    assert code == 0
    simple = data["s0_simplified"]["value"]
    assert simple == pytest.approx(1.32e-4, rel=0.01)
    assert data["s0_exact"]["value"] >= simple
    code, out, _ = call(capsys, "systole", "--file", FIG8, "--theta0", "auto")
    assert "s0_simplified: 1.32" in out


def test_systole_explicit_theta(capsys):
    assert call(capsys, "systole", "--file", FIG8, "--theta0", "1.0")[0] == 0
    code, _, err = call(capsys, "systole", "--file", FIG8, "--theta0", "1.05")
    assert code == 2 and "exceeds" in err
    assert call(capsys, "systole", "--m", "2", "--theta0", "nan")[0] == 1
    assert call(capsys, "systole", "--m", "2", "--theta0", "0.5", "--epsilon", "0.1")[0] == 1


def test_cusp(capsys):
    code, data, _ = call_json(capsys, "cusp", FIG8)
    assert code == 0
    assert set(data) >= {"cusp", "lattice", "area", "shortest", "edge_lengths"}
    assert data["shortest"] == 1.0 and data["triangle_count"] == 8
    assert len(data["lattice"]) == 4
    assert call(capsys, "cusp", SIBLING)[0] == 1  # no shapes
    assert call(capsys, "cusp", FIG8, "--cusp", "3")[0] == 1


def test_thickness(capsys):
    code, data, _ = call_json(capsys, "thickness", FIG8, "--theta0", "1.0")
    assert code == 0 and data["is_thick"] and data["gluing_residual"] < 1e-9
    assert call(capsys, "thickness", FIG8, "--theta0", "1.2")[0] == 1
    assert call(capsys, "thickness", SIBLING, "--theta0", "1.0")[0] == 1


def test_thickness_not_thick(capsys, tmp_path):
    T = oracles.fixture("figure_eight.tri").with_shapes([1j, 1j])
    path = tmp_path / "square.tri"
    path.write_text(serialize(T))
    code, data, _ = call_json(capsys, "thickness", str(path), "--theta0", "0.8")
    assert code == 2 and not data["is_thick"]


@pytest.mark.parametrize(
    "argv",
    [
        ["validate", FIG8],
        ["canon", FIG8],
        ["moves", "list", FIG8],
        ["search", "sphere", FIG8, "--radius", "1", "--max-tets", "3"],
        ["bounds", "--m1", "2", "--m2", "2", "--theta0", "1.0471975512"],
        ["systole", "--file", FIG8, "--theta0", "auto"],
        ["cusp", FIG8],
        ["thickness", FIG8, "--theta0", "1.0"],
    ],
)
def test_every_subcommand_json_is_stable(capsys, argv):
    first = call(capsys, *argv, "--json")
    second = call(capsys, *argv, "--json")
    assert first == second
    json.loads(first[1])


def test_module_entry_point_byte_identical():
    cmd = [sys.executable, "-m", "idealtri", "bounds", "--m1", "2", "--m2", "2", "--theta0", "1.0471975512"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
