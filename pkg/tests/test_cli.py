import io
import json
import subprocess
import sys

import numpy as np
import pytest

from polyform import cli
from polyform import surface as S

SYM_ARC = np.arccosh(np.cosh(1) / (np.cosh(1) - 1))


def corpus_file(tmp_path, name, **changes):
    doc = json.loads(S.corpus_text(name))
    doc.update(changes)
    for k in [k for k, v in changes.items() if v is None]:
        doc.pop(k)
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(doc))
    return str(p)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def run(*argv):
    out = io.StringIO()
    code = cli.main([str(a) for a in argv], out=out)
    text = out.getvalue()
    return code, (json.loads(text) if text.strip() else None)


# -------------------------------------------------------------------- check

def test_check_tetrahedron(tmp_path):
    code, doc = run("check", corpus_file(tmp_path, "tetrahedron"))
    assert code == 0 and doc["valid"]
    assert doc["euler_characteristic"] == 2 and doc["num_vertices"] == 4


def test_check_ideal_surface(tmp_path):
    code, doc = run("check", corpus_file(tmp_path, "genus2_one_boundary"))
    assert code == 0 and doc["kind"] == "ideal" and doc["boundary_components"] == 1


def test_check_edge_multiplicity(tmp_path):
    doc = json.loads(S.corpus_text("tetrahedron"))
    doc["faces"][1]["edges"] = [3, 3, 4]
    code, out = run("check", write(tmp_path, "bad.json", doc))
    assert code == 1 and not out["valid"]
    assert "edge 3" in out["error"]


def test_check_invalid_metric(tmp_path):
    code, doc = run("check", corpus_file(tmp_path, "tetrahedron", lengths=[1, 1, 1, 1, 1, 3.5]))
    assert code == 1 and not doc["metric"]["valid"]


def test_missing_file_is_usage_error(tmp_path):
    code, doc = run("check", tmp_path / "nope.json")
    assert code == 2 and not doc["ok"]


def test_unparseable_file(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{")
    assert run("check", p)[0] == 2


def test_unknown_flag_and_command():
    assert run("check", "--bogus", "x")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run()[0] == 2


# --------------------------------------------------------------- invariants

def test_invariants_phi(tmp_path):
    code, doc = run("invariants", corpus_file(tmp_path, "tetrahedron"), "--invariant", "phi")
    assert code == 0
    np.testing.assert_allclose(doc["values"], -np.pi / 3, atol=1e-12)
    assert sum(doc["values"]) == pytest.approx(-2 * np.pi)
    assert max(doc["identities"].values()) < 1e-10


def test_invariants_psi_ideal(tmp_path):
    code, doc = run("invariants", corpus_file(tmp_path, "one_holed_torus"), "--invariant", "psi")
    assert code == 0
    np.testing.assert_allclose(doc["values"], SYM_ARC, atol=1e-12)
    assert "identities" not in doc


def test_invariants_need_a_metric(tmp_path):
    code, doc = run("invariants", corpus_file(tmp_path, "torus", lengths=None), "--invariant", "phi")
    assert code == 1 and "metric missing" in doc["error"]


def test_invariants_k_from_radii(tmp_path):
    path = corpus_file(tmp_path, "tetrahedron", lengths=None, radii=[0.5] * 4, geometry="hyperbolic")
    code, doc = run("invariants", path, "--invariant", "k")
    assert code == 0
    np.testing.assert_allclose(doc["values"], -1.9560, atol=1e-4)


# -------------------------------------------------------------------- solve

def test_solve_hyperbolic_packing(tmp_path):
    path = corpus_file(tmp_path, "tetrahedron", lengths=None, radii=[1.0] * 4, geometry="hyperbolic")
    k = run("invariants", corpus_file(tmp_path, "tetrahedron", lengths=None, radii=[0.5] * 4,
                                      geometry="hyperbolic"), "--invariant", "k")[1]["values"]
    target = write(tmp_path, "t.json", {"kind": "k_circle_packing", "lambda": 0.0, "target": k})
    out = tmp_path / "sol.json"
    code, doc = run("solve", path, "--invariant", "k", "--target", target, "--output", out)
    assert code == 0 and doc["status"] == "Converged"
    np.testing.assert_allclose(doc["metric"]["radii"], 0.5, atol=1e-8)
    assert S.parse_surface(out.read_text()).radii == pytest.approx((0.5,) * 4, abs=1e-8)


def test_solve_accepts_invariants_report_as_target(tmp_path):
    surf = corpus_file(tmp_path, "octahedron")
    _, inv = run("invariants", surf, "--invariant", "phi", "--lambda", -1)
    target = write(tmp_path, "inv.json", inv)
    init = write(tmp_path, "init.json", {"lengths": list(np.pi / 2 * np.linspace(0.9, 1.1, 12))})
    code, doc = run("solve", surf, "--invariant", "phi", "--lambda", -1, "--target", target, "--init", init)
    assert code == 0
    np.testing.assert_allclose(doc["metric"]["lengths"], np.pi / 2, atol=1e-8)


def test_solve_lambda_mismatch_is_config_error(tmp_path):
    target = write(tmp_path, "t.json", {"lambda": 1.0, "target": [0.0] * 6})
    code, _ = run("solve", corpus_file(tmp_path, "tetrahedron"), "--invariant", "phi", "--lambda", -1,
                  "--target", target)
    assert code == 2


def test_solve_wrong_target_size(tmp_path):
    target = write(tmp_path, "t.json", {"target": [0.0] * 5})
    code, _ = run("solve", corpus_file(tmp_path, "tetrahedron"), "--invariant", "phi", "--lambda", -1,
                  "--target", target)
    assert code == 2


# -------------------------------------------------------------------- teich

def test_teich_symmetric(tmp_path):
    target = write(tmp_path, "z.json", {"target": [1, 1, 1]})
    code, doc = run("teich", corpus_file(tmp_path, "one_holed_torus"), "--target", target)
    assert code == 0 and doc["inside_polytope"]
    np.testing.assert_allclose(doc["metric"]["lengths"], SYM_ARC, atol=1e-8)


def test_teich_outside(tmp_path):
    target = write(tmp_path, "z.json", [1, -0.6, -0.6])
    code, doc = run("teich", corpus_file(tmp_path, "one_holed_torus"), "--target", target)
    assert code == 1
    assert doc["status"] == "Degenerated" and not doc["inside_polytope"]
    assert sorted(doc["witness_cycle"]) == [1, 2]
    assert doc["witness_sum"] == pytest.approx(-1.2)


def test_teich_needs_ideal_surface(tmp_path):
    target = write(tmp_path, "z.json", [1] * 6)
    assert run("teich", corpus_file(tmp_path, "tetrahedron"), "--target", target)[0] == 2


# ------------------------------------------------------------------- verify

def test_verify_single_suite():
    code, doc = run("verify", "--suite", "legendre", "--samples", 20, "--seed", 7)
    assert code == 0 and doc["ok"]
    assert doc["suites"][0]["suite"] == "legendre"


def test_verify_zero_samples_passes_vacuously():
    code, doc = run("verify", "--samples", 0)
    assert code == 0
    assert all(s["passed"] and s["notes"] for s in doc["suites"])


def test_verify_unknown_suite():
    assert run("verify", "--suite", "nonsense")[0] == 2


# ----------------------------------------------------------------- format

def test_float_format_round_trips():
    x = 0.1 + 0.2
    text = cli.dumps({"a": x, "b": 2.0, "c": [1, np.float64(np.pi)]})
    back = json.loads(text)
    assert back["a"] == x and back["c"][1] == np.pi
    assert '"b": 2.0' in text


def test_subprocess_output_is_byte_stable(tmp_path):
    surf = corpus_file(tmp_path, "octahedron")
    cmd = [sys.executable, "-m", "polyform", "invariants", surf, "--invariant", "phi", "--lambda", "0.5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["ok"]
