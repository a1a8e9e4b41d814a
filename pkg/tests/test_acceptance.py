"""End-to-end acceptance criteria, one test per criterion.

Each test prints ``criterion N: PASS|FAIL`` and the lines are repeated in the
terminal summary.  Suites run at their full sizes (200 samples, seed 0).
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import record_criterion
from polyform import surface as S
from polyform.trig import E2
from polyform.verify import run_suite

SAMPLES = 200

pytestmark = pytest.mark.slow


def _nested_max(metrics, key):
    return max(m[key] for m in metrics.values() if isinstance(m, dict))


def _check(number, result, conditions):
    ok = result.passed and all(conditions.values())
    bad = [k for k, v in conditions.items() if not v]
    detail = f"{result.seconds:.1f}s" + (f"; failed: {', '.join(bad)}" if bad else "")
    record_criterion(number, ok, detail)
    assert ok, (bad, result.metrics)


def test_criterion_01_derivative_laws():
    r = run_suite("derivative_laws", SAMPLES)
    _check(1, r, {"relative error < 1e-6": max(r.metrics.values()) < 1e-6,
                  "runtime < 10 s": r.seconds < 10})


def test_criterion_02_index_independence():
    r = run_suite("index_independence", SAMPLES)
    _check(2, r, {"spread < 1e-12": max(r.metrics.values()) < 1e-12})


def test_criterion_03_closedness():
    r = run_suite("closedness", SAMPLES)
    _check(3, r, {"mixed partials < 1e-8": r.metrics["mixed_partial_asymmetry"] < 1e-8,
                  "two-path < 1e-8": r.metrics["two_path_discrepancy"] < 1e-8,
                  "cells tested": r.metrics["two_path_cells"] > 0})


def test_criterion_04_signatures():
    r = run_suite("signatures", SAMPLES)
    _check(4, r, {"no mismatches": r.metrics["mismatches"] == 0,
                  "constant across lambda": r.metrics["lambda_inconsistent"] == 0,
                  "null residual < 1e-8": r.metrics["euclidean_null_residual"] < 1e-8})


def test_criterion_05_legendre():
    r = run_suite("legendre", SAMPLES)
    spreads = [v for k, v in r.metrics.items() if k.startswith("spread/")]
    _check(5, r, {"four lambdas": len(spreads) == 4, "spread < 1e-6": max(spreads) < 1e-6})


def test_criterion_06_convexity():
    r = run_suite("convexity", SAMPLES)
    fails = [v for k, v in r.metrics.items() if k.startswith("midpoint_failures/")]
    _check(6, r, {"zero midpoint failures": sum(fails) == 0,
                  "cases a-d covered": {k.split("/")[1][0] for k in r.metrics if "/" in k} >= set("abcd"),
                  "hessian fd < 1e-6": r.metrics["boundary_hessian_fd"] < 1e-6})


def test_criterion_07_worked_values():
    r = run_suite("worked_values", SAMPLES)
    _check(7, r, {"all < 1e-10": max(r.metrics.values()) < 1e-10})


def test_criterion_08_round_trips():
    r = run_suite("round_trips", SAMPLES)
    cases = {k: v for k, v in r.metrics.items() if isinstance(v, dict)}
    _check(8, r, {"no failures": _nested_max(cases, "failures") == 0,
                  "recovery < 1e-8": _nested_max(cases, "worst_error") < 1e-8,
                  "runtime < 60 s": r.seconds < 60})


def test_criterion_09_teich_polytope():
    r = run_suite("teich_polytope", SAMPLES)
    interior = [v for k, v in r.metrics.items() if k.startswith("interior_failures/")]
    _check(9, r, {"four lambdas converge": len(interior) == 4 and sum(interior) == 0,
                  "exterior degenerate with witness": r.metrics["exterior_failures"] == 0,
                  "symmetric < 1e-8": r.metrics["symmetric_error"] < 1e-8})


def test_criterion_10_angle_structures():
    r = run_suite("angle_structures", SAMPLES)
    _check(10, r, {"no failures": _nested_max(r.metrics, "failures") == 0,
                   "mismatch < 1e-8": _nested_max(r.metrics, "mismatch") < 1e-8})


def test_criterion_11_membership():
    r = run_suite("membership", SAMPLES)
    exact = all(m["agree"] == m["trials"] for m in r.metrics.values())
    names = {k.split("/")[0] for k in r.metrics}
    _check(11, r, {"exact agreement": exact, "all corpus surfaces": names >= set(S.CORPUS) - {"icosahedron"}})


# ------------------------------------------------------------------ CLI

PIPELINES = {
    # surface: (invariant, lambda)
    "tetrahedron": ("phi", -1.0),
    "octahedron": ("phi", -1.0),
    "icosahedron": ("phi", -1.0),
    "torus": ("phi", -1.0),
    "one_holed_torus": ("psi", 0.0),
    "genus2_one_boundary": ("psi", 0.0),
}


def _cli(*args):
    p = subprocess.run([sys.executable, "-m", "polyform", *map(str, args)], capture_output=True)
    return p.returncode, p.stdout


def _pipeline(tmp, name):
    invariant, lam = PIPELINES[name]
    surf = tmp / f"{name}.json"
    surf.write_text(S.corpus_text(name))
    outputs, codes = [], []
    code, out = _cli("check", surf)
    codes.append(code)
    outputs.append(out)
    code, out = _cli("invariants", surf, "--invariant", invariant, "--lambda", lam)
    codes.append(code)
    outputs.append(out)
    target = tmp / f"{name}.target.json"
    target.write_bytes(out)
    base = np.array(S.load_corpus(name).lengths)
    init = tmp / f"{name}.init.json"
    init.write_text(json.dumps({"lengths": list(base * np.linspace(0.97, 1.03, base.size))}))
    code, out = _cli("solve", surf, "--invariant", invariant, "--lambda", lam, "--target", target,
                     "--init", init)
    codes.append(code)
    outputs.append(out)
    sol = np.array(json.loads(out)["metric"]["lengths"]) if code == 0 else None
    return codes, outputs, sol


def test_criterion_12_cli_pipeline(tmp_path):
    problems = []
    for name in PIPELINES:
        first, second = _pipeline(tmp_path, name), _pipeline(tmp_path, name)
        codes, outs, sol = first
        if codes != [0, 0, 0]:
            problems.append(f"{name}: exit codes {codes}")
            continue
        if outs != second[1]:
            problems.append(f"{name}: output differs between runs")
        base = np.array(S.load_corpus(name).lengths)
        # Euclidean solutions are determined up to scale
        scale = sol[0] / base[0] if S.load_corpus(name).geometry is E2 else 1.0
        if np.max(np.abs(sol - scale * base)) > 1e-8:
            problems.append(f"{name}: solve did not recover the stored metric")
    record_criterion(12, not problems, "; ".join(problems) or f"{len(PIPELINES)} surfaces, two runs each")
    assert not problems
