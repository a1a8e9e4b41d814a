"""The ``polyform`` command: JSON on stdout, a short human summary on stderr.

Exit codes: 0 success, 1 mathematical failure, 2 usage or I/O failure.
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import (ConfigError, IndexMismatch, InvalidCombinatorics, InvalidMetric, ParseError,
                     PolyformError)
from .invariants import k_lambda, linear_identities_report, phi_lambda, psi_lambda
from .membership import membership_predicates
from .solver import SolverConfig, TargetSpec, solve, solve_teich
from .surface import (boundary_components, euler_characteristic, packing_lengths, parse_surface,
                      serialize_surface, validate_metric, with_metric)
from .trig import E2, H2, S2, GeometryKind
from .verify import SUITES, run_suite

log = logging.getLogger("polyform")

EXIT_OK, EXIT_MATH, EXIT_USAGE = 0, 1, 2
INVARIANT_KINDS = {"k": "k_circle_packing", "phi": "phi_closed", "psi": "psi_closed"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ output

def _format(obj, indent=0):
    """Deterministic JSON with 17-significant-digit floats."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return format(x, ".17g") if x != int(x) or abs(x) >= 1e17 else format(x, ".1f")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_format(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(_format(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _format(v, indent + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    return _format(obj) + "\n"


def _emit(obj, out):
    out.write(dumps(obj))


def _fail(out, code, message, **extra):
    _emit({"ok": False, "error": message, **extra}, out)
    log.error(message)
    return code


# ------------------------------------------------------------------- input

def _read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_surface(path):
    return parse_surface(_read_text(path))


def _read_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _vector(doc, key, path):
    vals = doc.get(key) if isinstance(doc, dict) else doc
    if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
        raise UsageError(f"{path}: expected a list of numbers" + (f" under '{key}'" if isinstance(doc, dict) else ""))
    return np.array(vals, dtype=float)


def _geometry(args, s):
    if getattr(args, "geometry", None):
        return GeometryKind.parse(args.geometry)
    return s.geometry


# ---------------------------------------------------------------- commands

def run_check(args, out):
    try:
        s = _read_surface(args.surface)
    except InvalidCombinatorics as exc:
        return _fail(out, EXIT_MATH, str(exc), valid=False)
    report = {"ok": True, "kind": s.kind, "num_edges": s.num_edges, "num_faces": len(s.cells),
              "euler_characteristic": euler_characteristic(s)}
    if s.kind == "closed":
        report["num_vertices"] = s.num_vertices
    else:
        report["boundary_components"] = boundary_components(s)
    metric = None
    if s.lengths is not None or getattr(s, "radii", None) is not None:
        verdict = validate_metric(s, lengths=s.lengths, radii=getattr(s, "radii", None))
        metric = {"valid": verdict.valid,
                  "violations": [{"face": f, "reasons": list(r)} for f, r in verdict.violations]}
    report["metric"] = metric
    report["valid"] = metric is None or metric["valid"]
    report["ok"] = report["valid"]
    _emit(report, out)
    log.info("%s: %s", args.surface, "valid" if report["valid"] else "invalid metric")
    return EXIT_OK if report["valid"] else EXIT_MATH


def run_invariants(args, out):
    s = _read_surface(args.surface)
    g = _geometry(args, s)
    lam = args.lam
    lengths = s.lengths
    if lengths is None and s.radii is not None:
        lengths = packing_lengths(s, s.radii)
    if lengths is None:
        return _fail(out, EXIT_MATH, "metric missing")
    fn = {"phi": phi_lambda, "psi": psi_lambda, "k": k_lambda}[args.invariant]
    vec = fn(s, lengths, lam, g)
    report = {"ok": True, "invariant": args.invariant, "lambda": lam, "values": vec.values,
              "flags": list(vec.flags)}
    if s.kind == "closed":
        report["identities"] = linear_identities_report(s, lengths, g).residuals
    _emit(report, out)
    log.info("%s %s_%g: %d values", args.surface, args.invariant, lam, len(vec.values))
    return EXIT_OK


def _initial(s, kind, g, args):
    if args.init:
        doc = _read_json(args.init)
        key = "radii" if kind == "k_circle_packing" else "lengths"
        return _vector(doc, key, args.init)
    if kind == "k_circle_packing":
        return np.array(s.radii) if s.radii is not None else np.ones(s.num_vertices)
    if s.lengths is not None and validate_metric(s, s.lengths, geometry=g).valid:
        return np.array(s.lengths)
    return np.full(s.num_edges, np.pi / 2 if g is S2 else 1.0)


def _report_out(rep, s, args, out):
    doc = {"ok": rep.converged}
    doc.update(rep.as_dict())
    key = "radii" if rep.solution_kind == "radii" else "lengths"
    doc["metric"] = {key: rep.solution}
    if args.output:
        sol = with_metric(s, radii=rep.solution) if key == "radii" else with_metric(s, lengths=rep.solution)
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(serialize_surface(sol))
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc.strerror}") from None
        doc["metric_file"] = args.output
    _emit(doc, out)
    log.info("%s after %d iterations (gradient %.3g)", rep.status, rep.iterations, rep.grad_norm)
    return EXIT_OK if rep.converged else EXIT_MATH


def run_solve(args, out):
    s = _read_surface(args.surface)
    doc = _read_json(args.target)
    kind = INVARIANT_KINDS[args.invariant]
    if s.kind == "ideal":
        if args.invariant != "psi":
            raise ConfigError("ideal surfaces take psi targets")
        kind = "psi_ideal"
    lam = args.lam
    normalization = "none"
    if isinstance(doc, dict):
        if "kind" in doc and doc["kind"] != kind:
            raise ConfigError(f"target kind {doc['kind']!r} disagrees with --invariant ({kind})")
        if "lambda" in doc and float(doc["lambda"]) != lam:
            raise ConfigError(f"target lambda {doc['lambda']} disagrees with --lambda {lam}")
        normalization = doc.get("normalization", "none")
    # an invariants report can be fed back in as its own target
    key = "values" if isinstance(doc, dict) and "target" not in doc and "values" in doc else "target"
    target = _vector(doc, key, args.target)
    g = _geometry(args, s) if s.kind == "closed" else H2
    if g is None:
        raise ConfigError("no geometry: pass --geometry or set it in the surface file")
    if "normalization" not in (doc if isinstance(doc, dict) else {}):
        euclid = s.kind == "closed" and g is E2 and kind in ("k_circle_packing", "phi_closed")
        normalization = "euclidean_scale_fixed" if euclid else "none"
    spec = TargetSpec(kind, g, lam, target, normalization)
    try:
        spec.check_size(s)
    except IndexMismatch as exc:
        raise ConfigError(str(exc)) from None
    init = _initial(s, kind, g, args) if s.kind == "closed" else (
        _vector(_read_json(args.init), "lengths", args.init) if args.init else None)
    rep = solve(s, spec, init, SolverConfig(seed=args.seed))
    return _report_out(rep, s, args, out)


def run_teich(args, out):
    s = _read_surface(args.surface)
    if s.kind != "ideal":
        raise ConfigError("teich needs an ideal surface")
    z = _vector(_read_json(args.target), "target", args.target)
    if z.shape != (s.num_edges,):
        raise ConfigError(f"target needs {s.num_edges} entries, got {z.size}")
    verdict = membership_predicates(s, z, "teich_polytope")
    init = _vector(_read_json(args.init), "lengths", args.init) if args.init else None
    rep = solve_teich(s, args.lam, z, init, SolverConfig(seed=args.seed))
    rep.extra["inside_polytope"] = verdict.inside
    return _report_out(rep, s, args, out)


def run_verify(args, out):
    names = [args.suite] if args.suite else list(SUITES)
    if args.suite and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    if args.samples < 0:
        raise UsageError("--samples must be non-negative")
    if args.samples == 0:
        log.warning("--samples 0: every suite passes vacuously")
    results = [run_suite(k, args.samples, args.seed) for k in names]
    for r in results:
        log.info("%-20s %s (%.1fs)", r.name, "pass" if r.passed else "FAIL", r.seconds)
    ok = all(r.passed for r in results)
    # timings vary between runs, so they go to stderr only
    _emit({"ok": ok, "samples": args.samples, "seed": args.seed,
           "suites": [{"suite": r.name, "passed": r.passed, "metrics": r.metrics, "notes": r.notes}
                      for r in results]}, out)
    return EXIT_OK if ok else EXIT_MATH


# ------------------------------------------------------------------ parser

def build_parser():
    p = _Parser(prog="polyform", description="Polyhedral metrics, their edge invariants and variational solvers.")
    p.add_argument("--version", action="version", version=f"polyform {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="validate a surface file and its metric")
    c.add_argument("surface")
    c.set_defaults(run=run_check)

    i = sub.add_parser("invariants", help="compute phi, psi or k of the stored metric")
    i.add_argument("surface")
    i.add_argument("--invariant", choices=("phi", "psi", "k"), required=True)
    i.add_argument("--lambda", dest="lam", type=float, default=0.0)
    i.add_argument("--geometry", choices=("euclidean", "spherical", "hyperbolic"))
    i.set_defaults(run=run_invariants)

    s = sub.add_parser("solve", help="recover a metric from prescribed invariants")
    s.add_argument("surface")
    s.add_argument("--target", required=True)
    s.add_argument("--invariant", choices=("phi", "psi", "k"), required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=0.0)
    s.add_argument("--init")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--geometry", choices=("euclidean", "spherical", "hyperbolic"))
    s.add_argument("--output", help="write the solution metric as a surface file")
    s.set_defaults(run=run_solve)

    t = sub.add_parser("teich", help="solve for ideal-surface lengths with prescribed psi")
    t.add_argument("surface")
    t.add_argument("--target", required=True)
    t.add_argument("--lambda", dest="lam", type=float, default=0.0)
    t.add_argument("--init")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--output")
    t.set_defaults(run=run_teich)

    v = sub.add_parser("verify", help="run the property suites")
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--suite")
    v.set_defaults(run=run_verify)
    return p


def _setup_logging():
    level = os.environ.get("POLYFORM_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("polyform: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(levels.get(level, logging.WARNING))
    log.propagate = False


def main(argv=None, out=None):
    out = out or sys.stdout
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(out, EXIT_USAGE, f"usage: {exc}")
    except SystemExit as exc:       # --help and --version
        return int(exc.code or 0)
    try:
        return args.run(args, out)
    except (UsageError, ParseError, ConfigError) as exc:
        return _fail(out, EXIT_USAGE, str(exc))
    except (InvalidCombinatorics, InvalidMetric, IndexMismatch) as exc:
        return _fail(out, EXIT_MATH, str(exc))
    except PolyformError as exc:
        return _fail(out, EXIT_MATH, f"{type(exc).__name__}: {exc}")


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
