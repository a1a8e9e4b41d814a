"""Property-based verification suites with independent numerical oracles.

Each suite draws its random numbers from a generator seeded by
(seed, suite name), so suites can run in any order or in parallel.
"""

import itertools
import time
import warnings
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import forms, invariants, trig
from .errors import DomainError, NearDegenerate, PathExitsDomain
from .membership import membership_predicates
from .sampling import sample_cells
from .solver import (SolverConfig, TargetSpec, solve_angle_structure, solve_circle_packing, solve_phi_closed,
                     solve_psi_closed, solve_teich)
from .surface import _slots, load_corpus, validate_metric
from .trig import E2, H2, HEX, S2

GEOMETRIES = (E2, S2, H2, HEX)
LAMBDA_GRID = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0)
FD_STEP = 1e-6


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    def as_dict(self):
        return {"suite": self.name, "passed": self.passed, "metrics": self.metrics,
                "notes": self.notes, "seconds": self.seconds}


def suite_rng(seed, name):
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def _rel(a, b):
    """max |a - b| / max |b| over the trailing two axes, worst case over samples."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    num = np.abs(a - b).reshape(len(a), -1).max(axis=1)
    den = np.abs(b).reshape(len(b), -1).max(axis=1)
    return float(np.max(num / np.maximum(den, 1e-300)))


def central_jacobian(fn, x, h=FD_STEP, richardson=False):
    """∂fn_i/∂x_j for batches of triples by central differences.

    With ``richardson`` the step is relative to each coordinate and two step
    sizes are combined to cancel the leading error term.
    """
    x = np.asarray(x, dtype=float)

    def once(step):
        cols = []
        for j in range(x.shape[-1]):
            d = np.zeros_like(x)
            d[..., j] = step[..., j]
            cols.append((fn(x + d) - fn(x - d)) / (2 * step[..., j, None]))
        return np.stack(cols, axis=-1)

    if not richardson:
        return once(np.full_like(x, h))
    step = h * np.maximum(np.abs(x), 1e-3)
    return (4 * once(0.5 * step) - once(step)) / 3


# ------------------------------------------------------------ derivative laws

def _second_kind_fd(g, fixed, h=FD_STEP):
    def at(f):
        x, y = trig.second_kind_cell(g, f)
        return y[0], x[1]

    out = np.zeros(5)
    for slot, picks in ((0, ((0, 0), (3, 1))), (1, ((2, 1),)), (2, ((1, 0), (4, 1)))):
        d = np.zeros(3)
        d[slot] = h
        plus, minus = at(fixed + d), at(fixed - d)
        for k, comp in picks:
            out[k] = (plus[comp] - minus[comp]) / (2 * h)
    return out


def derivative_laws(n, rng):
    m = {}
    for g in GEOMETRIES:
        tag = g.value
        l = sample_cells(g, "lengths", n, rng)
        th = trig.angles_from_lengths(g, l)
        jac = trig.jacobian_angles_wrt_lengths(g, l).jac
        fd = central_jacobian(lambda x: trig.angles_from_lengths(g, x, check=False), l)
        m[f"{tag}/angles_wrt_lengths"] = _rel(jac, fd)
        s = np.sinh(th) if g is HEX else np.sin(th)
        c = np.cosh(th) if g is HEX else np.cos(th)
        errs = []
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            errs.append(np.abs(fd[:, i, j] / fd[:, j, i] - s[:, i] / s[:, j]) / (s[:, i] / s[:, j]))
            errs.append(np.abs(fd[:, i, j] / fd[:, i, i] + c[:, k]) / np.maximum(np.abs(c[:, k]), 1.0))
        m[f"{tag}/ratio_identities"] = float(np.max(errs))
        if g is not E2:
            a = sample_cells(g, "angles", n, rng)
            jl = trig.jacobian_lengths_wrt_angles(g, a).jac
            fd = central_jacobian(lambda x: trig.lengths_from_angles(g, x, check=False), a)
            m[f"{tag}/lengths_wrt_angles"] = _rel(jl, fd)
            back = trig.angles_from_lengths(g, trig.lengths_from_angles(g, a))
            m[f"{tag}/angle_round_trip"] = float(np.max(np.abs(back - a)))
        kinds = ["length-radius"] + ([] if g is E2 else ["angle-radius"])
        for kind in kinds:
            r = sample_cells(g, kind, n, rng)
            jr = trig.radius_jacobian(g, r, kind).jac
            fd = central_jacobian(lambda x: trig.radius_outputs(g, x, kind), r)
            m[f"{tag}/{kind}_jacobian"] = _rel(jr, fd)
            ratio = trig.radius_ratio(g, r, kind)
            mask = ~np.eye(3, dtype=bool)
            fd_ratio = fd / np.swapaxes(fd, -1, -2)
            m[f"{tag}/{kind}_tangent_ratio"] = float(np.max(np.abs(fd_ratio[:, mask] - ratio[:, mask])
                                                           / np.abs(ratio[:, mask])))
        worst = 0.0
        for x in l[: max(1, n // 4)]:
            y = trig.angles_from_lengths(g, x)
            fixed = np.array([y[1], y[2], x[0]]) if g is HEX else np.array([x[1], x[2], y[0]])
            try:
                pack = trig.second_kind_derivatives(g, fixed).as_array()
                fd = _second_kind_fd(g, fixed)
            except DomainError:
                continue
            worst = max(worst, float(np.max(np.abs(pack - fd)) / max(np.max(np.abs(pack)), 1e-300)))
        m[f"{tag}/second_kind"] = worst
    tol = {k: (1e-10 if k.endswith("round_trip") else 1e-6) for k in m}
    return all(v < tol[k] for k, v in m.items()), m


def index_independence(n, rng):
    m = {}
    for g in GEOMETRIES:
        l = sample_cells(g, "lengths", n, rng)
        a = np.stack([trig.gram_quantity(g, l, i) for i in range(3)], axis=-1)
        m[f"{g.value}/gram"] = float(np.max(np.ptp(a, axis=-1) / np.abs(a).max(axis=-1)))
        kinds = ["length-radius"] + ([] if g is E2 else ["angle-radius"])
        for kind in kinds:
            r = sample_cells(g, kind, n, rng)
            t = np.stack([trig.tangent_law(g, r, kind, i) for i in range(3)], axis=-1)
            m[f"{g.value}/{kind}_tangent_law"] = float(np.max(np.ptp(t, axis=-1) / np.abs(t).max(axis=-1)))
    return all(v < 1e-12 for v in m.values()), m


# ---------------------------------------------------------------- form families

def _nearby(family, x, rng, spread):
    """A second valid cell near each row of x."""
    out = x.copy()
    todo = np.ones(len(x), dtype=bool)
    s = spread
    for _ in range(60):
        trial = x * (1 + s * rng.uniform(-1, 1, x.shape)) if family.natural != "angle-radius" \
            else x + s * rng.uniform(-1, 1, x.shape)
        ok = forms.valid_natural(family, trial) & todo
        out[ok] = trial[ok]
        todo &= ~ok
        if not todo.any():
            break
        s *= 0.7
    return out, ~todo


def _chart_point_valid(fam, u):
    """Rows of u whose chart preimage is a valid cell."""
    lo, hi = fam.chart.image()
    good = np.all((u > lo) & (u < hi) & np.isfinite(u), axis=-1)
    if good.any():
        try:
            good[good] = forms.valid_natural(fam, fam.chart.x(u[good]))
        except DomainError:
            good[:] = False
    return good


def closedness(n, rng):
    m = {}
    worst_asym, worst_path = 0.0, 0.0
    tested, families = 0, 0
    for lam in LAMBDA_GRID:
        for fam in forms.families(lam):
            x = sample_cells(fam.geometry, fam.natural, n, rng)

            def omega(z):
                return forms.form_coefficients(fam, z) * fam.chart.gprime(z)

            fd = central_jacobian(omega, x, h=1e-4, richardson=True)
            scale = np.abs(fd).reshape(n, -1).max(axis=1)
            asym = np.abs(fd - np.swapaxes(fd, -1, -2)).reshape(n, -1).max(axis=1) / scale
            worst_asym = max(worst_asym, float(asym.max()))
            families += 1
            y, ok = _nearby(fam, x, rng, 0.05)
            u0, u1 = forms.u_from_natural(fam, x[ok]), forms.u_from_natural(fam, y[ok])
            bump = 0.25 * np.roll(u1 - u0, 1, axis=-1)
            mid = 0.5 * (u0 + u1) + bump
            probe = np.linspace(0.0, 1.0, 17)
            good = np.ones(len(mid), dtype=bool)
            for a, b in ((u0, u1), (u0, mid), (mid, u1)):
                for s in probe:
                    good &= _chart_point_valid(fam, a + s * (b - a))
            tested += int(good.sum())
            if not good.any():
                continue
            u0, u1, mid = u0[good], u1[good], mid[good]
            direct = forms.line_integral(fam, u0, u1)
            bent = forms.line_integral(fam, u0, mid) + forms.line_integral(fam, mid, u1)
            gap = float(np.max(np.abs(direct - bent)))
            if gap > worst_path:
                worst_path, m["two_path_worst_family"] = gap, str(fam)
    m["mixed_partial_asymmetry"] = worst_asym
    m["two_path_discrepancy"] = worst_path
    m["two_path_cells"] = tested
    # a path test that silently skips most cells would pass vacuously
    coverage = tested >= 0.5 * n * families
    return worst_asym < 1e-8 and worst_path < 1e-8 and coverage, m


def signatures(n, rng):
    m = {"mismatches": 0, "lambda_inconsistent": 0}
    worst_null = 0.0
    for base in forms.families(0.0):
        x = sample_cells(base.geometry, base.natural, n, rng)
        sigs = []
        for lam in LAMBDA_GRID:
            fam = base.with_lambda(lam)
            pos, zero, neg = forms.signature_of(forms.hessian_u(fam, x))
            sig = np.stack([pos, zero, neg], axis=-1)
            sigs.append(sig)
            want = fam.declared_signature
            if want is not None:
                m["mismatches"] += int(np.sum(np.any(sig != np.array(want), axis=-1)))
            if fam.geometry is E2:
                worst_null = max(worst_null, float(np.max(forms.null_vector_check(fam, x))))
        sigs = np.array(sigs)
        m["lambda_inconsistent"] += int(np.sum(np.any(sigs != sigs[0], axis=(0, 2))))
        m[f"signature/{base.family}/{base.geometry.value}/{base.natural}"] = list(map(int, sigs[0, 0]))
    m["euclidean_null_residual"] = worst_null
    ok = m["mismatches"] == 0 and m["lambda_inconsistent"] == 0 and worst_null < 1e-8
    return ok, m


def legendre(n, rng):
    cells = sample_cells(S2, "lengths", min(n, 20) if n else 0, rng, margin=0.15)
    m = {}
    if len(cells) == 0:
        return True, m
    for lam in (-0.5, 0.0, -1.0, 0.7):
        rep = forms.legendre_transform(lam, cells)
        m[f"spread/lambda={lam:g}"] = rep.spread
    return all(v < 1e-6 for v in m.values()), m


def _probe_fd(case, lam, surf, x, y, h):
    """Richardson-extrapolated central differences of the analytic first derivative of z."""
    hc = forms.case_chart(case, lam)
    alpha, eps = forms.CASE_SURFACES[case][surf]

    def grad(a, b):
        u, v = hc.x(np.array([a, b]))
        w = alpha + eps * (u + v)
        return np.array([eps * hc.gprime(w) / hc.gprime(u), eps * hc.gprime(w) / hc.gprime(v)])

    def hess(step):
        hx, hy = step * max(abs(x), 1e-3), step * max(abs(y), 1e-3)
        return np.array([(grad(x + hx, y) - grad(x - hx, y)) / (2 * hx),
                         (grad(x, y + hy) - grad(x, y - hy)) / (2 * hy)])

    hm = (4 * hess(h) - hess(2 * h)) / 3
    hm = 0.5 * (hm + hm.T)
    u, v = hc.x(np.array([x, y]))
    w = alpha + eps * (u + v)
    a = lambda t: abs(hc.gsecond(t) / hc.gprime(t))
    n1 = hc.gprime(w) / hc.gprime(u) ** 2 * (1 + a(w) + a(u))
    n2 = n1 * hc.gprime(w) / hc.gprime(v) ** 2 * (1 + a(w) + a(v))
    return hm, n1, n2


CONVEXITY_LAMBDAS = {"a": (-1.0, -1.5, -3.0), "a-coth": (-1.0, -1.5, -3.0),
                     "b": (0.0, 0.5, 2.0), "c": (0.0, 0.5, 2.0), "d": (0.0, 0.5, 2.0)}


def convexity(n, rng, pairs=10_000):
    m = {}
    fails = 0
    worst = 0.0
    for case, lams in CONVEXITY_LAMBDAS.items():
        g, param = forms.CASE_REGION[case]
        for lam in lams:
            a = sample_cells(g, param, pairs, rng)
            b = sample_cells(g, param, pairs, rng)
            ok = forms.midpoint_convexity(case, lam, np.stack([a, b], axis=1))
            f = int(np.sum(~ok))
            m[f"midpoint_failures/{case}/lambda={lam:g}"] = f
            fails += f
            hc = forms.case_chart(case, lam)
            for p in a[: max(1, n // 10)]:
                x, y = float(hc.u(p[0])), float(hc.u(p[1]))
                for surf in range(len(forms.CASE_SURFACES[case])):
                    try:
                        d2, det = forms.boundary_hessian_probe(case, lam, x, y, surf)
                        hm, n1, n2 = _probe_fd(case, lam, surf, x, y, 1e-4)
                    except DomainError:
                        continue
                    worst = max(worst, abs(hm[0, 0] - d2) / n1, abs(np.linalg.det(hm) - det) / n2)
    m["boundary_hessian_fd"] = worst
    return fails == 0 and worst < 1e-6, m


# ------------------------------------------------------------ worked values

def worked_values(n, rng):
    s = load_corpus("tetrahedron")
    l = np.ones(6)
    phi0 = invariants.phi_lambda(s, l, 0.0).values
    phim = invariants.phi_lambda(s, l, -1.0).values
    k0 = invariants.k_lambda(s, l, 0.0).values
    km = invariants.k_lambda(s, l, -1.0).values
    m = {
        "phi0": float(np.max(np.abs(phi0 + np.pi / 3))),
        "phi_minus1": float(np.max(np.abs(phim + np.log(3)))),
        "k0": float(np.max(np.abs(k0 + np.pi / 2))),
        "k_minus1": float(np.max(np.abs(km + 3 * np.log(2)))),
        "phi0_sum": float(abs(phi0.sum() + 2 * np.pi)),
    }
    worst = 0.0
    for name in ("tetrahedron", "octahedron", "icosahedron", "torus"):
        surf = load_corpus(name)
        for _ in range(max(1, n // 20)):
            lengths = _random_metric(surf, E2, rng)
            rep = invariants.linear_identities_report(surf, lengths, E2)
            worst = max(worst, rep.worst)
    m["identity_residuals"] = worst
    return all(v < 1e-10 for v in m.values()), m


def _random_metric(s, g, rng, base=1.0, spread=0.2):
    for _ in range(1000):
        l = base * rng.uniform(1 - spread, 1 + spread, s.num_edges)
        if validate_metric(s, l, geometry=g).valid:
            return l
    raise DomainError("could not sample a valid metric")


def _perturbed(s, g, x, rng, radii=False):
    for _ in range(1000):
        y = x * rng.uniform(0.8, 1.25, len(x))
        if radii or validate_metric(s, y, geometry=g).valid:
            return y
    raise DomainError("could not sample a valid perturbed init")


# ---------------------------------------------------------------- round trips

def _round_trip_cases():
    """(label, surface, solver kind, geometry, lambda, reference metric)."""
    tet, octa, torus = (load_corpus(k) for k in ("tetrahedron", "octahedron", "torus"))
    holed, genus2 = load_corpus("one_holed_torus"), load_corpus("genus2_one_boundary")
    ref_e = {"tetrahedron": (tet, np.array([1.0, 1.1, 0.9, 1.2, 1.0, 1.05])),
             "octahedron": (octa, 1.0 + 0.05 * np.cos(np.arange(12))),
             "torus": (torus, np.array([1.0, 1.1, 0.95]))}
    cases = []
    for name, (s, l) in ref_e.items():
        r = 0.5 + 0.05 * np.sin(np.arange(s.num_vertices))
        cases.append((f"packing/hyperbolic/{name}", s, "k", H2, 0.0, r))
        cases.append((f"packing/euclidean/{name}", s, "k", E2, 0.0, r))
        cases.append((f"psi/hyperbolic/{name}", s, "psi", H2, -1.0, l))
        cases.append((f"phi/euclidean/{name}", s, "phi", E2, -1.0, l))
    cases.append(("phi/spherical/octahedron", octa, "phi", S2, -1.0, np.full(12, np.pi / 2)))
    cases.append(("phi/spherical/octahedron/lambda=1", octa, "phi", S2, 1.0, np.full(12, np.pi / 2)))
    cases.append(("phi/spherical/tetrahedron", tet, "phi", S2, 0.0, np.array([1.0, 1.1, 0.9, 1.2, 1.0, 1.05])))
    cases.append(("teich/one_holed_torus", holed, "teich", HEX, 0.0, np.array([1.0, 1.3, 0.8])))
    cases.append(("teich/genus2", genus2, "teich", HEX, 0.0, 1.0 + 0.1 * np.cos(np.arange(9))))
    return cases


def solve_case(s, kind, g, lam, target, init, config=SolverConfig()):
    if kind == "k":
        norm = "euclidean_scale_fixed" if g is E2 else "none"
        return solve_circle_packing(s, TargetSpec("k_circle_packing", g, lam, target, norm), init, config)
    if kind == "phi":
        norm = "euclidean_scale_fixed" if g is E2 else "none"
        return solve_phi_closed(s, TargetSpec("phi_closed", g, lam, target, norm), init, config)
    if kind == "psi":
        return solve_psi_closed(s, TargetSpec("psi_closed", g, lam, target), init, config)
    return solve_teich(s, lam, target, init, config)


def forward(s, kind, g, lam, x):
    if kind == "k":
        return invariants.k_lambda(s, lam=lam, geometry=g, radii=x).values
    if kind == "phi":
        return invariants.phi_lambda(s, x, lam, g).values
    return invariants.psi_lambda(s, x, lam, g if kind == "psi" else None).values


def recovery_error(g, x, ref):
    if g is E2:
        return float(np.max(np.abs(x / x.sum() - ref / ref.sum())))
    return float(np.max(np.abs(x - ref)))


def round_trips(n, rng, seeds=20):
    m = {}
    ok = True
    t0 = time.perf_counter()
    for label, s, kind, g, lam, ref in _round_trip_cases():
        target = forward(s, kind, g, lam, ref)
        worst, bad = 0.0, 0
        for _ in range(seeds):
            init = _perturbed(s, g, ref, rng, radii=(kind == "k"))
            rep = solve_case(s, kind, g, lam, target, init)
            err = recovery_error(g, rep.solution, ref)
            if not rep.converged or err >= 1e-8:
                bad += 1
            worst = max(worst, err)
        m[label] = {"failures": bad, "worst_error": worst}
        ok &= bad == 0
    m["seconds"] = time.perf_counter() - t0
    return ok, m


# --------------------------------------------------------- Teichmüller polytope

def sample_polytope(s, n, rng, lo=-1.5, hi=3.0, inside=True, max_tries=1_000_000):
    """Rejection-sample edge vectors inside (or outside) the edge-cycle polytope."""
    out = []
    tries = 0
    while len(out) < n and tries < max_tries:
        z = rng.uniform(lo, hi, s.num_edges)
        tries += 1
        if membership_predicates(s, z, "teich_polytope").inside == inside:
            out.append(z)
    return np.array(out)


def teich_polytope(n, rng, interior=100, exterior=20):
    s = load_corpus("one_holed_torus")
    m = {}
    ok = True
    zs = sample_polytope(s, interior, rng)
    for lam in (0.0, 0.5, 1.0, 2.0):
        bad = 0
        for z in zs:
            rep = solve_teich(s, lam, z)
            bad += not rep.converged
        m[f"interior_failures/lambda={lam:g}"] = bad
        ok &= bad == 0
    outs = sample_polytope(s, exterior, rng, inside=False)
    bad = 0
    for z in outs:
        rep = solve_teich(s, 0.0, z)
        cyc = rep.extra.get("witness_cycle")
        if rep.status != "Degenerated" or cyc is None or not np.sum(z[cyc]) <= 0:
            bad += 1
    m["exterior_failures"] = bad
    ok &= bad == 0
    rep = solve_teich(s, 0.0, np.ones(3))
    expected = np.arccosh(np.cosh(1.0) / (np.cosh(1.0) - 1.0))
    m["symmetric_error"] = float(np.max(np.abs(rep.solution - expected)))
    ok &= rep.converged and m["symmetric_error"] < 1e-8
    return ok, m


def angle_structures(n, rng, seeds=10):
    m = {}
    ok = True
    octa, tet = load_corpus("octahedron"), load_corpus("tetrahedron")
    for label, s, g, inv, base in (("spherical/octahedron", octa, S2, "phi", np.pi / 2),
                                   ("hyperbolic/tetrahedron", tet, H2, "psi", 1.0)):
        for lam in (0.0, 1.0):
            worst_mis, worst_err, bad = 0.0, 0.0, 0
            for k in range(seeds):
                ref = np.full(s.num_edges, base) if k == 0 else _random_metric(s, g, rng, base, 0.1)
                if inv == "phi":
                    target = invariants.phi_lambda(s, ref, lam, g).values
                else:
                    target = invariants.psi_lambda(s, ref, lam, g).values
                rep = solve_angle_structure(s, g, lam, target)
                mis = rep.extra["length_mismatch"]
                err = float(np.max(np.abs(rep.solution - ref)))
                bad += not (rep.converged and mis < 1e-8 and err < 1e-8)
                worst_mis, worst_err = max(worst_mis, mis), max(worst_err, err)
            m[f"{label}/lambda={lam:g}"] = {"failures": bad, "mismatch": worst_mis, "error": worst_err}
            ok &= bad == 0
    return ok, m


# ------------------------------------------------------------------ membership

def brute_cycle_inside(s, z):
    """Every closed dual walk has positive sum, by Floyd–Warshall on the dart graph."""
    partner, edge_of = _slots(s)
    nd = len(partner)
    dist = np.full((nd, nd), np.inf)
    for d in range(nd):
        c, i = divmod(int(partner[d]), 3)
        for j in range(3):
            if j != i:
                nxt = 3 * c + j
                dist[d, nxt] = min(dist[d, nxt], z[edge_of[nxt]])
    for k in range(nd):
        dist = np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :])
    return bool(np.all(np.diag(dist) > 0))


def _counts(s, members):
    return [sum(e in members for e in cell) for cell in s.cells]


def brute_euclidean_subsets(s, z):
    if abs(z.sum() - np.pi * (s.num_faces - s.num_edges)) > 1e-9 * max(1.0, abs(z.sum())):
        return False
    for k in range(1, s.num_edges):
        for sub in itertools.combinations(range(s.num_edges), k):
            cnt = _counts(s, set(sub))
            if 2 in cnt:
                continue
            if not sum(z[e] for e in sub) > np.pi * cnt.count(3) - np.pi * k:
                return False
    return True


def brute_hyperbolic_subsets(s, z):
    if not brute_cycle_inside(s, z):
        return False
    for k in range(1, s.num_edges + 1):
        for sub in itertools.combinations(range(s.num_edges), k):
            cnt = _counts(s, set(sub))
            if 2 in cnt:
                continue
            if not sum(z[e] for e in sub) < 0.5 * np.pi * sum(c >= 1 for c in cnt):
                return False
    return True


def brute_spherical_pairs(s, z):
    for labels in itertools.product((0, 1, 2), repeat=s.num_edges):
        if not any(labels):
            continue
        ic = [sum(labels[e] == 1 for e in cell) for cell in s.cells]
        jc = [sum(labels[e] == 2 for e in cell) for cell in s.cells]
        if any(i + j == 2 or j == 3 or (i == 2 and j == 1) for i, j in zip(ic, jc)):
            continue
        lhs = sum(z[e] for e in range(s.num_edges) if labels[e] == 1) - \
            sum(z[e] for e in range(s.num_edges) if labels[e] == 2)
        nI, nJ = labels.count(1), labels.count(2)
        rhs = np.pi * (sum(i == 3 for i in ic) - sum(j == 2 and i == 1 for i, j in zip(ic, jc))
                       - sum(j == 1 and i == 0 for i, j in zip(ic, jc)) - nI + nJ)
        if not lhs > rhs:
            return False
    return True


def membership(n, rng, spherical=True):
    m = {}
    ok = True
    cases = [("one_holed_torus", "teich_polytope"), ("genus2_one_boundary", "teich_polytope"),
             ("tetrahedron", "leibon_9_6"), ("octahedron", "leibon_9_6"), ("torus", "leibon_9_6"),
             ("tetrahedron", "rivin_9_5"), ("octahedron", "rivin_9_5"), ("torus", "rivin_9_5")]
    if spherical:
        cases += [("tetrahedron", "spherical_9_9"), ("torus", "spherical_9_9")]
    trials = max(1, n // 10)
    for name, which in cases:
        s = load_corpus(name)
        agree = 0
        n_inside = 0
        for t in range(trials):
            z = _membership_sample(s, which, rng, t)
            fast = membership_predicates(s, z, which).inside
            if which == "teich_polytope":
                slow = brute_cycle_inside(s, z)
            elif which == "leibon_9_6":
                slow = brute_hyperbolic_subsets(s, z)
            elif which == "rivin_9_5":
                slow = brute_euclidean_subsets(s, z)
            else:
                slow = brute_spherical_pairs(s, z)
            agree += fast == slow
            n_inside += fast
        m[f"{name}/{which}"] = {"agree": agree, "trials": trials, "inside": n_inside}
        ok &= agree == trials
    return ok, m


def _membership_sample(s, which, rng, t):
    """Alternate between forward images of random metrics and random vectors."""
    if which == "teich_polytope":
        return rng.uniform(-1.0, 2.0, s.num_edges)
    g = {"leibon_9_6": H2, "rivin_9_5": E2, "spherical_9_9": S2}[which]
    if t % 2 == 0:
        l = _random_metric(s, g, rng, 1.0, 0.3)
        if which == "leibon_9_6":
            return invariants.psi_lambda(s, l, 0.0, g).values
        return invariants.phi_lambda(s, l, 0.0, g).values
    z = rng.uniform(-np.pi, np.pi / 2, s.num_edges)
    if which == "rivin_9_5":
        z += (np.pi * (s.num_faces - s.num_edges) - z.sum()) / s.num_edges
    return z


SUITES = {
    "derivative_laws": derivative_laws,
    "index_independence": index_independence,
    "closedness": closedness,
    "signatures": signatures,
    "legendre": legendre,
    "convexity": convexity,
    "worked_values": worked_values,
    "round_trips": round_trips,
    "teich_polytope": teich_polytope,
    "angle_structures": angle_structures,
    "membership": membership,
}


def run_suite(name, samples=200, seed=0):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    rng = suite_rng(seed, name)
    t0 = time.perf_counter()
    notes = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearDegenerate)
        if samples == 0:
            passed, metrics = True, {}
            notes.append("no samples drawn; the suite passes vacuously")
        else:
            passed, metrics = SUITES[name](samples, rng)
    return SuiteResult(name, bool(passed), metrics, notes, time.perf_counter() - t0)


def run_all(samples=200, seed=0, names=None):
    return [run_suite(k, samples, seed) for k in (names or SUITES)]
