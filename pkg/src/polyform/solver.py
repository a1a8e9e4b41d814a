"""Variational solvers that recover metrics from prescribed invariants.

Every problem is a smooth function W on an open convex set of chart
coordinates whose gradient is the invariant vector.  Solving
invariant = target means finding the critical point of W - target·v, found
here by damped Newton with Armijo backtracking.  Whether W is convex or
concave is read off the Hessian at the starting point, and the energy is
tracked by integrating the gradient along each step with Gauss–Legendre.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import trig
from .charts import Chart
from .degeneration import DegenerationKind, Thresholds, degeneration_monitor
from .errors import ConfigError, DomainError, IndexMismatch, Infeasible, InvalidMetric, NearDegenerate
from .forms import FormFamily, form_coefficients, hessian_u
from .invariants import corner_radii
from .membership import membership_predicates
from .quadrature import power_integral
from .surface import cell_geometry, edge_array, edge_owners, packing_lengths, validate_metric, vertex_array
from .trig import E2, H2, HEX, S2, GeometryKind

KINDS = ("k_circle_packing", "psi_closed", "phi_closed", "psi_ideal")
NORMALIZATIONS = ("none", "euclidean_scale_fixed")
HALF_PI = 0.5 * np.pi


@dataclass(frozen=True)
class SolverConfig:
    grad_tol: float = 1e-10
    max_iter: int = 100
    armijo_factor: float = 0.5
    armijo_c1: float = 1e-4
    min_step: float = 1e-14
    quad_nodes: int = 8
    thresholds: Thresholds = Thresholds()
    seed: int = 0

    def __post_init__(self):
        positive = (self.grad_tol, self.max_iter, self.armijo_c1, self.min_step, self.quad_nodes)
        if any(not (x > 0) for x in positive) or not (0 < self.armijo_factor < 1) or self.armijo_c1 >= 0.5:
            raise ConfigError("solver tolerances must be positive, with 0 < factor < 1 and c1 < 1/2")


@dataclass(frozen=True)
class TargetSpec:
    kind: str
    geometry: GeometryKind
    lam: float
    target: np.ndarray
    normalization: str = "none"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown invariant kind {self.kind!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        object.__setattr__(self, "geometry", GeometryKind.parse(self.geometry))
        object.__setattr__(self, "target", np.asarray(self.target, dtype=float))
        needs = self.geometry is E2 and self.kind in ("k_circle_packing", "phi_closed")
        if needs and self.normalization != "euclidean_scale_fixed":
            raise ConfigError("Euclidean targets need normalization euclidean_scale_fixed")
        if not needs and self.normalization != "none":
            raise ConfigError("euclidean_scale_fixed applies only to Euclidean packing and phi targets")

    def check_size(self, s):
        n = s.num_vertices if self.kind == "k_circle_packing" else s.num_edges
        if self.target.shape != (n,):
            raise IndexMismatch(f"target needs {n} entries, got shape {self.target.shape}")


@dataclass
class SolveReport:
    status: str                     # "Converged", "Degenerated" or "MaxIter"
    iterations: int
    grad_norm: float
    solution: np.ndarray
    solution_kind: str              # "lengths" or "radii"
    degeneration: DegenerationKind = None
    energies: list = field(default_factory=list)
    flags: tuple = ()
    sense: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.status == "Converged"

    def as_dict(self):
        out = {
            "status": self.status,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "solution_kind": self.solution_kind,
            "solution": [float(x) for x in self.solution],
            "flags": list(self.flags),
            "energy_sense": "minimize" if self.sense > 0 else "maximize",
        }
        if self.degeneration is not None:
            out["degeneration"] = self.degeneration.as_dict()
        for k, v in self.extra.items():
            out[k] = v
        return out


# ---------------------------------------------------------------- problems

class _Problem:
    """v ↦ state; state ↦ gradient and Hessian of W in v.  Subclasses fill in."""

    n = 0
    slice_basis = None
    solution_kind = "lengths"

    def start(self):
        raise NotImplementedError

    def state(self, v, hint=None):
        """Natural coordinates for v, or None when v leaves the domain."""
        raise NotImplementedError

    def gradient(self, st):
        raise NotImplementedError

    def hessian(self, st):
        raise NotImplementedError

    def metric(self, st):
        raise NotImplementedError

    def monitor(self, st, thresholds):
        raise NotImplementedError

    def residual(self, st):
        return self.gradient(st)


def _assemble_grad(idx, per_slot, n):
    out = np.zeros(n)
    np.add.at(out, idx.ravel(), per_slot.ravel())
    return out


def _assemble_hess(idx, blocks, n):
    out = np.zeros((n, n))
    np.add.at(out, (idx[:, :, None], idx[:, None, :]), blocks)
    return 0.5 * (out + out.T)


def _slice_basis(n):
    """Orthonormal basis of the hyperplane Σ v = 0."""
    q, _ = np.linalg.qr(np.eye(n) - 1.0 / n)
    q = q[:, : n - 1]
    return q


class _ChartProblem(_Problem):
    """Variables are chart images of per-edge or per-vertex quantities."""

    def __init__(self, s, idx, chart, target, x0, validity):
        self.s = s
        self.idx = idx
        self.chart = chart
        self.target = target
        self.n = len(x0)
        self.x0 = np.asarray(x0, dtype=float)
        self.validity = validity

    def start(self):
        return self.chart.u(self.x0)

    def state(self, v, hint=None):
        try:
            x = self.chart.x(v, x0=hint)
        except DomainError:
            return None
        if not np.all(self.chart.inside(x)):
            return None
        cells = x[self.idx]
        if not np.all(self.validity(cells)):
            return None
        return x


class _FamilyProblem(_ChartProblem):
    """Per-cell energies given by one of the form families."""

    def __init__(self, s, idx, family, target, x0):
        super().__init__(s, idx, family.chart, target, x0,
                         lambda c: trig.valid_mask(family.geometry, c, family.natural))
        self.family = family

    def gradient(self, x):
        return _assemble_grad(self.idx, form_coefficients(self.family, x[self.idx]), self.n) - self.target

    def hessian(self, x):
        return _assemble_hess(self.idx, hessian_u(self.family, x[self.idx]), self.n)


class _PackingProblem(_FamilyProblem):
    solution_kind = "radii"

    def __init__(self, s, g, lam, target, r0):
        super().__init__(s, vertex_array(s), FormFamily("eta", g, -lam, "length-radius"), target, r0)
        self.g = g

    def metric(self, x):
        return x

    def monitor(self, x, t):
        return degeneration_monitor(self.s, x, self.g, radii=True, thresholds=t)


class _PhiProblem(_FamilyProblem):
    def __init__(self, s, g, lam, target, l0):
        super().__init__(s, edge_array(s), FormFamily("omega", g, lam), target, l0)
        self.g = g

    def metric(self, x):
        return x

    def monitor(self, x, t):
        return degeneration_monitor(self.s, x, self.g, thresholds=t)


# ∂r_i/∂θ_j for r_i = (θ_j + θ_k - θ_i)/2
_R_OF_THETA = 0.5 * (np.ones((3, 3)) - 2.0 * np.eye(3))


class _RCoordinateProblem(_ChartProblem):
    """ψ-type energies: slot coefficient ∫_0^{r} w^λ, r the corner r-coordinate."""

    def __init__(self, s, g, lam, target, l0):
        self.g = g
        self.lam = lam
        if g is HEX:
            chart, self.w = Chart("tanh_half", lam + 1.0, 1.0, 0.0, np.inf), "cosh"
        else:
            chart, self.w = Chart("coth_half", lam + 1.0, 1.0, 0.0, np.inf), "cos"
        super().__init__(s, edge_array(s), chart, target, l0, lambda c: trig.valid_mask(g, c, "lengths"))

    def _cell(self, x):
        fl = x[self.idx]
        th = trig.angles_from_lengths(self.g, fl, check=False)
        return fl, th, corner_radii(th)

    def gradient(self, x):
        _, _, r = self._cell(x)
        return _assemble_grad(self.idx, power_integral(self.w, self.lam, 0.0, r), self.n) - self.target

    def hessian(self, x):
        fl, _, r = self._cell(x)
        jac = trig.jacobian_angles_wrt_lengths(self.g, fl).jac
        dr = _R_OF_THETA @ jac
        base = np.cosh(r) if self.w == "cosh" else np.cos(r)
        blocks = np.power(base, self.lam)[..., :, None] * dr / self.chart.gprime(fl)[..., None, :]
        return _assemble_hess(self.idx, blocks, self.n)

    def metric(self, x):
        return x

    def monitor(self, x, t):
        return degeneration_monitor(self.s, x, self.g, thresholds=t)


class _AngleStructureProblem(_Problem):
    """Corner variables constrained by u(c) + u(c') = target(e).

    The free coordinate per edge is the half-difference s_e, so that
    u(c) = target/2 + s_e and u(c') = target/2 - s_e.
    """

    def __init__(self, s, g, lam, target):
        self.s, self.g, self.lam = s, g, lam
        self.target = np.asarray(target, dtype=float)
        self.n = s.num_edges
        nc = 3 * s.num_faces
        self.B = np.zeros((nc, self.n))
        self.first = np.empty(self.n, dtype=int)
        self.second = np.empty(self.n, dtype=int)
        for e, ((c0, i0), (c1, i1)) in enumerate(edge_owners(s)):
            self.first[e], self.second[e] = 3 * c0 + i0, 3 * c1 + i1
            self.B[self.first[e], e] = 1.0
            self.B[self.second[e], e] = -1.0
        self.u_mid = np.zeros(nc)
        self.u_mid[self.first] = 0.5 * self.target
        self.u_mid[self.second] = 0.5 * self.target
        if g is S2:
            self.chart = Chart("sin", lam, HALF_PI, 0.0, np.pi)
            self.param = "angles"
        else:
            self.chart = Chart("cos", lam, 0.0, -HALF_PI, HALF_PI)
            self.param = "angle-radius"
            self.family = FormFamily("eta", H2, -lam - 1.0, "angle-radius")
        self.v0 = None

    def corners(self, v):
        return self.u_mid + self.B @ v

    def state(self, v, hint=None):
        try:
            x = self.chart.x(self.corners(v), x0=hint)
        except DomainError:
            return None
        cells = x.reshape(-1, 3)
        if not np.all(self.chart.inside(x)) or not np.all(trig.valid_mask(self.g, cells, self.param)):
            return None
        return x

    def cell_lengths(self, x):
        cells = x.reshape(-1, 3)
        if self.g is S2:
            return trig.lengths_from_angles(S2, cells, check=False)
        return trig.radius_outputs(H2, cells, "angle-radius")

    def _corner_grad(self, x):
        if self.g is S2:
            return power_integral("sin", -self.lam - 1.0, HALF_PI, self.cell_lengths(x)).ravel()
        return form_coefficients(self.family, x.reshape(-1, 3)).ravel()

    def gradient(self, x):
        return self.B.T @ self._corner_grad(x)

    def hessian(self, x):
        cells = x.reshape(-1, 3)
        if self.g is S2:
            l = self.cell_lengths(x)
            jac = trig.jacobian_lengths_wrt_angles(S2, cells).jac
            blocks = (np.power(np.sin(l), -self.lam - 1.0)[..., :, None] * jac
                      / self.chart.gprime(cells)[..., None, :])
        else:
            blocks = hessian_u(self.family, cells)
        nc = len(x)
        full = np.zeros((nc, nc))
        for c in range(len(cells)):
            full[3 * c:3 * c + 3, 3 * c:3 * c + 3] = blocks[c]
        h = self.B.T @ full @ self.B
        return 0.5 * (h + h.T)

    def edge_lengths(self, x):
        per = self.cell_lengths(x).ravel()
        a, b = per[self.first], per[self.second]
        return 0.5 * (a + b), float(np.max(np.abs(a - b)))

    def metric(self, x):
        return self.edge_lengths(x)[0]

    def monitor(self, x, t):
        return degeneration_monitor(self.s, self.metric(x), self.g, thresholds=t)

    # -------------------------------------------------------- feasibility
    def _slacks(self, cells):
        a, b, c = cells[:, 0], cells[:, 1], cells[:, 2]
        if self.g is S2:
            return np.concatenate([cells.ravel(), (np.pi - cells).ravel(), a + b + c - np.pi,
                                   c + np.pi - a - b, a + np.pi - b - c, b + np.pi - c - a])
        return np.concatenate([a + b, b + c, c + a, (HALF_PI - cells).ravel(), (HALF_PI + cells).ravel(),
                               HALF_PI - (a + b + c)])

    def start(self):
        if self.v0 is not None:
            return self.v0
        v = np.zeros(self.n)
        if self.state(v) is not None:
            self.v0 = v
            return v
        self.v0 = self._phase_one()
        return self.v0

    def _phase_one(self):
        """Maximize the smallest domain slack over corner values meeting the edge constraints."""
        lo, hi = self.chart.lo, self.chart.hi
        nc = 3 * self.s.num_faces
        if self.g is S2:
            x0 = np.full(nc, 2.0 * np.pi / 3.0)
        else:
            x0 = np.full(nc, np.pi / 12.0)

        def h(x):
            return power_integral(self.chart.base, self.chart.power, self.chart.basepoint, x)

        def eq(z):
            x = z[:-1]
            return h(x[self.first]) + h(x[self.second]) - self.target

        def ineq(z):
            return self._slacks(z[:-1].reshape(-1, 3)) - z[-1]

        z0 = np.append(x0, 0.0)
        bounds = [(lo + 1e-9, hi - 1e-9)] * nc + [(None, 1.0)]
        res = minimize(lambda z: -z[-1], z0, method="SLSQP", bounds=bounds,
                       constraints=[{"type": "eq", "fun": eq}, {"type": "ineq", "fun": ineq}],
                       options={"maxiter": 500, "ftol": 1e-12})
        x, slack = res.x[:-1], res.x[-1]
        if not (slack > 0) or np.max(np.abs(eq(res.x))) > 1e-8:
            raise Infeasible("the corner constraint system has no interior point")
        u = h(x)
        v = u[self.first] - 0.5 * self.target
        if self.state(v) is None:
            raise Infeasible("phase-one point left the domain after rounding")
        return v


# ------------------------------------------------------------------ engine

def _sense_of(h):
    if h.size == 0:
        return 1, False
    ev = np.linalg.eigvalsh(h)
    scale = max(np.max(np.abs(ev)), 1e-300)
    if ev[-1] <= 1e-9 * scale:
        return -1, ev[0] < -1e-9 * scale and ev[-1] >= -1e-9 * scale
    return 1, ev[0] <= 1e-9 * scale


def _newton_direction(h, g, regularize):
    try:
        c = np.linalg.cholesky(h)
        return -np.linalg.solve(c.T, np.linalg.solve(c, g)), False
    except np.linalg.LinAlgError:
        pass
    if regularize:
        mu = 1e-12 * max(np.linalg.norm(h), 1e-300)
        eye = np.eye(len(g))
        for _ in range(40):
            try:
                c = np.linalg.cholesky(h + mu * eye)
                return -np.linalg.solve(c.T, np.linalg.solve(c, g)), True
            except np.linalg.LinAlgError:
                mu *= 10.0
    return -g, True


def _safe_residuals(problem, states):
    """Residuals at every state, or None if any state is outside the domain or evaluates badly."""
    out = []
    for st in states:
        if st is None:
            return None
        try:
            r = problem.residual(st)
        except DomainError:
            return None
        if not np.all(np.isfinite(r)):
            return None
        out.append(r)
    return out


def run_newton(problem, config=SolverConfig(), local_only=False):
    """Damped Newton on sense·(W - target·v); returns a SolveReport."""
    nodes, weights = np.polynomial.legendre.leggauss(config.quad_nodes)
    nodes, weights = 0.5 * (nodes + 1.0), 0.5 * weights
    flags = ["local-only"] if local_only else []
    v = np.asarray(problem.start(), dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearDegenerate)
        warnings.simplefilter("ignore", RuntimeWarning)
        st = problem.state(v)
        if st is None:
            raise InvalidMetric("initial point is outside the domain")
        q = problem.slice_basis
        h0 = problem.hessian(st)
        sense, indefinite = _sense_of(h0 if q is None else q.T @ h0 @ q)
        if indefinite and "local-only" not in flags:
            flags.append("indefinite Hessian at start")
        energy = 0.0
        energies = [energy]

        def reduced(gvec):
            return gvec if q is None else q.T @ gvec

        def expand(y):
            return y if q is None else q @ y

        it = 0
        status, degen = "MaxIter", None
        res = problem.residual(st)
        while True:
            gnorm = float(np.max(np.abs(res)))
            if gnorm < config.grad_tol:
                status = "Converged"
                break
            if it >= config.max_iter:
                break
            g = sense * reduced(res)
            if q is not None and np.max(np.abs(g)) < 1e-3 * config.grad_tol:
                flags.append("slice critical point misses the target")
                break
            h = sense * problem.hessian(st)
            hr = h if q is None else q.T @ h @ q
            y, modified = _newton_direction(hr, g, regularize=local_only)
            if modified and "modified Newton direction" not in flags:
                flags.append("modified Newton direction")
            d = expand(y)
            slope = float(g @ y)
            if slope >= 0:
                y, d = -g, expand(-g)
                slope = float(g @ y)
            t = 1.0
            accepted = None
            while t >= config.min_step:
                trial = problem.state(v + t * d, hint=st)
                path = [] if trial is None else [problem.state(v + t * s * d, hint=st) for s in nodes]
                grads = _safe_residuals(problem, [trial] + path)
                if grads is None:
                    t *= config.armijo_factor
                    continue
                new_res = grads[0]
                gd = np.array([sense * (gr @ d) for gr in grads[1:]])
                de = t * float(weights @ gd)
                small = abs(de) <= 1e-12 * max(1.0, abs(energy))
                if de <= config.armijo_c1 * t * slope or (
                        small and np.max(np.abs(new_res)) < gnorm):
                    accepted = (trial, de, new_res)
                    break
                t *= config.armijo_factor
            if accepted is None:
                degen = problem.monitor(st, config.thresholds.relaxed())
                flags.append("line search stalled")
                status = "Degenerated" if degen is not None else "MaxIter"
                break
            st, de, res = accepted
            v = v + t * d
            energy += de
            energies.append(energy)
            it += 1
            degen = problem.monitor(st, config.thresholds)
            if degen is not None:
                status = "Degenerated"
                gnorm = float(np.max(np.abs(res)))
                break
        gnorm = float(np.max(np.abs(problem.residual(st))))
    # report W - target·v itself: it falls under minimization and rises under maximization
    energies = [sense * e for e in energies]
    return SolveReport(status, it, gnorm, np.asarray(problem.metric(st), dtype=float), problem.solution_kind,
                       degen, energies, tuple(flags), sense, {"state": st, "v": v})


# -------------------------------------------------------------- front ends

def _check_init(s, g, lengths=None, radii=None):
    verdict = validate_metric(s, lengths=lengths, radii=radii, geometry=g)
    if not verdict.valid:
        raise InvalidMetric(f"initial metric invalid: {verdict.violations[0]}")


def _spec(spec, s, kind):
    if spec.kind != kind:
        raise ConfigError(f"target kind {spec.kind!r} does not match this solver ({kind})")
    spec.check_size(s)
    return spec


def _finish(report, s, forward, target, tol=1e-8):
    """Attach the recomputed invariant residual and downgrade a false Converged."""
    report.extra.pop("state", None)
    report.extra.pop("v", None)
    if report.converged:
        err = float(np.max(np.abs(forward(report.solution) - target)))
        report.extra["invariant_residual"] = err
        if err > tol:
            report.status = "MaxIter"
            report.flags = report.flags + ("recomputed invariant misses target",)
    return report


def solve_circle_packing(s, spec, init_radii, config=SolverConfig()):
    """Radii whose λ-curvature equals ``spec.target``."""
    from .invariants import k_lambda
    spec = _spec(spec, s, "k_circle_packing")
    g = spec.geometry
    if g not in (E2, H2):
        raise ConfigError("circle packings are solved in Euclidean or hyperbolic geometry")
    r0 = np.asarray(init_radii, dtype=float)
    if r0.shape != (s.num_vertices,):
        raise IndexMismatch(f"expected {s.num_vertices} radii")
    _check_init(s, g, radii=r0)
    p = _PackingProblem(s, g, spec.lam, spec.target, r0)
    if g is E2:
        p.slice_basis = _slice_basis(p.n)
    rep = run_newton(p, config)
    return _finish(rep, s, lambda r: k_lambda(s, lam=spec.lam, geometry=g, radii=r).values, spec.target)


def solve_phi_closed(s, spec, init_lengths, config=SolverConfig()):
    """Lengths whose φ_λ equals ``spec.target`` (Euclidean or spherical)."""
    from .invariants import phi_lambda
    spec = _spec(spec, s, "phi_closed")
    g, lam = spec.geometry, spec.lam
    if g not in (E2, S2):
        raise ConfigError("phi targets are solved in Euclidean or spherical geometry")
    l0 = np.asarray(init_lengths, dtype=float)
    _check_init(s, g, lengths=l0)
    local = (g is E2 and lam > -1) or (g is S2 and -1 < lam < 0)
    p = _PhiProblem(s, g, lam, spec.target, l0)
    if g is E2:
        p.slice_basis = _slice_basis(p.n)
    rep = run_newton(p, config, local_only=local)
    return _finish(rep, s, lambda l: phi_lambda(s, l, lam, g).values, spec.target)


def solve_psi_closed(s, spec, init_lengths, config=SolverConfig()):
    """Hyperbolic lengths whose ψ_λ equals ``spec.target``."""
    from .invariants import psi_lambda
    spec = _spec(spec, s, "psi_closed")
    if spec.geometry is not H2:
        raise ConfigError("closed psi targets are solved in hyperbolic geometry")
    l0 = np.asarray(init_lengths, dtype=float)
    _check_init(s, H2, lengths=l0)
    p = _RCoordinateProblem(s, H2, spec.lam, spec.target, l0)
    rep = run_newton(p, config, local_only=spec.lam > -1)
    return _finish(rep, s, lambda l: psi_lambda(s, l, spec.lam, H2).values, spec.target)


def solve_teich(s, lam, target, init_lengths=None, config=SolverConfig()):
    """Ideal-surface lengths whose ψ_λ equals ``target``.

    When the target fails the edge-cycle predicate the failing cycle is
    attached to the report as witness.
    """
    from .invariants import psi_lambda
    if s.kind != "ideal":
        raise ConfigError("Teichmüller targets need an ideal surface")
    z = np.asarray(target, dtype=float)
    if z.shape != (s.num_edges,):
        raise IndexMismatch(f"target needs {s.num_edges} entries")
    l0 = np.ones(s.num_edges) if init_lengths is None else np.asarray(init_lengths, dtype=float)
    _check_init(s, HEX, lengths=l0)
    verdict = membership_predicates(s, z, "teich_polytope")
    p = _RCoordinateProblem(s, HEX, lam, z, l0)
    rep = run_newton(p, config, local_only=lam < 0)
    rep = _finish(rep, s, lambda l: psi_lambda(s, l, lam).values, z)
    if not verdict.inside:
        w = verdict.violation
        rep.extra["witness_cycle"] = list(w.edges)
        rep.extra["witness_sum"] = w.lhs
        if rep.status != "Converged":
            rep.status = "Degenerated"
            if rep.degeneration is None:
                rep.degeneration = DegenerationKind("outside_polytope", edges=tuple(sorted(set(w.edges))),
                                                    cycle=w.edges, cycle_kind="nonpositive sum")
    return rep


def solve(s, spec, init, config=SolverConfig()):
    """Dispatch on ``spec.kind``."""
    if spec.kind == "k_circle_packing":
        return solve_circle_packing(s, spec, init, config)
    if spec.kind == "phi_closed":
        return solve_phi_closed(s, spec, init, config)
    if spec.kind == "psi_closed":
        return solve_psi_closed(s, spec, init, config)
    spec.check_size(s)
    return solve_teich(s, spec.lam, spec.target, init, config)


def angle_structure_problem(s, geometry, lam, target):
    g = GeometryKind.parse(geometry)
    if g not in (S2, H2):
        raise ConfigError("angle structures are solved in spherical or hyperbolic geometry")
    if lam < 0:
        raise ConfigError("angle structures need lambda >= 0")
    target = np.asarray(target, dtype=float)
    if target.shape != (s.num_edges,):
        raise IndexMismatch(f"target needs {s.num_edges} entries")
    return _AngleStructureProblem(s, g, lam, target)


def solve_angle_structure(s, geometry, lam, target, config=SolverConfig()):
    """Corner values with u(c) + u(c') = target(e) at the critical point of W.

    Spherical corners carry angles and match φ_λ; hyperbolic corners carry
    r-coordinates and match ψ_λ.  At the critical point the two lengths
    computed for each edge from its two cells agree.
    """
    p = angle_structure_problem(s, geometry, lam, target)
    rep = run_newton(p, config)
    corners = rep.extra.pop("state")
    rep.extra.pop("v")
    lengths, mismatch = p.edge_lengths(corners)
    rep.extra["length_mismatch"] = mismatch
    rep.extra["corners"] = [float(c) for c in corners]
    if rep.converged and mismatch > 1e-8:
        rep.status = "MaxIter"
        rep.flags = rep.flags + ("glued lengths disagree",)
    return rep


def energy_difference(problem, v0, v1, nodes=32):
    """W(v1) - W(v0) (target-shifted) by Gauss–Legendre along the segment."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    d = np.asarray(v1, dtype=float) - np.asarray(v0, dtype=float)
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearDegenerate)
        for xi, wi in zip(x, w):
            st = problem.state(v0 + xi * d)
            if st is None:
                raise DomainError("segment leaves the domain")
            total += wi * float(problem.residual(st) @ d)
    return total


def degeneration_report(s, lengths=None, radii=None, geometry=None, thresholds=Thresholds()):
    if radii is not None:
        return degeneration_monitor(s, radii, geometry, radii=True, thresholds=thresholds)
    return degeneration_monitor(s, lengths, geometry, thresholds=thresholds)


__all__ = ["SolverConfig", "TargetSpec", "SolveReport", "run_newton", "solve", "solve_circle_packing",
           "solve_phi_closed", "solve_psi_closed", "solve_teich", "solve_angle_structure",
           "angle_structure_problem", "energy_difference", "degeneration_report", "packing_lengths",
           "cell_geometry"]
