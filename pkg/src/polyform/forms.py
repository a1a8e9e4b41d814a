"""λ-families of closed 1-forms on single cells and their energies.

A family pairs a natural coordinate x of a cell (edge lengths, or a radius
triple with x_i = r_j + r_k) with the complementary quantity y (angles, or
lengths).  The 1-form Σ f(y_i) g'(x_i) dx_i is closed; in the chart
u_i = ∫ g'(x_i) it becomes Σ f(y_i) du_i, so its primitive F has gradient
f(y) in u.

``omega`` families use lengths; ``eta`` families use radius triples.
"""

from dataclasses import dataclass

import numpy as np

from . import trig
from .charts import Chart
from .errors import DomainError, InverseOutOfRange, NotStrictlyConvex, PathExitsDomain
from .quadrature import BASES, power_integral
from .trig import E2, H2, HEX, S2, GeometryKind

PI = np.pi
INF = np.inf

# (family, geometry, natural kind) -> (numerator base, numerator basepoint,
#                                      chart base, chart basepoint, domain)
_TABLE = {
    ("omega", E2, "lengths"): ("sin", PI / 2, "id", 1.0, (0.0, INF)),
    ("omega", S2, "lengths"): ("sin", PI / 2, "sin", PI / 2, (0.0, PI)),
    ("omega", H2, "lengths"): ("sin", PI / 2, "sinh", 1.0, (0.0, INF)),
    ("omega", HEX, "lengths"): ("sinh", 1.0, "sinh", 1.0, (0.0, INF)),
    ("eta", E2, "length-radius"): ("cot_half", PI / 2, "id", 1.0, (0.0, INF)),
    ("eta", S2, "length-radius"): ("cot_half", PI / 2, "sin", PI / 2, (0.0, PI)),
    ("eta", H2, "length-radius"): ("cot_half", PI / 2, "sinh", 1.0, (0.0, INF)),
    ("eta", S2, "angle-radius"): ("tan_half", PI / 2, "cos", 0.0, (-PI / 2, PI / 2)),
    ("eta", H2, "angle-radius"): ("tanh_half", 1.0, "cos", 0.0, (-PI / 2, PI / 2)),
    ("eta", HEX, "angle-radius"): ("coth_half", 1.0, "cosh", 0.0, (-INF, INF)),
}

# signatures (n_pos, n_zero, n_neg) of the Hessian in u, where one is asserted
_DECLARED = {
    ("omega", E2, "lengths"): (2, 1, 0),
    ("omega", S2, "lengths"): (3, 0, 0),
    ("eta", E2, "length-radius"): (0, 1, 2),
    ("eta", H2, "length-radius"): (0, 0, 3),
    # strictly definite; the displayed form is concave (its negative is convex)
    ("eta", H2, "angle-radius"): (0, 0, 3),
    ("eta", HEX, "angle-radius"): (0, 0, 3),
}


@dataclass(frozen=True)
class FormFamily:
    family: str
    geometry: GeometryKind
    lam: float
    radius_kind: str = None

    def __post_init__(self):
        object.__setattr__(self, "geometry", GeometryKind.parse(self.geometry))
        object.__setattr__(self, "family", self.family.lower())
        if self.radius_kind is not None:
            object.__setattr__(self, "radius_kind", trig._radius_kind(self.radius_kind))
        if self.key not in _TABLE:
            raise DomainError(f"no form family {self.key}")

    @property
    def natural(self):
        return "lengths" if self.family == "omega" else self.radius_kind

    @property
    def key(self):
        return (self.family, self.geometry, self.natural)

    @property
    def chart(self):
        _, _, base, bp, (lo, hi) = _TABLE[self.key]
        return Chart(base, -self.lam - 1.0, bp, lo, hi)

    @property
    def numerator(self):
        base, bp = _TABLE[self.key][:2]
        return base, bp

    @property
    def declared_signature(self):
        return _DECLARED.get(self.key)

    def with_lambda(self, lam):
        return FormFamily(self.family, self.geometry, lam, self.radius_kind)

    def __str__(self):
        kind = f"/{self.radius_kind}" if self.radius_kind else ""
        return f"{self.family}/{self.geometry.value}{kind}/lambda={self.lam:g}"


def families(lam):
    """Every implemented family at parameter ``lam``."""
    out = []
    for fam, g, nat in _TABLE:
        out.append(FormFamily(fam, g, lam, None if nat == "lengths" else nat))
    return out


# ------------------------------------------------------------- evaluation

def cell_outputs(family, x):
    """The complementary quantity y of a natural triple x (validated)."""
    g = family.geometry
    if family.natural == "lengths":
        return trig.angles_from_lengths(g, x)
    return trig.radius_outputs(g, x, family.natural)


def cell_jacobian(family, x):
    """∂y_r/∂x_s in closed form."""
    g = family.geometry
    if family.natural == "lengths":
        return trig.jacobian_angles_wrt_lengths(g, x).jac
    return trig.radius_jacobian(g, x, family.natural).jac


def valid_natural(family, x):
    return trig.valid_mask(family.geometry, x, family.natural)


def u_from_natural(family, x):
    x = np.asarray(x, dtype=float)
    trig._require(family.geometry, x, family.natural)
    return family.chart.u(x)


def natural_from_u(family, u, x0=None):
    """Inverse chart; raises InverseOutOfRange outside the chart image or moduli region."""
    x = family.chart.x(u, x0=x0)
    if not np.all(valid_natural(family, x)):
        raise InverseOutOfRange("chart point maps outside the moduli region")
    return x


def form_coefficients(family, x):
    """f(y_i) = ∫_{basepoint}^{y_i} numerator**λ."""
    y = cell_outputs(family, np.asarray(x, dtype=float))
    base, bp = family.numerator
    return power_integral(base, family.lam, bp, y)


def numerator_derivative(family, y):
    base, _ = family.numerator
    with np.errstate(all="ignore"):
        return np.power(BASES[base](y), family.lam)


def hessian_u(family, x):
    """H_rs = f'(y_r) ∂y_r/∂x_s / g'(x_s), the Hessian of F in u."""
    x = np.asarray(x, dtype=float)
    y = cell_outputs(family, x)
    jac = cell_jacobian(family, x)
    fp = numerator_derivative(family, y)
    gp = family.chart.gprime(x)
    return fp[..., :, None] * jac / gp[..., None, :]


def natural_form_matrix(family, x):
    """∂(f(y_i) g'(x_i))/∂x_j analytically; symmetric iff the form is closed."""
    x = np.asarray(x, dtype=float)
    h = hessian_u(family, x)
    gp = family.chart.gprime(x)
    m = gp[..., :, None] * h * gp[..., None, :]
    diag = form_coefficients(family, x) * family.chart.gsecond(x)
    return m + diag[..., :, None] * np.eye(3)


@dataclass(frozen=True)
class Signature:
    n_pos: int
    n_zero: int
    n_neg: int

    def astuple(self):
        return (self.n_pos, self.n_zero, self.n_neg)


def signature_of(h, rel=1e-9):
    h = 0.5 * (h + np.swapaxes(h, -1, -2))
    ev = np.linalg.eigvalsh(h)
    thr = rel * np.max(np.abs(ev), axis=-1, keepdims=True)
    pos = np.sum(ev > thr, axis=-1)
    neg = np.sum(ev < -thr, axis=-1)
    return pos, 3 - pos - neg, neg


@dataclass(frozen=True)
class EnergyReport:
    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray
    signature: tuple


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _segment_points(base, delta, t):
    return base[..., None, :] + t[None, :, None] * delta[..., None, :]


def _form_along(family, base, delta, t):
    """Σ f(y_i) δ_i at chart points base + t δ (shape (n, len(t)))."""
    pts = _segment_points(base, delta, t)
    x = natural_from_u(family, pts)
    f = form_coefficients(family, x)
    return np.sum(f * delta[..., None, :], axis=-1)


def line_integral(family, base, u, tol=1e-10, prescan=64, max_panels=256):
    """∫ Σ f(y_i) du_i along the straight chart segment from ``base`` to ``u``."""
    base = np.atleast_2d(np.asarray(base, dtype=float))
    u = np.atleast_2d(np.asarray(u, dtype=float))
    base, u = np.broadcast_arrays(base, u)
    delta = u - base
    t = np.linspace(0.0, 1.0, prescan)
    try:
        x = family.chart.x(_segment_points(base, delta, t))
    except InverseOutOfRange:
        raise PathExitsDomain("segment leaves the chart image") from None
    if not np.all(valid_natural(family, x)):
        raise PathExitsDomain("segment leaves the moduli region")

    def composite(panels):
        edges = np.linspace(0.0, 1.0, panels + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 / panels
        nodes = (mids[:, None] + half * _GL_NODES[None, :]).ravel()
        weights = np.tile(half * _GL_WEIGHTS, panels)
        try:
            vals = _form_along(family, base, delta, nodes)
        except InverseOutOfRange:
            raise PathExitsDomain("segment leaves the moduli region") from None
        return vals @ weights

    panels = 1
    coarse = composite(panels)
    while True:
        fine = composite(2 * panels)
        if np.all(np.abs(fine - coarse) <= tol) or 2 * panels >= max_panels:
            return fine
        panels *= 2
        coarse = fine


def energy(family, u, base):
    """Energy report at chart point(s) ``u`` relative to ``base``."""
    u = np.asarray(u, dtype=float)
    single = u.ndim == 1
    value = line_integral(family, base, u)
    x = natural_from_u(family, np.atleast_2d(u))
    grad = form_coefficients(family, x)
    hess = hessian_u(family, x)
    pos, zero, neg = signature_of(hess)
    sig = list(zip(pos.tolist(), zero.tolist(), neg.tolist()))
    if single:
        return EnergyReport(value[0], grad[0], hess[0], sig[0])
    return EnergyReport(value, grad, hess, sig)


def hessian_signature(family, x):
    """Signature of the Hessian in u at natural triple(s) ``x``."""
    pos, zero, neg = signature_of(hessian_u(family, x))
    if np.ndim(pos) == 0:
        return Signature(int(pos), int(zero), int(neg))
    return [Signature(int(a), int(b), int(c)) for a, b, c in zip(pos, zero, neg)]


def homogeneous_u(lam, x):
    """The scale-covariant chart x**(-λ)/(-λ); the all-ones vector when λ = 0."""
    x = np.asarray(x, dtype=float)
    if lam == 0:
        return np.ones_like(x)
    return np.power(x, -lam) / (-lam)


def null_vector_check(family, x):
    """‖H v‖ / (‖H‖ ‖v‖) for the Euclidean scaling direction v."""
    if family.geometry is not E2:
        raise DomainError("null vectors are only predicted for Euclidean families")
    h = hessian_u(family, x)
    v = homogeneous_u(family.lam, x)
    num = np.linalg.norm(np.einsum("...ij,...j->...i", h, v), axis=-1)
    den = np.linalg.norm(h, axis=(-2, -1)) * np.linalg.norm(v, axis=-1)
    return num / den


# -------------------------------------------------------------- Legendre

@dataclass(frozen=True)
class LegendreReport:
    transform: np.ndarray
    dual_energy: np.ndarray
    difference: np.ndarray
    spread: float
    newton_residual: float


def invert_gradient(family, p, u0, tol=1e-12, max_iter=100):
    """Solve ∇F(u) = p by damped Newton from ``u0`` (one cell per row)."""
    u = np.array(np.atleast_2d(u0), dtype=float)
    p = np.atleast_2d(p)
    x = natural_from_u(family, u)
    for _ in range(max_iter):
        r = form_coefficients(family, x) - p
        if np.max(np.abs(r)) <= tol:
            break
        h = hessian_u(family, x)
        step = -np.linalg.solve(h, r[..., None])[..., 0]
        t = np.ones(len(u))
        for _ in range(60):
            trial = u + t[:, None] * step
            try:
                xt = family.chart.x(trial, x0=x)
                ok = valid_natural(family, xt)
            except InverseOutOfRange:
                ok = np.zeros(len(u), dtype=bool)
            if np.all(ok):
                break
            t = np.where(ok, t, 0.5 * t)
        u = trial
        x = natural_from_u(family, u, x0=xt)
    r = form_coefficients(family, x) - p
    return u, x, float(np.max(np.abs(r)))


def legendre_transform(lam, sample_lengths):
    """Check that the Legendre transform of the spherical omega energy at λ
    differs from the one at -λ-1 (on polar cells) by a constant.

    Base point for both energies is the octant, where u = 0.  For each sample
    the dual point p = ∇F_λ is computed, u is recovered from p by Newton
    inversion of the gradient, and LT = u·p - F_λ(u) is compared against
    F_{-λ-1} at the polar cell (π - θ).
    """
    fam = FormFamily("omega", S2, lam)
    dual = FormFamily("omega", S2, -lam - 1.0)
    lengths = np.atleast_2d(np.asarray(sample_lengths, dtype=float))
    sig = hessian_u(fam, lengths)
    if np.any(np.linalg.eigvalsh(0.5 * (sig + np.swapaxes(sig, -1, -2))) <= 0):
        raise NotStrictlyConvex("Hessian is not positive definite at a sample")
    p = form_coefficients(fam, lengths)
    u, x, resid = invert_gradient(fam, p, np.zeros_like(lengths))
    zero = np.zeros_like(u)
    f_val = line_integral(fam, zero, u)
    transform = np.sum(u * p, axis=-1) - f_val
    polar = PI - trig.angles_from_lengths(S2, x)
    dual_val = line_integral(dual, zero, u_from_natural(dual, polar))
    diff = transform - dual_val
    return LegendreReport(transform, dual_val, diff, float(np.ptp(diff)), resid)


# ------------------------------------------------- boundary convexity probe

_CASE_CHARTS = {
    "a": lambda lam: Chart("id", -lam - 1.0, 0.0, 0.0, INF),
    "a-coth": lambda lam: Chart("coth_half", lam + 1.0, 1.0, 0.0, INF),
    "b": lambda lam: Chart("cos", lam, 0.0, -PI / 2, PI / 2),
    "c": lambda lam: Chart("sin", lam, PI / 2, 0.0, PI),
    "d": lambda lam: Chart("sin", lam, PI / 2, 0.0, PI),
}
# (alpha, epsilon) of each bounding surface z = h(α + ε g(x) + ε g(y))
CASE_SURFACES = {
    "a": [(0.0, 1.0)],
    "a-coth": [(0.0, 1.0)],
    "b": [(PI / 2, -1.0)],
    "c": [(0.0, 1.0), (2 * PI, -1.0)],
    "d": [(-PI, 1.0), (PI, -1.0)],
}
CASE_LAMBDA_OK = {
    "a": lambda lam: lam <= -1,
    "a-coth": lambda lam: lam <= -1,
    "b": lambda lam: lam >= 0,
    "c": lambda lam: lam >= 0,
    "d": lambda lam: lam >= 0,
}
# moduli region whose image is claimed convex: (geometry, parameterization)
CASE_REGION = {
    "a": (E2, "lengths"),
    "a-coth": (H2, "lengths"),
    "b": (H2, "angle-radius"),
    "c": (S2, "lengths"),
    "d": (S2, "angles"),
}


def case_chart(case, lam):
    """The map h of a convexity case as a chart (h = chart.u, g = chart.x)."""
    return _CASE_CHARTS[case](lam)


def boundary_hessian_probe(case, lam, x, y, surface=0):
    """Second x-derivative and Hessian determinant of z = h(α + ε g(x) + ε g(y)).

    Uses A = h''/h' with u = g(x), v = g(y), w = α + ε(u + v).
    """
    h = case_chart(case, lam)
    alpha, eps = CASE_SURFACES[case][surface]
    u = float(h.x(x))
    v = float(h.x(y))
    w = alpha + eps * (u + v)
    if not h.inside(w):
        raise DomainError("the combined argument leaves the domain of h")

    def a_of(t):
        return h.gsecond(t) / h.gprime(t)

    hu, hv, hw = h.gprime(u), h.gprime(v), h.gprime(w)
    au, av, aw = a_of(u), a_of(v), a_of(w)
    d2 = eps * hw / hu ** 2 * (eps * aw - au)
    det = eps ** 2 * hw ** 2 / (hu ** 2 * hv ** 2) * (au * av - eps * aw * (au + av))
    return float(d2), float(det)


def boundary_function(case, lam, surface=0):
    """z(x, y) = h(α + ε g(x) + ε g(y)) as a callable (for finite differences)."""
    h = case_chart(case, lam)
    alpha, eps = CASE_SURFACES[case][surface]

    def z(x, y):
        return h.u(alpha + eps * (h.x(x) + h.x(y)))
    return z


def midpoint_convexity(case, lam, pairs):
    """Fraction of failures when midpoints (in h-coordinates) of region points leave the region.

    ``pairs`` has shape (n, 2, 3) in natural coordinates.  Returns the boolean
    array of midpoints that stay inside.
    """
    h = case_chart(case, lam)
    g, param = CASE_REGION[case]
    q = h.u(pairs)
    mid = 0.5 * (q[:, 0] + q[:, 1])
    try:
        p = h.x(mid)
    except InverseOutOfRange:
        return np.zeros(len(pairs), dtype=bool)
    return trig.valid_mask(g, p, param)
