"""Trigonometry of single cells.

A cell is a triangle in the Euclidean plane, the unit sphere or the
hyperbolic plane, or a right-angled hyperbolic hexagon.  For the hexagon the
"lengths" are the three pairwise non-adjacent edges and the "angles" slot holds
the three opposite edges: edge i of the second triple faces edge i of the
first.

Every function accepts a single triple or an array of shape (..., 3) and
broadcasts over the leading axes.
"""

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NearDegenerate, ScaleIndeterminate

CLAMP_TOL = 1e-12
NEAR_DEGENERATE = 1e-9

_J = np.array([1, 2, 0])  # the "next" index j for i = 0, 1, 2
_K = np.array([2, 0, 1])


class GeometryKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERICAL = "spherical"
    HYPERBOLIC = "hyperbolic"
    HEXAGON = "hexagon"

    @property
    def kappa(self):
        """Curvature sign, or None for right-angled hexagons."""
        return {"euclidean": 0, "spherical": 1, "hyperbolic": -1}.get(self.value)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown geometry {value!r}") from None


E2 = GeometryKind.EUCLIDEAN
S2 = GeometryKind.SPHERICAL
H2 = GeometryKind.HYPERBOLIC
HEX = GeometryKind.HEXAGON

PARAMETERIZATIONS = ("lengths", "angles", "length-radius", "angle-radius")


@dataclass(frozen=True)
class DerivativePack:
    """A 3x3 Jacobian (output index first) and its positive Gram quantity."""
    jac: np.ndarray
    gram_A: np.ndarray


@dataclass(frozen=True)
class Membership:
    inside: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.inside


def _triple(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise DomainError(f"expected a triple, got shape {x.shape}")
    return x


def _rot(x):
    """Return the (i, j, k) rotations x, x[..., J], x[..., K]."""
    return x, x[..., _J], x[..., _K]


def _arccos(c):
    if np.any(np.abs(c) > 1.0 + CLAMP_TOL) or not np.all(np.isfinite(c)):
        raise DomainError("cosine-law argument outside [-1, 1]")
    return np.arccos(np.clip(c, -1.0, 1.0))


def _arccosh(c):
    if np.any(c < 1.0 - CLAMP_TOL) or not np.all(np.isfinite(c)):
        raise DomainError("cosine-law argument below 1")
    return np.arccosh(np.maximum(c, 1.0))


# ---------------------------------------------------------------- membership

def _pairwise_names(sym, rel, rhs):
    return [f"{sym}{i + 1}+{sym}{j + 1} {rel} {rhs(k)}" for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1))]


def _violations(g, x, parameterization):
    x = np.asarray(x, dtype=float)
    out = []
    if x.shape != (3,) or not np.all(np.isfinite(x)):
        return ["point must be a finite triple"]
    a, b, c = x
    pairs = ((a + b, c, 2), (b + c, a, 0), (c + a, b, 1))
    pi = np.pi

    def need(ok, text):
        if not ok:
            out.append(text)

    if parameterization == "lengths":
        for i in range(3):
            need(x[i] > 0, f"l{i + 1} > 0")
        if g is not HEX:
            for (s, o, k), name in zip(pairs, _pairwise_names("l", ">", lambda k: f"l{k + 1}")):
                need(s > o, name)
        if g is S2:
            for i in range(3):
                need(x[i] < pi, f"l{i + 1} < pi")
            need(a + b + c < 2 * pi, "l1+l2+l3 < 2pi")
    elif parameterization == "angles":
        if g is HEX:
            for i in range(3):
                need(x[i] > 0, f"theta{i + 1} > 0")
            return out
        for i in range(3):
            need(0 < x[i] < pi, f"0 < theta{i + 1} < pi")
        s = a + b + c
        if g is E2:
            need(abs(s - pi) <= 1e-12, "theta1+theta2+theta3 = pi")
        elif g is H2:
            need(s < pi, "theta1+theta2+theta3 < pi")
        else:
            need(s > pi, "theta1+theta2+theta3 > pi")
            for (t, o, k), name in zip(pairs, _pairwise_names("theta", "<", lambda k: f"theta{k + 1}+pi")):
                need(t < o + pi, name)
    elif parameterization == "length-radius":
        for i in range(3):
            need(x[i] > 0, f"r{i + 1} > 0")
        if g is S2:
            need(a + b + c < pi, "r1+r2+r3 < pi")
    elif parameterization == "angle-radius":
        if g is E2:
            out.append("angle-radius triples are not defined for Euclidean triangles")
            return out
        if g is HEX:
            for (s, o, k), name in zip(pairs, _pairwise_names("r", ">", lambda k: "0")):
                need(s > 0, name)
            return out
        for i in range(3):
            need(-pi / 2 < x[i] < pi / 2, f"-pi/2 < r{i + 1} < pi/2")
        for (s, o, k), name in zip(pairs, _pairwise_names("r", ">", lambda k: "0")):
            need(s > 0, name)
        if g is H2:
            need(a + b + c < pi / 2, "r1+r2+r3 < pi/2")
        else:
            need(a + b + c > pi / 2, "r1+r2+r3 > pi/2")
            for (s, o, k), name in zip(pairs, _pairwise_names("r", "<", lambda k: "pi")):
                need(s < pi, name)
    else:
        out.append(f"unknown parameterization {parameterization!r}")
    return out


def moduli_membership(g, point, parameterization="lengths"):
    """Report whether ``point`` lies in the open moduli region, naming failures."""
    g = GeometryKind.parse(g)
    v = _violations(g, point, parameterization)
    return Membership(not v, v)


def valid_mask(g, x, parameterization="lengths"):
    """Vectorized membership test over an array of triples (no messages)."""
    g = GeometryKind.parse(g)
    x = np.asarray(x, dtype=float)
    a, b, c = x[..., 0], x[..., 1], x[..., 2]
    s = a + b + c
    pi = np.pi
    ok = np.all(np.isfinite(x), axis=-1)
    if parameterization == "lengths":
        ok &= np.all(x > 0, axis=-1)
        if g is not HEX:
            ok &= (a + b > c) & (b + c > a) & (c + a > b)
        if g is S2:
            ok &= np.all(x < pi, axis=-1) & (s < 2 * pi)
    elif parameterization == "angles":
        ok &= np.all(x > 0, axis=-1)
        if g is not HEX:
            ok &= np.all(x < pi, axis=-1)
        if g is E2:
            ok &= np.abs(s - pi) <= 1e-12
        elif g is H2:
            ok &= s < pi
        elif g is S2:
            ok &= (s > pi) & (a + b < c + pi) & (b + c < a + pi) & (c + a < b + pi)
    elif parameterization == "length-radius":
        ok &= np.all(x > 0, axis=-1)
        if g is S2:
            ok &= s < pi
    elif parameterization == "angle-radius":
        if g is E2:
            return np.zeros(ok.shape, dtype=bool)
        ok &= (a + b > 0) & (b + c > 0) & (c + a > 0)
        if g is not HEX:
            ok &= np.all(np.abs(x) < pi / 2, axis=-1)
        if g is H2:
            ok &= s < pi / 2
        elif g is S2:
            ok &= (s > pi / 2) & (a + b < pi) & (b + c < pi) & (c + a < pi)
    else:
        raise DomainError(f"unknown parameterization {parameterization!r}")
    return ok


def _require(g, x, parameterization):
    ok = valid_mask(g, x, parameterization)
    if np.all(ok):
        return
    flat = x.reshape(-1, 3)
    row = flat[np.flatnonzero(~ok.reshape(-1))[0]]
    v = _violations(g, row, parameterization)
    raise DomainError(f"{g.value} {parameterization} {tuple(row)} violates " + "; ".join(v))


# ------------------------------------------------------------- cosine laws

def angles_from_lengths(g, l, check=True):
    """Angles opposite each edge (hexagon: lengths of the opposite edges)."""
    g = GeometryKind.parse(g)
    l = _triple(l)
    if check:
        _require(g, l, "lengths")
    li, lj, lk = _rot(l)
    if g is E2:
        c = (lj ** 2 + lk ** 2 - li ** 2) / (2 * lj * lk)
        return _arccos(c)
    if g is S2:
        c = (np.cos(li) - np.cos(lj) * np.cos(lk)) / (np.sin(lj) * np.sin(lk))
        return _arccos(c)
    if g is H2:
        c = (np.cosh(lj) * np.cosh(lk) - np.cosh(li)) / (np.sinh(lj) * np.sinh(lk))
        return _arccos(c)
    c = (np.cosh(li) + np.cosh(lj) * np.cosh(lk)) / (np.sinh(lj) * np.sinh(lk))
    return _arccosh(c)


def lengths_from_angles(g, theta, check=True):
    """Inverse of :func:`angles_from_lengths` for the non-Euclidean cells."""
    g = GeometryKind.parse(g)
    theta = _triple(theta)
    if g is E2:
        raise ScaleIndeterminate("Euclidean lengths are determined by angles only up to scale")
    if check:
        _require(g, theta, "angles")
    ti, tj, tk = _rot(theta)
    if g is S2:
        c = (np.cos(ti) + np.cos(tj) * np.cos(tk)) / (np.sin(tj) * np.sin(tk))
        return _arccos(c)
    if g is H2:
        c = (np.cos(ti) + np.cos(tj) * np.cos(tk)) / (np.sin(tj) * np.sin(tk))
        return _arccosh(c)
    c = (np.cosh(ti) + np.cosh(tj) * np.cosh(tk)) / (np.sinh(tj) * np.sinh(tk))
    return _arccosh(c)


def gram_quantity(g, l, index=0):
    """The sine-law quantity sin(y_i) sin(x_j) sin(x_k), made real per geometry.

    Triangles use x = angles and y = lengths (lengths rescaled to first order
    in the Euclidean case), so A = s(l_i) sin(theta_j) sin(theta_k) with
    s = id, sin, sinh.  For the hexagon x = lengths and y = opposite edges,
    giving A = sinh(theta_i) sinh(l_j) sinh(l_k).  ``index`` selects i; the
    value does not depend on it.
    """
    g = GeometryKind.parse(g)
    l = _triple(l)
    th = angles_from_lengths(g, l)
    i, j, k = index % 3, (index + 1) % 3, (index + 2) % 3
    if g is HEX:
        return np.sinh(th[..., i]) * np.sinh(l[..., j]) * np.sinh(l[..., k])
    s = {E2: lambda t: t, S2: np.sin, H2: np.sinh}[g]
    return s(l[..., i]) * np.sin(th[..., j]) * np.sin(th[..., k])


def gram_determinant_form(g, l):
    """Right-hand side of A**2 = 1 - Σcos²x - 2Πcos x, with the sign fixed so it equals A**2.

    Zero for Euclidean triangles, where the relation degenerates.
    """
    g = GeometryKind.parse(g)
    l = _triple(l)
    if g is HEX:
        c = np.cosh(l)
        return np.sum(c ** 2, axis=-1) + 2 * np.prod(c, axis=-1) - 1.0
    c = np.cos(angles_from_lengths(g, l))
    rhs = 1.0 - np.sum(c ** 2, axis=-1) - 2 * np.prod(c, axis=-1)
    return {E2: 0.0 * rhs, S2: rhs, H2: -rhs}[g]


def _warn_if_degenerate(a):
    if np.any(np.abs(a) < NEAR_DEGENERATE):
        warnings.warn("Gram quantity below 1e-9; derivatives are ill-conditioned", NearDegenerate, stacklevel=3)


def _offdiag_assemble(diag, coeff):
    """Build J with J_ii = diag_i and J_ij = diag_i * coeff_k, k the third index."""
    shape = diag.shape[:-1]
    jac = np.zeros(shape + (3, 3))
    for i in range(3):
        jac[..., i, i] = diag[..., i]
        for j in range(3):
            if j != i:
                k = 3 - i - j
                jac[..., i, j] = diag[..., i] * coeff[..., k]
    return jac


def jacobian_angles_wrt_lengths(g, l):
    """Closed-form ∂θ_i/∂l_j.

    Triangles: ∂θ_i/∂l_i = sin θ_i / A and ∂θ_i/∂l_j = -∂θ_i/∂l_i cos θ_k.
    Hexagon: the same with sinh θ_i and cosh θ_k.
    """
    g = GeometryKind.parse(g)
    l = _triple(l)
    th = angles_from_lengths(g, l)
    if g is HEX:
        a = np.sinh(th[..., 0]) * np.sinh(th[..., 1]) * np.sinh(l[..., 2])
        diag = np.sinh(th) / a[..., None]
        coeff = -np.cosh(th)
    else:
        a = gram_quantity(g, l, index=2)
        diag = np.sin(th) / a[..., None]
        coeff = -np.cos(th)
    _warn_if_degenerate(a)
    return DerivativePack(_offdiag_assemble(diag, coeff), a)


def jacobian_lengths_wrt_angles(g, theta):
    """Closed-form ∂l_i/∂θ_j for spherical and hyperbolic triangles and hexagons.

    Spherical: ∂l_i/∂θ_i = sin l_i / A > 0, ∂l_i/∂θ_j = ∂l_i/∂θ_i cos l_k.
    Hyperbolic: ∂l_i/∂θ_i = -sinh l_i / A < 0, ∂l_i/∂θ_j = ∂l_i/∂θ_i cosh l_k.
    Hexagon: ∂l_i/∂θ_i = sinh l_i / A, ∂l_i/∂θ_j = -∂l_i/∂θ_i cosh l_k.
    """
    g = GeometryKind.parse(g)
    theta = _triple(theta)
    l = lengths_from_angles(g, theta)
    if g is S2:
        a = np.sin(l[..., 0]) * np.sin(l[..., 1]) * np.sin(theta[..., 2])
        diag, coeff = np.sin(l) / a[..., None], np.cos(l)
    elif g is H2:
        a = np.sinh(l[..., 0]) * np.sinh(l[..., 1]) * np.sin(theta[..., 2])
        diag, coeff = -np.sinh(l) / a[..., None], np.cosh(l)
    else:
        a = np.sinh(l[..., 0]) * np.sinh(l[..., 1]) * np.sinh(theta[..., 2])
        diag, coeff = np.sinh(l) / a[..., None], -np.cosh(l)
    _warn_if_degenerate(a)
    return DerivativePack(_offdiag_assemble(diag, coeff), a)


# ------------------------------------------------------------------- radii

_SUM_MATRIX = np.ones((3, 3)) - np.eye(3)  # ∂x_i/∂r_j for x_i = r_j + r_k


def _radius_kind(kind):
    kind = kind.replace("_", "-")
    if not kind.endswith("-radius"):
        kind += "-radius"
    if kind not in ("length-radius", "angle-radius"):
        raise DomainError(f"unknown radius kind {kind!r}")
    return kind


def radius_inputs(r):
    """x_i = r_j + r_k."""
    r = _triple(r)
    return r @ _SUM_MATRIX


def radius_outputs(g, r, kind):
    """The cell quantity y determined by the radius triple.

    length-radius: lengths l_i = r_j + r_k, returns the angles (hexagon: the
    opposite edges).  angle-radius: angles (hexagon: the opposite edges)
    θ_i = r_j + r_k, returns the lengths.
    """
    g = GeometryKind.parse(g)
    kind = _radius_kind(kind)
    r = _triple(r)
    _require(g, r, kind)
    x = radius_inputs(r)
    if kind == "length-radius":
        return angles_from_lengths(g, x, check=False)
    return lengths_from_angles(g, x, check=False)


def radius_jacobian(g, r, kind):
    """Closed-form ∂y_i/∂r_j, the cell Jacobian composed with x_i = r_j + r_k."""
    g = GeometryKind.parse(g)
    kind = _radius_kind(kind)
    r = _triple(r)
    _require(g, r, kind)
    x = radius_inputs(r)
    if kind == "length-radius":
        pack = jacobian_angles_wrt_lengths(g, x)
    else:
        pack = jacobian_lengths_wrt_angles(g, x)
    return DerivativePack(pack.jac @ _SUM_MATRIX, pack.gram_A)


def radius_ratio(g, r, kind):
    """Predicted (∂y_i/∂r_j)/(∂y_j/∂r_i) as a 3x3 matrix (diagonal is 1).

    This is cos(r_i)/cos(r_j) = tan(y_i/2)/tan(y_j/2) written in the real
    variables of each geometry.
    """
    g = GeometryKind.parse(g)
    kind = _radius_kind(kind)
    y = radius_outputs(g, r, kind)
    if kind == "length-radius":
        t = 1.0 / (np.tanh(y / 2) if g is HEX else np.tan(y / 2))
    elif g is S2:
        t = np.tan(y / 2)
    elif g is H2:
        t = np.tanh(y / 2)
    else:
        t = 1.0 / np.tanh(y / 2)
    return t[..., :, None] / t[..., None, :]


def tangent_law(g, r, kind="length-radius", index=0):
    """Index-independent tangent-law quantity of a radius triple.

    Returned forms, with y the output of :func:`radius_outputs`:

    - Euclidean length-radius: the inradius r_i tan(θ_i/2)
    - spherical / hyperbolic length-radius: cot²(θ_i/2)/s²(r_i), s = sin, sinh
    - hexagon length-radius: coth²(θ_i/2)/cosh²(r_i)
    - spherical angle-radius: tan²(l_i/2)/cos²(r_i)
    - hyperbolic angle-radius: tanh²(l_i/2)/cos²(r_i)
    - hexagon angle-radius: coth²(l_i/2)/cosh²(r_i)
    """
    g = GeometryKind.parse(g)
    kind = _radius_kind(kind)
    r = _triple(r)
    y = radius_outputs(g, r, kind)[..., index % 3]
    ri = r[..., index % 3]
    if kind == "length-radius":
        if g is E2:
            return ri * np.tan(y / 2)
        if g is S2:
            return 1.0 / (np.tan(y / 2) ** 2 * np.sin(ri) ** 2)
        if g is H2:
            return 1.0 / (np.tan(y / 2) ** 2 * np.sinh(ri) ** 2)
        return 1.0 / (np.tanh(y / 2) ** 2 * np.cosh(ri) ** 2)
    if g is S2:
        return np.tan(y / 2) ** 2 / np.cos(ri) ** 2
    if g is H2:
        return np.tanh(y / 2) ** 2 / np.cos(ri) ** 2
    return 1.0 / (np.tanh(y / 2) ** 2 * np.cosh(ri) ** 2)


def tangent_law_closed(g, r, kind="length-radius"):
    """The same quantity written symmetrically in r (no cell trigonometry)."""
    g = GeometryKind.parse(g)
    kind = _radius_kind(kind)
    r = _triple(r)
    s = np.sum(r, axis=-1)
    if kind == "length-radius":
        if g is E2:
            return np.sqrt(np.prod(r, axis=-1) / s)
        if g is S2:
            return np.sin(s) / np.prod(np.sin(r), axis=-1)
        if g is H2:
            return np.sinh(s) / np.prod(np.sinh(r), axis=-1)
        return np.cosh(s) / np.prod(np.cosh(r), axis=-1)
    if g is S2:
        return -np.cos(s) / np.prod(np.cos(r), axis=-1)
    if g is H2:
        return np.cos(s) / np.prod(np.cos(r), axis=-1)
    return np.cosh(s) / np.prod(np.cosh(r), axis=-1)


# ------------------------------------------- two sides and the included angle

@dataclass(frozen=True)
class SecondKindPack:
    """Partials of (y_i, x_j) as functions of (y_j, y_k, x_i).

    Triangles: x = angles and y = lengths.  Hexagon: x = lengths and y = the
    opposite edges, so the fixed data are two opposite edges and the edge
    between them.
    """
    dyi_dyj: float
    dyi_dxi: float
    dxj_dyk: float
    dxj_dyj: float
    dxj_dxi: float
    gram_A: float

    def as_array(self):
        return np.array([self.dyi_dyj, self.dyi_dxi, self.dxj_dyk, self.dxj_dyj, self.dxj_dxi])


def second_kind_cell(g, fixed):
    """Complete the cell from (y_j, y_k, x_i); returns (x, y) in the i=0, j=1, k=2 labeling."""
    g = GeometryKind.parse(g)
    yj, yk, xi = (float(v) for v in fixed)
    if g is HEX:
        if min(yj, yk, xi) <= 0:
            raise DomainError("hexagon edges must be positive")
        yi = _arccosh(np.sinh(yj) * np.sinh(yk) * np.cosh(xi) - np.cosh(yj) * np.cosh(yk))
        y = np.array([yi, yj, yk])
        return angles_from_lengths(HEX, y), y
    if not 0 < xi < np.pi or min(yj, yk) <= 0:
        raise DomainError("need positive sides and an included angle in (0, pi)")
    if g is E2:
        yi = np.sqrt(yj ** 2 + yk ** 2 - 2 * yj * yk * np.cos(xi))
    elif g is S2:
        if max(yj, yk) >= np.pi:
            raise DomainError("spherical sides must lie in (0, pi)")
        yi = _arccos(np.cos(yj) * np.cos(yk) + np.sin(yj) * np.sin(yk) * np.cos(xi))
    else:
        yi = _arccosh(np.cosh(yj) * np.cosh(yk) - np.sinh(yj) * np.sinh(yk) * np.cos(xi))
    y = np.array([yi, yj, yk])
    return angles_from_lengths(g, y), y


def second_kind_derivatives(g, fixed):
    """Closed-form partials for the side-angle-side parameterization."""
    g = GeometryKind.parse(g)
    x, y = second_kind_cell(g, fixed)
    if g is HEX:
        # x = red edges l, y = opposite edges θ; fixed (θ_j, θ_k, l_i)
        th, l = y, x
        a = np.sinh(th[0]) * np.sinh(l[1]) * np.sinh(l[2])
        return SecondKindPack(
            dyi_dyj=np.cosh(l[2]),
            dyi_dxi=np.sinh(l[1]) * np.sinh(th[2]),
            dxj_dyk=-np.sinh(l[1]) / np.tanh(th[0]),
            dxj_dyj=-np.sinh(l[2]) / np.sinh(th[0]),
            dxj_dxi=-np.sinh(l[1]) * np.cosh(l[2]) / np.sinh(l[0]),
            gram_A=a,
        )
    s, cot = {
        E2: (lambda t: t, lambda t: 1.0 / t),
        S2: (np.sin, lambda t: 1.0 / np.tan(t)),
        H2: (np.sinh, lambda t: 1.0 / np.tanh(t)),
    }[g]
    a = np.sin(x[0]) * np.sin(x[1]) * s(y[2])
    return SecondKindPack(
        dyi_dyj=np.cos(x[2]),
        dyi_dxi=np.sin(x[1]) * s(y[2]),
        dxj_dyk=-np.sin(x[1]) * cot(y[0]),
        dxj_dyj=np.sin(x[2]) / s(y[0]),
        dxj_dxi=-np.sin(x[1]) * np.cos(x[2]) / np.sin(x[0]),
        gram_A=a,
    )
