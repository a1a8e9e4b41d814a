"""Edge invariants φ_λ, ψ_λ, vertex curvatures k_λ and the linear identities
tying them together."""

from dataclasses import dataclass, field

import numpy as np

from . import trig
from .errors import InvalidMetric
from .quadrature import power_integral
from .surface import (cell_geometry, corner_incidence, edge_array, euler_characteristic,
                      face_lengths, packing_lengths, validate_metric, vertex_array, vertex_degrees)
from .trig import E2, H2, HEX

HALF_PI = 0.5 * np.pi


@dataclass(frozen=True)
class InvariantVector:
    kind: str
    lam: float
    values: np.ndarray
    flags: tuple = field(default=())


def _checked_lengths(s, lengths=None, radii=None, geometry=None):
    g = cell_geometry(s, geometry)
    if radii is not None:
        lengths = packing_lengths(s, radii)
    if lengths is None:
        lengths = s.lengths
    if lengths is None:
        raise InvalidMetric("metric missing")
    lengths = np.asarray(lengths, dtype=float)
    verdict = validate_metric(s, lengths, geometry=g)
    if not verdict.valid:
        face, why = verdict.violations[0]
        raise InvalidMetric(f"face {face}: " + "; ".join(why))
    return g, lengths


def face_angles(s, lengths, geometry=None):
    """(|F|, 3) corner angles; for ideal surfaces the B-arc lengths."""
    g = cell_geometry(s, geometry)
    return trig.angles_from_lengths(g, face_lengths(s, lengths), check=False)


def corner_radii(theta):
    """r_i = (θ_j + θ_k - θ_i) / 2 per cell."""
    return 0.5 * (theta.sum(axis=-1, keepdims=True) - 2.0 * theta)


def _edge_sum(s, per_slot):
    out = np.zeros(s.num_edges)
    np.add.at(out, edge_array(s).ravel(), per_slot.ravel())
    return out


def _vertex_sum(s, per_corner):
    out = np.zeros(s.num_vertices)
    np.add.at(out, vertex_array(s).ravel(), per_corner.ravel())
    return out


def phi_lambda(s, lengths=None, lam=0.0, geometry=None):
    """φ_λ(e): Σ over the two angles facing e of ∫_{π/2}^{angle} sin^λ."""
    g, lengths = _checked_lengths(s, lengths, geometry=geometry)
    th = face_angles(s, lengths, g)
    vals = _edge_sum(s, power_integral("sin", lam, HALF_PI, th))
    return InvariantVector("phi", lam, vals)


def psi_lambda(s, lengths=None, lam=0.0, geometry=None):
    """ψ_λ(e): Σ over the two cells at e of ∫_0^{r} w^λ, r = (b + c - a)/2.

    a is the angle (B-arc for hexagons) facing e and b, c the two adjacent
    ones; w = cos for triangles and cosh for hexagons.
    """
    g, lengths = _checked_lengths(s, lengths, geometry=geometry)
    th = face_angles(s, lengths, g)
    base = "cosh" if g is HEX else "cos"
    vals = _edge_sum(s, power_integral(base, lam, 0.0, corner_radii(th)))
    flags = () if g in (H2, HEX) else ("outside rigidity scope",)
    return InvariantVector("psi", lam, vals, flags)


def k_lambda(s, lengths=None, lam=0.0, geometry=None, radii=None):
    """k_λ(v): Σ over corners at v of ∫_{π/2}^{θ} tan^λ(t/2)."""
    g, lengths = _checked_lengths(s, lengths, radii, geometry)
    th = face_angles(s, lengths, g)
    vals = _vertex_sum(s, power_integral("tan_half", lam, HALF_PI, th))
    return InvariantVector("k", lam, vals)


def classical_curvature(s, lengths=None, geometry=None, radii=None):
    """2π minus the angle sum at each vertex."""
    g, lengths = _checked_lengths(s, lengths, radii, geometry)
    th = face_angles(s, lengths, g)
    return InvariantVector("classical_k", 0.0, 2 * np.pi - _vertex_sum(s, th))


def endpoint_matrix(s):
    """M[v, e] = number of ends of e at v (2 for a loop)."""
    m = np.zeros((s.num_vertices, s.num_edges))
    for f in s.faces:
        for i, e in enumerate(f.edges):
            m[f.vertices[(i + 1) % 3], e] += 0.5
            m[f.vertices[(i + 2) % 3], e] += 0.5
    return m


def vertex_sums(s, z):
    """L(z)(v) = Σ over edge ends at v of z(e)."""
    return endpoint_matrix(s) @ np.asarray(z, dtype=float)


@dataclass(frozen=True)
class IdentityReport:
    residuals: dict
    notes: tuple = ()

    @property
    def worst(self):
        return max(self.residuals.values(), default=0.0)


def linear_identities_report(s, lengths=None, geometry=None):
    """Residuals of the linear identities that apply to the metric's geometry.

    - k0_vs_classical (all): k_0(v) + k(v) - (2 - m(v)/2)π
    - gauss_bonnet (Euclidean): Σ k(v) - 2πχ
    - phi0_total (Euclidean): Σ φ_0(e) - π(|F| - |E|)
    - phi0_vertex (Euclidean): L(φ_0)(v) - (k(v) - 2π)
    - psi0_vertex (hyperbolic): L(ψ_0)(v) - (2π - k(v))
    """
    g, lengths = _checked_lengths(s, lengths, geometry=geometry)
    k = classical_curvature(s, lengths, g).values
    k0 = k_lambda(s, lengths, 0.0, g).values
    m = vertex_degrees(s)
    res = {"k0_vs_classical": float(np.max(np.abs(k0 + k - (2 - m / 2) * np.pi)))}
    if g is E2:
        phi0 = phi_lambda(s, lengths, 0.0, g).values
        res["gauss_bonnet"] = float(abs(k.sum() - 2 * np.pi * euler_characteristic(s)))
        res["phi0_total"] = float(abs(phi0.sum() - np.pi * (s.num_faces - s.num_edges)))
        res["phi0_vertex"] = float(np.max(np.abs(vertex_sums(s, phi0) - (k - 2 * np.pi))))
    if g is H2:
        psi0 = psi_lambda(s, lengths, 0.0, g).values
        res["psi0_vertex"] = float(np.max(np.abs(vertex_sums(s, psi0) - (2 * np.pi - k))))
    return IdentityReport(res)


def curvature_jacobian(s, lengths, geometry=None, h=1e-6):
    """Central-difference Jacobian of classical curvature in the edge lengths."""
    g = cell_geometry(s, geometry)
    lengths = np.asarray(lengths, dtype=float)
    cols = []
    for e in range(s.num_edges):
        d = np.zeros(s.num_edges)
        d[e] = h
        kp = classical_curvature(s, lengths + d, g).values
        km = classical_curvature(s, lengths - d, g).values
        cols.append((kp - km) / (2 * h))
    return np.array(cols).T


def numerical_rank(a, rel=1e-8):
    sv = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(sv > rel * sv[0])) if sv.size else 0


def vertex_corner_count(s):
    return np.array([len(c) for c in corner_incidence(s)])
