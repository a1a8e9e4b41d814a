"""Classify how a sequence of metrics approaches the boundary of its moduli space."""

from dataclasses import dataclass, field

import numpy as np

from . import trig
from .invariants import corner_radii
from .surface import _slots, edge_array, face_lengths, packing_lengths
from .trig import E2, H2, HEX, S2, GeometryKind


@dataclass(frozen=True)
class Thresholds:
    small: float = 1e-6
    large: float = 50.0
    angle: float = 1e-4
    near_pi: float = 1e-6

    def relaxed(self):
        return Thresholds(1e-3, 10.0, 1e-2, 1e-3)


@dataclass(frozen=True)
class DegenerationKind:
    label: str
    edges: tuple = ()
    faces: tuple = ()
    vertices: tuple = ()
    cycle: tuple = ()
    cycle_kind: str = ""
    details: dict = field(default_factory=dict)

    def as_dict(self):
        out = {"label": self.label, "edges": list(self.edges), "faces": list(self.faces),
               "vertices": list(self.vertices)}
        if self.cycle:
            out["cycle"] = list(self.cycle)
            out["cycle_kind"] = self.cycle_kind
        for k, v in self.details.items():
            out[k] = v
        return out


def _angles_loose(g, fl):
    """Cell angles of possibly near-degenerate cells, clamping the cosine law."""
    li, lj, lk = fl, fl[:, [1, 2, 0]], fl[:, [2, 0, 1]]
    with np.errstate(all="ignore"):
        if g is E2:
            c = (lj ** 2 + lk ** 2 - li ** 2) / (2 * lj * lk)
        elif g is S2:
            c = (np.cos(li) - np.cos(lj) * np.cos(lk)) / (np.sin(lj) * np.sin(lk))
        elif g is H2:
            # ratio form stays finite for long edges
            c = (np.cosh(lj - lk) + np.cosh(lj + lk) - 2 * np.cosh(li)) / (np.cosh(lj + lk) - np.cosh(lj - lk))
        else:
            return np.arccosh(np.maximum((np.cosh(li) + np.cosh(lj) * np.cosh(lk)) / (np.sinh(lj) * np.sinh(lk)), 1.0))
    c = np.where(np.isfinite(c), c, np.sign(np.nan_to_num(c)))
    return np.arccos(np.clip(c, -1.0, 1.0))


def find_cycle(s, allowed):
    """A closed non-backtracking dual walk whose every step (cell, entry slot, exit slot)
    satisfies ``allowed``; returns the edge sequence or ()."""
    partner, edge_of = _slots(s)
    nd = len(partner)

    def succ(d):
        land = partner[d]
        c, i = divmod(land, 3)
        return [3 * c + j for j in range(3) if j != i and allowed(c, i, j)]

    for d0 in range(nd):
        path, seen = [d0], {d0}
        while True:
            nxt = succ(path[-1])
            if not nxt:
                break
            d = nxt[0]
            if d in seen:
                k = path.index(d)
                return tuple(int(edge_of[x]) for x in path[k:])
            path.append(d)
            seen.add(d)
    return ()


def _flat_cycle(s, th, tol):
    """(π, 0, 0)-angled edge cycle: enter a cell through the edge facing a near-π angle."""
    def allowed(c, i, j):
        return th[c, i] > np.pi - tol and th[c, j] < tol
    return find_cycle(s, allowed)


def _long_cycle(s, fl, th, big, tol):
    """(∞, ∞, 0) cycle: consecutive edges, longer than ``big``, meeting at a near-zero angle."""
    def allowed(c, i, j):
        k = 3 - i - j
        return fl[c, i] > big and fl[c, j] > big and th[c, k] < tol
    return find_cycle(s, allowed)


def degeneration_monitor(s, tail, geometry=None, radii=False, thresholds=Thresholds()):
    """Classify the last metric of ``tail`` (lengths, or radii with ``radii=True``).

    Returns a DegenerationKind or None when the metric is not near the boundary.
    """
    tail = np.atleast_2d(np.asarray(tail, dtype=float))
    x = tail[-1]
    t = thresholds
    if radii:
        small = np.flatnonzero(x < t.small)
        if small.size:
            return DegenerationKind("radius_to_zero", vertices=tuple(int(v) for v in small))
        big = np.flatnonzero(x > t.large)
        if big.size:
            return DegenerationKind("radius_to_infinity", vertices=tuple(int(v) for v in big))
        g = GeometryKind.parse(geometry)
        if g is E2 and x.max() / x.min() > 1.0 / t.small:
            return DegenerationKind("radius_to_zero", vertices=(int(np.argmin(x)),))
        return None
    if s.kind == "ideal":
        return _ideal(s, x, t)
    g = GeometryKind.parse(geometry if geometry is not None else s.geometry)
    fl = face_lengths(s, x)
    if g is E2:
        return _euclidean(s, x, fl, t)
    if g is H2:
        return _hyperbolic(s, x, fl, t)
    return _spherical(s, x, fl, t)


def _ideal(s, x, t):
    fl = face_lengths(s, x)
    with np.errstate(all="ignore"):
        th = trig.angles_from_lengths(HEX, np.clip(fl, 1e-300, 700), check=False)
    r = corner_radii(th)
    rmax = float(np.nanmax(np.abs(r))) if np.any(np.isfinite(r)) else np.inf
    details = {"max_abs_r": rmax}
    small = np.flatnonzero(x < t.small)
    if small.size:
        return DegenerationKind("length_to_zero", edges=tuple(int(e) for e in small), details=details)
    big = np.flatnonzero(x > t.large)
    if big.size:
        return DegenerationKind("length_to_infinity", edges=tuple(int(e) for e in big), details=details)
    if not np.isfinite(rmax) or rmax > t.large:
        faces = tuple(int(c) for c in np.flatnonzero(np.any(~np.isfinite(r) | (np.abs(r) > t.large), axis=1)))
        return DegenerationKind("r_coordinate_blowup", faces=faces, details=details)
    return None


def _euclidean(s, x, fl, t):
    rel = x / x.sum()
    small = np.flatnonzero(rel < t.small)
    th = _angles_loose(E2, fl)
    if small.size:
        return DegenerationKind("edge_to_zero", edges=tuple(int(e) for e in small))
    flat = np.flatnonzero(np.any(th > np.pi - t.angle, axis=1))
    if flat.size:
        cyc = _flat_cycle(s, th, t.angle)
        return DegenerationKind("flat_triangle_(pi,0,0)", faces=tuple(int(c) for c in flat), cycle=cyc,
                                cycle_kind="(pi,0,0)" if cyc else "")
    return None


def _hyperbolic(s, x, fl, t):
    th = _angles_loose(H2, fl)
    big = np.flatnonzero(x > t.large)
    if big.size:
        cyc = _long_cycle(s, fl, th, t.large, t.angle)
        return DegenerationKind("I", edges=tuple(int(e) for e in big), cycle=cyc,
                                cycle_kind="(inf,inf,0)" if cyc else "")
    small = x < t.small
    if np.all(small):
        return DegenerationKind("III", edges=tuple(range(s.num_edges)))
    if np.any(small):
        return DegenerationKind("II", edges=tuple(int(e) for e in np.flatnonzero(small)))
    # long edges pinching to zero angle signal type I before any length passes the cap
    cyc = _long_cycle(s, fl, th, 0.0, t.angle)
    if cyc:
        return DegenerationKind("I", edges=tuple(sorted(set(cyc))), cycle=cyc, cycle_kind="(inf,inf,0)")
    flat = np.flatnonzero(np.any(th > np.pi - t.angle, axis=1))
    if flat.size:
        cyc = _flat_cycle(s, th, t.angle)
        return DegenerationKind("IV", faces=tuple(int(c) for c in flat), cycle=cyc,
                                cycle_kind="(pi,0,0)" if cyc else "")
    return None


def spherical_face_type(l, t=Thresholds()):
    """Label a near-degenerate spherical triangle with a1..a6, or ''."""
    z = l < t.small
    p = l > np.pi - t.near_pi
    if np.all(z):
        return "a1"
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        if z[i] and p[j] and p[k]:
            return "a2"
        if z[i] and not p[j] and not p[k]:
            return "a3"
        if p[i] and abs(l[j] + l[k] - np.pi) < t.near_pi:
            return "a4"
    if np.all(~z & ~p):
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            if l[i] > l[j] + l[k] - t.near_pi:
                return "a5"
        if l.sum() > 2 * np.pi - t.near_pi:
            return "a6"
    return ""


def _spherical(s, x, fl, t):
    labels = [spherical_face_type(row, t) for row in fl]
    hit = [c for c, lab in enumerate(labels) if lab]
    if not hit:
        return None
    order = ["a1", "a2", "a3", "a4", "a5", "a6"]
    lab = min((labels[c] for c in hit), key=order.index)
    faces = tuple(c for c in hit if labels[c] == lab)
    cyc = ()
    if lab == "a5":
        cyc = _flat_cycle(s, _angles_loose(S2, fl), t.angle)
    edges = tuple(sorted({int(e) for c in faces for e in edge_array(s)[c]}))
    return DegenerationKind(lab, edges=edges, faces=faces, cycle=cyc, cycle_kind="(pi,0,0)" if cyc else "")


def packing_tail_lengths(s, radii_tail):
    return np.array([packing_lengths(s, r) for r in np.atleast_2d(radii_tail)])
