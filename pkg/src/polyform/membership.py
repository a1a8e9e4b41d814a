"""Linear-inequality descriptions of invariant images, checked exhaustively.

Subset conditions are evaluated over every subset at once with bit masks,
so the edge count is capped at MAX_EDGES.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IndexMismatch, TooLargeForExhaustiveCheck
from .surface import dart_cycles, edge_array, _slots, _to_cycle

MAX_EDGES = 20
PLANE_TOL = 1e-9
PREDICATES = ("teich_polytope", "rivin_9_5", "leibon_9_6", "spherical_9_9", "delaunay_phi", "delaunay_psi")


@dataclass(frozen=True)
class Violation:
    kind: str           # "cycle", "subset", "plane" or "box"
    edges: tuple        # cycle edge sequence, subset I, or offending edges
    lhs: float
    rhs: float
    extra: tuple = ()   # the J subset for the spherical condition

    def describe(self):
        if self.kind == "cycle":
            return f"edge cycle {list(self.edges)} sums to {self.lhs:.6g} (needs > 0)"
        if self.kind == "plane":
            return f"total {self.lhs:.6g} differs from {self.rhs:.6g}"
        if self.kind == "box":
            return f"edges {list(self.edges)} outside the allowed box"
        j = f", J={list(self.extra)}" if self.extra else ""
        return f"subset I={list(self.edges)}{j}: {self.lhs:.6g} vs bound {self.rhs:.6g}"


@dataclass(frozen=True)
class MembershipVerdict:
    inside: bool
    violation: Violation = None
    checked: int = 0


def _masks(n):
    if n > MAX_EDGES:
        raise TooLargeForExhaustiveCheck(f"{n} edges exceed the exhaustive limit of {MAX_EDGES}")
    m = np.arange(1, 1 << n, dtype=np.int64)
    bits = ((m[:, None] >> np.arange(n)) & 1).astype(np.int8)
    return bits


def _face_counts(s, bits):
    """Per-subset, per-face number of edge slots in the subset."""
    return bits[:, edge_array(s)].sum(axis=2)


def _members(row):
    return tuple(int(e) for e in np.flatnonzero(row))


def _first(bad, order_key):
    idx = np.flatnonzero(bad)
    return idx[np.argmin(order_key[idx])] if idx.size else None


def _subset_check(s, z, strict_greater, rhs_fn, exclude_full=False):
    """Subsets I with no cell having exactly two edge slots in I."""
    n = s.num_edges
    bits = _masks(n)
    counts = _face_counts(s, bits)
    ok_shape = ~np.any(counts == 2, axis=1)
    if exclude_full:
        ok_shape &= bits.sum(axis=1) < n
    lhs = bits @ z
    rhs = rhs_fn(bits, counts)
    sat = lhs > rhs if strict_greater else lhs < rhs
    bad = ok_shape & ~sat
    i = _first(bad, bits.sum(axis=1) * (1 << n) + np.arange(len(bits)))
    checked = int(ok_shape.sum())
    if i is None:
        return None, checked
    return Violation("subset", _members(bits[i]), float(lhs[i]), float(rhs[i])), checked


def cycle_check(s, z, max_count=100_000):
    keys, truncated = dart_cycles(s, max_count)
    if truncated:
        raise TooLargeForExhaustiveCheck("edge-cycle enumeration exceeded its limit")
    partner, edge_of = _slots(s)
    for k in keys:
        c = _to_cycle(k, partner, edge_of)
        total = float(np.sum(z[list(c.edges)]))
        if not total > 0:
            return Violation("cycle", c.edges, total, 0.0), len(keys)
    return None, len(keys)


def _plane(s, z):
    target = np.pi * (s.num_faces - s.num_edges)
    total = float(z.sum())
    if abs(total - target) > PLANE_TOL * max(1.0, abs(target)):
        return Violation("plane", (), total, target)
    return None


def euclidean_subsets(s, z):
    return _subset_check(s, z, True, lambda b, c: np.pi * np.sum(c == 3, axis=1) - np.pi * b.sum(axis=1),
                         exclude_full=True)


def hyperbolic_subsets(s, z):
    return _subset_check(s, z, False, lambda b, c: 0.5 * np.pi * np.sum(c >= 1, axis=1))


def spherical_pairs(s, z):
    """Disjoint (I, J) with I ∪ J nonempty.

    Admissible pairs have no cell with three slots in J, exactly two in
    I ∪ J, or two in I plus one in J.  The bound is

        Σ_I z - Σ_J z > π|F(I)| - π|G(I, J)| - π|H(J)| - π(|I| - |J|)

    with F(I) the cells inside I, G(I, J) the cells with two slots in J and
    one in I, and H(J) the cells whose only slot in I ∪ J lies in J.
    """
    n = s.num_edges
    bits = _masks(n)
    ea = edge_array(s)
    union_counts = bits[:, ea].sum(axis=2)
    good_u = ~np.any(union_counts == 2, axis=1)
    checked = 0
    best = None
    for u in np.flatnonzero(good_u):
        members = np.flatnonzero(bits[u])
        k = len(members)
        split = ((np.arange(1 << k)[:, None] >> np.arange(k)) & 1).astype(bool)
        jbits = np.zeros((len(split), n), dtype=np.int8)
        jbits[:, members] = split
        ibits = bits[u][None, :] - jbits
        jc = jbits[:, ea].sum(axis=2)
        ic = ibits[:, ea].sum(axis=2)
        ok = ~np.any((jc == 3) | ((ic == 2) & (jc == 1)), axis=1)
        lhs = ibits @ z - jbits @ z
        rhs = np.pi * (np.sum(ic == 3, axis=1) - np.sum((jc == 2) & (ic == 1), axis=1)
                       - np.sum((jc == 1) & (ic == 0), axis=1)
                       - ibits.sum(axis=1) + jbits.sum(axis=1))
        checked += int(ok.sum())
        bad = np.flatnonzero(ok & ~(lhs > rhs))
        if bad.size and best is None:
            b = bad[0]
            best = Violation("subset", _members(ibits[b]), float(lhs[b]), float(rhs[b]), _members(jbits[b]))
    return best, checked


def membership_predicates(s, z, which):
    """Test ``z`` (per-edge values) against one of the polytope descriptions.

    teich_polytope: every edge cycle has positive sum (ideal surfaces).
    rivin_9_5: the φ_0 plane and the subset inequalities of Euclidean metrics.
    leibon_9_6: cycle positivity and the subset bounds of hyperbolic metrics.
    spherical_9_9: the (I, J) inequalities of spherical φ_0.
    delaunay_phi / delaunay_psi: the Delaunay polytopes with their boxes.
    Curved boundary pieces (the W hypersurfaces) are not tested.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (s.num_edges,):
        raise IndexMismatch(f"expected {s.num_edges} edge values, got shape {z.shape}")
    checked = 0
    if which == "teich_polytope":
        v, checked = cycle_check(s, z)
        return MembershipVerdict(v is None, v, checked)
    if which in ("rivin_9_5", "delaunay_phi"):
        v = _plane(s, z)
        if v is None and which == "delaunay_phi":
            out = np.flatnonzero((z < -np.pi) | (z > 0))
            v = Violation("box", tuple(int(e) for e in out), 0.0, 0.0) if out.size else None
        if v is None:
            v, checked = euclidean_subsets(s, z)
        return MembershipVerdict(v is None, v, checked)
    if which == "leibon_9_6":
        v, checked = cycle_check(s, z)
        if v is None:
            v, c2 = hyperbolic_subsets(s, z)
            checked += c2
        return MembershipVerdict(v is None, v, checked)
    if which == "delaunay_psi":
        out = np.flatnonzero((z <= 0) | (z > np.pi))
        v = Violation("box", tuple(int(e) for e in out), 0.0, 0.0) if out.size else None
        if v is None:
            v, checked = hyperbolic_subsets(s, z)
        return MembershipVerdict(v is None, v, checked)
    if which == "spherical_9_9":
        v, checked = spherical_pairs(s, z)
        return MembershipVerdict(v is None, v, checked)
    raise ValueError(f"unknown predicate {which!r}")
