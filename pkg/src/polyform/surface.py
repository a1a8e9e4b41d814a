"""Triangulated closed surfaces, ideally triangulated bordered surfaces,
metrics on them, and edge cycles in the dual graph."""

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import nnls

from . import trig
from .errors import IndexMismatch, InvalidCombinatorics, ParseError
from .trig import E2, H2, HEX, GeometryKind


@dataclass(frozen=True)
class Face:
    edges: tuple
    vertices: tuple


@dataclass(frozen=True)
class ClosedSurface:
    """Triangles glued along edges; corner i of a face sits at vertices[i] and faces edges[i]."""
    num_vertices: int
    num_edges: int
    faces: tuple
    geometry: GeometryKind = None
    lengths: tuple = None
    radii: tuple = None
    kind: str = field(default="closed", init=False)

    def __post_init__(self):
        _check_closed(self)

    @property
    def cells(self):
        return [f.edges for f in self.faces]

    @property
    def num_faces(self):
        return len(self.faces)


@dataclass(frozen=True)
class IdealSurface:
    """Right-angled hexagons glued along alternate (red) edges.

    B-arc i of a hexagon faces edges[i] and is adjacent to the other two.
    """
    num_edges: int
    hexagons: tuple
    geometry: GeometryKind = None
    lengths: tuple = None
    kind: str = field(default="ideal", init=False)

    def __post_init__(self):
        _check_multiplicity(self.num_edges, self.hexagons)
        _check_connected(self.num_edges, self.hexagons)
        if self.lengths is not None and len(self.lengths) != self.num_edges:
            raise IndexMismatch(f"{len(self.lengths)} lengths for {self.num_edges} edges")

    @property
    def cells(self):
        return list(self.hexagons)

    @property
    def num_faces(self):
        return len(self.hexagons)

    @property
    def radii(self):
        return None


# ------------------------------------------------------------- validation

def _check_multiplicity(num_edges, cells):
    count = np.zeros(num_edges, dtype=int)
    for c, edges in enumerate(cells):
        if len(edges) != 3:
            raise InvalidCombinatorics(f"cell {c} does not have three edges")
        for e in edges:
            if not 0 <= e < num_edges:
                raise InvalidCombinatorics(f"cell {c} references edge {e} outside 0..{num_edges - 1}")
            count[e] += 1
    # over-used edges first: they are the ones a user has to hunt for
    for e in sorted(range(num_edges), key=lambda e: (count[e] <= 2, e)):
        n = count[e]
        if n != 2:
            raise InvalidCombinatorics(f"edge multiplicity: edge {e} appears {n} times (expected 2)")


def _check_connected(num_edges, cells):
    if not cells:
        raise InvalidCombinatorics("surface has no cells")
    owners = [[] for _ in range(num_edges)]
    for c, edges in enumerate(cells):
        for e in edges:
            owners[e].append(c)
    seen = {0}
    stack = [0]
    while stack:
        c = stack.pop()
        for e in cells[c]:
            for d in owners[e]:
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
    if len(seen) != len(cells):
        raise InvalidCombinatorics("surface is not connected")


def _check_closed(s):
    cells = s.cells
    _check_multiplicity(s.num_edges, cells)
    ends = {}
    used = set()
    for c, f in enumerate(s.faces):
        if len(f.vertices) != 3:
            raise InvalidCombinatorics(f"face {c} does not have three vertices")
        for v in f.vertices:
            if not 0 <= v < s.num_vertices:
                raise InvalidCombinatorics(f"face {c} references vertex {v} outside 0..{s.num_vertices - 1}")
            used.add(v)
        for i, e in enumerate(f.edges):
            pair = tuple(sorted((f.vertices[(i + 1) % 3], f.vertices[(i + 2) % 3])))
            if ends.setdefault(e, pair) != pair:
                raise InvalidCombinatorics(
                    f"endpoint consistency: edge {e} joins {ends[e]} in one face and {pair} in face {c}")
    if len(used) != s.num_vertices:
        missing = sorted(set(range(s.num_vertices)) - used)
        raise InvalidCombinatorics(f"vertices {missing} belong to no face")
    if 3 * len(cells) != 2 * s.num_edges:
        raise InvalidCombinatorics("3|F| != 2|E|")
    _check_connected(s.num_edges, cells)
    if s.lengths is not None and len(s.lengths) != s.num_edges:
        raise IndexMismatch(f"{len(s.lengths)} lengths for {s.num_edges} edges")
    if s.radii is not None and len(s.radii) != s.num_vertices:
        raise IndexMismatch(f"{len(s.radii)} radii for {s.num_vertices} vertices")


# ----------------------------------------------------------------- I/O

def _field(doc, name, kind, where="document"):
    if name not in doc:
        raise ParseError(f"{where}: missing field '{name}'")
    val = doc[name]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise ParseError(f"{where}: field '{name}' must be an integer")
    if kind is list and not isinstance(val, list):
        raise ParseError(f"{where}: field '{name}' must be a list")
    return val


def _int_triple(val, where):
    if (not isinstance(val, list) or len(val) != 3
            or any(isinstance(x, bool) or not isinstance(x, int) for x in val)):
        raise ParseError(f"{where}: expected a list of three integers")
    return tuple(val)


def _floats(val, where):
    if not isinstance(val, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in val):
        raise ParseError(f"{where}: expected a list of numbers")
    return tuple(float(x) for x in val)


def surface_from_dict(doc):
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    kind = _field(doc, "kind", str)
    geometry = doc.get("geometry")
    if geometry is not None:
        try:
            geometry = GeometryKind.parse(geometry)
        except Exception:
            raise ParseError(f"field 'geometry': unknown value {geometry!r}") from None
    num_edges = _field(doc, "num_edges", int)
    faces = _field(doc, "faces", list)
    lengths = _floats(doc["lengths"], "field 'lengths'") if doc.get("lengths") is not None else None
    if kind == "closed":
        nv = _field(doc, "num_vertices", int)
        parsed = []
        for i, f in enumerate(faces):
            where = f"faces[{i}]"
            if not isinstance(f, dict):
                raise ParseError(f"{where}: expected an object")
            parsed.append(Face(_int_triple(_field(f, "edges", list, where), where + ".edges"),
                               _int_triple(_field(f, "vertices", list, where), where + ".vertices")))
        radii = _floats(doc["radii"], "field 'radii'") if doc.get("radii") is not None else None
        return ClosedSurface(nv, num_edges, tuple(parsed), geometry, lengths, radii)
    if kind == "ideal":
        if geometry is not None and geometry is not H2 and geometry is not HEX:
            raise ParseError("ideal surfaces carry hyperbolic geometry only")
        hexes = []
        for i, f in enumerate(faces):
            where = f"faces[{i}]"
            if not isinstance(f, dict):
                raise ParseError(f"{where}: expected an object")
            hexes.append(_int_triple(_field(f, "edges", list, where), where + ".edges"))
        return IdealSurface(num_edges, tuple(hexes), geometry, lengths)
    raise ParseError(f"field 'kind': expected 'closed' or 'ideal', got {kind!r}")


def parse_surface(text):
    """Parse a surface document, validating every combinatorial invariant."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return surface_from_dict(doc)


def surface_to_dict(s):
    doc = {"kind": s.kind}
    if s.geometry is not None:
        # hexagon cells live in the hyperbolic plane
        doc["geometry"] = "hyperbolic" if s.geometry is HEX else s.geometry.value
    if s.kind == "closed":
        doc["num_vertices"] = s.num_vertices
    doc["num_edges"] = s.num_edges
    if s.kind == "closed":
        doc["faces"] = [{"edges": list(f.edges), "vertices": list(f.vertices)} for f in s.faces]
    else:
        doc["faces"] = [{"edges": list(h)} for h in s.hexagons]
    if s.lengths is not None:
        doc["lengths"] = list(s.lengths)
    if s.radii is not None:
        doc["radii"] = list(s.radii)
    return doc


def serialize_surface(s):
    return json.dumps(surface_to_dict(s), indent=2) + "\n"


CORPUS = ("tetrahedron", "octahedron", "icosahedron", "torus", "one_holed_torus", "genus2_one_boundary")


def corpus_text(name):
    return resources.files("polyform.corpus").joinpath(f"{name}.json").read_text()


def load_corpus(name):
    return parse_surface(corpus_text(name))


_KEEP = object()


def with_metric(s, lengths=_KEEP, radii=_KEEP, geometry=None):
    """A copy of ``s`` with replaced metric data (omitted fields are kept)."""
    geometry = s.geometry if geometry is None else GeometryKind.parse(geometry)
    lengths = s.lengths if lengths is _KEEP else lengths
    lengths = None if lengths is None else tuple(float(x) for x in lengths)
    if s.kind == "closed":
        radii = s.radii if radii is _KEEP else radii
        radii = None if radii is None else tuple(float(x) for x in radii)
        return ClosedSurface(s.num_vertices, s.num_edges, s.faces, geometry, lengths, radii)
    return IdealSurface(s.num_edges, s.hexagons, geometry, lengths)


# --------------------------------------------------------------- metrics

def cell_geometry(s, geometry=None):
    """The trigonometric regime of one cell: hexagons for ideal surfaces."""
    if s.kind == "ideal":
        return HEX
    g = s.geometry if geometry is None else geometry
    if g is None:
        raise IndexMismatch("surface carries no geometry")
    return GeometryKind.parse(g)


def edge_array(s):
    return np.array(s.cells, dtype=int)


def face_lengths(s, lengths):
    """(|F|, 3) array of per-slot lengths."""
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (s.num_edges,):
        raise IndexMismatch(f"expected {s.num_edges} edge values, got shape {lengths.shape}")
    return lengths[edge_array(s)]


def vertex_array(s):
    return np.array([f.vertices for f in s.faces], dtype=int)


def packing_lengths(s, radii):
    """Edge lengths l(vv') = r(v) + r(v') induced by vertex radii."""
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (s.num_vertices,):
        raise IndexMismatch(f"expected {s.num_vertices} radii, got shape {radii.shape}")
    out = np.empty(s.num_edges)
    for f in s.faces:
        for i, e in enumerate(f.edges):
            out[e] = radii[f.vertices[(i + 1) % 3]] + radii[f.vertices[(i + 2) % 3]]
    return out


@dataclass(frozen=True)
class MetricVerdict:
    valid: bool
    violations: tuple  # (face index, [messages])


def validate_metric(s, lengths=None, radii=None, geometry=None):
    """Check every face of a length (or radius-induced) metric."""
    g = cell_geometry(s, geometry)
    if radii is not None:
        if s.kind != "closed":
            raise IndexMismatch("radii apply to closed surfaces only")
        if np.any(np.asarray(radii, dtype=float) <= 0):
            bad = [int(v) for v in np.flatnonzero(np.asarray(radii) <= 0)]
            return MetricVerdict(False, tuple((-1, [f"radius of vertex {v} must be positive"]) for v in bad))
        lengths = packing_lengths(s, radii)
    if lengths is None:
        raise IndexMismatch("metric missing")
    fl = face_lengths(s, lengths)
    ok = trig.valid_mask(g, fl, "lengths")
    bad = []
    for c in np.flatnonzero(~ok):
        bad.append((int(c), trig.moduli_membership(g, fl[c], "lengths").violations))
    return MetricVerdict(not bad, tuple(bad))


def euler_characteristic(s):
    """|V| - |E| + |F| for closed surfaces; |F| - |E| for ideal ones (hexagons
    deformation-retract onto the dual graph)."""
    if s.kind == "closed":
        return s.num_vertices - s.num_edges + s.num_faces
    return s.num_faces - s.num_edges


def vertex_degrees(s):
    """Number of corners at each vertex, counted with multiplicity."""
    deg = np.zeros(s.num_vertices, dtype=int)
    for f in s.faces:
        for v in f.vertices:
            deg[v] += 1
    return deg


def boundary_components(s):
    """Number of boundary circles of an ideal surface (orientable gluing assumed)."""
    parent = list(range(3 * s.num_faces))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    slots = {}
    for c, h in enumerate(s.hexagons):
        for i, e in enumerate(h):
            slots.setdefault(e, []).append((c, i))
    for e, ((c, i), (d, j)) in slots.items():
        # edge at slot i runs from arc i+1 to arc i+2; gluing reverses direction
        a1, a2 = 3 * c + (i + 1) % 3, 3 * c + (i + 2) % 3
        b1, b2 = 3 * d + (j + 1) % 3, 3 * d + (j + 2) % 3
        parent[find(a1)] = find(b2)
        parent[find(a2)] = find(b1)
    return len({find(a) for a in range(3 * s.num_faces)})


# ----------------------------------------------------------- edge cycles

@dataclass(frozen=True)
class EdgeCycle:
    """Closed non-backtracking walk in the dual graph.

    ``pairs[t] = (e, c)``: edge e is crossed into cell c, which is then left
    through the next edge of the sequence.
    """
    pairs: tuple

    @property
    def edges(self):
        return tuple(e for e, _ in self.pairs)

    @property
    def fundamental(self):
        return max(np.bincount(self.edges)) <= 2

    def vector(self, num_edges):
        return np.bincount(self.edges, minlength=num_edges).astype(float)

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class CycleList:
    cycles: tuple
    truncated: bool


def _slots(s):
    """Dart structure: slot = 3 * cell + position; partner[slot] is the other side of its edge."""
    cells = s.cells
    partner = np.empty(3 * len(cells), dtype=int)
    where = {}
    for c, edges in enumerate(cells):
        for i, e in enumerate(edges):
            where.setdefault(e, []).append(3 * c + i)
    for a, b in where.values():
        partner[a], partner[b] = b, a
    edge_of = np.array([e for edges in cells for e in edges], dtype=int)
    return partner, edge_of


def _canonical(darts, partner):
    """Key of a dart cycle up to rotation and reversal (a dart is its start slot)."""
    n = len(darts)
    rev = [int(partner[d]) for d in reversed(darts)]
    best = None
    for seq in (list(darts), rev):
        for r in range(n):
            cand = tuple(seq[r:] + seq[:r])
            if best is None or cand < best:
                best = cand
    return best


def _is_power(seq):
    n = len(seq)
    return any(n % p == 0 and seq == seq[:p] * (n // p) for p in range(1, n))


def dart_cycles(s, max_count=10_000, max_length=None):
    """All primitive closed non-backtracking dart walks using each edge at most twice.

    Returns (list of canonical dart tuples, truncated flag).
    """
    partner, edge_of = _slots(s)
    nd = len(partner)
    max_length = 2 * s.num_edges if max_length is None else max_length
    found = {}
    truncated = False
    if max_count <= 0:
        return [], True

    def successors(d):
        land = partner[d]
        c = land // 3
        return [3 * c + j for j in range(3) if 3 * c + j != land]

    for d0 in range(nd):
        use = np.zeros(s.num_edges, dtype=int)
        path = [d0]
        use[edge_of[d0]] += 1
        stack = [iter(successors(d0))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                d = path.pop()
                use[edge_of[d]] -= 1
                continue
            if nxt < d0:
                continue
            if nxt == d0:
                if not _is_power(path):
                    key = _canonical(path, partner)
                    if key not in found:
                        found[key] = None
                        if len(found) > max_count:
                            truncated = True
                            break
                continue
            if len(path) >= max_length or use[edge_of[nxt]] >= 2:
                continue
            path.append(nxt)
            use[edge_of[nxt]] += 1
            stack.append(iter(successors(nxt)))
        if truncated:
            break
    keys = sorted(found, key=lambda k: (len(k), k))
    if truncated:
        keys = keys[:max_count]
    return keys, truncated


def _to_cycle(darts, partner, edge_of):
    return EdgeCycle(tuple((int(edge_of[d]), int(partner[d]) // 3) for d in darts))


def _irredundant(cycles, num_edges):
    """Drop cycles whose edge-count vector is a nonnegative combination of the others.

    Only the remaining cycles contribute independent inequalities Σ z > 0.
    Cycles sharing a direction are tested once, through their shortest member.
    """
    first = {}
    for c in cycles:
        v = c.vector(num_edges)
        key = tuple(np.round(v / np.linalg.norm(v), 12))
        first.setdefault(key, (c, v))
    reps = list(first.values())
    mat = np.array([v for _, v in reps]).T
    keep = []
    for i, (c, v) in enumerate(reps):
        # a combination reproducing v can only use vectors supported inside v
        fits = ~np.any(mat[v == 0] > 0, axis=0) if np.any(v == 0) else np.ones(len(reps), dtype=bool)
        fits[i] = False
        others = mat[:, fits]
        if others.shape[1]:
            _, res = nnls(others, v)
            if res < 1e-9:
                continue
        keep.append(c)
    return keep


def enumerate_fundamental_edge_cycles(s, max_count=10_000, irredundant=True):
    """Fundamental edge cycles up to rotation and reversal.

    With ``irredundant`` the list is reduced to cycles whose inequality
    Σ z(e) > 0 is not implied by the others.
    """
    partner, edge_of = _slots(s)
    keys, truncated = dart_cycles(s, max_count)
    cycles = [_to_cycle(k, partner, edge_of) for k in keys]
    if irredundant and cycles:
        cycles = _irredundant(cycles, s.num_edges)
    return CycleList(tuple(cycles), truncated)


def edge_owners(s):
    """For each edge, the two (cell, slot) positions where it appears."""
    out = [[] for _ in range(s.num_edges)]
    for c, edges in enumerate(s.cells):
        for i, e in enumerate(edges):
            out[e].append((c, i))
    return out


def corner_incidence(s):
    """Sparse description of the corners at each vertex: list of (face, slot)."""
    out = [[] for _ in range(s.num_vertices)]
    for c, f in enumerate(s.faces):
        for i, v in enumerate(f.vertices):
            out[v].append((c, i))
    return out


def edge_vertex_pairs(s):
    """Unordered endpoint pair of every edge of a closed surface."""
    out = [None] * s.num_edges
    for f in s.faces:
        for i, e in enumerate(f.edges):
            out[e] = (f.vertices[(i + 1) % 3], f.vertices[(i + 2) % 3])
    return out


def subsets(n):
    """Nonempty subsets of range(n) as boolean masks, smallest first."""
    for k in range(1, n + 1):
        for combo in itertools.combinations(range(n), k):
            m = np.zeros(n, dtype=bool)
            m[list(combo)] = True
            yield m
