import copy
import itertools
import json

import numpy as np
import pytest

from polyform import surface as S
from polyform.errors import IndexMismatch, InvalidCombinatorics, ParseError
from polyform.trig import E2, H2, S2


def corpus_doc(name):
    return json.loads(S.corpus_text(name))


def test_tetrahedron_parses():
    t = S.load_corpus("tetrahedron")
    assert (t.num_vertices, t.num_edges, t.num_faces) == (4, 6, 4)
    assert S.euler_characteristic(t) == 2
    assert list(S.vertex_degrees(t)) == [3, 3, 3, 3]


def test_octahedron_and_torus_degrees():
    o = S.load_corpus("octahedron")
    assert S.euler_characteristic(o) == 2 and set(S.vertex_degrees(o)) == {4}
    t = S.load_corpus("torus")
    assert (t.num_vertices, t.num_edges, t.num_faces) == (1, 3, 2)
    assert S.euler_characteristic(t) == 0 and list(S.vertex_degrees(t)) == [6]


@pytest.mark.parametrize("name", S.CORPUS)
def test_corpus_counts(name):
    s = S.load_corpus(name)
    assert 3 * s.num_faces == 2 * s.num_edges
    counts = np.bincount(np.ravel(s.cells), minlength=s.num_edges)
    assert np.all(counts == 2)


def test_ideal_surfaces():
    s = S.load_corpus("one_holed_torus")
    assert s.kind == "ideal" and s.num_edges == 3 and s.num_faces == 2
    assert S.euler_characteristic(s) == -1
    assert S.boundary_components(s) == 1
    g2 = S.load_corpus("genus2_one_boundary")
    assert S.euler_characteristic(g2) == -3
    assert S.boundary_components(g2) == 1


def test_edge_used_three_times_is_rejected():
    doc = corpus_doc("tetrahedron")
    doc["faces"][1]["edges"] = [3, 3, 4]
    with pytest.raises(InvalidCombinatorics, match="edge multiplicity: edge 3"):
        S.surface_from_dict(doc)


def test_inconsistent_endpoints_rejected():
    doc = corpus_doc("tetrahedron")
    doc["faces"][0]["vertices"] = [1, 3, 2]
    with pytest.raises(InvalidCombinatorics):
        S.surface_from_dict(doc)


def test_disconnected_rejected():
    doc = corpus_doc("tetrahedron")
    two = copy.deepcopy(doc)
    for f in two["faces"]:
        f["edges"] = [e + 6 for e in f["edges"]]
        f["vertices"] = [v + 4 for v in f["vertices"]]
    doc["faces"] += two["faces"]
    doc["num_edges"], doc["num_vertices"] = 12, 8
    doc.pop("lengths")
    with pytest.raises(InvalidCombinatorics):
        S.surface_from_dict(doc)


def test_bad_json_and_bad_fields():
    with pytest.raises(ParseError):
        S.parse_surface("{not json")
    doc = corpus_doc("tetrahedron")
    doc["num_edges"] = "six"
    with pytest.raises(ParseError):
        S.surface_from_dict(doc)


def test_wrong_metric_length():
    doc = corpus_doc("tetrahedron")
    doc["lengths"] = [1.0] * 5
    with pytest.raises(IndexMismatch):
        S.surface_from_dict(doc)


@pytest.mark.parametrize("name", S.CORPUS)
def test_serialization_round_trip(name):
    s = S.load_corpus(name)
    again = S.parse_surface(S.serialize_surface(s))
    assert S.surface_to_dict(again) == S.surface_to_dict(s)


def test_metric_validation():
    t = S.load_corpus("tetrahedron")
    assert S.validate_metric(t, [1.0] * 6).valid
    bad = S.validate_metric(t, [2.2] * 6, geometry=S2)
    assert not bad.valid and len(bad.violations) == 4
    assert all("2pi" in why[0] for _, why in bad.violations)
    ideal = S.load_corpus("one_holed_torus")
    assert S.validate_metric(ideal, [0.01, 20.0, 3.0]).valid


def test_packing_lengths_add_radii():
    t = S.load_corpus("tetrahedron")
    r = np.array([0.1, 0.2, 0.3, 0.4])
    lengths = S.packing_lengths(t, r)
    for e, (a, b) in enumerate(S.edge_vertex_pairs(t)):
        assert lengths[e] == pytest.approx(r[a] + r[b])


def test_with_metric_keeps_combinatorics():
    t = S.load_corpus("tetrahedron")
    h = S.with_metric(t, lengths=[2.0] * 6, geometry=H2)
    assert h.geometry is H2 and h.lengths == (2.0,) * 6 and h.faces == t.faces
    assert S.with_metric(h, geometry=E2).lengths == (2.0,) * 6


def _walk_is_closed(s, cyc):
    """Each crossing enters a cell holding both the entry and the exit edge."""
    cells = s.cells
    n = len(cyc.pairs)
    for t, (e, c) in enumerate(cyc.pairs):
        nxt = cyc.pairs[(t + 1) % n][0]
        row = list(cells[c])
        if e not in row or nxt not in row:
            return False
        if e == nxt and row.count(e) < 2:
            return False
    return True


def test_one_holed_torus_cycles_are_the_three_pairs():
    s = S.load_corpus("one_holed_torus")
    found = S.enumerate_fundamental_edge_cycles(s)
    assert not found.truncated
    assert sorted(tuple(sorted(c.edges)) for c in found.cycles) == [(0, 1), (0, 2), (1, 2)]
    assert _brute_two_cycles(s) == {(0, 1), (0, 2), (1, 2)}


def _brute_two_cycles(s):
    # edge pairs shared by two distinct cells walk back and forth between them
    out = set()
    for a, b in itertools.combinations(range(s.num_edges), 2):
        owners_a = {c for c, row in enumerate(s.cells) if a in row}
        owners_b = {c for c, row in enumerate(s.cells) if b in row}
        if len(owners_a & owners_b) == 2:
            out.add((a, b))
    return out


@pytest.mark.parametrize("name", ["tetrahedron", "octahedron", "torus", "one_holed_torus"])
def test_cycles_are_closed_fundamental_walks(name):
    s = S.load_corpus(name)
    found = S.enumerate_fundamental_edge_cycles(s)
    assert found.cycles
    for c in found.cycles:
        assert c.fundamental
        assert _walk_is_closed(s, c)


def test_tetrahedron_vertex_links_present():
    t = S.load_corpus("tetrahedron")
    edge_sets = {frozenset(c.edges) for c in S.enumerate_fundamental_edge_cycles(t).cycles}
    pairs = S.edge_vertex_pairs(t)
    for v in range(4):
        link = frozenset(e for e, p in enumerate(pairs) if v in p)
        assert link in edge_sets


def test_zero_budget_truncates():
    out = S.enumerate_fundamental_edge_cycles(S.load_corpus("tetrahedron"), max_count=0)
    assert out.cycles == () and out.truncated
