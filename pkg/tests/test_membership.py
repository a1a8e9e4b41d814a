import itertools

import numpy as np
import pytest

from polyform import invariants as I
from polyform import membership as M
from polyform import surface as S
from polyform.errors import IndexMismatch
from polyform.verify import brute_cycle_inside, brute_hyperbolic_subsets, brute_euclidean_subsets, brute_spherical_pairs


def teich(z):
    return M.membership_predicates(S.load_corpus("one_holed_torus"), z, "teich_polytope")


def test_teich_inside():
    v = teich([1, 1, -0.4])
    assert v.inside and v.violation is None


def test_teich_outside_names_cycle():
    v = teich([1, -0.6, -0.6])
    assert not v.inside
    assert v.violation.kind == "cycle"
    assert set(v.violation.edges) == {1, 2}
    assert v.violation.lhs == pytest.approx(-1.2)
    assert "-1.2" in v.violation.describe()


def test_teich_boundary_is_outside():
    assert not teich([1, 1, -1]).inside


def test_teich_matches_pair_sums():
    rng = np.random.default_rng(3)
    for z in rng.uniform(-1, 2, (200, 3)):
        pair_ok = all(z[i] + z[j] > 0 for i, j in itertools.combinations(range(3), 2))
        assert teich(z).inside == pair_ok


def test_regular_phi_zero_satisfies_euclidean_subsets():
    t = S.load_corpus("tetrahedron")
    z = I.phi_lambda(t, None, 0.0).values
    assert z.sum() == pytest.approx(-2 * np.pi)
    assert M.membership_predicates(t, z, "rivin_9_5").inside


def test_euclidean_subsets_reject_off_plane():
    t = S.load_corpus("tetrahedron")
    z = I.phi_lambda(t, None, 0.0).values + 0.01
    v = M.membership_predicates(t, z, "rivin_9_5")
    assert not v.inside and v.violation.kind == "plane"


def test_wrong_size_rejected():
    with pytest.raises(IndexMismatch):
        teich([1, 2])


@pytest.mark.parametrize("name, which, brute", [
    ("one_holed_torus", "teich_polytope", brute_cycle_inside),
    ("genus2_one_boundary", "teich_polytope", brute_cycle_inside),
    ("tetrahedron", "rivin_9_5", brute_euclidean_subsets),
    ("torus", "leibon_9_6", brute_hyperbolic_subsets),
    ("tetrahedron", "spherical_9_9", brute_spherical_pairs),
])
def test_predicates_agree_with_brute_force(name, which, brute):
    s = S.load_corpus(name)
    rng = np.random.default_rng(17)
    for _ in range(15):
        if which == "rivin_9_5":
            z = rng.uniform(-np.pi, 0, s.num_edges)
            z += (np.pi * (s.num_faces - s.num_edges) - z.sum()) / s.num_edges
        elif which == "teich_polytope":
            z = rng.uniform(-1, 2, s.num_edges)
        else:
            z = rng.uniform(-0.5, 3, s.num_edges)
        assert M.membership_predicates(s, z, which).inside == brute(s, z)
