import numpy as np
import pytest

from polyform import verify
from polyform import surface as S


def test_central_jacobian_of_a_linear_map():
    a = np.array([[1.0, 2.0, 0.0], [0.0, -1.0, 3.0], [4.0, 0.0, 1.0]])
    x = np.random.default_rng(0).normal(size=(5, 3))
    for rich in (False, True):
        jac = verify.central_jacobian(lambda z: z @ a.T, x, richardson=rich)
        np.testing.assert_allclose(jac, np.broadcast_to(a, (5, 3, 3)), atol=1e-8)


def test_richardson_beats_plain_differences():
    x = np.array([[0.7, 1.1, 0.4]])
    exact = np.diag(np.cos(x[0]))
    plain = verify.central_jacobian(np.sin, x, h=1e-3)[0]
    rich = verify.central_jacobian(np.sin, x, h=1e-3, richardson=True)[0]
    assert np.max(np.abs(rich - exact)) < 1e-3 * np.max(np.abs(plain - exact))


def test_suite_rng_depends_on_seed_and_name():
    a = verify.suite_rng(0, "legendre").random()
    assert a == verify.suite_rng(0, "legendre").random()
    assert a != verify.suite_rng(1, "legendre").random()
    assert a != verify.suite_rng(0, "closedness").random()


@pytest.mark.parametrize("name", ["derivative_laws", "index_independence", "closedness", "signatures",
                                  "legendre", "convexity", "worked_values", "angle_structures",
                                  "membership"])
def test_suites_pass_on_small_samples(name):
    res = verify.run_suite(name, samples=8, seed=3)
    assert res.passed, res.metrics
    assert res.metrics


def test_round_trips_with_few_seeds():
    passed, metrics = verify.round_trips(0, verify.suite_rng(0, "round_trips"), seeds=2)
    assert passed
    assert all(m["failures"] == 0 for k, m in metrics.items() if isinstance(m, dict))


def test_teich_polytope_with_few_targets():
    passed, metrics = verify.teich_polytope(0, verify.suite_rng(0, "teich_polytope"), interior=5, exterior=3)
    assert passed and metrics["exterior_failures"] == 0
    assert metrics["symmetric_error"] < 1e-8


def test_zero_samples_pass_vacuously():
    res = verify.run_suite("closedness", samples=0)
    assert res.passed and res.metrics == {} and res.notes


def test_unknown_suite():
    with pytest.raises(KeyError):
        verify.run_suite("nope")


def test_rejection_sampler_respects_the_polytope():
    s = S.load_corpus("one_holed_torus")
    rng = np.random.default_rng(1)
    inside = verify.sample_polytope(s, 30, rng)
    outside = verify.sample_polytope(s, 30, rng, inside=False)
    assert all(verify.brute_cycle_inside(s, z) for z in inside)
    assert not any(verify.brute_cycle_inside(s, z) for z in outside)


def test_brute_force_euclidean_subsets_on_regular_tetrahedron():
    from polyform import invariants as I
    t = S.load_corpus("tetrahedron")
    z = I.phi_lambda(t, None, 0.0).values
    assert verify.brute_euclidean_subsets(t, z)
    assert not verify.brute_euclidean_subsets(t, z + 0.1)
