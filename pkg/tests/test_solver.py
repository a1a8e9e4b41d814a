import warnings

import numpy as np
import pytest

from polyform import invariants as I
from polyform import solver as V
from polyform import surface as S
from polyform.errors import ConfigError, IndexMismatch, InvalidMetric
from polyform.trig import E2, H2, S2

SYM_ARC = np.arccosh(np.cosh(1) / (np.cosh(1) - 1))


@pytest.fixture(autouse=True)
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


@pytest.fixture
def tet():
    return S.load_corpus("tetrahedron")


@pytest.fixture
def torus1():
    return S.load_corpus("one_holed_torus")


def monotone(rep):
    e = np.array(rep.energies)
    return np.all(rep.sense * np.diff(e) <= 1e-12 * max(1.0, np.max(np.abs(e))))


# ------------------------------------------------------------ configuration

def test_default_config_values():
    c = V.SolverConfig()
    assert (c.grad_tol, c.max_iter, c.armijo_factor, c.armijo_c1) == (1e-10, 100, 0.5, 1e-4)


@pytest.mark.parametrize("kwargs", [
    {"grad_tol": 0.0}, {"max_iter": 0}, {"armijo_factor": 1.0}, {"armijo_c1": 0.6},
])
def test_bad_config_rejected(kwargs):
    with pytest.raises(ConfigError):
        V.SolverConfig(**kwargs)


def test_euclidean_targets_need_scale_fixing():
    with pytest.raises(ConfigError):
        V.TargetSpec("phi_closed", E2, -1.0, np.zeros(6))
    with pytest.raises(ConfigError):
        V.TargetSpec("psi_closed", H2, -1.0, np.zeros(6), "euclidean_scale_fixed")
    with pytest.raises(ConfigError):
        V.TargetSpec("curvature", H2, 0.0, np.zeros(4))
    V.TargetSpec("k_circle_packing", E2, 0.0, np.zeros(4), "euclidean_scale_fixed")


def test_target_size_checked(tet):
    spec = V.TargetSpec("k_circle_packing", H2, 0.0, np.zeros(6))
    with pytest.raises(IndexMismatch):
        V.solve(tet, spec, [1.0] * 4)


def test_invalid_init_rejected(tet):
    spec = V.TargetSpec("phi_closed", S2, -1.0, np.zeros(6))
    with pytest.raises(InvalidMetric):
        V.solve(tet, spec, [2.5] * 6)


def test_wrong_geometry_for_solver(tet):
    with pytest.raises(ConfigError):
        V.solve_psi_closed(tet, V.TargetSpec("psi_closed", S2, -1.0, np.zeros(6)), [1.0] * 6)
    with pytest.raises(ConfigError):
        V.solve_teich(tet, 0.0, np.ones(6))


# ------------------------------------------------------------ circle packings

def test_hyperbolic_packing_round_trip(tet):
    target = I.k_lambda(tet, None, 0.0, H2, radii=[0.5] * 4).values
    rep = V.solve_circle_packing(tet, V.TargetSpec("k_circle_packing", H2, 0.0, target), [1.0] * 4)
    assert rep.converged and rep.solution_kind == "radii"
    np.testing.assert_allclose(rep.solution, 0.5, atol=1e-8)
    assert rep.extra["invariant_residual"] < 1e-8
    assert monotone(rep)


def test_euclidean_packing_keeps_scale_of_init(tet):
    target = np.full(4, -np.pi / 2)
    spec = V.TargetSpec("k_circle_packing", E2, 0.0, target, "euclidean_scale_fixed")
    rep = V.solve_circle_packing(tet, spec, [0.7, 1.0, 1.3, 1.0])
    assert rep.converged
    r = rep.solution
    np.testing.assert_allclose(r / r[0], 1.0, atol=1e-8)


def test_unreachable_curvature_degenerates(tet):
    spec = V.TargetSpec("k_circle_packing", H2, 0.0, np.array([-1e6, -2.0, -2.0, -2.0]))
    rep = V.solve_circle_packing(tet, spec, [1.0] * 4)
    assert rep.status in ("Degenerated", "MaxIter")
    assert rep.degeneration is not None
    assert rep.degeneration.label == "radius_to_infinity" and rep.degeneration.vertices == (0,)


def test_gradient_equals_invariant_minus_target(tet):
    rng = np.random.default_rng(5)
    target = rng.normal(size=4)
    p = V._PackingProblem(tet, H2, 0.5, target, np.full(4, 0.8))
    for _ in range(5):
        r = rng.uniform(0.3, 1.5, 4)
        k = I.k_lambda(tet, None, 0.5, H2, radii=r).values
        np.testing.assert_allclose(p.gradient(r), k - target, atol=1e-10)


# -------------------------------------------------------------- closed ψ, φ

def test_psi_round_trip_from_other_lengths(tet):
    target = I.psi_lambda(tet, [1.0] * 6, -1.0, H2).values
    rep = V.solve_psi_closed(tet, V.TargetSpec("psi_closed", H2, -1.0, target), [1.3] * 6)
    assert rep.converged
    np.testing.assert_allclose(rep.solution, 1.0, atol=1e-8)
    assert monotone(rep)


def test_psi_round_trip_on_octahedron():
    o = S.with_metric(S.load_corpus("octahedron"), lengths=[1.2] * 12, geometry=H2)
    rng = np.random.default_rng(2)
    ref = 1.2 * rng.uniform(0.9, 1.1, 12)
    target = I.psi_lambda(o, ref, -1.5, H2).values
    rep = V.solve_psi_closed(o, V.TargetSpec("psi_closed", H2, -1.5, target), [1.2] * 12)
    assert rep.converged
    np.testing.assert_allclose(rep.solution, ref, atol=1e-8)


def test_psi_zero_target_sits_on_boundary(tet):
    rep = V.solve_psi_closed(tet, V.TargetSpec("psi_closed", H2, -1.0, np.zeros(6)), [1.3] * 6)
    assert rep.status == "Degenerated"
    assert rep.degeneration.label == "I" and rep.degeneration.cycle


def test_spherical_octahedron_phi_round_trip():
    o = S.load_corpus("octahedron")
    target = I.phi_lambda(o, [np.pi / 2] * 12, -1.0, S2).values
    init = np.pi / 2 * np.linspace(0.9, 1.1, 12)
    rep = V.solve_phi_closed(o, V.TargetSpec("phi_closed", S2, -1.0, target), init)
    assert rep.converged and rep.flags == ()
    np.testing.assert_allclose(rep.solution, np.pi / 2, atol=1e-8)


def test_euclidean_phi_round_trip_up_to_scale(tet):
    rng = np.random.default_rng(0)
    ref = 1 + 0.1 * rng.uniform(-1, 1, 6)
    target = I.phi_lambda(tet, ref, -1.0, E2).values
    spec = V.TargetSpec("phi_closed", E2, -1.0, target, "euclidean_scale_fixed")
    rep = V.solve_phi_closed(tet, spec, ref * np.linspace(0.9, 1.1, 6))
    assert rep.converged
    ratio = rep.solution / ref
    np.testing.assert_allclose(ratio, ratio[0], rtol=1e-8)


def test_euclidean_phi_between_minus_one_and_zero_is_flagged_local(tet):
    rng = np.random.default_rng(0)
    ref = 1 + 0.1 * rng.uniform(-1, 1, 6)
    target = I.phi_lambda(tet, ref, -0.5, E2).values
    spec = V.TargetSpec("phi_closed", E2, -0.5, target, "euclidean_scale_fixed")
    rep = V.solve_phi_closed(tet, spec, ref * 1.02)
    assert "local-only" in rep.flags
    assert rep.converged
    np.testing.assert_allclose(rep.solution / ref, rep.solution[0] / ref[0], rtol=1e-8)


# -------------------------------------------------------------- ideal surfaces

@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_teich_symmetric_target(torus1, lam):
    rep = V.solve_teich(torus1, lam, [1, 1, 1])
    assert rep.converged
    assert np.ptp(rep.solution) < 1e-10
    np.testing.assert_allclose(I.psi_lambda(torus1, rep.solution, lam).values, 1.0, atol=1e-8)
    if lam == 0.0:
        np.testing.assert_allclose(rep.solution, SYM_ARC, atol=1e-8)


def test_teich_outside_target_gives_witness(torus1):
    rep = V.solve_teich(torus1, 0.0, [1, -0.6, -0.6])
    assert rep.status == "Degenerated"
    assert sorted(rep.extra["witness_cycle"]) == [1, 2]
    assert rep.extra["witness_sum"] == pytest.approx(-1.2)
    assert rep.as_dict()["degeneration"]["label"]


def test_teich_solution_independent_of_init(torus1):
    z = [1.0, 2.0, 0.5]
    a = V.solve_teich(torus1, 0.5, z, [1, 1, 1])
    b = V.solve_teich(torus1, 0.5, z, [3, 0.4, 2])
    assert a.converged and b.converged
    assert np.max(np.abs(a.solution - b.solution)) < 1e-7
    assert monotone(a) and monotone(b)


def test_teich_through_generic_dispatch(torus1):
    spec = V.TargetSpec("psi_ideal", "hexagon", 0.0, np.ones(3))
    rep = V.solve(torus1, spec, None)
    np.testing.assert_allclose(rep.solution, SYM_ARC, atol=1e-8)


# ---------------------------------------------------------- angle structures

def test_angle_structure_spherical_octahedron():
    o = S.load_corpus("octahedron")
    target = I.phi_lambda(o, [np.pi / 2] * 12, 0.0, S2).values
    rep = V.solve_angle_structure(o, S2, 0.0, target)
    assert rep.converged
    assert rep.extra["length_mismatch"] < 1e-8
    np.testing.assert_allclose(rep.solution, np.pi / 2, atol=1e-8)


def test_angle_structure_hyperbolic_tetrahedron(tet):
    target = I.psi_lambda(tet, [1.0] * 6, 0.0, H2).values
    rep = V.solve_angle_structure(tet, H2, 0.0, target)
    assert rep.converged and rep.extra["length_mismatch"] < 1e-8
    np.testing.assert_allclose(rep.solution, 1.0, atol=1e-8)


def test_angle_structure_critical_point_is_strict_extremum():
    o = S.load_corpus("octahedron")
    target = I.phi_lambda(o, [np.pi / 2] * 12, 0.0, S2).values
    p = V.angle_structure_problem(o, S2, 0.0, target)
    rep = V.run_newton(p)
    v = rep.extra["v"]
    rng = np.random.default_rng(3)
    for _ in range(5):
        d = 1e-2 * rng.normal(size=v.shape)
        w = V.energy_difference(p, v, v + d)
        assert rep.sense * w > 0


def test_angle_structure_rejects_negative_lambda(tet):
    with pytest.raises(ConfigError):
        V.solve_angle_structure(tet, H2, -0.5, np.ones(6))


# ------------------------------------------------------------ report shape

def test_report_dict_fields(tet):
    target = I.psi_lambda(tet, [1.0] * 6, -1.0, H2).values
    d = V.solve_psi_closed(tet, V.TargetSpec("psi_closed", H2, -1.0, target), [1.1] * 6).as_dict()
    assert list(d)[:7] == ["status", "iterations", "grad_norm", "solution_kind", "solution", "flags",
                           "energy_sense"]
    assert d["status"] == "Converged" and d["grad_norm"] < 1e-10
