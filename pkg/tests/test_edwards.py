from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import linprog

from compactharmonic.edwards import (DiscreteInstance, envelope_dual, envelope_primal, export_measure_csv,
                                     make_instance, optimal_measure)
from compactharmonic.edwards.simplex import solve_standard_form
from compactharmonic.exceptions import PreconditionError
from compactharmonic.geometry import ball_scene, swiss_cheese_scene
from compactharmonic.jensen import HARMONIC, coordinate, default_family, squared_distance
from compactharmonic.measure import measure_from_csv


@pytest.mark.parametrize("seed", range(30))
def test_simplex_matches_highs(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 12)), int(rng.integers(5, 80))
    A = rng.normal(size=(m, n))
    b = A @ (rng.random(n) * (rng.random(n) < 0.5))
    if seed % 3 == 0:  # redundant row
        A = np.vstack([A, A[0] - 2 * A[1]])
        b = np.append(b, b[0] - 2 * b[1])
    c = np.abs(rng.normal(size=n))
    ours = solve_standard_form(A, b, c)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert ours.status == "optimal"
    assert ours.value == pytest.approx(ref.fun, abs=1e-9)
    assert np.allclose(A @ ours.x, b, atol=1e-8)
    assert all(h >= ours.value - 1e-9 for h in ours.history)


def test_simplex_detects_infeasibility():
    res = solve_standard_form(np.array([[1.0, 1.0]]), np.array([-1.0]), np.array([1.0, 1.0]))
    assert res.status == "infeasible"


def _small(scene, z, p, **kw):
    kw.setdefault("grid_size", 400)
    kw.setdefault("sphere_probes", 64)
    return make_instance(scene, z, p, **kw)


def test_harmonic_target_is_reproduced():
    z = np.array([0.1, -0.2, 0.3])
    f = coordinate(1)
    inst = _small(swiss_cheese_scene(), z, f)
    assert envelope_primal(inst).value == pytest.approx(-0.2, abs=1e-9)
    dual = envelope_dual(inst)
    assert dual.value == pytest.approx(-0.2, abs=1e-9)


def test_subharmonic_member_is_its_own_envelope():
    z = np.array([0.3, 0.0, 0.1])
    f = squared_distance([0.5, 0, 0])
    inst = _small(ball_scene(), z, f)
    assert envelope_primal(inst).value == pytest.approx(float(f(z)), abs=1e-9)


def test_nested_families_are_monotone():
    sc = ball_scene()
    z = np.array([0.2, 0.1, 0.0])
    p = lambda x: np.cos(3 * np.asarray(x)[..., 0]) + np.asarray(x)[..., 1] ** 2  # noqa: E731
    small_fam = default_family(sc, 1)
    big_fam = default_family(sc, 2)
    a = _small(sc, z, p, family=small_fam)
    b = _small(sc, z, p, family=big_fam)
    np.testing.assert_array_equal(a.grid, b.grid)
    pa, pb = envelope_primal(a).value, envelope_primal(b).value
    da, db = envelope_dual(a).value, envelope_dual(b).value
    assert pa <= pb + 1e-9
    assert da <= db + 1e-9
    assert abs(pa - da) < 1e-7 and abs(pb - db) < 1e-7


def test_ball_centre_minimiser_looks_like_the_sphere_measure():
    sc = ball_scene()
    inst = make_instance(sc, np.zeros(3), lambda x: 1 - np.sum(np.asarray(x) ** 2, axis=-1),
                         grid_size=1024, sphere_probes=128)
    mu = optimal_measure(inst, envelope_primal(inst))
    assert np.allclose(np.linalg.norm(mu.support, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(mu.mean(), 0.0, atol=1e-9)
    for i in range(3):
        assert mu.integrate(lambda x, i=i: x[:, i] ** 2) == pytest.approx(1 / 3, abs=1e-8)


def test_instance_serialisation_and_csv_export():
    inst = _small(ball_scene(), np.zeros(3), squared_distance([0, 0, 0]), seed=4)
    back = DiscreteInstance.from_json(inst.to_json())
    np.testing.assert_array_equal(back.grid, inst.grid)
    assert back.family == inst.family
    assert envelope_primal(back).value == envelope_primal(inst).value
    primal = envelope_primal(inst)
    mu, meta = measure_from_csv(export_measure_csv(inst, primal))
    assert meta["kind"] == "envelope_lp"
    assert mu.integrate(squared_distance([0, 0, 0])) == pytest.approx(primal.value, abs=1e-12)


def test_instance_invariants():
    sc = ball_scene()
    fam = [f for f in default_family(sc, 1) if f.kind == HARMONIC and f.coordinate != (0, -1)]
    with pytest.raises(PreconditionError):
        _small(sc, np.zeros(3), squared_distance([0, 0, 0]), family=fam)
    with pytest.raises(PreconditionError):
        _small(sc, np.array([2.0, 0, 0]), squared_distance([0, 0, 0]))
    with pytest.raises(PreconditionError), np.errstate(divide="ignore"):
        _small(sc, np.zeros(3), lambda x: 1 / np.asarray(x)[..., 0])
