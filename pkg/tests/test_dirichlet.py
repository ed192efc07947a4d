from __future__ import annotations

import numpy as np
import pytest

from compactharmonic.dirichlet import (averaging_check, boundary_pullback, coordinate_data, harmonic_measure,
                                       monotone_check, named_data, outer_indicator_data, radial_data, solve)
from compactharmonic.exceptions import NonFiniteValueError, PreconditionError
from compactharmonic.geometry import ball_scene, neighborhood, shell_scene, swiss_cheese_scene
from compactharmonic.jensen import coordinate, default_family, newton_kernel, squared_distance
from compactharmonic.measure import EmpiricalMeasure, mass_within, sphere_measure
from compactharmonic.wos import WalkConfig

CFG = WalkConfig(samples=5000, seed=3)
SCHED = (0.1, 0.5, 3)


def test_point_outside_K_is_rejected():
    with pytest.raises(PreconditionError):
        harmonic_measure(shell_scene(), [0.1, 0, 0], SCHED, CFG)
    with pytest.raises(PreconditionError):
        harmonic_measure(ball_scene(), [0, 0, 0], [neighborhood(ball_scene(), 0.05), neighborhood(ball_scene(), 0.1)], CFG)


def test_ball_moments_at_centre():
    sc = ball_scene()
    mu, rep = harmonic_measure(sc, [0, 0, 0], SCHED, CFG.with_(samples=20_000))
    x1 = coordinate(0)
    assert abs(mu.integrate(x1)) <= 3 * mu.stderr(x1)
    pulled = boundary_pullback(sc, mu)
    sq = lambda x: x[:, 0] ** 2  # noqa: E731
    assert abs(pulled.integrate(sq) - 1 / 3) <= 3 * pulled.stderr(sq)
    assert rep.support_max_distance <= rep.support_bound
    assert rep.to_csv().startswith("epsilon,probe,kind,value,stderr\n")


def test_mass_piles_up_at_a_sphere_point():
    sc = ball_scene()
    z = np.array([1.0, 0, 0])
    masses = [mass_within(harmonic_measure(sc, z, [d], CFG)[0], z, 0.1)
              for d in (neighborhood(sc, 0.1), neighborhood(sc, 0.025), neighborhood(sc, 0.005))]
    assert masses[0] < masses[1] < masses[2]
    assert masses[2] > 0.95


def test_shell_outer_mass():
    sc = shell_scene()
    sol = solve(sc, outer_indicator_data(sc), [[0.75, 0, 0]], (0.1, 0.5, 4), CFG.with_(samples=20_000))
    p = sol.points[0]
    assert abs(p.value - 2 / 3) <= 3 * p.stderr + p.gap


def test_monotone_check():
    sc = swiss_cheese_scene()
    rep = monotone_check(sc, [0, 0, 0], squared_distance([0, 0, 0]), (0.2, 0.5, 3), CFG)
    assert rep.monotone()[0]
    rep = monotone_check(sc, [0, 0, 0], coordinate(1), (0.2, 0.5, 3), CFG)
    assert np.all(rep.gaps[:, 0] <= rep.gap_tolerance[:, 0] + 0.01)
    with pytest.raises(PreconditionError):
        monotone_check(sc, [0, 0, 0], newton_kernel([0.0, -0.5, 0.0]), (0.2, 0.5, 3), CFG)


def test_harmonic_data_reproduces_itself_and_agrees_on_the_boundary():
    sc = ball_scene()
    pts = np.array([[0.2, 0.1, 0.0], [-0.5, 0.3, 0.1], [1.0, 0.0, 0.0]])
    sol = solve(sc, coordinate_data(0), pts, SCHED, CFG)
    for p, x in zip(sol.points, pts):
        assert abs(p.value - x[0]) <= 3 * p.stderr + p.gap + 1e-12
    assert sol.points[2].boundary_agreement is True
    assert sol.points[0].boundary_agreement is None
    assert sol.sup_norm_ok()


def test_linearity_is_exact_with_common_seeds():
    sc = swiss_cheese_scene()
    pts = [[0.0, 0.0, 0.3], [0.1, -0.4, 0.0]]
    phi, psi = coordinate_data(1), radial_data(sc)
    a = solve(sc, phi, pts, SCHED, CFG, classify=False).values
    b = solve(sc, psi, pts, SCHED, CFG, classify=False).values
    c = solve(sc, lambda x: 2 * phi(x) - 3 * psi(x), pts, SCHED, CFG, classify=False).values
    np.testing.assert_allclose(c, 2 * a - 3 * b, atol=1e-12)


def test_positivity():
    sc = shell_scene()
    sol = solve(sc, outer_indicator_data(sc), [[0.55, 0, 0], [0, 0.9, 0]], SCHED, CFG)
    assert np.all(sol.values >= -3 * sol.stderrs)


def test_bad_data_and_points():
    sc = ball_scene()
    with pytest.raises(PreconditionError):
        solve(sc, coordinate_data(0), [[1.5, 0, 0]], SCHED, CFG)
    with pytest.raises(NonFiniteValueError):
        solve(sc, lambda x: np.full(np.shape(x)[:-1], np.nan), [[0, 0, 0]], SCHED, CFG)
    with pytest.raises(ValueError):
        named_data("nope", sc)


def test_averaging_property():
    sc = ball_scene()
    sol = solve(sc, coordinate_data(0), [[0, 0, 0]], [neighborhood(sc, 0.02)], CFG)
    z = np.array([0.2, 0.1, 0.0])
    rng = np.random.default_rng(0)
    sphere = sphere_measure(z, 0.3, 40, rng)
    wrong = EmpiricalMeasure.dirac([0.0, 0.0, 0.0])
    h = lambda x: sol(x, samples=500)  # noqa: E731
    rep = averaging_check(sc, h, z, [EmpiricalMeasure.dirac(z), sphere, wrong], labels=["dirac", "sphere", "wrong"])
    dirac_row, sphere_row, wrong_row = rep.rows
    assert dirac_row.ok and sphere_row.ok
    assert not wrong_row.accepted
    assert rep.passed
    exact = averaging_check(sc, lambda x: np.asarray(x)[:, 0], z, [EmpiricalMeasure.dirac(z)])
    assert exact.rows[0].difference == 0.0


def test_averaging_screens_candidates_with_the_family():
    sc = ball_scene()
    z = np.zeros(3)
    # barycenter z, but x1^2 - x2^2 averages to 0.25 instead of 0: not a Jensen measure
    pair = EmpiricalMeasure(np.array([[0.5, 0, 0], [-0.5, 0, 0]]), [0.5, 0.5], z)
    h = lambda x: np.asarray(x)[:, 0]  # noqa: E731
    assert not averaging_check(sc, h, z, [pair], family=default_family(sc, 2)).rows[0].accepted
    linear = [f for f in default_family(sc, 1) if f.is_harmonic]
    assert averaging_check(sc, h, z, [pair], family=linear).rows[0].ok
