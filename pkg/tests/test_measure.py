from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compactharmonic.exceptions import ConfigurationError, NonFiniteValueError
from compactharmonic.geometry import ball_scene
from compactharmonic.jensen import coordinate, default_family, squared_distance
from compactharmonic.measure import (EmpiricalMeasure, Order, compare_order, mass_within, measure_from_csv,
                                     measure_to_csv, sphere_measure)


def test_weights_must_be_a_probability_vector():
    with pytest.raises(ValueError):
        EmpiricalMeasure(np.zeros((2, 3)), [0.5, 0.6], np.zeros(3))
    with pytest.raises(ValueError):
        EmpiricalMeasure(np.zeros((2, 3)), [1.5, -0.5], np.zeros(3))


def test_dirac_integrates_exactly():
    z = np.array([0.1, -0.2, 0.3])
    mu = EmpiricalMeasure.dirac(z)
    f = squared_distance([0, 0, 0])
    assert mu.integrate(f) == pytest.approx(0.14)
    assert mu.stderr(f) == 0.0


def test_non_finite_value_names_the_point():
    mu = EmpiricalMeasure.uniform([[0.0, 0.0], [1.0, 0.0]], [0.5, 0.0])
    with pytest.raises(NonFiniteValueError, match=r"\[0\.0, 0\.0\]"):
        with np.errstate(divide="ignore"):
            mu.integrate(lambda x: 1.0 / np.linalg.norm(x, axis=-1))


def test_two_diracs_are_incomparable():
    fam = default_family(ball_scene(), 1)
    a = EmpiricalMeasure.dirac([0.2, 0.0, 0.0])
    b = EmpiricalMeasure.dirac([-0.2, 0.0, 0.0])
    v = compare_order(a, b, fam)
    assert v.order is Order.INCOMPARABLE
    assert {w.id for w in v.witnesses} == {"+x1", "-x1"}


def test_equal_measures():
    fam = default_family(ball_scene(), 2)
    a = EmpiricalMeasure.dirac([0.2, 0.1, 0.0])
    assert compare_order(a, a, fam).order is Order.EQUAL


def test_sphere_average_dominates_its_centre():
    fam = default_family(ball_scene(), 2)
    z = np.array([0.1, 0.2, -0.1])
    sphere = sphere_measure(z, 0.3, 20_000, np.random.default_rng(3))
    v = compare_order(sphere, EmpiricalMeasure.dirac(z), fam)
    assert v.order is Order.DOMINATES


def test_family_without_both_coordinate_signs_is_rejected():
    a = EmpiricalMeasure.dirac([0.0, 0.0])
    with pytest.raises(ConfigurationError):
        compare_order(a, a, [coordinate(0, 1), coordinate(1, 1), coordinate(1, -1)])


def exact_measures(dim=2):
    return st.integers(1, 6).flatmap(lambda k: st.tuples(
        st.lists(st.lists(st.floats(-1, 1), min_size=dim, max_size=dim), min_size=k, max_size=k),
        st.lists(st.floats(0.01, 1), min_size=k, max_size=k),
    )).map(lambda t: _make(np.array(t[0]), np.array(t[1])))


def _make(pts, w):
    w = w / math.fsum(w)
    return EmpiricalMeasure(pts, w, w @ pts)


@settings(max_examples=100, deadline=None)
@given(exact_measures(), exact_measures())
def test_order_is_antisymmetric(mu, nu):
    from compactharmonic.geometry import ball_scene as bs
    fam = default_family(bs(2), 2)
    assert compare_order(mu, nu, fam).order is compare_order(nu, mu, fam).order.swapped()


@settings(max_examples=100, deadline=None)
@given(exact_measures(3))
def test_csv_round_trip_preserves_integrals(mu):
    text = measure_to_csv(mu)
    back, meta = measure_from_csv(text, barycenter=mu.barycenter_claim)
    np.testing.assert_array_equal(back.support, mu.support)
    f = squared_distance([0.3, 0.0, 0.0])
    assert back.integrate(f) == pytest.approx(mu.integrate(f), rel=1e-12, abs=1e-15)
    assert set(meta) == {"seed", "N", "absorb_delta", "truncation_fraction"}


def test_mass_within():
    mu = EmpiricalMeasure.uniform([[0.0, 0.0], [1.0, 0.0], [0.05, 0.0], [3.0, 0.0]], [1.0, 0.0])
    assert mass_within(mu, [0, 0], 0.1) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        mass_within(mu, [0, 0], 0.0)
