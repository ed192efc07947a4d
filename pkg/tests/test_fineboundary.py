from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compactharmonic.exceptions import PreconditionError
from compactharmonic.fineboundary import (FineVerdict, _concentration_trend, classify_fine,
                                          concentration_diagnostic, wiener_series)
from compactharmonic.geometry import (ball_scene, domain_schedule, road_runner_scene, shell_scene,
                                      swiss_cheese_scene)
from compactharmonic.wos import WalkConfig

THIN = road_runner_scene(1.0, 0.25, 8, start=3)
FAT = road_runner_scene(0.2475, 0.5, 10)


@pytest.mark.parametrize("scene,point,expected", [
    (ball_scene(), (0, 0, 0), FineVerdict.FINE_INTERIOR),
    (ball_scene(), (1, 0, 0), FineVerdict.FINE_BOUNDARY),
    (ball_scene(), (2, 0, 0), FineVerdict.EXTERIOR),
    (shell_scene(), (0.5, 0, 0), FineVerdict.FINE_BOUNDARY),
    (shell_scene(), (0, 1, 0), FineVerdict.FINE_BOUNDARY),
    (swiss_cheese_scene(), (0.25, 0, 0), FineVerdict.FINE_BOUNDARY),
    (THIN, (0, 0, 0), FineVerdict.NOT_FINE_BOUNDARY),
    (FAT, (0, 0, 0), FineVerdict.FINE_BOUNDARY),
    # terms decaying like 0.96^k: convergent, but not decidable at depth 20
    (road_runner_scene(0.2, 0.48, 12), (0, 0, 0), FineVerdict.INDETERMINATE),
])
def test_verdicts(scene, point, expected):
    assert classify_fine(scene, np.array(point, dtype=float), 20).verdict is expected


def test_thin_series_tail_is_tiny_and_fat_terms_are_bounded_below():
    thin = classify_fine(THIN, np.zeros(3), 20).evidence
    assert thin["upper_extrapolated_tail"] < 1e-3
    fat = wiener_series(FAT, np.zeros(3), 20)
    # a hole of radius 0.99·2^(-m-2) sits inside every dyadic shell, so every term is bounded below
    assert np.all(fat.lower[2:] > 0.1)


def test_series_requires_a_boundary_point_in_space():
    with pytest.raises(PreconditionError):
        wiener_series(ball_scene(), np.zeros(3))
    with pytest.raises(PreconditionError):
        wiener_series(ball_scene(2), np.array([1.0, 0.0]))


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_bracket_is_ordered_on_sphere_points(v):
    x = 0.25 * np.array(v) / np.linalg.norm(v) + np.array([0.5, 0, 0])
    s = wiener_series(swiss_cheese_scene(), x, 12)
    assert np.all(s.lower <= s.upper * (1 + 1e-12))
    assert classify_fine(swiss_cheese_scene(), x, 20).verdict is FineVerdict.FINE_BOUNDARY


def test_trend_rules():
    se = np.full(4, 0.001)
    assert _concentration_trend(np.array([0.5, 0.8, 0.9, 0.99]), se, 3, 0.02, 0.1)[0] is FineVerdict.FINE_BOUNDARY
    assert _concentration_trend(np.array([0.2, 0.2, 0.2, 0.2]), se, 3, 0.02, 0.1)[0] is FineVerdict.NOT_FINE_BOUNDARY
    v, _, limit = _concentration_trend(np.array([0.0, 0.5, 0.75, 0.875]), se, 3, 0.02, 0.1)
    assert v is FineVerdict.FINE_BOUNDARY and limit == pytest.approx(1.0)
    v, _, limit = _concentration_trend(np.array([0.0, 0.1, 0.15, 0.175]), se, 3, 0.02, 0.1)
    assert v is FineVerdict.NOT_FINE_BOUNDARY and limit == pytest.approx(0.2)


def test_concentration_on_the_sphere():
    sc = ball_scene()
    rep = concentration_diagnostic(sc, np.array([1.0, 0, 0]), domain_schedule(sc, 0.1, 0.5, 4),
                                   WalkConfig(samples=5000, seed=1))
    assert rep.fine_class.verdict is FineVerdict.FINE_BOUNDARY
    col = rep.radii.index(0.1)
    assert np.all(np.diff(rep.mass[:, col]) > 0)
    assert rep.to_dict()["heuristic"] is True
