from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compactharmonic.exceptions import SceneError
from compactharmonic.geometry import (Ball, BallScene, PointClass, RoadRunner, ball_scene, classify_point,
                                      dist_to_boundary, dist_to_complement, dist_to_K, domain_schedule,
                                      neighborhood, project_to_boundary, road_runner_scene, sample_interior,
                                      scene_from_json, scene_hash, scene_to_json, shell_scene,
                                      swiss_cheese_scene)


def test_rejects_overlapping_holes():
    with pytest.raises(SceneError, match="intersect"):
        BallScene(3, Ball((0, 0, 0), 1), (Ball((0.2, 0, 0), 0.2), Ball((-0.1, 0, 0), 0.2)))


def test_rejects_hole_touching_outer_sphere():
    with pytest.raises(SceneError, match="contained"):
        BallScene(3, Ball((0, 0, 0), 1), (Ball((0.5, 0, 0), 0.5),))


def test_rejects_bad_radius_and_dimension():
    with pytest.raises(SceneError):
        Ball((0, 0, 0), -1.0)
    with pytest.raises(SceneError):
        BallScene(3, Ball((0, 0), 1))


def test_road_runner_radius_rule_is_enforced():
    # 4^-1 is not below 2^-3, so the first index must be skipped
    with pytest.raises(SceneError):
        road_runner_scene(1.0, 0.25, 6, start=1)
    sc = road_runner_scene(1.0, 0.25, 6, start=3)
    assert len(sc.deleted) == 4
    assert sc.deleted[0].radius == pytest.approx(4.0**-3)
    assert sc.deleted[0].center == pytest.approx((0.125, 0, 0))


def test_explicit_holes_must_match_generator():
    gen = RoadRunner(1.0, 0.25, 4, start=3)
    with pytest.raises(SceneError):
        BallScene(3, Ball((0, 0, 0), 1), (Ball((0.5, 0, 0), 0.1),), generator=gen)


@pytest.mark.parametrize("scene,point,expected", [
    (ball_scene(), (0, 0, 0), PointClass.INTERIOR),
    (ball_scene(), (1, 0, 0), PointClass.BOUNDARY),
    (ball_scene(), (1.5, 0, 0), PointClass.EXTERIOR),
    (shell_scene(), (0.5, 0, 0), PointClass.BOUNDARY),
    (shell_scene(), (0.2, 0, 0), PointClass.EXTERIOR),
    (swiss_cheese_scene(), (0, 0, 0), PointClass.INTERIOR),
    (road_runner_scene(1.0, 0.25, 8, start=3), (0, 0, 0), PointClass.BOUNDARY),
])
def test_classify_point(scene, point, expected):
    assert classify_point(scene, np.array(point, dtype=float)) is expected


def test_neighbourhood_drops_small_holes():
    sc = road_runner_scene(1.0, 0.25, 8, start=3)
    dom = neighborhood(sc, 0.02)
    assert dom.kept == ()
    assert dom.outer_radius == pytest.approx(1.02)
    dom = neighborhood(shell_scene(), 0.1)
    assert dom.radii == pytest.approx([0.4])


def test_schedule_is_nested():
    sched = domain_schedule(swiss_cheese_scene(), 0.2, 0.5, 4)
    assert [d.epsilon for d in sched] == pytest.approx([0.2, 0.1, 0.05, 0.025])
    for big, small in zip(sched, sched[1:]):
        assert small.closure_contained_in(big)
        assert not big.closure_contained_in(small)


def _brute_signed_distance(dom, x):
    spheres = [(dom.outer_center, dom.outer_radius, +1)] + [(c, r, -1) for c, r in zip(dom.centers, dom.radii)]
    return min(s * (r - np.linalg.norm(x - c)) for c, r, s in spheres)


coords = st.floats(-1.3, 1.3, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.tuples(coords, coords, coords), st.sampled_from([0.01, 0.1, 0.2]))
def test_domain_distance_matches_brute_force(p, eps):
    dom = neighborhood(swiss_cheese_scene(), eps)
    x = np.array(p)
    assert dom.distance_to_boundary(x) == pytest.approx(_brute_signed_distance(dom, x), abs=1e-12)
    q = dom.project_to_boundary(x)
    assert abs(dom.distance_to_boundary(q)) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.tuples(coords, coords, coords), st.sampled_from(["ball", "shell", "swiss"]))
def test_projection_realises_boundary_distance(p, name):
    sc = {"ball": ball_scene(), "shell": shell_scene(), "swiss": swiss_cheese_scene()}[name]
    x = np.array(p)
    q = project_to_boundary(sc, x)
    assert classify_point(sc, q, tol=1e-9) is PointClass.BOUNDARY
    assert np.linalg.norm(x - q) == pytest.approx(dist_to_boundary(sc, x), abs=1e-12)
    inside = classify_point(sc, x) is not PointClass.EXTERIOR
    assert (dist_to_K(sc, x) == 0) == inside or dist_to_K(sc, x) < 1e-12
    if inside:
        assert dist_to_boundary(sc, x) == pytest.approx(dist_to_complement(sc, x))


def test_sample_interior_respects_margin():
    sc = swiss_cheese_scene()
    pts = sample_interior(sc, np.random.default_rng(0), 500, margin=0.05)
    assert pts.shape == (500, 3)
    assert np.all(dist_to_complement(sc, pts) > 0.05)


@st.composite
def scenes(draw):
    n = draw(st.sampled_from([2, 3]))
    R = draw(st.floats(0.5, 3.0))
    c0 = np.array(draw(st.lists(st.floats(-2, 2), min_size=n, max_size=n)))
    holes = []
    for _ in range(draw(st.integers(0, 4))):
        direction = np.array(draw(st.lists(st.floats(-1, 1), min_size=n, max_size=n)))
        c = c0 + 0.6 * R * direction / max(1.0, np.linalg.norm(direction))
        r = draw(st.floats(0.01, 0.1)) * R
        cand = Ball(tuple(c), r)
        ok = np.linalg.norm(c - c0) + r < R and all(
            np.linalg.norm(c - np.array(h.center)) > r + h.radius for h in holes)
        if ok:
            holes.append(cand)
    return BallScene(n, Ball(tuple(c0), R), tuple(holes))


@settings(max_examples=100, deadline=None)
@given(scenes())
def test_scene_json_round_trip(sc):
    text = scene_to_json(sc)
    back = scene_from_json(text)
    assert back == sc
    assert scene_to_json(back) == text
    assert scene_hash(back) == scene_hash(sc)


def test_generator_round_trip_keeps_rule():
    sc = road_runner_scene(0.2475, 0.5, 10)
    back = scene_from_json(scene_to_json(sc))
    assert back.generator == sc.generator
    assert len(back.deleted) == 10


def test_malformed_json_is_rejected():
    with pytest.raises(SceneError):
        scene_from_json('{"dimension": 3}')
