import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roadforge.core import RoadPolyline, cumulative_arc_length, dedupe_points
from roads import rigid


def test_arc_length_collinear():
    pts = [(0, 0), (1, 0), (2, 0)]
    np.testing.assert_allclose(cumulative_arc_length(np.array(pts, float), 0), [0, 1, 2])


def test_arc_length_signed_about_origin():
    pts = np.array([(0, 0), (1, 0), (2, 0)], float)
    np.testing.assert_allclose(cumulative_arc_length(pts, 1), [-1, 0, 1])


def test_arc_length_square_corners():
    poly = RoadPolyline(np.array([(0, 0), (1, 0), (1, 1)], float))
    l = cumulative_arc_length(poly, 0)
    assert l.tolist() == [0.0, 1.0, 2.0]


def test_arc_length_origin_is_exact_zero():
    pts = np.random.default_rng(1).normal(size=(20, 2)) * 50
    for origin in (0, 7, 19):
        l = cumulative_arc_length(pts, origin)
        assert l[origin] == 0.0
        assert np.all(np.diff(l) > 0)
        assert np.all(l[:origin] < 0)


def test_arc_length_bad_origin():
    with pytest.raises(IndexError):
        cumulative_arc_length(np.zeros((3, 2)) + np.arange(3)[:, None], 5)


polylines = st.lists(
    st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=2, max_size=30
).map(lambda p: dedupe_points(np.array(p))[0]).filter(lambda p: len(p) >= 2)


@settings(max_examples=60, deadline=None)
@given(polylines, st.floats(0, 2 * math.pi), st.floats(-1e4, 1e4), st.floats(-1e4, 1e4))
def test_arc_length_rigid_invariance(pts, angle, dx, dy):
    moved = rigid(pts, angle, (dx, dy))
    np.testing.assert_allclose(cumulative_arc_length(moved), cumulative_arc_length(pts), rtol=0, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(polylines, st.floats(1e-3, 1e3))
def test_arc_length_scaling(pts, c):
    np.testing.assert_allclose(cumulative_arc_length(pts * c), c * cumulative_arc_length(pts), rtol=1e-12, atol=1e-12)


def test_polyline_rejects_duplicates_and_short():
    with pytest.raises(ValueError, match="duplicate"):
        RoadPolyline(np.array([(0, 0), (0, 0), (1, 0)], float))
    with pytest.raises(ValueError):
        RoadPolyline(np.array([(0, 0)], float))


def test_from_raw_drops_duplicates(caplog):
    poly = RoadPolyline.from_raw([(0, 0), (0, 0), (1, 0), (1, 0), (2, 0)], "dup")
    assert len(poly) == 3
    assert "dropped 2 duplicate" in caplog.text


def test_polyline_is_immutable():
    poly = RoadPolyline(np.array([(0, 0), (1, 0)], float))
    with pytest.raises(ValueError):
        poly.points[0, 0] = 5.0
