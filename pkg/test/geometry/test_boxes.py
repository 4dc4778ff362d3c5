import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geometry.boxes import canonical_box, min_area_rect, obb_to_quad, quad_to_obb, rotated_iou, rotated_iou_matrix
from geometry.polygon import convex_area, convex_clip, polygon_area
from model.geometry import ConvexPolygon, OrientedBox, Quad
from utils.errors import DegeneratePointSet, DegenerateQuad, InvalidBox, InvalidQuad

boxes = st.builds(
    OrientedBox,
    cx=st.floats(-20, 20),
    cy=st.floats(-20, 20),
    w=st.floats(0.5, 10),
    h=st.floats(0.5, 10),
    theta=st.floats(0, math.pi - 1e-6),
)


def test_iou_fixtures(oracles):
    for case in oracles["iou"]:
        a, b = OrientedBox(*case["a"]), OrientedBox(*case["b"])
        assert rotated_iou(a, b) == pytest.approx(case["expected"], abs=1e-9), case["name"]


def test_iou_identical_is_exactly_one():
    box = OrientedBox(3.0, -1.0, 2.5, 1.25, 0.7)
    assert rotated_iou(box, box) == 1.0


@settings(max_examples=60, deadline=None)
@given(boxes, boxes)
def test_iou_symmetric_and_bounded(a, b):
    iou = rotated_iou(a, b)
    assert iou == rotated_iou(b, a)
    assert 0.0 <= iou <= 1.0


def test_iou_matrix_matches_pairwise():
    a = [OrientedBox(0, 0, 2, 2, 0), OrientedBox(1, 0, 2, 2, 0.3)]
    b = [OrientedBox(0, 0, 2, 2, 0), OrientedBox(5, 5, 1, 1, 0), OrientedBox(1, 1, 3, 1, 1.0)]
    matrix = rotated_iou_matrix(a, b)
    assert matrix.shape == (2, 3)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            assert matrix[i, j] == rotated_iou(x, y)


def test_box_validation():
    with pytest.raises(InvalidBox):
        OrientedBox(0, 0, 0.0, 1, 0)
    with pytest.raises(InvalidBox):
        OrientedBox(0, 0, 1, 1, math.pi)
    with pytest.raises(ValueError):
        OrientedBox(float("nan"), 0, 1, 1, 0)


def test_canonical_box_swaps_sides_past_quarter_turn():
    box = canonical_box(1.0, 2.0, 4.0, 2.0, math.pi / 2 + 0.1)
    assert box.theta == pytest.approx(0.1)
    assert (box.w, box.h) == (2.0, 4.0)
    assert canonical_box(0, 0, 3, 1, -0.2).theta == pytest.approx(math.pi / 2 - 0.2)


def test_axis_aligned_quad_to_obb():
    box = quad_to_obb(Quad([0, 0, 4, 0, 4, 2, 0, 2]))
    assert (box.cx, box.cy) == pytest.approx((2.0, 1.0))
    assert box.w * box.h == pytest.approx(8.0)
    assert box.theta == 0.0


@settings(max_examples=50, deadline=None)
@given(boxes)
def test_quad_roundtrip_preserves_rectangle(box):
    back = quad_to_obb(obb_to_quad(box))
    assert 0.0 <= back.theta < math.pi / 2
    assert (back.cx, back.cy) == pytest.approx((box.cx, box.cy), abs=1e-7)
    assert back.area == pytest.approx(box.area, rel=1e-7)
    assert rotated_iou(back, box) == pytest.approx(1.0, abs=1e-7)


def test_clockwise_quad_is_accepted():
    cw = Quad([0, 2, 4, 2, 4, 0, 0, 0])
    assert quad_to_obb(cw).area == pytest.approx(8.0)


def test_self_intersecting_quad_rejected():
    with pytest.raises(InvalidQuad):
        quad_to_obb(Quad([0, 0, 4, 2, 4, 0, 0, 2]))


def test_degenerate_quad_rejected():
    with pytest.raises(DegenerateQuad):
        quad_to_obb(Quad([0, 0, 1, 1, 2, 2, 3, 3]))


def test_quad_needs_four_corners():
    with pytest.raises(InvalidQuad):
        Quad([0, 0, 1, 0, 1, 1])


def test_min_area_rect_of_rotated_square_points():
    angle = 0.3
    u = np.array([math.cos(angle), math.sin(angle)])
    v = np.array([-u[1], u[0]])
    corners = np.stack([-u - v, u - v, u + v, -u + v]) * 1.5 + np.array([4.0, -2.0])
    interior = np.array([[4.0, -2.0], [4.2, -1.9]])
    box = min_area_rect(np.concatenate([corners, interior]))
    assert box.area == pytest.approx(9.0)
    assert (box.cx, box.cy) == pytest.approx((4.0, -2.0))
    assert box.theta == pytest.approx(angle)


def test_min_area_rect_degenerate_inputs():
    with pytest.raises(DegeneratePointSet):
        min_area_rect([[0, 0], [1, 1]])
    with pytest.raises(DegeneratePointSet):
        min_area_rect([[0, 0], [1, 1], [2, 2], [3, 3]])


def test_convex_clip_identity_and_empty():
    square = ConvexPolygon(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))
    far = ConvexPolygon(np.array([[5, 5], [6, 5], [6, 6], [5, 6]], dtype=float))
    assert convex_area(convex_clip(square, square)) == pytest.approx(1.0, abs=1e-9)
    assert convex_clip(square, far).is_empty
    assert convex_clip(square, ConvexPolygon.empty()).is_empty


def test_polygon_area_sign_follows_orientation():
    ccw = np.array([[0, 0], [2, 0], [2, 1], [0, 1]], dtype=float)
    assert polygon_area(ccw) == pytest.approx(2.0)
    assert polygon_area(ccw[::-1]) == pytest.approx(-2.0)
