import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.geometry import (
    Orientation,
    angular_order,
    convex_hull,
    distance,
    next_left,
    next_right,
    on_segment,
    orientation,
    polygon_area,
    polygon_contains,
    polygon_perimeter,
    segment_intersection_point,
    segments_intersect,
    signed_area,
)
from src.model import Point, Segment

coords = st.floats(min_value=-1000, max_value=1000, allow_nan=False, allow_infinity=False)
points = st.builds(Point, coords, coords)
grid_points = st.builds(Point, st.integers(-50, 50).map(float), st.integers(-50, 50).map(float))
segments = st.builds(Segment, points, points)


def test_orientation_turns():
    o, e, n = Point(0, 0), Point(1, 0), Point(0, 1)
    assert orientation(o, e, n) == Orientation.COUNTERCLOCKWISE
    assert orientation(o, n, e) == Orientation.CLOCKWISE
    assert orientation(o, e, Point(2, 0)) == Orientation.COLLINEAR


def test_orientation_tiny_area_is_collinear():
    assert orientation(Point(0, 0), Point(1, 0), Point(0.5, 1e-12)) == Orientation.COLLINEAR


@given(points, points, points)
def test_orientation_is_antisymmetric(p, q, r):
    assert orientation(p, q, r) == -orientation(q, p, r)
    assert orientation(p, q, r) == orientation(q, r, p)


@given(segments, segments)
def test_segments_intersect_is_symmetric(s1, s2):
    assert segments_intersect(s1, s2) == segments_intersect(s2, s1)


@pytest.mark.parametrize(
    ("s1", "s2", "expected"),
    [
        (Segment(Point(0, 0), Point(2, 2)), Segment(Point(0, 2), Point(2, 0)), True),
        (Segment(Point(0, 0), Point(1, 0)), Segment(Point(1, 0), Point(1, 1)), True),
        (Segment(Point(0, 0), Point(2, 0)), Segment(Point(1, 0), Point(3, 0)), True),
        (Segment(Point(0, 0), Point(1, 0)), Segment(Point(2, 0), Point(3, 0)), False),
        (Segment(Point(0, 0), Point(1, 0)), Segment(Point(0, 1), Point(1, 1)), False),
        (Segment(Point(0, 0), Point(2, 0)), Segment(Point(1, 0), Point(1, 5)), True),
    ],
    ids=["cross", "shared-endpoint", "collinear-overlap", "collinear-apart", "parallel", "t-junction"],
)
def test_segments_intersect_cases(s1, s2, expected):
    assert segments_intersect(s1, s2) is expected


def test_on_segment():
    s = Segment(Point(0, 0), Point(4, 0))
    assert on_segment(Point(2, 0), s)
    assert on_segment(Point(4, 0), s)
    assert not on_segment(Point(5, 0), s)
    assert not on_segment(Point(2, 1), s)


def test_segment_intersection_point():
    crossing = segment_intersection_point(
        Segment(Point(0, 0), Point(2, 2)),
        Segment(Point(0, 2), Point(2, 0)),
    )
    assert crossing is not None
    assert crossing.x == pytest.approx(1.0)
    assert crossing.y == pytest.approx(1.0)
    assert segment_intersection_point(Segment(Point(0, 0), Point(1, 0)), Segment(Point(0, 1), Point(1, 1))) is None
    assert segment_intersection_point(Segment(Point(0, 0), Point(1, 1)), Segment(Point(3, 0), Point(2, 1))) is None


def test_angular_order_is_clockwise_from_east():
    east, south, west, north = Point(1, 0), Point(0, -1), Point(-1, 0), Point(0, 1)
    assert angular_order(Point(0, 0), [north, west, east, south]) == [east, south, west, north]


def test_angular_order_rejects_bad_input():
    with pytest.raises(ValueError, match="at least one"):
        angular_order(Point(0, 0), [])
    with pytest.raises(ValueError, match="coincides"):
        angular_order(Point(0, 0), [Point(0, 0), Point(1, 0)])


def test_next_left_and_right_on_a_star():
    ordered = ["e", "s", "w", "n"]
    assert next_right("c", ordered, "e") == "s"
    assert next_left("c", ordered, "e") == "n"
    assert next_left("c", ["x"], "x") == "x"
    with pytest.raises(ValueError, match="not a neighbor"):
        next_left("c", ordered, "q")
    with pytest.raises(ValueError, match="own neighbor"):
        next_right("c", ordered, "c")


@given(st.lists(st.floats(min_value=0, max_value=2 * math.pi, exclude_max=True), min_size=1, max_size=12, unique=True))
def test_next_left_inverts_next_right(bearings):
    center = Point(0, 0)
    star = {Point(10 * math.cos(b), 10 * math.sin(b)) for b in bearings}
    ordered = angular_order(center, list(star))
    for v in ordered:
        assert next_left(center, ordered, next_right(center, ordered, v)) == v
        assert next_right(center, ordered, next_left(center, ordered, v)) == v


def test_convex_hull_square_with_interior_point():
    corners = [Point(0, 0), Point(2, 0), Point(2, 2), Point(0, 2)]
    hull = convex_hull([*corners, Point(1, 1), Point(1, 0)])
    assert set(hull.vertices) == set(corners)
    assert signed_area(hull.vertices) > 0
    assert polygon_area(hull) == pytest.approx(4.0)
    assert polygon_perimeter(hull.vertices) == pytest.approx(8.0)


def test_convex_hull_degenerate_inputs():
    assert convex_hull([Point(1, 1)]).vertices == (Point(1, 1),)
    line = convex_hull([Point(0, 0), Point(3, 3), Point(1, 1), Point(2, 2)])
    assert line.is_degenerate
    assert set(line.vertices) == {Point(0, 0), Point(3, 3)}
    assert polygon_area(line) == 0.0
    with pytest.raises(ValueError, match="empty"):
        convex_hull([])


def _brute_force_hull_vertices(pts: list[Point]) -> set[Point]:
    vertices = set()
    for p in pts:
        for q in pts:
            if p == q:
                continue
            if all(
                orientation(p, q, r) == Orientation.COUNTERCLOCKWISE
                or (orientation(p, q, r) == Orientation.COLLINEAR and on_segment(r, Segment(p, q)))
                for r in pts
                if r not in (p, q)
            ):
                vertices.update((p, q))
    return vertices


@given(st.lists(grid_points, min_size=3, max_size=25, unique=True))
def test_convex_hull_matches_brute_force(pts):
    hull = convex_hull(pts)
    if hull.is_degenerate:
        assert all(orientation(pts[0], pts[1], r) == Orientation.COLLINEAR for r in pts)
        return
    assert set(hull.vertices) == _brute_force_hull_vertices(pts)
    assert all(polygon_contains(hull, p) for p in pts)


def test_distance():
    assert distance(Point(0, 0), Point(3, 4)) == 5.0
