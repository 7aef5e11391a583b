"""Planar geometry primitives.

Orientation, closed-segment intersection, clockwise angular ordering,
next-left/next-right lookups and convex hulls. All functions are pure.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from enum import IntEnum
from typing import TypeVar

from src.constants import COLLINEAR_EPSILON
from src.model import Point, Polygon, Segment

T = TypeVar("T")

__all__ = [
    "Orientation",
    "angular_order",
    "bearing_key",
    "convex_hull",
    "distance",
    "next_left",
    "next_right",
    "on_segment",
    "orientation",
    "polygon_area",
    "polygon_contains",
    "polygon_perimeter",
    "segment_intersection_point",
    "segments_intersect",
    "signed_area",
]


class Orientation(IntEnum):
    """Turn direction of an ordered point triple."""

    CLOCKWISE = -1
    COLLINEAR = 0
    COUNTERCLOCKWISE = 1


def distance(p: Point, q: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


def _cross(p: Point, q: Point, r: Point) -> float:
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)


def orientation(p: Point, q: Point, r: Point) -> Orientation:
    """Classify the turn p -> q -> r.

    The signed area of triangle pqr decides; magnitudes below
    ``COLLINEAR_EPSILON`` square meters count as collinear.

    Args:
        p (Point): First point.
        q (Point): Second point.
        r (Point): Third point.

    Returns:
        Orientation: The turn direction.

    """
    # Evaluate on a canonical ordering so every permutation sees the same value.
    a, b, c = sorted((p, q, r))
    area = _cross(a, b, c) / 2.0
    if (p, q, r) not in ((a, b, c), (b, c, a), (c, a, b)):
        area = -area
    if abs(area) < COLLINEAR_EPSILON:
        return Orientation.COLLINEAR
    return Orientation.COUNTERCLOCKWISE if area > 0 else Orientation.CLOCKWISE


def on_segment(p: Point, s: Segment) -> bool:
    """Whether ``p`` lies on the closed segment ``s``."""
    if orientation(s.a, s.b, p) != Orientation.COLLINEAR:
        return False
    # Collinear band is an area threshold, so compare projections instead of boxes.
    dx, dy = s.b.x - s.a.x, s.b.y - s.a.y
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return p == s.a
    t = ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / length_sq
    tol = COLLINEAR_EPSILON / length_sq
    return -tol <= t <= 1.0 + tol


def segments_intersect(s1: Segment, s2: Segment) -> bool:
    """Whether two closed segments share at least one point.

    Touching endpoints and collinear overlap ("lies on") both count.
    """
    o1 = orientation(s1.a, s1.b, s2.a)
    o2 = orientation(s1.a, s1.b, s2.b)
    o3 = orientation(s2.a, s2.b, s1.a)
    o4 = orientation(s2.a, s2.b, s1.b)

    if o1 != o2 and o3 != o4 and Orientation.COLLINEAR not in (o1, o2, o3, o4):
        return True

    return (
        on_segment(s2.a, s1)
        or on_segment(s2.b, s1)
        or on_segment(s1.a, s2)
        or on_segment(s1.b, s2)
    )


def segment_intersection_point(s1: Segment, s2: Segment) -> Point | None:
    """Return the single crossing point of two segments.

    Returns:
        Point or None: The crossing point, or None when the segments are
                       disjoint or collinear.

    """
    d1x, d1y = s1.b.x - s1.a.x, s1.b.y - s1.a.y
    d2x, d2y = s2.b.x - s2.a.x, s2.b.y - s2.a.y
    denom = d1x * d2y - d1y * d2x
    if abs(denom) < COLLINEAR_EPSILON or not segments_intersect(s1, s2):
        return None
    t = ((s2.a.x - s1.a.x) * d2y - (s2.a.y - s1.a.y) * d2x) / denom
    t = min(max(t, 0.0), 1.0)
    return Point(s1.a.x + t * d1x, s1.a.y + t * d1y)


def bearing_key(center: Point, p: Point) -> tuple[float, float]:
    """Sort key placing ``p`` clockwise around ``center`` from due east.

    Ties on bearing are broken by increasing distance from the center.
    """
    bearing = math.atan2(p.y - center.y, p.x - center.x)
    return ((-bearing) % math.tau, distance(center, p))


def angular_order(center: Point, neighbors: Sequence[Point]) -> list[Point]:
    """Order neighbors clockwise around ``center`` starting from due east.

    Args:
        center (Point): The node whose neighbors are ordered.
        neighbors (Sequence[Point]): Nonempty neighbor positions.

    Returns:
        list[Point]: The neighbors in clockwise order.

    Raises:
        ValueError: If ``neighbors`` is empty or a neighbor coincides with
                    the center.

    """
    if not neighbors:
        msg = "angular_order needs at least one neighbor"
        raise ValueError(msg)
    if center in neighbors:
        msg = f"neighbor coincides with center {center}"
        raise ValueError(msg)
    return sorted(neighbors, key=lambda p: bearing_key(center, p))


def _position(ordered_neighbors: Sequence[T], v: T) -> int:
    try:
        return list(ordered_neighbors).index(v)
    except ValueError:
        msg = f"{v!r} is not a neighbor"
        raise ValueError(msg) from None


def next_right(center: T, ordered_neighbors: Sequence[T], v: T) -> T:
    """Return the neighbor next clockwise after ``v`` around ``center``.

    With a single neighbor the neighbor itself is returned.
    """
    if v == center:
        msg = "a node is not its own neighbor"
        raise ValueError(msg)
    i = _position(ordered_neighbors, v)
    return ordered_neighbors[(i + 1) % len(ordered_neighbors)]


def next_left(center: T, ordered_neighbors: Sequence[T], v: T) -> T:
    """Return the neighbor next counterclockwise after ``v`` around ``center``.

    With a single neighbor the neighbor itself is returned.
    """
    if v == center:
        msg = "a node is not its own neighbor"
        raise ValueError(msg)
    i = _position(ordered_neighbors, v)
    return ordered_neighbors[(i - 1) % len(ordered_neighbors)]


def convex_hull(points: Sequence[Point]) -> Polygon:
    """Compute the convex hull with the monotone chain method.

    Collinear boundary points are not hull vertices. One or two distinct
    points, or an all-collinear input, yield a degenerate polygon.

    Args:
        points (Sequence[Point]): At least one point.

    Returns:
        Polygon: Hull vertices in counterclockwise order.

    Raises:
        ValueError: If ``points`` is empty.

    """
    if not points:
        msg = "convex_hull of an empty point set"
        raise ValueError(msg)

    pts = sorted(set(points))
    if len(pts) <= 2:  # noqa: PLR2004
        return Polygon(tuple(pts))

    def half(seq: list[Point]) -> list[Point]:
        chain: list[Point] = []
        for p in seq:
            while (
                len(chain) >= 2  # noqa: PLR2004
                and orientation(chain[-2], chain[-1], p) != Orientation.COUNTERCLOCKWISE
            ):
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # noqa: PLR2004
        # All collinear: keep the two extremes.
        return Polygon((pts[0], pts[-1]))
    return Polygon(tuple(hull))


def signed_area(vertices: Sequence[Point]) -> float:
    """Shoelace signed area; positive for counterclockwise vertex order."""
    n = len(vertices)
    total = 0.0
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        total += a.x * b.y - b.x * a.y
    return total / 2.0


def polygon_area(p: Polygon) -> float:
    """Nonnegative area of a simple polygon; zero for degenerate ones."""
    if p.is_degenerate:
        return 0.0
    return abs(signed_area(p.vertices))


def polygon_perimeter(vertices: Sequence[Point]) -> float:
    """Length of the closed polyline through ``vertices``."""
    n = len(vertices)
    return sum(distance(vertices[i], vertices[(i + 1) % n]) for i in range(n))


def polygon_contains(p: Polygon, q: Point) -> bool:
    """Whether ``q`` lies inside or on the boundary of a convex polygon."""
    verts = p.vertices
    if len(verts) == 1:
        return q == verts[0]
    if len(verts) == 2:  # noqa: PLR2004
        return on_segment(q, Segment(verts[0], verts[1]))
    return all(
        orientation(verts[i], verts[(i + 1) % len(verts)], q) != Orientation.CLOCKWISE
        for i in range(len(verts))
    )
