"""Euclidean multicast trees.

Minimum spanning trees, the MST-improvement Steiner heuristic with Fermat
virtual points, tree metrics, and the angle/tree intersection tests that
decide where face traversal messages are split.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from itertools import combinations

import networkx as nx
import numpy as np

from src.constants import FERMAT_MAX_ITERATIONS, FERMAT_TOLERANCE, STEINER_MIN_GAIN
from src.geometry import convex_hull, distance, polygon_area, polygon_contains, segments_intersect
from src.model import Graph, NodeId, Point, Segment, Tree, TreeMetrics
from src.netgraph import angles_at

logger = logging.getLogger(__name__)

FERMAT_ANGLE = 2.0 * math.pi / 3.0


def _validate_terminals(terminals: Sequence[Point]) -> tuple[Point, ...]:
    pts = tuple(terminals)
    if len(pts) < 2:  # noqa: PLR2004
        msg = f"a tree needs at least 2 terminals, got {len(pts)}"
        raise ValueError(msg)
    if len(set(pts)) != len(pts):
        msg = "tree terminals must be distinct"
        raise ValueError(msg)
    return pts


def euclidean_mst(terminals: Sequence[Point]) -> Tree:
    """Kruskal minimum spanning tree over the terminals.

    The complete Euclidean graph is handed to networkx with its edges added
    in lexicographic order of (length, endpoints), so ties resolve the same
    way on every run.

    Args:
        terminals (Sequence[Point]): The source first, then the targets.

    Returns:
        Tree: Spanning tree without virtual nodes, edges sorted by length.

    Raises:
        ValueError: On fewer than two or repeated terminals.

    """
    pts = _validate_terminals(terminals)

    def key(i: int, j: int) -> tuple[float, Point, Point]:
        return distance(pts[i], pts[j]), min(pts[i], pts[j]), max(pts[i], pts[j])

    complete = nx.Graph()
    complete.add_nodes_from(range(len(pts)))
    for i, j in sorted(combinations(range(len(pts)), 2), key=lambda e: key(*e)):
        complete.add_edge(i, j, weight=key(i, j)[0])

    mst = nx.minimum_spanning_tree(complete, algorithm="kruskal")
    edges = sorted((tuple(sorted(e)) for e in mst.edges()), key=lambda e: key(*e))
    return Tree(terminals=pts, edges=tuple(edges))


def _angle_at(v: Point, a: Point, b: Point) -> float:
    ax, ay = a.x - v.x, a.y - v.y
    bx, by = b.x - v.x, b.y - v.y
    return abs(math.atan2(ax * by - ay * bx, ax * bx + ay * by))


def fermat_point(a: Point, b: Point, c: Point) -> Point:
    """Point minimizing the summed distance to three points.

    A triangle with an angle of at least 120 degrees returns that vertex.
    Otherwise Weiszfeld iteration runs from the centroid until the summed
    unit vectors vanish to ``FERMAT_TOLERANCE``.
    """
    for v, p, q in ((a, b, c), (b, a, c), (c, a, b)):
        if _angle_at(v, p, q) >= FERMAT_ANGLE:
            return v

    pts = np.array([[a.x, a.y], [b.x, b.y], [c.x, c.y]])
    x = pts.mean(axis=0)
    for _ in range(FERMAT_MAX_ITERATIONS):
        offsets = pts - x
        dists = np.linalg.norm(offsets, axis=1)
        if np.any(dists < FERMAT_TOLERANCE):
            break
        if np.linalg.norm((offsets / dists[:, None]).sum(axis=0)) < FERMAT_TOLERANCE:
            break
        weights = 1.0 / dists
        x = (pts * weights[:, None]).sum(axis=0) / weights.sum()
    return Point(float(x[0]), float(x[1]))


def steiner_tree(terminals: Sequence[Point]) -> Tree:
    """Heuristic Euclidean Steiner tree.

    Starts from the MST and repeatedly replaces the pair of MST edges
    (v, a), (v, b) with the largest length gain by a Fermat virtual node
    joined to a, v and b. Only terminal-to-terminal edges are ever replaced,
    so every virtual node keeps exactly three terminal neighbors at 120
    degrees. Stops when no pair improves the length by more than
    ``STEINER_MIN_GAIN``.

    Args:
        terminals (Sequence[Point]): The source first, then the targets.

    Returns:
        Tree: Tree no longer than the MST with at most m - 2 virtual nodes.

    Raises:
        ValueError: On fewer than two or repeated terminals.

    """
    mst = euclidean_mst(terminals)
    pts = mst.terminals
    real_edges = {tuple(sorted(e)) for e in mst.edges}
    virtual_nodes: list[Point] = []
    virtual_edges: list[tuple[int, int]] = []

    while True:
        best: tuple[float, int, int, int, Point] | None = None
        for v in range(len(pts)):
            nbrs = sorted({a for e in real_edges if v in e for a in e if a != v})
            for a, b in combinations(nbrs, 2):
                if _angle_at(pts[v], pts[a], pts[b]) >= FERMAT_ANGLE:
                    continue
                f = fermat_point(pts[a], pts[v], pts[b])
                if f in (pts[a], pts[v], pts[b]):
                    continue
                gain = (
                    distance(pts[v], pts[a])
                    + distance(pts[v], pts[b])
                    - distance(f, pts[a])
                    - distance(f, pts[v])
                    - distance(f, pts[b])
                )
                if gain > STEINER_MIN_GAIN and (best is None or gain > best[0]):
                    best = (gain, v, a, b, f)
        if best is None:
            break
        _, v, a, b, f = best
        real_edges -= {tuple(sorted((v, a))), tuple(sorted((v, b)))}
        k = len(pts) + len(virtual_nodes)
        virtual_nodes.append(f)
        virtual_edges.extend([(a, k), (v, k), (b, k)])

    tree = Tree(
        terminals=pts,
        virtual_nodes=tuple(virtual_nodes),
        edges=tuple(sorted(real_edges)) + tuple(virtual_edges),
    )
    if virtual_nodes:
        hull = convex_hull(pts)
        stray = [v for v in virtual_nodes if not polygon_contains(hull, v)]
        if stray:
            logger.warning("steiner tree: virtual nodes %s lie outside the terminal hull", stray)
    logger.debug(
        "steiner tree: %d terminals, %d virtual nodes, length %.3f (mst %.3f)",
        len(pts),
        len(virtual_nodes),
        tree.total_length,
        mst.total_length,
    )
    return tree


def _farthest(adj: dict[int, list[int]], pts: Sequence[Point], start: int) -> tuple[int, float]:
    best, best_dist = start, 0.0
    stack = [(start, -1, 0.0)]
    while stack:
        node, parent, dist = stack.pop()
        if dist > best_dist:
            best, best_dist = node, dist
        for nxt in adj[node]:
            if nxt != parent:
                stack.append((nxt, node, dist + distance(pts[node], pts[nxt])))
    return best, best_dist


def tree_metrics(t: Tree) -> TreeMetrics:
    """Length, weighted diameter and Steiner hull of a tree.

    The diameter comes from two farthest-node traversals.
    """
    adj = t.adjacency()
    pts = t.points
    end, _ = _farthest(adj, pts, 0)
    _, diameter = _farthest(adj, pts, end)
    hull = convex_hull(pts)
    return TreeMetrics(
        total_length=t.total_length,
        diameter=diameter,
        hull=hull,
        hull_area=polygon_area(hull),
    )


def angle_intersects_tree(u: Point, v: Point, w: Point, t: Tree) -> bool:
    """Whether edge uv or edge uw lies on or intersects an edge of ``t``."""
    sides = (Segment(u, v), Segment(u, w))
    return any(segments_intersect(side, edge) for side in sides for edge in t.segments)


def is_juncture(g: Graph, n: NodeId, t: Tree) -> bool:
    """Whether some consecutive-neighbor angle at ``n`` intersects ``t``.

    The source is always a juncture; a node without neighbors never is.
    """
    if g.degree(n) == 0:
        return False
    here = g.nodes[n]
    if here == t.source:
        return True
    return any(
        angle_intersects_tree(here, g.nodes[c], g.nodes[d], t) for c, d in angles_at(g, n)
    )
