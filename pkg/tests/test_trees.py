import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.geometry import convex_hull, polygon_contains
from src.model import Point, Tree
from src.trees import angle_intersects_tree, euclidean_mst, fermat_point, is_juncture, steiner_tree, tree_metrics


def _random_terminals(rng: np.random.Generator, m: int) -> list[Point]:
    return [Point(float(x), float(y)) for x, y in rng.uniform(0, 1000, size=(m, 2))]


def _prufer_trees(m: int):
    for code in itertools.product(range(m), repeat=m - 2):
        degree = [1] * m
        for v in code:
            degree[v] += 1
        edges = []
        for v in code:
            leaf = min(i for i in range(m) if degree[i] == 1)
            edges.append((leaf, v))
            degree[leaf] -= 1
            degree[v] -= 1
        u, w = (i for i in range(m) if degree[i] == 1)
        edges.append((u, w))
        yield edges


def test_mst_matches_brute_force_over_all_spanning_trees():
    rng = np.random.default_rng(3)
    trees = list(_prufer_trees(6))
    assert len(trees) == 6**4
    for _ in range(1000):
        pts = _random_terminals(rng, 6)
        dist = [[math.dist((p.x, p.y), (q.x, q.y)) for q in pts] for p in pts]
        best = min(sum(dist[i][j] for i, j in edges) for edges in trees)
        assert euclidean_mst(pts).total_length == pytest.approx(best)


def test_mst_rejects_bad_terminals():
    with pytest.raises(ValueError, match="at least 2"):
        euclidean_mst([Point(0, 0)])
    with pytest.raises(ValueError, match="distinct"):
        euclidean_mst([Point(0, 0), Point(1, 1), Point(0, 0)])


def test_two_terminals_give_a_single_edge():
    tree = steiner_tree([Point(0, 0), Point(3, 4)])
    assert tree.virtual_nodes == ()
    assert tree.edges == ((0, 1),)
    assert tree.total_length == pytest.approx(5.0)


def test_fermat_point_of_equilateral_triangle_is_the_centroid():
    h = math.sqrt(3) / 2
    f = fermat_point(Point(0, 0), Point(1, 0), Point(0.5, h))
    assert f.x == pytest.approx(0.5, abs=1e-6)
    assert f.y == pytest.approx(h / 3, abs=1e-6)


def test_fermat_point_of_obtuse_triangle_is_the_obtuse_vertex():
    a = Point(0, 0)
    assert fermat_point(Point(2, 0), a, Point(-1, 0.5)) == a


def test_steiner_tree_of_equilateral_triangle():
    h = math.sqrt(3) / 2
    tree = steiner_tree([Point(0, 0), Point(1, 0), Point(0.5, h)])
    assert len(tree.virtual_nodes) == 1
    assert tree.total_length == pytest.approx(math.sqrt(3), abs=1e-6)
    (center,) = tree.virtual_nodes
    assert center.x == pytest.approx(0.5, abs=1e-6)
    assert center.y == pytest.approx(h / 3, abs=1e-6)


def test_steiner_tree_shape_on_random_terminals():
    rng = np.random.default_rng(17)
    for m in [2, 3, 4, 5, 8, 12] * 10:
        pts = _random_terminals(rng, m)
        mst = euclidean_mst(pts)
        tree = steiner_tree(pts)

        assert tree.terminals == tuple(pts)
        assert mst.total_length / 2 <= tree.total_length <= mst.total_length + 1e-9
        assert len(tree.virtual_nodes) <= m - 2 if m > 2 else not tree.virtual_nodes

        nxt = nx.Graph(list(tree.edges))
        nxt.add_nodes_from(range(len(tree.points)))
        assert nx.is_tree(nxt)
        for k in range(m, len(tree.points)):
            assert nxt.degree(k) == 3


def test_tree_metrics_of_a_path():
    tree = euclidean_mst([Point(0, 0), Point(3, 0), Point(3, 4)])
    metrics = tree_metrics(tree)
    assert metrics.total_length == pytest.approx(7.0)
    assert metrics.diameter == pytest.approx(7.0)
    assert metrics.hull_area == pytest.approx(6.0)
    assert len(metrics.hull.vertices) == 3


def test_angle_intersects_tree():
    tree = Tree(terminals=(Point(0.5, -2), Point(0.5, 2)), edges=((0, 1),))
    u, v, w = Point(0, 0), Point(1, 1), Point(1, -1)
    assert angle_intersects_tree(u, v, w, tree)
    far = Tree(terminals=(Point(5, 5), Point(6, 6)), edges=((0, 1),))
    assert not angle_intersects_tree(u, v, w, far)
    touching = Tree(terminals=(Point(1, 1), Point(3, 3)), edges=((0, 1),))
    assert angle_intersects_tree(u, v, w, touching)


def test_is_juncture(square, make_graph):
    tree = Tree(terminals=(Point(0, 0), Point(0.4, 0.4)), edges=((0, 1),))
    assert is_juncture(square, 0, tree)
    assert is_juncture(square, 1, tree)
    assert not is_juncture(square, 2, tree)

    lonely = make_graph([(0, 0), (1, 0), (9, 9)], [(0, 1)])
    assert not is_juncture(lonely, 2, Tree(terminals=(Point(9, 9), Point(0, 0)), edges=((0, 1),)))


def _turn(at: Point, p: Point, q: Point) -> float:
    return abs(math.remainder(math.atan2(p.y - at.y, p.x - at.x) - math.atan2(q.y - at.y, q.x - at.x), math.tau))


def test_virtual_nodes_are_fermat_points_inside_the_hull(caplog):
    rng = np.random.default_rng(29)
    seen = 0
    for m in [3, 4, 6, 9] * 15:
        pts = _random_terminals(rng, m)
        tree = steiner_tree(pts)
        hull = convex_hull(pts)
        adj = tree.adjacency()
        for k, v in enumerate(tree.virtual_nodes, start=m):
            seen += 1
            assert polygon_contains(hull, v)
            nbrs = [tree.points[i] for i in adj[k]]
            assert len(nbrs) == 3
            for p, q in itertools.combinations(nbrs, 2):
                assert _turn(v, p, q) >= 2 * math.pi / 3 - 1e-2
    assert seen > 0
    assert "outside the terminal hull" not in caplog.text


grid = st.builds(Point, st.integers(-20, 20).map(float), st.integers(-20, 20).map(float))


@settings(max_examples=60, deadline=None)
@given(st.lists(grid, min_size=2, max_size=7, unique=True), grid, grid, grid)
def test_adding_tree_edges_never_clears_an_angle(terminals, u, v, w):
    tree = steiner_tree(terminals)
    hits = [
        angle_intersects_tree(u, v, w, Tree(tree.terminals, tree.virtual_nodes, tree.edges[:k]))
        for k in range(len(tree.edges) + 1)
    ]
    assert not hits[0]
    assert hits == sorted(hits)


def test_tree_metrics_of_a_star():
    star = Tree(
        terminals=(Point(0, 0), Point(1, 0), Point(0, 1), Point(-1, 0)),
        edges=((0, 1), (0, 2), (0, 3)),
    )
    assert tree_metrics(star).diameter == pytest.approx(2.0)


def test_tree_diameter_matches_all_pairs_paths():
    rng = np.random.default_rng(41)
    for m in [2, 3, 5, 8, 13] * 6:
        tree = steiner_tree(_random_terminals(rng, m))
        weighted = nx.Graph()
        weighted.add_nodes_from(range(len(tree.points)))
        for (i, j), seg in zip(tree.edges, tree.segments, strict=True):
            weighted.add_edge(i, j, weight=seg.length)
        longest = max(
            d for _, lengths in nx.all_pairs_dijkstra_path_length(weighted) for d in lengths.values()
        )
        assert tree_metrics(tree).diameter == pytest.approx(longest)
