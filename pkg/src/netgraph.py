"""Build and query the wireless communication graph.

Covers random node placement, unit-disk connectivity, Gabriel planarization,
face enumeration of planar embeddings, and hop-distance / reachability
queries used as oracles and metric denominators.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence

import networkx as nx
import numpy as np

from src.constants import UNIT_RADIUS
from src.geometry import bearing_key, next_left, signed_area
from src.model import Face, Graph, NodeId, Point

logger = logging.getLogger(__name__)

Angle = tuple[NodeId, NodeId]


def node_count(
    field_width: float,
    field_height: float,
    density: float,
    unit_radius: float = UNIT_RADIUS,
) -> int:
    """Number of nodes giving ``density`` average nodes per unit disk."""
    return round(density * field_width * field_height / (math.pi * unit_radius**2))


def random_placement(
    field_width: float,
    field_height: float,
    density: float,
    rng_seed: int | np.random.SeedSequence,
    unit_radius: float = UNIT_RADIUS,
) -> list[Point]:
    """Place nodes uniformly at random over a rectangular field.

    Args:
        field_width (float): Field width in meters.
        field_height (float): Field height in meters.
        density (float): Average number of nodes per unit disk.
        rng_seed (int | SeedSequence): Seed of the placement stream.
        unit_radius (float): Radio range in meters.

    Returns:
        list[Point]: Distinct node positions; identical for identical seeds.

    Raises:
        ValueError: If the field has no area, the density is not positive or
                    the resulting node count is zero.

    """
    if field_width <= 0 or field_height <= 0:
        msg = f"field must have positive area, got {field_width} x {field_height}"
        raise ValueError(msg)
    if density <= 0:
        msg = f"density must be positive, got {density}"
        raise ValueError(msg)

    n = node_count(field_width, field_height, density, unit_radius)
    if n == 0:
        msg = f"density {density} places no nodes on a {field_width} x {field_height} field"
        raise ValueError(msg)

    rng = np.random.default_rng(rng_seed)
    points: list[Point] = []
    seen: set[Point] = set()
    # Re-draw on coordinate collisions so all positions are distinct.
    while len(points) < n:
        batch = rng.uniform((0.0, 0.0), (field_width, field_height), size=(n - len(points), 2))
        for x, y in batch:
            p = Point(float(x), float(y))
            if p not in seen:
                seen.add(p)
                points.append(p)
    return points


def build_graph(
    points: Sequence[Point],
    edges: Iterable[tuple[NodeId, NodeId]],
    unit_radius: float = UNIT_RADIUS,
) -> Graph:
    """Assemble a graph with clockwise-ordered adjacency from an edge list.

    Raises:
        ValueError: On self-loops or unknown node ids.

    """
    nodes = tuple(points)
    neighbor_sets: list[set[NodeId]] = [set() for _ in nodes]
    for u, v in edges:
        if u == v:
            msg = f"self-loop at node {u}"
            raise ValueError(msg)
        if not (0 <= u < len(nodes) and 0 <= v < len(nodes)):
            msg = f"edge ({u}, {v}) references an unknown node"
            raise ValueError(msg)
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)

    adjacency = tuple(
        tuple(sorted(adj, key=lambda v, c=nodes[u]: bearing_key(c, nodes[v])))
        for u, adj in enumerate(neighbor_sets)
    )
    return Graph(nodes=nodes, adjacency=adjacency, unit_radius=unit_radius)


def unit_disk_graph(points: Sequence[Point], unit_radius: float = UNIT_RADIUS) -> Graph:
    """Connect every pair of points at most ``unit_radius`` apart.

    Raises:
        ValueError: If two points share coordinates.

    """
    if len(set(points)) != len(points):
        msg = "duplicate coordinates in unit-disk graph input"
        raise ValueError(msg)
    if not points:
        return build_graph([], [], unit_radius)

    xy = np.array([(p.x, p.y) for p in points], dtype=float)
    diff = xy[:, None, :] - xy[None, :, :]
    dist_sq = (diff**2).sum(axis=-1)
    us, vs = np.nonzero(np.triu(dist_sq <= unit_radius**2, k=1))
    g = build_graph(points, zip(us.tolist(), vs.tolist(), strict=True), unit_radius)
    logger.debug("unit-disk graph: %d nodes, %d edges", len(g.nodes), g.n_edges)
    return g


def _in_diameter_disk(u: Point, v: Point, w: Point) -> bool:
    # w is strictly inside the disk with diameter uv iff angle uwv is obtuse.
    return (u.x - w.x) * (v.x - w.x) + (u.y - w.y) * (v.y - w.y) < 0.0


def gabriel_subgraph(g: Graph) -> Graph:
    """Keep edge (u, v) iff no other node lies strictly inside its diameter disk.

    Only neighbors of u and v are consulted, which in a unit-disk graph
    covers every node that can lie inside the disk.
    """
    kept = []
    for u, v in g.edges:
        pu, pv = g.nodes[u], g.nodes[v]
        witnesses = (set(g.neighbors(u)) | set(g.neighbors(v))) - {u, v}
        if not any(_in_diameter_disk(pu, pv, g.nodes[w]) for w in witnesses):
            kept.append((u, v))
    planar = build_graph(g.nodes, kept, g.unit_radius)
    logger.debug("gabriel subgraph keeps %d of %d edges", planar.n_edges, g.n_edges)
    return planar


def angles_at(g: Graph, n: NodeId) -> list[Angle]:
    """Consecutive-neighbor angles at ``n`` as (c, d) with d next-left after c.

    A degree-1 node has the single degenerate angle (v, v); a degree-0 node
    has none.
    """
    adj = g.adjacency[n]
    return [(adj[i], adj[i - 1]) for i in range(len(adj))]


def enumerate_faces(g: Graph) -> list[Face]:
    """Partition the directed edges of a planar graph into faces.

    Each face is the orbit of ``(u, v) -> (v, next_left(v, u))``. In every
    connected component the face with the largest signed area is marked
    external (internal boundaries wind clockwise and have negative area), so
    a graph with k components that have edges has k external faces. Isolated
    nodes have no directed edges and belong to no face.
    """
    visited: set[tuple[NodeId, NodeId]] = set()
    walks: list[list[tuple[NodeId, NodeId]]] = []
    for u in range(len(g.nodes)):
        for v in g.adjacency[u]:
            if (u, v) in visited:
                continue
            walk = []
            edge = (u, v)
            while edge not in visited:
                visited.add(edge)
                walk.append(edge)
                a, b = edge
                edge = (b, next_left(b, g.adjacency[b], a))
            walks.append(walk)

    component_of = {}
    for index, component in enumerate(nx.connected_components(to_networkx(g))):
        for node in component:
            component_of[node] = index

    external: dict[int, tuple[float, int]] = {}
    for i, walk in enumerate(walks):
        area = signed_area([g.nodes[a] for a, _ in walk])
        comp = component_of[walk[0][0]]
        if comp not in external or area > external[comp][0]:
            external[comp] = (area, i)
    external_walks = {i for _, i in external.values()}

    return [Face(tuple(walk), i in external_walks) for i, walk in enumerate(walks)]


def to_networkx(g: Graph) -> nx.Graph:
    """Export as a networkx graph with ``pos`` node attributes."""
    nxg = nx.Graph()
    nxg.add_nodes_from((i, {"pos": (p.x, p.y)}) for i, p in enumerate(g.nodes))
    nxg.add_edges_from(g.edges)
    return nxg


def shortest_path_hops(g: Graph, s: NodeId, t: NodeId) -> int | None:
    """BFS hop distance from ``s`` to ``t``; None when they are disconnected."""
    try:
        return nx.shortest_path_length(to_networkx(g), s, t)
    except nx.NetworkXNoPath:
        return None


def reachable_set(g: Graph, s: NodeId) -> frozenset[NodeId]:
    """All nodes connected to ``s``, including ``s`` itself."""
    return frozenset(nx.node_connected_component(to_networkx(g), s))
