"""LGS: location-guided Steiner multicast over the terminal MST."""

from __future__ import annotations

from collections.abc import Sequence

from src.model import Graph, NodeId, Point, RouteTree
from src.protocols.base import check_targets
from src.protocols.sequential import SequentialProtocol, route_trees_from
from src.trees import euclidean_mst


def lgs_planner(g: Graph, here: NodeId, targets: Sequence[Point]) -> list[RouteTree]:
    """Split the targets into the child subtrees of the MST rooted at ``here``."""
    return route_trees_from(euclidean_mst([g.nodes[here], *targets]))


def lgs_route(
    g: Graph,
    planar_g: Graph,
    s: NodeId,
    targets: Sequence[NodeId],
    session: int = 0,
    ttl: int | None = None,
) -> SequentialProtocol:
    """Sequential multicast following the MST the source computes once.

    Args:
        g (Graph): Full unit-disk graph.
        planar_g (Graph): Planar subgraph for recovery.
        s (NodeId): Source node.
        targets (Sequence[NodeId]): Target nodes.
        session (int): Session identifier.
        ttl (int | None): Initial hop budget, None for unlimited.

    Returns:
        SequentialProtocol: The configured algorithm.

    """
    return SequentialProtocol("lgs", g, planar_g, s, check_targets(s, targets), lgs_planner, session, ttl)
