"""GMP: geographic multicast over a heuristic Steiner tree.

Virtual Steiner points act as intermediate waypoints. ``gmp`` recomputes the
tree over the remaining targets at every greedy-mode hop; ``gmp-source``
keeps the tree the source computed.
"""

from __future__ import annotations

from collections.abc import Sequence

from src.model import Graph, NodeId, Point, RouteTree
from src.protocols.base import check_targets
from src.protocols.sequential import SequentialProtocol, route_trees_from
from src.trees import steiner_tree


def gmp_planner(g: Graph, here: NodeId, targets: Sequence[Point]) -> list[RouteTree]:
    """Split the targets into the child subtrees of a Steiner tree rooted at ``here``."""
    return route_trees_from(steiner_tree([g.nodes[here], *targets]))


def gmp_route(
    g: Graph,
    planar_g: Graph,
    s: NodeId,
    targets: Sequence[NodeId],
    session: int = 0,
    ttl: int | None = None,
    *,
    recompute: bool = True,
) -> SequentialProtocol:
    """Sequential Steiner multicast, replanned per hop unless ``recompute`` is off."""
    return SequentialProtocol(
        "gmp" if recompute else "gmp-source",
        g,
        planar_g,
        s,
        check_targets(s, targets),
        gmp_planner,
        session,
        ttl,
        recompute=recompute,
    )
