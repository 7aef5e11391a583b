"""Sequential multicast: unicast messages that carry their remaining subtree.

A planner turns the custodian and its remaining targets into route trees.
Each route tree travels as one message, unicast by GFG toward its waypoint.
At a real waypoint the payload is delivered and the message splits into its
children; a virtual waypoint is reached when the custodian has no neighbor
closer to it. With ``recompute`` set the custodian replans the tree at every
greedy-mode hop instead of following the source's plan.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace

from src.geometry import distance
from src.model import Graph, MessageKind, NodeId, Outcome, Point, RouteTree, RoutingMessage, Tree
from src.protocols.base import Reaction, check_targets, decrement_ttl
from src.protocols.gfg import gfg_unicast_step, unicast_planner

logger = logging.getLogger(__name__)

Planner = Callable[[Graph, NodeId, Sequence[Point]], list[RouteTree]]


def waypoint_reached(g: Graph, n: NodeId, waypoint: Point) -> bool:
    """Whether no neighbor of ``n`` is strictly closer to ``waypoint`` than ``n``."""
    own = distance(g.nodes[n], waypoint)
    return not any(distance(g.nodes[w], waypoint) < own for w in g.neighbors(n))


def expand_reached(g: Graph, n: NodeId, routes: Sequence[RouteTree]) -> list[RouteTree]:
    """Replace every virtual route already reached at ``n`` by its children."""
    out: list[RouteTree] = []
    for route in routes:
        if route.virtual and waypoint_reached(g, n, route.waypoint):
            out.extend(expand_reached(g, n, route.children))
        else:
            out.append(route)
    return out


def route_trees_from(tree: Tree, root: int = 0) -> list[RouteTree]:
    """Hang ``tree`` from node ``root`` and return the subtrees of its children."""
    adj = tree.adjacency()
    pts = tree.points

    def build(node: int, parent: int) -> RouteTree:
        children = tuple(build(c, node) for c in sorted(adj[node]) if c != parent)
        return RouteTree(pts[node], virtual=tree.is_virtual(node), children=children)

    return [build(c, root) for c in sorted(adj[root])]


@dataclass(frozen=True)
class SequentialProtocol:
    """A multicast algorithm built from GFG unicast messages.

    Attributes:
        name (str): Algorithm name used in transcripts and reports.
        graph (Graph): Full unit-disk graph for greedy forwarding.
        planar_graph (Graph): Planar subgraph for perimeter recovery.
        source (NodeId): Multicast source.
        targets (tuple[NodeId, ...]): Multicast targets.
        planner (Planner): Splits remaining targets into route trees.
        session_id (int): Identifier stamped on every message.
        ttl (int | None): Initial hop budget, None for unlimited.
        recompute (bool): Replan at every greedy-mode hop.

    """

    name: str
    graph: Graph
    planar_graph: Graph
    source: NodeId
    targets: tuple[NodeId, ...]
    planner: Planner
    session_id: int = 0
    ttl: int | None = None
    recompute: bool = False

    def initial_messages(self) -> list[RoutingMessage]:
        """Plan from the source and send one message per route tree."""
        routes = self.planner(self.graph, self.source, [self.graph.nodes[t] for t in self.targets])
        messages, unroutable = self._dispatch(self.source, routes, self.ttl)
        if unroutable:
            logger.info("%s: %d routes cannot leave source %d", self.name, unroutable, self.source)
        return messages

    def _dispatch(
        self,
        n: NodeId,
        routes: Sequence[RouteTree],
        ttl: int | None,
    ) -> tuple[list[RoutingMessage], int]:
        messages: list[RoutingMessage] = []
        unroutable = 0
        for route in expand_reached(self.graph, n, routes):
            seed = RoutingMessage(self.session_id, MessageKind.GREEDY, self.source, n, n, ttl, route=route)
            nxt = gfg_unicast_step(self.graph, self.planar_graph, n, seed)
            if nxt is None:
                unroutable += 1
            else:
                messages.append(nxt)
        return messages, unroutable

    def _forward(self, n: NodeId, msg: RoutingMessage, ttl: int | None, deliveries: tuple[NodeId, ...]) -> Reaction:
        nxt = gfg_unicast_step(self.graph, self.planar_graph, n, msg)
        if nxt is None:
            return Reaction(deliveries=deliveries, dropped=Outcome.UNREACHABLE)
        return Reaction(deliveries=deliveries, enqueues=(replace(nxt, ttl=ttl),))

    def _in_recovery(self, n: NodeId, msg: RoutingMessage) -> bool:
        if msg.kind != MessageKind.RECOVERY or msg.recovery is None or msg.route is None:
            return False
        dest = msg.route.waypoint
        return distance(self.graph.nodes[n], dest) >= distance(msg.recovery.entry, dest)

    def on_receive(
        self,
        n: NodeId,
        msg: RoutingMessage,
        queue: Sequence[RoutingMessage],
    ) -> Reaction:
        """Deliver, split at a reached waypoint, or forward one more hop."""
        del queue
        if msg.route is None or msg.kind.is_face or msg.receiver != n:
            logger.warning("%s: malformed unicast message at node %d dropped", self.name, n)
            return Reaction(dropped=Outcome.PROTOCOL_ERROR)

        here = self.graph.nodes[n]
        route = msg.route
        ttl = decrement_ttl(msg.ttl)

        if self.recompute:
            pending = route.target_points()
            remaining = [p for p in pending if p != here]
            deliveries = (n,) if len(remaining) < len(pending) else ()
            if not remaining:
                return Reaction(deliveries=deliveries)
            if not deliveries and self._in_recovery(n, msg):
                return self._forward(n, msg, ttl, deliveries)
            routes = self.planner(self.graph, n, remaining)
        elif here == route.waypoint:
            deliveries = () if route.virtual else (n,)
            routes = list(route.children)
        elif route.virtual and waypoint_reached(self.graph, n, route.waypoint):
            deliveries = ()
            routes = list(route.children)
        else:
            return self._forward(n, msg, ttl, ())

        messages, unroutable = self._dispatch(n, routes, ttl)
        return Reaction(deliveries=deliveries, enqueues=tuple(messages), unroutable=unroutable)


def gfg_unicast_route(
    g: Graph,
    planar_g: Graph,
    s: NodeId,
    targets: Sequence[NodeId],
    session: int = 0,
    ttl: int | None = None,
) -> SequentialProtocol:
    """Baseline multicast: an independent GFG unicast to every target."""
    return SequentialProtocol(
        "gfg-unicast",
        g,
        planar_g,
        s,
        check_targets(s, targets),
        unicast_planner,
        session,
        ttl,
    )
