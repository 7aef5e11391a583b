"""Greedy-face-greedy unicast forwarding.

Greedy mode hands the message to the neighbor closest to the destination
over the full unit-disk graph. At a local minimum the message switches to
perimeter mode on the planar subgraph, walking faces with the right-hand
rule and changing face where an edge crosses the segment from the entry
point to the destination closer than any previous crossing. It returns to
greedy mode as soon as it reaches a node closer than the entry point.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import replace

from src.constants import COLLINEAR_EPSILON
from src.geometry import distance, next_left, segment_intersection_point
from src.model import Graph, MessageKind, NodeId, Point, RecoveryState, RouteTree, RoutingMessage, Segment

logger = logging.getLogger(__name__)


def _greedy(g: Graph, planar_g: Graph, n: NodeId, msg: RoutingMessage, dest: Point) -> RoutingMessage | None:
    here = g.nodes[n]
    own = distance(here, dest)
    closer = [
        (d, w) for w in g.neighbors(n) if (d := distance(g.nodes[w], dest)) < own
    ]
    if closer:
        _, w = min(closer)
        return replace(msg, kind=MessageKind.GREEDY, sender=n, receiver=w, recovery=None)
    return _enter_perimeter(planar_g, n, msg, dest)


def _enter_perimeter(planar_g: Graph, n: NodeId, msg: RoutingMessage, dest: Point) -> RoutingMessage | None:
    adj = planar_g.neighbors(n)
    if not adj:
        return None
    here = planar_g.nodes[n]
    ray = math.atan2(dest.y - here.y, dest.x - here.x)

    def ccw_from_ray(w: NodeId) -> float:
        p = planar_g.nodes[w]
        return (math.atan2(p.y - here.y, p.x - here.x) - ray) % math.tau

    w = min(adj, key=lambda v: (ccw_from_ray(v), v))
    state = RecoveryState(entry=here, face_point=here, first_edge=(n, w))
    logger.debug("node %d is a local minimum toward %s; perimeter mode via %d", n, dest, w)
    return replace(msg, kind=MessageKind.RECOVERY, sender=n, receiver=w, recovery=state)


def _perimeter(planar_g: Graph, n: NodeId, msg: RoutingMessage, dest: Point) -> RoutingMessage | None:
    state = msg.recovery
    adj = planar_g.neighbors(n)
    if state is None or msg.sender not in adj:
        return None
    here = planar_g.nodes[n]
    line = Segment(state.entry, dest)

    face_point, first_edge = state.face_point, state.first_edge
    cand = next_left(n, adj, msg.sender)
    changed = False
    for _ in range(len(adj)):
        crossing = segment_intersection_point(Segment(here, planar_g.nodes[cand]), line)
        if crossing is None or distance(crossing, dest) >= distance(face_point, dest) - COLLINEAR_EPSILON:
            break
        face_point = crossing
        cand = next_left(n, adj, cand)
        first_edge = (n, cand)
        changed = True

    if not changed and (n, cand) == state.first_edge:
        logger.debug("perimeter walk toward %s closed its face at node %d", dest, n)
        return None
    return replace(
        msg,
        sender=n,
        receiver=cand,
        recovery=RecoveryState(state.entry, face_point, first_edge),
    )


def gfg_unicast_step(g: Graph, planar_g: Graph, n: NodeId, msg: RoutingMessage) -> RoutingMessage | None:
    """Next hop of a unicast message held by ``n`` toward its route waypoint.

    Args:
        g (Graph): Full unit-disk graph used by greedy mode.
        planar_g (Graph): Planar subgraph used by perimeter mode.
        n (NodeId): Current custodian.
        msg (RoutingMessage): The message; ``msg.route.waypoint`` is the destination.

    Returns:
        RoutingMessage | None: The forwarded copy (sender ``n``), or None when
        the destination is unreachable from ``n``.

    """
    if msg.route is None:
        msg_text = "unicast message carries no route"
        raise ValueError(msg_text)
    dest = msg.route.waypoint
    if msg.kind == MessageKind.RECOVERY and msg.recovery is not None:
        if distance(g.nodes[n], dest) < distance(msg.recovery.entry, dest):
            return _greedy(g, planar_g, n, msg, dest)
        return _perimeter(planar_g, n, msg, dest)
    return _greedy(g, planar_g, n, msg, dest)


def unicast_planner(g: Graph, here: NodeId, targets: Sequence[Point]) -> list[RouteTree]:
    """One independent route per target."""
    del g, here
    return [RouteTree(p) for p in targets]
