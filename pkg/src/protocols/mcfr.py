"""MCFR: concurrent multicast face routing.

The source computes a tree over itself and the targets and injects a pair of
opposite face traversal messages (mates) into every angle that intersects the
tree. Each receiver cancels a message against its pending mate, delivers when
it is a target, forwards along the face, and splits the message into every
other tree-intersecting angle when the traversed angle intersects the tree.

An angle at node n is an ordered pair (c, d) of circularly consecutive
neighbors with d next-left after c. The pair injected into it is FaceR to c
and FaceL to d; both halves then traverse the face containing the angle.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace

from src.geometry import next_left, next_right
from src.model import Graph, MessageKind, NodeId, Outcome, RoutingMessage, Tree
from src.netgraph import Angle, angles_at
from src.protocols.base import Reaction, check_targets, decrement_ttl
from src.trees import angle_intersects_tree, euclidean_mst, is_juncture, steiner_tree

logger = logging.getLogger(__name__)


def mate_of(m1: RoutingMessage, m2: RoutingMessage) -> bool:
    """Whether two face messages traverse the same face in opposite directions.

    Mates belong to the same session and tree, have opposite kinds, and the
    sender of each is the receiver of the other.
    """
    return (
        m1.kind.is_face
        and m2.kind.is_face
        and m1.kind != m2.kind
        and m1.session_id == m2.session_id
        and m1.source == m2.source
        and m1.tree == m2.tree
        and m1.sender == m2.receiver
        and m1.receiver == m2.sender
    )


def _angle_hits(g: Graph, n: NodeId, angle: Angle, t: Tree) -> bool:
    c, d = angle
    return angle_intersects_tree(g.nodes[n], g.nodes[c], g.nodes[d], t)


def _inject(
    n: NodeId,
    angle: Angle,
    *,
    session_id: int,
    source: NodeId,
    tree: Tree,
    ttl: int | None,
) -> list[RoutingMessage]:
    c, d = angle
    return [
        RoutingMessage(session_id, MessageKind.FACE_R, source, n, c, ttl, tree=tree),
        RoutingMessage(session_id, MessageKind.FACE_L, source, n, d, ttl, tree=tree),
    ]


def _well_formed(tree: Tree | None) -> bool:
    if tree is None or len(tree.terminals) < 2:  # noqa: PLR2004
        return False
    size = len(tree.points)
    return all(0 <= i < size and 0 <= j < size and i != j for i, j in tree.edges)


def mcfr_source_init(
    g: Graph,
    s: NodeId,
    t: Tree,
    session: int,
    ttl: int | None,
) -> list[RoutingMessage]:
    """Messages the source injects: a mate pair into every angle hitting ``t``.

    Args:
        g (Graph): Planar communication graph.
        s (NodeId): The source; must sit at ``t``'s first terminal.
        t (Tree): Multicast tree.
        session (int): Session identifier stamped on every message.
        ttl (int | None): Initial hop budget, None for unlimited.

    Returns:
        list[RoutingMessage]: Empty when the source is isolated.

    Raises:
        ValueError: If ``s`` is not located at the tree's source terminal.

    """
    if g.nodes[s] != t.source:
        msg = f"node {s} at {g.nodes[s]} is not the tree source {t.source}"
        raise ValueError(msg)
    if g.degree(s) == 0:
        logger.info("source %d is isolated; multicast cannot start", s)
        return []

    messages = [
        m
        for angle in angles_at(g, s)
        if _angle_hits(g, s, angle, t)
        for m in _inject(s, angle, session_id=session, source=s, tree=t, ttl=ttl)
    ]
    if not messages:
        # Every edge at a tree terminal touches the tree at that terminal.
        msg = f"no angle at source {s} intersects its own tree"
        raise ValueError(msg)
    return messages


def mcfr_on_receive(
    g: Graph,
    n: NodeId,
    msg: RoutingMessage,
    sq: Sequence[RoutingMessage],
) -> Reaction:
    """Handle a face message at its receiver ``n``.

    In order: cancel against the earliest pending mate; deliver when ``n`` is
    a target; forward along the face; split into every other angle at ``n``
    that intersects the tree when the traversed angle does.

    Args:
        g (Graph): Planar communication graph.
        n (NodeId): The receiving node.
        msg (RoutingMessage): The received face message.
        sq (Sequence[RoutingMessage]): ``n``'s send queue, head first.

    Returns:
        Reaction: Deliveries, new messages and the mate to discard.

    """
    if not msg.kind.is_face or msg.receiver != n or not _well_formed(msg.tree):
        logger.warning("malformed face message at node %d dropped", n)
        return Reaction(dropped=Outcome.PROTOCOL_ERROR)
    adj = g.neighbors(n)
    if msg.sender not in adj:
        logger.warning("face message at node %d from non-neighbor %d", n, msg.sender)
        return Reaction(dropped=Outcome.PROTOCOL_ERROR)

    for position, pending in enumerate(sq):
        if mate_of(msg, pending):
            return Reaction(cancel=position)

    tree = msg.tree
    deliveries = (n,) if g.nodes[n] in tree.targets else ()

    a = msg.sender
    if msg.kind == MessageKind.FACE_L:
        b = next_left(n, adj, a)
        traversed = (a, b)
    else:
        b = next_right(n, adj, a)
        traversed = (b, a)

    ttl = decrement_ttl(msg.ttl)
    enqueues = [replace(msg, sender=n, receiver=b, ttl=ttl)]
    late = False
    if _angle_hits(g, n, traversed, tree):
        for angle in angles_at(g, n):
            if angle != traversed and _angle_hits(g, n, angle, tree):
                enqueues.extend(
                    _inject(n, angle, session_id=msg.session_id, source=msg.source, tree=tree, ttl=ttl),
                )
    elif is_juncture(g, n, tree):
        late = True

    return Reaction(deliveries=deliveries, enqueues=tuple(enqueues), late_juncture=late)


@dataclass(frozen=True)
class McfrProtocol:
    """MCFR over a fixed tree computed by the source."""

    name: str
    graph: Graph
    source: NodeId
    targets: tuple[NodeId, ...]
    tree: Tree
    session_id: int = 0
    ttl: int | None = None

    def initial_messages(self) -> list[RoutingMessage]:  # noqa: D102
        return mcfr_source_init(self.graph, self.source, self.tree, self.session_id, self.ttl)

    def on_receive(  # noqa: D102
        self,
        n: NodeId,
        msg: RoutingMessage,
        queue: Sequence[RoutingMessage],
    ) -> Reaction:
        return mcfr_on_receive(self.graph, n, msg, queue)


def mcfr_route(
    planar_g: Graph,
    s: NodeId,
    targets: Sequence[NodeId],
    session: int = 0,
    ttl: int | None = None,
) -> McfrProtocol:
    """MCFR navigating over the heuristic Steiner tree."""
    targets = check_targets(s, targets)
    terminals = [planar_g.nodes[s], *(planar_g.nodes[t] for t in targets)]
    return McfrProtocol("mcfr-steiner", planar_g, s, targets, steiner_tree(terminals), session, ttl)


def mcfr_mst_variant(
    planar_g: Graph,
    s: NodeId,
    targets: Sequence[NodeId],
    session: int = 0,
    ttl: int | None = None,
) -> McfrProtocol:
    """MCFR navigating over the Euclidean minimum spanning tree."""
    targets = check_targets(s, targets)
    terminals = [planar_g.nodes[s], *(planar_g.nodes[t] for t in targets)]
    return McfrProtocol("mcfr-mst", planar_g, s, targets, euclidean_mst(terminals), session, ttl)
