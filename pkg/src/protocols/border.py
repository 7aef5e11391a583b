"""Face bookkeeping for MCFR traffic.

A FaceL message u -> v walks the directed boundary edge (u, v) of its face;
a FaceR message u -> v walks the edge (v, u) against the boundary direction.
A corner is a node together with one of its angles (c, d). A node visits a
corner when it queues FaceR to c or FaceL to d, by injection or forwarding.

At every slot boundary of a lossless run a pending message may only point
at a corner that is still unvisited, or at a node holding its mate.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping

from src.geometry import next_left, next_right
from src.model import Graph, MessageKind, NodeId, RoutingMessage
from src.netgraph import enumerate_faces
from src.protocols.mcfr import mate_of

Corner = tuple[NodeId, NodeId, NodeId]
SentKey = tuple[MessageKind, NodeId, NodeId]


class FaceLedger:
    """Maps face messages on one planar graph to faces and corners."""

    def __init__(self, g: Graph) -> None:  # noqa: D107
        self.graph = g
        self.faces = enumerate_faces(g)
        self._face_of = {edge: i for i, face in enumerate(self.faces) for edge in face.boundary}

    def face_of(self, kind: MessageKind, sender: NodeId, receiver: NodeId) -> int:
        """Index into ``faces`` of the face a face message traverses."""
        edge = (sender, receiver) if kind == MessageKind.FACE_L else (receiver, sender)
        return self._face_of[edge]

    def departure_corner(self, kind: MessageKind, sender: NodeId, receiver: NodeId) -> Corner:
        """Corner at ``sender`` that the message leaves from."""
        adj = self.graph.neighbors(sender)
        if kind == MessageKind.FACE_R:
            return (sender, receiver, next_left(sender, adj, receiver))
        return (sender, next_right(sender, adj, receiver), receiver)

    def arrival_corner(self, kind: MessageKind, sender: NodeId, receiver: NodeId) -> Corner:
        """Corner at ``receiver`` that the message will traverse."""
        adj = self.graph.neighbors(receiver)
        if kind == MessageKind.FACE_L:
            return (receiver, sender, next_left(receiver, adj, sender))
        return (receiver, next_right(receiver, adj, sender), sender)

    def face_visits(self, sent: Iterable[SentKey]) -> dict[int, frozenset[NodeId]]:
        """Nodes that queued at least one message in each face."""
        visits: dict[int, set[NodeId]] = defaultdict(set)
        for kind, sender, receiver in sent:
            if kind.is_face:
                visits[self.face_of(kind, sender, receiver)].add(sender)
        return {face: frozenset(nodes) for face, nodes in visits.items()}

    def border_violations(
        self,
        pending: Mapping[NodeId, tuple[RoutingMessage, ...]],
        sent: Iterable[SentKey],
    ) -> list[RoutingMessage]:
        """Pending messages heading into a visited corner whose node holds no mate."""
        visited = {self.departure_corner(*key) for key in sent if key[0].is_face}
        return [
            m
            for messages in pending.values()
            for m in messages
            if m.kind.is_face
            and self.arrival_corner(m.kind, m.sender, m.receiver) in visited
            and not any(mate_of(m, other) for other in pending.get(m.receiver, ()))
        ]

    def unpaired_faces(self, pending: Mapping[NodeId, tuple[RoutingMessage, ...]]) -> list[int]:
        """Faces whose pending FaceL and FaceR counts differ."""
        balance: Counter[int] = Counter()
        for messages in pending.values():
            for m in messages:
                if m.kind.is_face:
                    balance[self.face_of(m.kind, m.sender, m.receiver)] += 1 if m.kind == MessageKind.FACE_L else -1
        return sorted(face for face, count in balance.items() if count)
