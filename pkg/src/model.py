"""Define the routing data structures.

This module defines the data structures shared by the geometry, graph, tree,
protocol and simulation modules: embedded points and segments, the
communication graph with its circularly ordered neighbor lists, planar faces,
multicast trees and the messages that carry them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # noqa: D101
        __str__ = str.__str__
        __format__ = str.__format__

NodeId = int


@dataclass(frozen=True, order=True)
class Point:
    """A position in the plane.

    Attributes:
        x (float): Easting in meters.
        y (float): Northing in meters.

    """

    x: float
    y: float

    def __post_init__(self) -> None:  # noqa: D105
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            msg = f"point coordinates must be finite, got ({self.x}, {self.y})"
            raise ValueError(msg)


@dataclass(frozen=True)
class Segment:
    """A closed straight segment between two points."""

    a: Point
    b: Point

    @property
    def length(self) -> float:  # noqa: D102
        return math.dist((self.a.x, self.a.y), (self.b.x, self.b.y))


@dataclass(frozen=True)
class Polygon:
    """A simple polygon with counterclockwise vertices.

    Fewer than three vertices encode a degenerate (zero-area) hull.
    """

    vertices: tuple[Point, ...]

    @property
    def is_degenerate(self) -> bool:  # noqa: D102
        return len(self.vertices) < 3  # noqa: PLR2004


@dataclass(frozen=True)
class Graph:
    """An embedded undirected communication graph.

    Attributes:
        nodes (tuple[Point, ...]): Node coordinates, indexed by node id.
        adjacency (tuple[tuple[int, ...], ...]): Neighbor ids of each node in
            clockwise order starting from the due-east bearing.
        unit_radius (float): Radio range the graph was built with, in meters.

    """

    nodes: tuple[Point, ...]
    adjacency: tuple[tuple[NodeId, ...], ...]
    unit_radius: float

    def neighbors(self, n: NodeId) -> tuple[NodeId, ...]:  # noqa: D102
        return self.adjacency[n]

    def degree(self, n: NodeId) -> int:  # noqa: D102
        return len(self.adjacency[n])

    @cached_property
    def edges(self) -> tuple[tuple[NodeId, NodeId], ...]:
        """Undirected edges as (u, v) pairs with u < v, sorted."""
        return tuple(
            sorted((u, v) for u, adj in enumerate(self.adjacency) for v in adj if u < v),
        )

    @property
    def n_edges(self) -> int:  # noqa: D102
        return len(self.edges)

    @property
    def max_degree(self) -> int:  # noqa: D102
        return max((len(adj) for adj in self.adjacency), default=0)

    @cached_property
    def _index(self) -> dict[Point, NodeId]:
        return {p: i for i, p in enumerate(self.nodes)}

    def node_at(self, p: Point) -> NodeId | None:
        """Return the id of the node located exactly at ``p``, if any."""
        return self._index.get(p)


@dataclass(frozen=True)
class Face:
    """A face of a planar embedding.

    Attributes:
        boundary (tuple[tuple[int, int], ...]): Directed edges of the boundary
            walk; each successor is ``(v, next_left(v, u))`` of its predecessor.
        is_external (bool): Whether this is the unbounded face of its component.

    """

    boundary: tuple[tuple[NodeId, NodeId], ...]
    is_external: bool

    @property
    def nodes(self) -> frozenset[NodeId]:  # noqa: D102
        return frozenset(u for u, _ in self.boundary)


@dataclass(frozen=True)
class Tree:
    """A Euclidean tree over the multicast terminals plus virtual nodes.

    Node index ``i`` refers to ``terminals[i]`` when ``i < len(terminals)`` and to
    ``virtual_nodes[i - len(terminals)]`` otherwise.

    Attributes:
        terminals (tuple[Point, ...]): The source first, then the targets.
        virtual_nodes (tuple[Point, ...]): Added Fermat points.
        edges (tuple[tuple[int, int], ...]): Index pairs over all tree nodes.

    """

    terminals: tuple[Point, ...]
    virtual_nodes: tuple[Point, ...] = ()
    edges: tuple[tuple[int, int], ...] = ()

    @property
    def source(self) -> Point:  # noqa: D102
        return self.terminals[0]

    @property
    def targets(self) -> tuple[Point, ...]:  # noqa: D102
        return self.terminals[1:]

    @property
    def points(self) -> tuple[Point, ...]:  # noqa: D102
        return self.terminals + self.virtual_nodes

    def is_virtual(self, index: int) -> bool:  # noqa: D102
        return index >= len(self.terminals)

    @cached_property
    def segments(self) -> tuple[Segment, ...]:  # noqa: D102
        pts = self.points
        return tuple(Segment(pts[i], pts[j]) for i, j in self.edges)

    @property
    def total_length(self) -> float:  # noqa: D102
        return sum(s.length for s in self.segments)

    def adjacency(self) -> dict[int, list[int]]:
        """Map every tree node index to its neighbor indices."""
        adj: dict[int, list[int]] = {i: [] for i in range(len(self.points))}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


@dataclass(frozen=True)
class TreeMetrics:
    """Summary figures of a multicast tree.

    Attributes:
        total_length (float): Sum of edge lengths in meters.
        diameter (float): Longest path through the tree in meters.
        hull (Polygon): Convex hull of all tree nodes (the Steiner hull).
        hull_area (float): Area of ``hull`` in square meters.

    """

    total_length: float
    diameter: float
    hull: Polygon
    hull_area: float


class MessageKind(StrEnum):
    """Routing message kinds."""

    FACE_L = "L"
    FACE_R = "R"
    GREEDY = "G"
    RECOVERY = "P"

    @property
    def is_face(self) -> bool:  # noqa: D102
        return self in (MessageKind.FACE_L, MessageKind.FACE_R)


@dataclass(frozen=True)
class RecoveryState:
    """Perimeter-mode bookkeeping of a sequential unicast message.

    Attributes:
        entry (Point): Where the message entered perimeter mode.
        face_point (Point): Closest crossing of the entry-destination segment so far.
        first_edge (tuple[int, int]): First directed edge taken on the current face.

    """

    entry: Point
    face_point: Point
    first_edge: tuple[NodeId, NodeId]


@dataclass(frozen=True)
class RouteTree:
    """The part of a multicast tree a sequential message is responsible for.

    Attributes:
        waypoint (Point): Where the message is currently unicast to.
        virtual (bool): Whether ``waypoint`` is a virtual (Steiner) point.
        children (tuple[RouteTree, ...]): Subtrees hanging below the waypoint.

    """

    waypoint: Point
    virtual: bool = False
    children: tuple[RouteTree, ...] = ()

    def target_points(self) -> tuple[Point, ...]:
        """All real terminals in this subtree, waypoint first, depth-first."""
        own = () if self.virtual else (self.waypoint,)
        return own + tuple(p for c in self.children for p in c.target_points())


@dataclass(frozen=True)
class RoutingMessage:
    """A message in flight or waiting in a send queue.

    Attributes:
        session_id (int): Identifies one multicast computation.
        kind (MessageKind): Face traversal direction or unicast mode.
        source (NodeId): The multicast source.
        sender (NodeId): Immediate sender.
        receiver (NodeId): Immediate receiver.
        ttl (int | None): Remaining hop budget; ``None`` means unlimited.
        tree (Tree | None): Multicast tree carried by face messages.
        route (RouteTree | None): Targets carried by sequential messages.
        recovery (RecoveryState | None): Perimeter state of sequential messages.

    """

    session_id: int
    kind: MessageKind
    source: NodeId
    sender: NodeId
    receiver: NodeId
    ttl: int | None
    tree: Tree | None = None
    route: RouteTree | None = None
    recovery: RecoveryState | None = None


class Outcome(StrEnum):
    """Terminal fate of a message, as recorded in a transcript."""

    DELIVERED_TO_NODE = "delivered-to-node"
    LOST = "lost"
    MATE_CANCELLED = "mate-cancelled"
    TTL_DROPPED = "ttl-dropped"
    UNREACHABLE = "unreachable"
    PROTOCOL_ERROR = "protocol-error"
    STRANDED = "stranded"
