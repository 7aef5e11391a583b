"""Protocol interface shared by the routing algorithms."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

from src.model import NodeId, Outcome, RoutingMessage


@dataclass(frozen=True)
class Reaction:
    """What a node does with one received message.

    Attributes:
        deliveries (tuple[NodeId, ...]): Nodes the payload is delivered to.
        enqueues (tuple[RoutingMessage, ...]): Messages added to the node's send queue.
        cancel (int | None): Position of a pending mate to discard from the
                             node's send queue; the received message is consumed.
        dropped (Outcome | None): Set when the received message dies here.
        late_juncture (bool): A juncture was reached through an angle that
                              does not intersect the tree, so no split happened.
        unroutable (int): Messages the node wanted to send but had no edge for.

    """

    deliveries: tuple[NodeId, ...] = ()
    enqueues: tuple[RoutingMessage, ...] = ()
    cancel: int | None = None
    dropped: Outcome | None = None
    late_juncture: bool = False
    unroutable: int = 0


class RoutingProtocol(Protocol):
    """A multicast algorithm as seen by the simulator."""

    name: str
    source: NodeId
    targets: tuple[NodeId, ...]

    def initial_messages(self) -> list[RoutingMessage]:
        """Messages the source puts in its send queue."""
        ...

    def on_receive(
        self,
        n: NodeId,
        msg: RoutingMessage,
        queue: Sequence[RoutingMessage],
    ) -> Reaction:
        """Process ``msg`` at its receiver ``n`` given n's pending messages."""
        ...


def decrement_ttl(ttl: int | None) -> int | None:
    """Hop budget of a message created from one carrying ``ttl``."""
    return None if ttl is None else ttl - 1


def check_targets(source: NodeId, targets: Sequence[NodeId]) -> tuple[NodeId, ...]:
    """Validate a multicast target list.

    Raises:
        ValueError: If targets are empty, repeated, or include the source.

    """
    result = tuple(targets)
    if not result:
        msg = "multicast needs at least one target"
        raise ValueError(msg)
    if len(set(result)) != len(result):
        msg = "multicast targets must be distinct"
        raise ValueError(msg)
    if source in result:
        msg = f"source {source} cannot be its own target"
        raise ValueError(msg)
    return result
