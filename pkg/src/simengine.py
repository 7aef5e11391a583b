"""Slot-based discrete-event simulation of multicast routing.

Every node owns a FIFO send queue. In each slot the nodes that hold messages
at the start of the slot transmit in ascending id order; every transmission
is lost independently with the configured probability, and a surviving
message is processed by its receiver atomically before the next transmission.
The run ends at quiescence (all queues empty) or at ``max_slots``.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict, deque
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.geometry import distance
from src.model import Graph, MessageKind, NodeId, Outcome, RoutingMessage
from src.netgraph import shortest_path_hops
from src.protocols.base import Reaction, RoutingProtocol

logger = logging.getLogger(__name__)

SentKey = tuple[MessageKind, NodeId, NodeId]


@dataclass(frozen=True)
class SlotView:
    """State of a run at a slot boundary, when no transmission is in flight.

    Attributes:
        slot (int): The slot that just ended.
        pending (Mapping[NodeId, tuple[RoutingMessage, ...]]): Queued
            messages per node, head first.
        visited (frozenset[NodeId]): Source plus every node that processed a message.
        sent (frozenset[SentKey]): (kind, sender, receiver) of every message
            queued so far, transmitted or not.

    """

    slot: int
    pending: Mapping[NodeId, tuple[RoutingMessage, ...]]
    visited: frozenset[NodeId]
    sent: frozenset[SentKey]


SlotObserver = Callable[[SlotView], None]


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    Attributes:
        loss_probability (float): Independent per-transmission loss, in [0, 1).
        ttl (int | None): Hop budget the protocol was built with; None is unlimited.
        max_slots (int | None): Slot cap; None derives it from the graph size.
        rng_seed (int | SeedSequence): Seed of the loss stream.
        batched_transmission_counting (bool): Transmit everything a node
            enqueued in one processing step as a single frame, counted once.

    """

    loss_probability: float = 0.0
    ttl: int | None = None
    max_slots: int | None = None
    rng_seed: int | np.random.SeedSequence = 0
    batched_transmission_counting: bool = True

    def __post_init__(self) -> None:  # noqa: D105
        if not 0.0 <= self.loss_probability < 1.0:
            msg = f"loss_probability must lie in [0, 1), got {self.loss_probability}"
            raise ValueError(msg)
        if self.max_slots is not None and self.max_slots <= 0:
            msg = f"max_slots must be positive, got {self.max_slots}"
            raise ValueError(msg)
        if self.ttl is not None and self.ttl < 0:
            msg = f"ttl must be nonnegative, got {self.ttl}"
            raise ValueError(msg)


def default_max_slots(g: Graph, ttl: int | None) -> int:
    """Safety cap of 10 * (|N| + ttl), with 4|E| standing in for an unlimited ttl."""
    budget = 4 * g.n_edges if ttl is None else ttl
    return 10 * (len(g.nodes) + max(budget, 1))


class SendQueue:
    """Per-node FIFO queues of pending messages tagged with their batch id."""

    def __init__(self) -> None:  # noqa: D107
        self._queues: dict[NodeId, deque[tuple[RoutingMessage, int]]] = defaultdict(deque)

    def __bool__(self) -> bool:  # noqa: D105
        return any(self._queues.values())

    def __len__(self) -> int:  # noqa: D105
        return sum(len(q) for q in self._queues.values())

    def push(self, n: NodeId, msg: RoutingMessage, batch: int) -> None:  # noqa: D102
        self._queues[n].append((msg, batch))

    def pending(self, n: NodeId) -> tuple[RoutingMessage, ...]:
        """Messages waiting at ``n``, head first."""
        return tuple(m for m, _ in self._queues.get(n, ()))

    def remove_at(self, n: NodeId, index: int) -> RoutingMessage:
        """Take the message at ``index`` out of the middle of ``n``'s queue."""
        queue = self._queues[n]
        msg, _ = queue[index]
        del queue[index]
        return msg

    def pop_frame(self, n: NodeId, *, batched: bool) -> list[RoutingMessage]:
        """Remove what ``n`` transmits this slot: the head, plus its batch if batched."""
        queue = self._queues.get(n)
        if not queue:
            return []
        msg, batch = queue.popleft()
        frame = [msg]
        while batched and queue and queue[0][1] == batch:
            frame.append(queue.popleft()[0])
        return frame

    def active_nodes(self) -> list[NodeId]:
        """Nodes with a nonempty queue in ascending id order."""
        return sorted(n for n, q in self._queues.items() if q)

    def snapshot(self) -> dict[NodeId, tuple[RoutingMessage, ...]]:  # noqa: D102
        return {n: self.pending(n) for n in self.active_nodes()}


@dataclass(frozen=True)
class TranscriptEvent:
    """One terminal fate of one message."""

    slot: int
    sender: NodeId
    receiver: NodeId
    kind: MessageKind
    outcome: Outcome
    transmitted: bool


@dataclass
class DeliveryLog:
    """First delivery slot per target and the number of repeated deliveries."""

    first_delivery: dict[NodeId, int] = field(default_factory=dict)
    duplicates: int = 0

    def record(self, n: NodeId, slot: int) -> None:  # noqa: D102
        if n in self.first_delivery:
            self.duplicates += 1
        else:
            self.first_delivery[n] = slot


@dataclass(frozen=True)
class Transcript:
    """Everything a simulation run produced.

    Attributes:
        algorithm (str): Name of the simulated protocol.
        source (NodeId): Multicast source.
        targets (tuple[NodeId, ...]): Multicast targets.
        events (tuple[TranscriptEvent, ...]): Message fates in simulation order.
        deliveries (DeliveryLog): Per-target first deliveries.
        raw_transmissions (int): Messages put on the air, lost ones included.
        batched_transmissions (int): Frames put on the air.
        batched (bool): Which count the message cost uses.
        slots (int): Slots simulated.
        quiescent (bool): Whether all queues drained before the slot cap.
        visited (frozenset[NodeId]): Source plus every node that processed a message.
        late_junctures (int): Junctures reached through an angle missing the tree.
        protocol_errors (int): Malformed messages dropped by receivers.
        unroutable (int): Messages a node could not send for lack of an edge.

    """

    algorithm: str
    source: NodeId
    targets: tuple[NodeId, ...]
    events: tuple[TranscriptEvent, ...]
    deliveries: DeliveryLog
    raw_transmissions: int
    batched_transmissions: int
    batched: bool
    slots: int
    quiescent: bool
    visited: frozenset[NodeId]
    late_junctures: int = 0
    protocol_errors: int = 0
    unroutable: int = 0

    @property
    def transmissions(self) -> int:
        """Transmission count in the configured counting mode."""
        return self.batched_transmissions if self.batched else self.raw_transmissions


class _Run:
    def __init__(self, protocol: RoutingProtocol, cfg: SimConfig) -> None:
        self.protocol = protocol
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.rng_seed)
        self.queue = SendQueue()
        self.batches = itertools.count()
        self.events: list[TranscriptEvent] = []
        self.log = DeliveryLog()
        self.visited: set[NodeId] = {protocol.source}
        self.sent: set[SentKey] = set()
        self.raw = 0
        self.frames = 0
        self.late_junctures = 0
        self.protocol_errors = 0
        self.unroutable = 0

    def note(self, slot: int, msg: RoutingMessage, outcome: Outcome, *, transmitted: bool) -> None:
        self.events.append(TranscriptEvent(slot, msg.sender, msg.receiver, msg.kind, outcome, transmitted))

    def enqueue(self, slot: int, messages: Sequence[RoutingMessage]) -> None:
        batch = next(self.batches)
        for msg in messages:
            if msg.ttl is not None and msg.ttl <= 0:
                self.note(slot, msg, Outcome.TTL_DROPPED, transmitted=False)
            else:
                self.queue.push(msg.sender, msg, batch)
                self.sent.add((msg.kind, msg.sender, msg.receiver))

    def apply(self, slot: int, msg: RoutingMessage, reaction: Reaction) -> None:
        receiver = msg.receiver
        if reaction.cancel is not None:
            mate = self.queue.remove_at(receiver, reaction.cancel)
            self.note(slot, msg, Outcome.MATE_CANCELLED, transmitted=True)
            self.note(slot, mate, Outcome.MATE_CANCELLED, transmitted=False)
        elif reaction.dropped is not None:
            self.note(slot, msg, reaction.dropped, transmitted=True)
            if reaction.dropped == Outcome.PROTOCOL_ERROR:
                self.protocol_errors += 1
        else:
            self.note(slot, msg, Outcome.DELIVERED_TO_NODE, transmitted=True)

        for n in reaction.deliveries:
            self.log.record(n, slot)
        self.late_junctures += int(reaction.late_juncture)
        self.unroutable += reaction.unroutable
        if reaction.enqueues:
            self.enqueue(slot, reaction.enqueues)

    def step(self, slot: int) -> None:
        for node in self.queue.active_nodes():
            frame = self.queue.pop_frame(node, batched=self.cfg.batched_transmission_counting)
            if not frame:
                continue
            self.frames += 1
            for msg in frame:
                self.raw += 1
                if self.rng.random() < self.cfg.loss_probability:
                    self.note(slot, msg, Outcome.LOST, transmitted=True)
                    continue
                self.visited.add(msg.receiver)
                reaction = self.protocol.on_receive(msg.receiver, msg, self.queue.pending(msg.receiver))
                self.apply(slot, msg, reaction)


def run(
    g: Graph,
    planar_g: Graph,
    protocol: RoutingProtocol,
    cfg: SimConfig,
    on_slot_end: SlotObserver | None = None,
) -> Transcript:
    """Simulate one multicast session to quiescence or the slot cap.

    Args:
        g (Graph): Full communication graph; sizes the default slot cap.
        planar_g (Graph): Planar subgraph the protocol routes on.
        protocol (RoutingProtocol): Initialized algorithm.
        cfg (SimConfig): Loss, TTL, cap, seed and counting mode.
        on_slot_end (SlotObserver | None): Called with a :class:`SlotView`
            after every slot.

    Returns:
        Transcript: Events, deliveries, counts and flags of the run.

    Raises:
        ValueError: If the protocol was built with a different ttl than ``cfg``.

    """
    protocol_ttl = getattr(protocol, "ttl", cfg.ttl)
    if protocol_ttl != cfg.ttl:
        msg = f"protocol ttl {protocol_ttl} differs from configured ttl {cfg.ttl}"
        raise ValueError(msg)

    del planar_g
    max_slots = cfg.max_slots or default_max_slots(g, cfg.ttl)
    state = _Run(protocol, cfg)
    state.enqueue(0, protocol.initial_messages())

    slot = 0
    while state.queue and slot < max_slots:
        slot += 1
        state.step(slot)
        logger.debug(
            "slot %d: %d pending, %d transmissions, %d targets reached",
            slot,
            len(state.queue),
            state.raw,
            len(state.log.first_delivery),
        )
        if on_slot_end is not None:
            on_slot_end(SlotView(slot, state.queue.snapshot(), frozenset(state.visited), frozenset(state.sent)))

    quiescent = not state.queue
    if not quiescent:
        logger.info("%s stopped at the %d-slot cap with %d messages pending", protocol.name, slot, len(state.queue))
        for pending in state.queue.snapshot().values():
            for msg in pending:
                state.note(slot, msg, Outcome.STRANDED, transmitted=False)

    return Transcript(
        algorithm=protocol.name,
        source=protocol.source,
        targets=tuple(protocol.targets),
        events=tuple(state.events),
        deliveries=state.log,
        raw_transmissions=state.raw,
        batched_transmissions=state.frames,
        batched=cfg.batched_transmission_counting,
        slots=slot,
        quiescent=quiescent,
        visited=frozenset(state.visited),
        late_junctures=state.late_junctures,
        protocol_errors=state.protocol_errors,
        unroutable=state.unroutable,
    )


def delivery_ratio_of(transcript: Transcript, targets: Sequence[NodeId]) -> float:
    """Fraction of distinct targets that received the payload."""
    if not targets:
        return 0.0
    wanted = set(targets)
    return len(wanted & transcript.deliveries.first_delivery.keys()) / len(wanted)


def furthest_target(g: Graph, source: NodeId, targets: Sequence[NodeId]) -> NodeId:
    """Target geometrically furthest from the source; ties go to the lower id."""
    origin = g.nodes[source]
    return max(targets, key=lambda t: (distance(origin, g.nodes[t]), -t))


def latency_of(transcript: Transcript, targets: Sequence[NodeId], g: Graph) -> float | None:
    """Normalized latency of a run.

    The first-delivery slot of the geometrically furthest target, divided by
    its BFS hop distance from the source and by the delivery ratio.

    Returns:
        float | None: None when that target was never reached.

    """
    if not targets:
        return None
    ratio = delivery_ratio_of(transcript, targets)
    furthest = furthest_target(g, transcript.source, targets)
    slot = transcript.deliveries.first_delivery.get(furthest)
    hops = shortest_path_hops(g, transcript.source, furthest)
    if ratio == 0.0 or slot is None or not hops:
        return None
    return slot / hops / ratio


def message_cost_of(transcript: Transcript, m_targets: int) -> float | None:
    """Transmissions per target divided by the delivery ratio; None at ratio 0."""
    ratio = delivery_ratio_of(transcript, transcript.targets)
    if ratio == 0.0 or m_targets <= 0:
        return None
    return transcript.transmissions / m_targets / ratio
