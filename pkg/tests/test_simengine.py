from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field

import pytest

from src.experiments import Instance
from src.model import MessageKind, NodeId, Outcome, Point, RoutingMessage, Tree
from src.protocols import Reaction, RoutingProtocol, gfg_unicast_route, mcfr_route
from src.simengine import (
    DeliveryLog,
    SendQueue,
    SimConfig,
    SlotView,
    Transcript,
    default_max_slots,
    delivery_ratio_of,
    furthest_target,
    latency_of,
    message_cost_of,
    run,
)


def _msg(sender: int, receiver: int, kind: MessageKind = MessageKind.FACE_L) -> RoutingMessage:
    tree = Tree(terminals=(Point(0, 0), Point(1, 1)), edges=((0, 1),))
    return RoutingMessage(0, kind, 0, sender, receiver, None, tree=tree)


@dataclass
class CountingProtocol:
    """Counts every message the wrapped protocol creates."""

    inner: RoutingProtocol
    created: int = 0
    receptions: Counter = field(default_factory=Counter)

    @property
    def name(self) -> str:
        return self.inner.name

    @property
    def source(self) -> NodeId:
        return self.inner.source

    @property
    def targets(self) -> tuple[NodeId, ...]:
        return self.inner.targets

    @property
    def ttl(self) -> int | None:
        return self.inner.ttl

    def initial_messages(self) -> list[RoutingMessage]:
        messages = self.inner.initial_messages()
        self.created += len(messages)
        return messages

    def on_receive(self, n: NodeId, msg: RoutingMessage, queue: Sequence[RoutingMessage]) -> Reaction:
        self.receptions[n] += 1
        reaction = self.inner.on_receive(n, msg, queue)
        self.created += len(reaction.enqueues)
        return reaction


# send queues


def test_send_queue_frames():
    q = SendQueue()
    assert not q
    q.push(3, _msg(3, 1), batch=0)
    q.push(3, _msg(3, 2), batch=0)
    q.push(3, _msg(3, 4), batch=1)
    q.push(1, _msg(1, 0), batch=2)
    assert len(q) == 4
    assert q.active_nodes() == [1, 3]
    assert [m.receiver for m in q.pending(3)] == [1, 2, 4]

    assert [m.receiver for m in q.pop_frame(3, batched=True)] == [1, 2]
    assert [m.receiver for m in q.pop_frame(3, batched=True)] == [4]
    assert q.pop_frame(3, batched=True) == []
    assert q.active_nodes() == [1]


def test_send_queue_unbatched_pops_one_and_removes_from_the_middle():
    q = SendQueue()
    for receiver in (1, 2, 3):
        q.push(0, _msg(0, receiver), batch=0)
    assert [m.receiver for m in q.pop_frame(0, batched=False)] == [1]
    assert q.remove_at(0, 1).receiver == 3
    assert [m.receiver for m in q.pending(0)] == [2]
    assert q.snapshot() == {0: (q.pending(0)[0],)}
    assert q.pending(7) == ()


# configuration


@pytest.mark.parametrize(
    "kwargs",
    [{"loss_probability": 1.0}, {"loss_probability": -0.1}, {"max_slots": 0}, {"ttl": -1}],
)
def test_sim_config_validation(kwargs):
    with pytest.raises(ValueError):  # noqa: PT011
        SimConfig(**kwargs)


def test_default_max_slots(square):
    assert default_max_slots(square, None) == 10 * (4 + 16)
    assert default_max_slots(square, 55) == 10 * (4 + 55)


def test_ttl_must_match_the_protocol(square):
    protocol = mcfr_route(square, 0, [2], ttl=5)
    with pytest.raises(ValueError, match="differs"):
        run(square, square, protocol, SimConfig(ttl=None))


# runs


def test_hop_budget_on_a_path(make_graph):
    g = make_graph([(0, 0), (1, 0), (2, 0), (3, 0)], [(0, 1), (1, 2), (2, 3)])

    def route(ttl: int) -> Transcript:
        return run(g, g, gfg_unicast_route(g, g, 0, [3], ttl=ttl), SimConfig(ttl=ttl))

    short = route(2)
    assert not short.deliveries.first_delivery
    assert short.events[-1].outcome == Outcome.TTL_DROPPED
    assert not short.events[-1].transmitted
    assert short.raw_transmissions == 2
    assert short.quiescent

    enough = route(3)
    assert enough.deliveries.first_delivery == {3: 3}
    assert all(e.outcome != Outcome.TTL_DROPPED for e in enough.events)


def test_zero_ttl_drops_the_initial_messages(square):
    transcript = run(square, square, mcfr_route(square, 0, [2], ttl=0), SimConfig(ttl=0))
    assert transcript.slots == 0
    assert transcript.raw_transmissions == 0
    assert [e.outcome for e in transcript.events] == [Outcome.TTL_DROPPED] * 4


def test_unbatched_counting_sends_one_message_per_frame(square):
    transcript = run(square, square, mcfr_route(square, 0, [2]), SimConfig(batched_transmission_counting=False))
    assert transcript.batched_transmissions == transcript.raw_transmissions
    assert transcript.transmissions == transcript.raw_transmissions
    assert 2 in transcript.deliveries.first_delivery
    assert transcript.quiescent


def test_slot_cap_strands_pending_messages(square):
    transcript = run(square, square, mcfr_route(square, 0, [2]), SimConfig(max_slots=1))
    assert not transcript.quiescent
    assert transcript.slots == 1
    stranded = [e for e in transcript.events if e.outcome == Outcome.STRANDED]
    assert len(stranded) == 4
    assert all(not e.transmitted for e in stranded)


def test_observer_sees_every_slot(square):
    views: list[SlotView] = []
    run(square, square, mcfr_route(square, 0, [2]), SimConfig(), on_slot_end=views.append)

    seen = [(v.slot, sum(len(m) for m in v.pending.values()), v.visited) for v in views]
    assert seen == [(1, 4, frozenset({0, 1, 3})), (2, 0, frozenset({0, 1, 2, 3}))]
    assert {sender for _, sender, _ in views[0].sent} == {0, 1, 3}
    assert views[0].sent <= views[1].sent


def test_every_created_message_has_exactly_one_fate(small_instances: list[Instance]):
    for loss in (0.0, 0.3):
        for instance in small_instances[::10]:
            protocol = CountingProtocol(mcfr_route(instance.planar, instance.source, instance.targets, ttl=20))
            cfg = SimConfig(loss_probability=loss, ttl=20, rng_seed=4)
            transcript = run(instance.g, instance.planar, protocol, cfg)
            assert len(transcript.events) == protocol.created
            assert sum(e.transmitted for e in transcript.events) == transcript.raw_transmissions
            receptions = sum(protocol.receptions.values())
            lost = sum(e.outcome == Outcome.LOST for e in transcript.events)
            assert receptions + lost == transcript.raw_transmissions


def test_runs_are_deterministic(small_instances: list[Instance]):
    instance = small_instances[100]

    def once(seed: int) -> Transcript:
        protocol = mcfr_route(instance.planar, instance.source, instance.targets, ttl=30)
        return run(instance.g, instance.planar, protocol, SimConfig(loss_probability=0.15, ttl=30, rng_seed=seed))

    first, again = once(9), once(9)
    assert first.events == again.events
    assert first.deliveries == again.deliveries
    assert first.raw_transmissions == again.raw_transmissions


# metrics


def _transcript(targets: tuple[int, ...], deliveries: dict[int, int], *, batched: bool = True) -> Transcript:
    return Transcript(
        algorithm="manual",
        source=0,
        targets=targets,
        events=(),
        deliveries=DeliveryLog(dict(deliveries)),
        raw_transmissions=6,
        batched_transmissions=4,
        batched=batched,
        slots=5,
        quiescent=True,
        visited=frozenset({0}),
    )


@pytest.fixture
def line(make_graph):
    return make_graph([(0, 0), (1, 0), (2, 0), (3, 0)], [(0, 1), (1, 2), (2, 3)])


def test_latency_and_cost(line):
    full = _transcript((1, 3), {1: 1, 3: 3})
    assert delivery_ratio_of(full, (1, 3)) == 1.0
    assert latency_of(full, (1, 3), line) == pytest.approx(1.0)
    assert message_cost_of(full, 2) == pytest.approx(2.0)

    half = _transcript((1, 3), {3: 3})
    assert delivery_ratio_of(half, (1, 3)) == 0.5
    assert latency_of(half, (1, 3), line) == pytest.approx(2.0)
    assert message_cost_of(half, 2) == pytest.approx(4.0)

    raw = _transcript((1, 3), {1: 1, 3: 3}, batched=False)
    assert message_cost_of(raw, 2) == pytest.approx(3.0)


def test_absent_metrics(line):
    near_only = _transcript((1, 3), {1: 1})
    assert latency_of(near_only, (1, 3), line) is None
    assert message_cost_of(near_only, 2) == pytest.approx(4.0)

    nothing = _transcript((1, 3), {})
    assert delivery_ratio_of(nothing, (1, 3)) == 0.0
    assert latency_of(nothing, (1, 3), line) is None
    assert message_cost_of(nothing, 2) is None


def test_repeated_deliveries_count_once():
    log = DeliveryLog()
    log.record(4, 2)
    log.record(4, 7)
    log.record(5, 3)
    assert log.first_delivery == {4: 2, 5: 3}
    assert log.duplicates == 1


def test_furthest_target_ties_go_to_the_lower_id(make_graph):
    g = make_graph([(0, 0), (0, 1), (1, 0), (0.5, 0)], [(0, 1), (0, 2), (0, 3)])
    assert furthest_target(g, 0, [3, 2, 1]) == 1
