"""Simulation study harness.

Generates random instances, sweeps density, loss and algorithm, tunes the
TTL, and turns transcripts into the normalized delivery ratio, latency and
message cost figures. Per-run rows and their mean/std aggregates are written
as CSV with pandas.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np
import pandas as pd

from src.constants import (
    ALGORITHMS,
    CSV_COLUMNS,
    DEFAULT_TTL,
    DENSITIES,
    DESK_RUNS_PER_POINT,
    FIELD_HEIGHT,
    FIELD_WIDTH,
    LOSS_LEVELS,
    TARGET_FRACTION,
    UNIT_RADIUS,
)
from src.geometry import distance, polygon_perimeter, signed_area
from src.model import Graph, NodeId, Point, Tree
from src.netgraph import (
    enumerate_faces,
    gabriel_subgraph,
    random_placement,
    reachable_set,
    shortest_path_hops,
    unit_disk_graph,
)
from src.protocols import build_protocol
from src.simengine import SimConfig, Transcript, delivery_ratio_of, furthest_target, latency_of, message_cost_of, run
from src.trees import euclidean_mst, steiner_tree, tree_metrics
from src.utils import ConfigError, parse_float_list, parse_list, parse_ttl

logger = logging.getLogger(__name__)

# Algorithms whose tree statistics come from the MST rather than the Steiner tree
MST_ALGORITHMS = frozenset({"lgs", "mcfr-mst"})

# Stream tag separating locality-study seeds from sweep seeds
LOCALITY_STREAM = 7919

# Columns averaged into the aggregate rows
METRIC_COLUMNS = [
    "n_nodes",
    "n_edges",
    "n_targets",
    "reachable_targets",
    "delivery_ratio",
    "latency_norm",
    "msg_cost_norm",
    "tree_len",
    "tree_diam",
    "hull_area",
    "quiescent",
]


@dataclass(frozen=True)
class ExperimentSpec:
    """One simulation study.

    Attributes:
        densities (tuple[float, ...]): Average nodes per unit disk.
        losses (tuple[float, ...]): Per-transmission loss probabilities.
        algorithms (tuple[str, ...]): Algorithm names to compare.
        field_width (float): Field width in meters.
        field_height (float): Field height in meters.
        unit_radius (float): Radio range in meters.
        target_fraction (float): Targets as a fraction of the node count.
        runs_per_point (int): Random instances per (density, loss, algorithm).
        ttl (int | None): Hop budget, None for unlimited.
        master_seed (int): Root of every random stream in the study.
        batched (bool): Count a node's same-step messages as one transmission.

    """

    densities: tuple[float, ...] = DENSITIES
    losses: tuple[float, ...] = tuple(LOSS_LEVELS.values())
    algorithms: tuple[str, ...] = ALGORITHMS
    field_width: float = FIELD_WIDTH
    field_height: float = FIELD_HEIGHT
    unit_radius: float = UNIT_RADIUS
    target_fraction: float = TARGET_FRACTION
    runs_per_point: int = DESK_RUNS_PER_POINT
    ttl: int | None = DEFAULT_TTL
    master_seed: int = 0
    batched: bool = True

    def __post_init__(self) -> None:  # noqa: D105
        if not 0.0 < self.target_fraction < 1.0:
            msg = f"target_fraction must lie in (0, 1), got {self.target_fraction}"
            raise ValueError(msg)
        if self.runs_per_point < 1:
            msg = f"runs_per_point must be at least 1, got {self.runs_per_point}"
            raise ValueError(msg)
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            msg = f"unknown algorithms {sorted(unknown)}; expected some of {list(ALGORITHMS)}"
            raise ValueError(msg)
        if not self.densities or any(d <= 0 for d in self.densities):
            msg = f"densities must be positive, got {self.densities}"
            raise ValueError(msg)
        if not self.losses or any(not 0.0 <= p < 1.0 for p in self.losses):
            msg = f"losses must lie in [0, 1), got {self.losses}"
            raise ValueError(msg)
        if self.master_seed < 0:
            msg = f"master_seed must be nonnegative, got {self.master_seed}"
            raise ValueError(msg)

    @classmethod
    def from_settings(cls, settings: Mapping[str, str], **overrides: object) -> ExperimentSpec:
        """Build a spec from ``key = value`` settings, then apply overrides.

        Keys are the field names, plus ``seed`` for ``master_seed``. Loss
        entries may be numbers or preset names such as ``7dBm``.

        Raises:
            ConfigError: On unknown keys or unparsable values.

        """
        known = {f.name for f in fields(cls)}
        values: dict[str, object] = {}
        for key, raw in settings.items():
            name = "master_seed" if key == "seed" else key
            if name == "ttl_values":
                continue
            if name not in known:
                msg = f"unknown setting {key!r}"
                raise ConfigError(msg)
            values[name] = _parse_setting(name, raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from e


def parse_loss(value: str) -> float:
    """A loss probability given as a number or a preset name."""
    name = value.strip()
    if name in LOSS_LEVELS:
        return LOSS_LEVELS[name]
    try:
        return float(name)
    except ValueError as e:
        msg = f"invalid loss {value!r}; use a probability or one of {list(LOSS_LEVELS)}"
        raise ConfigError(msg) from e


def _parse_setting(name: str, raw: str) -> object:
    try:
        match name:
            case "densities":
                return tuple(parse_float_list(raw))
            case "losses":
                return tuple(parse_loss(item) for item in parse_list(raw))
            case "algorithms":
                return tuple(parse_list(raw))
            case "ttl":
                return parse_ttl(raw)
            case "runs_per_point" | "master_seed":
                return int(raw)
            case "batched":
                return raw.strip().lower() in ("1", "true", "yes", "on")
            case _:
                return float(raw)
    except ValueError as e:
        msg = f"invalid value {raw!r} for {name}"
        raise ConfigError(msg) from e


@dataclass(frozen=True)
class Instance:
    """A random network with a multicast group."""

    g: Graph
    planar: Graph
    source: NodeId
    targets: tuple[NodeId, ...]

    @property
    def terminals(self) -> list[Point]:  # noqa: D102
        return [self.g.nodes[self.source], *(self.g.nodes[t] for t in self.targets)]


def target_count(n: int, fraction: float) -> int:
    """Number of targets, rounded up and capped at the non-source nodes."""
    return min(math.ceil(fraction * n), n - 1)


def choose_group(
    n: int,
    fraction: float,
    seed: int | np.random.SeedSequence,
) -> tuple[NodeId, tuple[NodeId, ...]]:
    """Random source plus ``target_count`` distinct targets among the other nodes."""
    if n < 2:  # noqa: PLR2004
        msg = f"a multicast group needs at least two nodes, got {n}"
        raise ValueError(msg)
    rng = np.random.default_rng(seed)
    source = int(rng.integers(n))
    others = [i for i in range(n) if i != source]
    targets = rng.choice(others, size=target_count(n, fraction), replace=False)
    return source, tuple(int(t) for t in targets)


def make_instance(spec: ExperimentSpec, density_index: int, run_index: int) -> Instance:
    """Random instance shared by every loss level and algorithm at a density.

    Raises:
        ValueError: If the field holds fewer than two nodes.

    """
    seq = np.random.SeedSequence([spec.master_seed, density_index, run_index])
    placement_seed, group_seed = seq.spawn(2)
    points = random_placement(
        spec.field_width,
        spec.field_height,
        spec.densities[density_index],
        placement_seed,
        spec.unit_radius,
    )
    g = unit_disk_graph(points, spec.unit_radius)
    source, targets = choose_group(len(points), spec.target_fraction, group_seed)
    return Instance(g, gabriel_subgraph(g), source, targets)


def tree_for(algorithm: str, terminals: Sequence[Point]) -> Tree:
    """The tree whose statistics are reported for ``algorithm``."""
    return euclidean_mst(terminals) if algorithm in MST_ALGORITHMS else steiner_tree(terminals)


@dataclass(frozen=True)
class RunRow:
    """Metrics of one simulated run; the first fields are the CSV columns."""

    point_id: int
    algorithm: str
    density: float
    loss: float
    ttl: int | None
    run: int
    n_nodes: int
    n_edges: int
    n_targets: int
    reachable_targets: int
    delivery_ratio: float
    latency_norm: float | None
    msg_cost_norm: float | None
    tree_len: float
    tree_diam: float
    hull_area: float
    quiescent: bool
    hops_to_furthest: int | None = None
    raw_transmissions: int = 0
    batched_transmissions: int = 0
    slots: int = 0
    protocol_errors: int = 0
    late_junctures: int = 0

    def csv_record(self) -> dict[str, object]:
        """The CSV columns of this row; an unlimited ttl is written as ``unlimited``."""
        record = {name: getattr(self, name) for name in CSV_COLUMNS}
        record["ttl"] = "unlimited" if self.ttl is None else self.ttl
        return record


@dataclass(frozen=True)
class ExperimentRecord:
    """All runs of one (density, loss, algorithm, ttl) point."""

    point_id: int
    algorithm: str
    density: float
    loss: float
    ttl: int | None
    runs: tuple[RunRow, ...]

    def frame(self) -> pd.DataFrame:
        """Per-run CSV columns as a DataFrame."""
        frame = pd.DataFrame([r.csv_record() for r in self.runs], columns=list(CSV_COLUMNS))
        return frame.astype({"latency_norm": "float64", "msg_cost_norm": "float64"})

    def aggregate(self) -> dict[str, dict[str, float]]:
        """Mean and population standard deviation of every metric column.

        Absent latency or cost values are skipped.
        """
        metrics = self.frame()[METRIC_COLUMNS].astype("float64")
        return {"mean": metrics.mean().to_dict(), "std": metrics.std(ddof=0).to_dict()}


def simulate_instance(  # noqa: PLR0913
    instance: Instance,
    algorithm: str,
    *,
    loss: float,
    ttl: int | None,
    seed: np.random.SeedSequence | int,
    batched: bool = True,
    session: int = 0,
) -> Transcript:
    """Run one algorithm on one instance."""
    protocol = build_protocol(algorithm, instance.g, instance.planar, instance.source, instance.targets, session, ttl)
    cfg = SimConfig(loss_probability=loss, ttl=ttl, rng_seed=seed, batched_transmission_counting=batched)
    return run(instance.g, instance.planar, protocol, cfg)


def _run_row(  # noqa: PLR0913
    spec: ExperimentSpec,
    instance: Instance,
    algorithm: str,
    *,
    point_id: int,
    density: float,
    loss: float,
    run_index: int,
) -> RunRow:
    seed = np.random.SeedSequence([spec.master_seed, point_id, run_index])
    transcript = simulate_instance(
        instance,
        algorithm,
        loss=loss,
        ttl=spec.ttl,
        seed=seed,
        batched=spec.batched,
        session=run_index,
    )
    if algorithm.startswith("mcfr") and loss == 0.0:
        if transcript.raw_transmissions > 2 * instance.planar.n_edges:
            logger.warning(
                "point %d run %d: %s sent %d messages over %d planar edges",
                point_id,
                run_index,
                algorithm,
                transcript.raw_transmissions,
                instance.planar.n_edges,
            )
        if transcript.late_junctures:
            logger.warning(
                "point %d run %d: %d junctures reached through angles missing the tree",
                point_id,
                run_index,
                transcript.late_junctures,
            )
    metrics = tree_metrics(tree_for(algorithm, instance.terminals))
    reach = reachable_set(instance.g, instance.source)
    furthest = furthest_target(instance.g, instance.source, instance.targets)
    return RunRow(
        point_id=point_id,
        algorithm=algorithm,
        density=density,
        loss=loss,
        ttl=spec.ttl,
        run=run_index,
        n_nodes=len(instance.g.nodes),
        n_edges=instance.g.n_edges,
        n_targets=len(instance.targets),
        reachable_targets=sum(t in reach for t in instance.targets),
        delivery_ratio=delivery_ratio_of(transcript, instance.targets),
        latency_norm=latency_of(transcript, instance.targets, instance.g),
        msg_cost_norm=message_cost_of(transcript, len(instance.targets)),
        tree_len=metrics.total_length,
        tree_diam=metrics.diameter,
        hull_area=metrics.hull_area,
        quiescent=transcript.quiescent,
        hops_to_furthest=shortest_path_hops(instance.g, instance.source, furthest),
        raw_transmissions=transcript.raw_transmissions,
        batched_transmissions=transcript.batched_transmissions,
        slots=transcript.slots,
        protocol_errors=transcript.protocol_errors,
        late_junctures=transcript.late_junctures,
    )


def _record(  # noqa: PLR0913
    spec: ExperimentSpec,
    instances: Sequence[Instance],
    algorithm: str,
    *,
    point_id: int,
    density: float,
    loss: float,
) -> ExperimentRecord:
    rows = tuple(
        _run_row(spec, inst, algorithm, point_id=point_id, density=density, loss=loss, run_index=i)
        for i, inst in enumerate(instances)
    )
    record = ExperimentRecord(point_id, algorithm, density, loss, spec.ttl, rows)
    mean = record.aggregate()["mean"]
    logger.info(
        "point %d %s density=%g loss=%g ttl=%s: delivery %.3f latency %.3f cost %.3f",
        point_id,
        algorithm,
        density,
        loss,
        "unlimited" if spec.ttl is None else spec.ttl,
        mean["delivery_ratio"],
        mean["latency_norm"],
        mean["msg_cost_norm"],
    )
    return record


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRecord]:
    """Run every (density, loss, algorithm) point of the study.

    Instances depend only on (master seed, density, run), so every loss level
    and algorithm at a density sees the same networks and groups.

    Args:
        spec (ExperimentSpec): The study design.

    Returns:
        list[ExperimentRecord]: One record per point, in sweep order.

    """
    records: list[ExperimentRecord] = []
    point_id = 0
    for density_index, density in enumerate(spec.densities):
        instances = [make_instance(spec, density_index, i) for i in range(spec.runs_per_point)]
        for loss in spec.losses:
            for algorithm in spec.algorithms:
                records.append(
                    _record(spec, instances, algorithm, point_id=point_id, density=density, loss=loss),
                )
                point_id += 1
    return records


def ttl_sweep(spec: ExperimentSpec, ttl_values: Sequence[int | None]) -> list[ExperimentRecord]:
    """MCFR-Steiner at the spec's first density and loss, one record per TTL."""
    density, loss = spec.densities[0], spec.losses[0]
    instances = [make_instance(spec, 0, i) for i in range(spec.runs_per_point)]
    return [
        _record(replace(spec, ttl=ttl), instances, "mcfr-steiner", point_id=i, density=density, loss=loss)
        for i, ttl in enumerate(ttl_values)
    ]


@dataclass(frozen=True)
class FaceStats:
    """Shape of the internal faces of a planar graph.

    Attributes:
        max_ratio (float | None): Largest perimeter squared over area; None
            when there is no internal face with positive area.
        perimeters (tuple[float, ...]): Boundary walk length per internal face.
        areas (tuple[float, ...]): Enclosed area per internal face.

    """

    max_ratio: float | None
    perimeters: tuple[float, ...]
    areas: tuple[float, ...]


def face_smoothness_stats(g: Graph) -> FaceStats:
    """Perimeter-squared-to-area figures of the internal faces of ``g``."""
    perimeters: list[float] = []
    areas: list[float] = []
    for face in enumerate_faces(g):
        if face.is_external:
            continue
        walk = [g.nodes[u] for u, _ in face.boundary]
        area = abs(signed_area(walk))
        if area <= 0.0:
            continue
        perimeters.append(polygon_perimeter(walk))
        areas.append(area)
    ratios = [p * p / a for p, a in zip(perimeters, areas, strict=True)]
    return FaceStats(max(ratios, default=None), tuple(perimeters), tuple(areas))


def emit_csv(records: Sequence[ExperimentRecord], path: Path) -> None:
    """Write per-run rows, then mean and std rows per point, to ``path``.

    The header is always written; floats use six decimals and absent values
    are empty cells.
    """
    frames = [r.frame() for r in records]
    runs = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=list(CSV_COLUMNS))
    runs.to_csv(path, index=False, float_format="%.6f", na_rep="")

    summaries = [
        {
            "point_id": record.point_id,
            "algorithm": record.algorithm,
            "density": record.density,
            "loss": record.loss,
            "ttl": "unlimited" if record.ttl is None else record.ttl,
            "run": stat,
            **values,
        }
        for record in records
        for stat, values in record.aggregate().items()
    ]
    if summaries:
        # Aggregate rows follow all per-run rows.
        aggregates = pd.DataFrame(summaries, columns=list(CSV_COLUMNS))
        aggregates.to_csv(path, mode="a", header=False, index=False, float_format="%.6f", na_rep="")
    logger.info("wrote %d run rows and %d aggregate rows to %s", len(runs), len(summaries), path)


@dataclass(frozen=True)
class LocalityRow:
    """Delivery times of one multicast group inside one field size.

    Attributes:
        field_side (float): Side of the square field in meters.
        n_nodes (int): Nodes inside the field.
        run (int): Instance index.
        mcfr_mean_slot (float | None): MCFR-Steiner's first-delivery slot averaged
                                       over the reached targets.
        unicast_worst_slot (int | None): Unicast GFG's latest first-delivery slot.

    """

    field_side: float
    n_nodes: int
    run: int
    mcfr_mean_slot: float | None
    unicast_worst_slot: int | None


def _mean_delivery(transcript: Transcript) -> float | None:
    slots = list(transcript.deliveries.first_delivery.values())
    return float(np.mean(slots)) if slots else None


def _last_delivery(transcript: Transcript) -> int | None:
    return max(transcript.deliveries.first_delivery.values(), default=None)


def locality_study(  # noqa: PLR0913
    density: float,
    sides: Sequence[float],
    *,
    disk_radius: float = 300.0,
    n_targets: int = 5,
    runs: int = 20,
    master_seed: int = 0,
    unit_radius: float = UNIT_RADIUS,
) -> list[LocalityRow]:
    """Compare delivery times of a fixed central group as the field grows.

    Nodes are placed once on the largest square; each smaller field is the
    centered sub-square of the same placement, so the neighborhood of the
    group is identical across sizes. Source and targets are drawn from the
    nodes within ``disk_radius`` of the center. Runs are lossless with
    unlimited TTL. MCFR is summarized by its mean first-delivery slot over
    the targets, unicast GFG by its latest one.

    Raises:
        ValueError: If a field is too small to contain the group disk.

    """
    largest = max(sides)
    if min(sides) < 2 * disk_radius:
        msg = f"every field side must be at least {2 * disk_radius} m, got {min(sides)}"
        raise ValueError(msg)
    center = Point(largest / 2, largest / 2)

    rows: list[LocalityRow] = []
    for run_index in range(runs):
        placement_seed, group_seed = np.random.SeedSequence([master_seed, LOCALITY_STREAM, run_index]).spawn(2)
        points = random_placement(largest, largest, density, placement_seed, unit_radius)
        near = [p for p in points if distance(p, center) <= disk_radius]
        if len(near) <= n_targets:
            logger.warning("run %d: only %d nodes near the center; skipped", run_index, len(near))
            continue
        rng = np.random.default_rng(group_seed)
        group = [near[i] for i in rng.choice(len(near), size=n_targets + 1, replace=False)]

        for side in sides:
            low, high = (largest - side) / 2, (largest + side) / 2
            sub = [p for p in points if low <= p.x <= high and low <= p.y <= high]
            g = unit_disk_graph(sub, unit_radius)
            instance = Instance(
                g,
                gabriel_subgraph(g),
                g.node_at(group[0]),
                tuple(g.node_at(p) for p in group[1:]),
            )
            mcfr = simulate_instance(instance, "mcfr-steiner", loss=0.0, ttl=None, seed=0)
            unicast = simulate_instance(instance, "gfg-unicast", loss=0.0, ttl=None, seed=0)
            rows.append(LocalityRow(side, len(sub), run_index, _mean_delivery(mcfr), _last_delivery(unicast)))
        logger.info("locality run %d done", run_index)
    return rows


def instance_from_graph(
    g: Graph,
    tree: Tree | None,
    fraction: float,
    seed: int | np.random.SeedSequence,
) -> Instance:
    """Wrap a loaded graph as an instance.

    The group comes from the tree's terminals when the dump has a tree
    section, otherwise it is drawn at random.

    Raises:
        ValueError: If a tree terminal is not located at a graph node.

    """
    if tree is None:
        source, targets = choose_group(len(g.nodes), fraction, seed)
        return Instance(g, gabriel_subgraph(g), source, targets)
    ids = [g.node_at(p) for p in tree.terminals]
    if None in ids:
        msg = "every tree terminal must coincide with a graph node"
        raise ValueError(msg)
    return Instance(g, gabriel_subgraph(g), ids[0], tuple(ids[1:]))
