"""Read and write the plain-text files used by the command line.

Covers the graph dump format (with an optional multicast tree section), the
``key=value`` configuration files and the line-oriented transcript export.
"""

from __future__ import annotations

import logging
from pathlib import Path

from src.model import Graph, Point, Tree
from src.netgraph import build_graph
from src.simengine import Transcript

logger = logging.getLogger(__name__)

UNLIMITED = ("unlimited", "none", "inf")


class GraphFormatError(ValueError):
    """A graph dump that cannot be parsed."""


class ConfigError(ValueError):
    """A configuration file or value that cannot be parsed."""


def dump_graph(g: Graph, path: Path, tree: Tree | None = None) -> None:
    """Write ``g`` (and optionally a tree) in the graph dump format.

    The header ``nodes <n> radius <r>`` is followed by ``id x y`` lines and
    ``edge u v`` lines. A tree adds ``terminal x y``, ``virtual x y`` and
    ``tedge i j`` lines. Coordinates are written with full float precision.

    Args:
        g (Graph): The graph to write.
        path (Path): Destination file.
        tree (Tree | None): Optional multicast tree fixture.

    """
    lines = [f"nodes {len(g.nodes)} radius {g.unit_radius!r}"]
    lines.extend(f"{i} {p.x!r} {p.y!r}" for i, p in enumerate(g.nodes))
    lines.extend(f"edge {u} {v}" for u, v in g.edges)
    if tree is not None:
        lines.extend(f"terminal {p.x!r} {p.y!r}" for p in tree.terminals)
        lines.extend(f"virtual {p.x!r} {p.y!r}" for p in tree.virtual_nodes)
        lines.extend(f"tedge {i} {j}" for i, j in tree.edges)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_graph(text: str) -> tuple[Graph, Tree | None]:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows or rows[0][0] != "nodes" or len(rows[0]) != 4 or rows[0][2] != "radius":  # noqa: PLR2004
        msg = "graph dump must start with 'nodes <n> radius <r>'"
        raise GraphFormatError(msg)
    n, radius = int(rows[0][1]), float(rows[0][3])

    points: list[Point] = []
    edges: list[tuple[int, int]] = []
    terminals: list[Point] = []
    virtual: list[Point] = []
    tree_edges: list[tuple[int, int]] = []
    for row in rows[1:]:
        match row:
            case ["edge", u, v]:
                edges.append((int(u), int(v)))
            case ["terminal", x, y]:
                terminals.append(Point(float(x), float(y)))
            case ["virtual", x, y]:
                virtual.append(Point(float(x), float(y)))
            case ["tedge", i, j]:
                tree_edges.append((int(i), int(j)))
            case [node_id, x, y] if int(node_id) == len(points):
                points.append(Point(float(x), float(y)))
            case _:
                msg = f"unexpected line {' '.join(row)!r}"
                raise GraphFormatError(msg)

    if len(points) != n:
        msg = f"header declares {n} nodes but {len(points)} were listed"
        raise GraphFormatError(msg)
    tree = Tree(tuple(terminals), tuple(virtual), tuple(tree_edges)) if terminals else None
    return build_graph(points, edges, radius), tree


def load_graph(path: Path) -> tuple[Graph, Tree | None]:
    """Read a graph dump written by :func:`dump_graph`.

    Args:
        path (Path): File to read.

    Returns:
        tuple[Graph, Tree | None]: The graph and its tree section, if any.

    Raises:
        GraphFormatError: If the file is malformed.

    """
    text = path.read_text(encoding="utf-8")
    try:
        return _parse_graph(text)
    except GraphFormatError:
        raise
    except ValueError as e:
        msg = f"{path}: {e!s}"
        raise GraphFormatError(msg) from e


def read_config(path: Path) -> dict[str, str]:
    """Parse a ``key = value`` file; ``#`` starts a comment.

    Raises:
        ConfigError: On a line without ``=`` or a repeated key.

    """
    values: dict[str, str] = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            msg = f"{path}:{number}: expected 'key = value', got {raw!r}"
            raise ConfigError(msg)
        if key in values:
            msg = f"{path}:{number}: duplicate key {key!r}"
            raise ConfigError(msg)
        values[key] = value.strip()
    logger.debug("read %d settings from %s", len(values), path)
    return values


def parse_ttl(value: str) -> int | None:
    """A hop budget, or None for ``unlimited``."""
    if value.strip().lower() in UNLIMITED:
        return None
    try:
        ttl = int(value)
    except ValueError as e:
        msg = f"invalid ttl {value!r}"
        raise ConfigError(msg) from e
    if ttl < 0:
        msg = f"ttl must be nonnegative, got {ttl}"
        raise ConfigError(msg)
    return ttl


def parse_list(value: str) -> list[str]:
    """Split a comma-separated value, dropping empty items."""
    return [item.strip() for item in value.split(",") if item.strip()]


def parse_float_list(value: str) -> list[float]:  # noqa: D103
    try:
        return [float(item) for item in parse_list(value)]
    except ValueError as e:
        msg = f"invalid number list {value!r}"
        raise ConfigError(msg) from e


def format_transcript(transcript: Transcript) -> str:
    """Render events as ``slot sender receiver kind outcome`` lines."""
    return "".join(
        f"{e.slot} {e.sender} {e.receiver} {e.kind.value} {e.outcome.value}\n" for e in transcript.events
    )


def write_transcript(transcript: Transcript, path: Path) -> None:  # noqa: D103
    path.write_text(format_transcript(transcript), encoding="utf-8")
