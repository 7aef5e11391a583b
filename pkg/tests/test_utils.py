import pytest

from src.model import MessageKind, Outcome, Point
from src.netgraph import random_placement, unit_disk_graph
from src.simengine import DeliveryLog, Transcript, TranscriptEvent
from src.trees import steiner_tree
from src.utils import (
    ConfigError,
    GraphFormatError,
    dump_graph,
    format_transcript,
    load_graph,
    parse_float_list,
    parse_list,
    parse_ttl,
    read_config,
)


def test_graph_dump_round_trip_with_tree(tmp_path):
    g = unit_disk_graph(random_placement(300, 300, 8, rng_seed=1))
    tree = steiner_tree([g.nodes[0], g.nodes[5], g.nodes[9], g.nodes[14]])
    path = tmp_path / "net.txt"
    dump_graph(g, path, tree)

    loaded, loaded_tree = load_graph(path)
    assert loaded.nodes == g.nodes
    assert loaded.edges == g.edges
    assert loaded.adjacency == g.adjacency
    assert loaded.unit_radius == g.unit_radius
    assert loaded_tree == tree


def test_graph_dump_without_tree(tmp_path, square):
    path = tmp_path / "square.txt"
    dump_graph(square, path)
    text = path.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "nodes 4 radius 2.0"
    assert "edge 0 1" in text
    assert load_graph(path) == (square, None)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "vertices 2\n",
        "nodes 2 radius 1.0\n0 0.0 0.0\n",
        "nodes 2 radius 1.0\n0 0.0 0.0\n2 1.0 1.0\n",
        "nodes 2 radius 1.0\n0 0.0 0.0\n1 0.5 0.0\nedge 0 7\n",
        "nodes 2 radius 1.0\n0 0.0 0.0\n1 zero 0.0\n",
        "nodes 1 radius 1.0\n0 0.0 0.0\nhyperedge 0 0 0\n",
    ],
    ids=["empty", "bad-header", "missing-node", "out-of-order-id", "unknown-node", "bad-number", "unknown-line"],
)
def test_malformed_graph_dumps(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(GraphFormatError):
        load_graph(path)


def test_read_config(tmp_path):
    path = tmp_path / "study.conf"
    path.write_text(
        "# overnight study\n"
        "densities = 4, 5, 6  # every density\n"
        "\n"
        "runs-per-point=1000\n"
        "ttl = unlimited\n",
        encoding="utf-8",
    )
    assert read_config(path) == {"densities": "4, 5, 6", "runs_per_point": "1000", "ttl": "unlimited"}


@pytest.mark.parametrize(
    ("text", "match"),
    [("ttl 55\n", "expected 'key = value'"), ("ttl = 5\nttl = 6\n", "duplicate key"), ("= 5\n", "expected")],
)
def test_read_config_errors(tmp_path, text, match):
    path = tmp_path / "bad.conf"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError, match=match):
        read_config(path)


def test_parse_ttl():
    assert parse_ttl("55") == 55
    assert parse_ttl("0") == 0
    for word in ("unlimited", "None", " inf "):
        assert parse_ttl(word) is None
    with pytest.raises(ConfigError, match="nonnegative"):
        parse_ttl("-3")
    with pytest.raises(ConfigError, match="invalid ttl"):
        parse_ttl("soon")


def test_parse_lists():
    assert parse_list(" a, b,,c ") == ["a", "b", "c"]
    assert parse_float_list("4, 7.5") == [4.0, 7.5]
    with pytest.raises(ConfigError):
        parse_float_list("4, x")


def test_format_transcript():
    events = (
        TranscriptEvent(1, 0, 3, MessageKind.FACE_L, Outcome.DELIVERED_TO_NODE, transmitted=True),
        TranscriptEvent(2, 3, 2, MessageKind.FACE_R, Outcome.MATE_CANCELLED, transmitted=False),
        TranscriptEvent(2, 4, 5, MessageKind.GREEDY, Outcome.TTL_DROPPED, transmitted=False),
    )
    transcript = Transcript(
        algorithm="mcfr-steiner",
        source=0,
        targets=(2,),
        events=events,
        deliveries=DeliveryLog(),
        raw_transmissions=1,
        batched_transmissions=1,
        batched=True,
        slots=2,
        quiescent=True,
        visited=frozenset({0, 3}),
    )
    assert format_transcript(transcript) == (
        "1 0 3 L delivered-to-node\n2 3 2 R mate-cancelled\n2 4 5 G ttl-dropped\n"
    )


def test_points_keep_full_precision(tmp_path, make_graph):
    g = make_graph([(0.1, 1 / 3), (2 / 3, 0.7)], [(0, 1)])
    path = tmp_path / "precise.txt"
    dump_graph(g, path)
    loaded, _ = load_graph(path)
    assert loaded.nodes == (Point(0.1, 1 / 3), Point(2 / 3, 0.7))
