"""Shared fixtures: hand-built graphs and a pool of small random instances."""

from collections.abc import Callable, Sequence

import pytest

from src.constants import DENSITIES
from src.experiments import ExperimentSpec, Instance, make_instance
from src.model import Graph, Point
from src.netgraph import build_graph

GraphFactory = Callable[[Sequence[tuple[float, float]], Sequence[tuple[int, int]]], Graph]


@pytest.fixture
def make_graph() -> GraphFactory:
    def build(coords: Sequence[tuple[float, float]], edges: Sequence[tuple[int, int]]) -> Graph:
        return build_graph([Point(x, y) for x, y in coords], edges, unit_radius=2.0)

    return build


@pytest.fixture
def square(make_graph: GraphFactory) -> Graph:
    """Unit square 0(0,0) 1(1,0) 2(1,1) 3(0,1) without diagonals."""
    return make_graph([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture(scope="session")
def small_spec() -> ExperimentSpec:
    """400 m fields: 20 to 61 nodes across the study densities, lossless, no TTL."""
    return ExperimentSpec(
        densities=DENSITIES,
        losses=(0.0,),
        algorithms=("mcfr-steiner",),
        field_width=400.0,
        field_height=400.0,
        runs_per_point=23,
        ttl=None,
        master_seed=11,
    )


@pytest.fixture(scope="session")
def small_instances(small_spec: ExperimentSpec) -> list[Instance]:
    """207 random instances spread over densities 4 to 12."""
    return [
        make_instance(small_spec, density_index, run)
        for density_index in range(len(small_spec.densities))
        for run in range(small_spec.runs_per_point)
    ]
