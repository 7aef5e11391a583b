"""Algorithm lookup by public name."""

from __future__ import annotations

from collections.abc import Sequence

from src.model import Graph, NodeId
from src.protocols.base import RoutingProtocol
from src.protocols.gmp import gmp_route
from src.protocols.lgs import lgs_route
from src.protocols.mcfr import mcfr_mst_variant, mcfr_route
from src.protocols.sequential import gfg_unicast_route


def build_protocol(  # noqa: PLR0913
    name: str,
    g: Graph,
    planar_g: Graph,
    source: NodeId,
    targets: Sequence[NodeId],
    session: int = 0,
    ttl: int | None = None,
) -> RoutingProtocol:
    """Instantiate a multicast algorithm by name.

    Raises:
        ValueError: On an unknown algorithm name.

    """
    match name:
        case "gfg-unicast":
            return gfg_unicast_route(g, planar_g, source, targets, session, ttl)
        case "lgs":
            return lgs_route(g, planar_g, source, targets, session, ttl)
        case "gmp":
            return gmp_route(g, planar_g, source, targets, session, ttl)
        case "gmp-source":
            return gmp_route(g, planar_g, source, targets, session, ttl, recompute=False)
        case "mcfr-steiner":
            return mcfr_route(planar_g, source, targets, session, ttl)
        case "mcfr-mst":
            return mcfr_mst_variant(planar_g, source, targets, session, ttl)
    msg = f"unknown algorithm {name!r}"
    raise ValueError(msg)
