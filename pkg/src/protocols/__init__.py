# noqa: D104
from .base import Reaction, RoutingProtocol
from .border import FaceLedger
from .gfg import gfg_unicast_step
from .gmp import gmp_route
from .lgs import lgs_route
from .mcfr import McfrProtocol, mate_of, mcfr_mst_variant, mcfr_on_receive, mcfr_route, mcfr_source_init
from .registry import build_protocol
from .sequential import SequentialProtocol, gfg_unicast_route, waypoint_reached

__all__ = [
    "FaceLedger",
    "McfrProtocol",
    "Reaction",
    "RoutingProtocol",
    "SequentialProtocol",
    "build_protocol",
    "gfg_unicast_route",
    "gfg_unicast_step",
    "gmp_route",
    "lgs_route",
    "mate_of",
    "mcfr_mst_variant",
    "mcfr_on_receive",
    "mcfr_route",
    "mcfr_source_init",
    "waypoint_reached",
]
