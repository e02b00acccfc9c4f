"""Organic narrative charts: streams, links, labels, force layout, styled SVG."""

__version__ = "0.1.0"

from .graph import Canvas, LayoutGraph, build_graph, check_acyclic, size_at
from .layout import ACTIVE_BACKEND, ForceParams, SimulationState, init_positions, run, tick
from .model import (
    ChartSpec,
    LabelDef,
    LinkDef,
    StreamDef,
    parse_labels,
    parse_links,
    parse_spec,
    parse_streams,
    serialize,
    validate,
)

__all__ = [
    "ACTIVE_BACKEND",
    "Canvas",
    "ChartSpec",
    "ForceParams",
    "LabelDef",
    "LayoutGraph",
    "LinkDef",
    "SimulationState",
    "StreamDef",
    "build_graph",
    "check_acyclic",
    "init_positions",
    "parse_labels",
    "parse_links",
    "parse_spec",
    "parse_streams",
    "run",
    "serialize",
    "size_at",
    "tick",
    "validate",
    "__version__",
]
