"""Resolve positioned nodes into renderable shapes.

Stream bands become closed outlines of cubic Bezier segments whose control
points sit at the horizontal midpoint between nodes, which makes every
segment start and end with a horizontal tangent (C1 chains across nodes).
Links become ribbons along their node chains, labels become boxes with
optional connectors or curved text baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import textmetrics
from .colors import resolve_color, shift_lightness
from .graph import LayoutGraph
from .model import ChartSpec, LabelDef

SHADE_STEP = 0.12  # lightness points per nesting level (on the 0..1 scale)
BEZIER_SAMPLES = 32  # samples per segment for arc length / nearest point
CAP_BULGE = 4.0 / 3.0  # single-cubic half-circle approximation factor

Point = tuple[float, float]
# path commands: ("M", p), ("L", p), ("C", c1, c2, p), ("Z",)
PathCommand = tuple


@dataclass
class StreamShape:
    stream_id: str
    path: list[PathCommand]
    depth: int
    fill: str
    parent_id: str | None = None


@dataclass
class AnchorShape:
    link_index: int
    path: list[PathCommand]
    fill: str


@dataclass
class LinkShape:
    link_index: int
    path: list[PathCommand]
    fill: str


@dataclass
class LabelShape:
    label: LabelDef
    index: int
    font_px: float
    color: str  # owning stream's displayed fill
    box: tuple | None = None  # ("ellipse", cx, cy, rx, ry) | ("rect", x, y, w, h)
    box_fill: str | None = None
    connector: tuple[Point, Point] | None = None
    baseline: list[PathCommand] | None = None
    baseline_length: float = 0.0
    text_offset: float = 0.0  # startOffset centering the text on the baseline
    anchor_pos: Point | None = None  # text anchor for box labels


@dataclass
class Block:
    x: float
    y: float
    width: float
    height: float
    fill: str


@dataclass
class SceneModel:
    """Resolved geometry in paint order: blocks, streams, links, labels."""

    width: float
    height: float
    streams: list[StreamShape] = field(default_factory=list)
    links: list[LinkShape] = field(default_factory=list)
    anchors: list[AnchorShape] = field(default_factory=list)
    labels: list[LabelShape] = field(default_factory=list)
    background_blocks: list[Block] = field(default_factory=list)
    axis_blocks: list[Block] = field(default_factory=list)
    t_min: float = 0.0
    t_max: float = 1.0

    def time_to_px(self, t: float) -> float:
        if self.t_max == self.t_min:
            return self.width / 2.0
        return self._margin + (t - self.t_min) * (self.width - 2 * self._margin) / (
            self.t_max - self.t_min
        )

    _margin: float = 20.0


# ---------------------------------------------------------------------------
# primitives

def bezier_segment(p0: Point, p1: Point) -> tuple[Point, Point]:
    """Control points for the segment p0 -> p1: both at the midpoint x.

    The curve leaves p0 and enters p1 horizontally, so chained segments meet
    with matching tangents.
    """
    if not p0[0] < p1[0]:
        raise ValueError("bezier_segment requires p0.x < p1.x")
    mid = (p1[0] - p0[0]) / 2.0
    return (p0[0] + mid, p0[1]), (p1[0] - mid, p1[1])


def _curve_through(points: list[Point]) -> list[PathCommand]:
    """Bezier chain through consecutive points (left to right)."""
    cmds: list[PathCommand] = []
    for a, b in zip(points, points[1:]):
        if b[0] > a[0]:
            c1, c2 = bezier_segment(a, b)
            cmds.append(("C", c1, c2, b))
        else:  # degenerate time span: straight joint
            cmds.append(("L", b))
    return cmds


def _reverse_curve(points: list[Point]) -> list[PathCommand]:
    """Bezier chain through points right to left (mirrored controls)."""
    cmds: list[PathCommand] = []
    for b, a in zip(points[::-1], points[::-1][1:]):
        if b[0] > a[0]:
            c1, c2 = bezier_segment(a, b)  # geometric segment runs a -> b
            cmds.append(("C", c2, c1, a))  # traversed backwards
        else:
            cmds.append(("L", a))
    return cmds


def _cap(top: Point, bottom: Point, direction: float) -> list[PathCommand]:
    """Rounded cap from *top* to *bottom* bulging toward *direction* (+1 right)."""
    x = top[0]
    r = (bottom[1] - top[1]) / 2.0
    if r <= 0:
        return [("L", bottom)]
    bx = x + direction * CAP_BULGE * r
    return [("C", (bx, top[1]), (bx, bottom[1]), bottom)]


def _reversed_cap(top: Point, bottom: Point, direction: float) -> PathCommand:
    """Rounded cap from *bottom* back up to *top*, bulging toward *direction*."""
    x = top[0]
    r = (bottom[1] - top[1]) / 2.0
    bx = x + direction * CAP_BULGE * r
    return ("C", (bx, bottom[1]), (bx, top[1]), top)


def capsule(cx: float, cy: float, width: float, height: float) -> list[PathCommand]:
    """Closed capsule outline centered at (cx, cy)."""
    r = height / 2.0
    hw = max(width / 2.0, 1e-6)
    tl, tr = (cx - hw, cy - r), (cx + hw, cy - r)
    br, bl = (cx + hw, cy + r), (cx - hw, cy + r)
    return [("M", tl), ("L", tr), *_cap(tr, br, +1.0), ("L", bl),
            _reversed_cap(tl, bl, -1.0), ("Z",)]


def stream_outline(nodes: list[tuple[float, float, float]], cap_width: float) -> list[PathCommand]:
    """Closed band outline for a stream's (x, y, size) sequence.

    Top edge runs left to right through (x, y - size/2), then a rounded
    right cap, the bottom edge back right to left, and a rounded left cap.
    Single-node streams degenerate to a capsule of width *cap_width*.
    """
    if not nodes:
        return []
    if len(nodes) == 1:
        x, y, s = nodes[0]
        return capsule(x, y, cap_width, s)
    top = [(x, y - s / 2.0) for x, y, s in nodes]
    bottom = [(x, y + s / 2.0) for x, y, s in nodes]
    cmds: list[PathCommand] = [("M", top[0])]
    cmds += _curve_through(top)
    cmds += _cap(top[-1], bottom[-1], +1.0)
    cmds += _reverse_curve(bottom)
    cmds.append(_reversed_cap(top[0], bottom[0], -1.0))
    cmds.append(("Z",))
    return cmds


def nested_shade(color: str, depth: int) -> str:
    """Depth-shaded variant of *color*: hue preserved, lightness stepped.

    Depth 0 is the identity; deeper levels alternate the shift direction and
    grow it every second level so consecutive depths stay distinguishable.
    """
    base = resolve_color(color)
    if depth <= 0:
        return base
    steps = math.ceil(depth / 2)
    sign = 1.0 if depth % 2 == 1 else -1.0
    return shift_lightness(base, sign * steps * SHADE_STEP)


def cubic_point(p0: Point, c1: Point, c2: Point, p1: Point, t: float) -> Point:
    u = 1.0 - t
    x = u**3 * p0[0] + 3 * u * u * t * c1[0] + 3 * u * t * t * c2[0] + t**3 * p1[0]
    y = u**3 * p0[1] + 3 * u * u * t * c1[1] + 3 * u * t * t * c2[1] + t**3 * p1[1]
    return (x, y)


def sample_path(cmds: list[PathCommand], per_segment: int = BEZIER_SAMPLES) -> list[Point]:
    """Polyline approximation of a command path (arc-length friendly)."""
    pts: list[Point] = []
    cur: Point | None = None
    start: Point | None = None
    for cmd in cmds:
        if cmd[0] == "M":
            cur = start = cmd[1]
            pts.append(cur)
        elif cmd[0] == "L":
            pts.append(cmd[1])
            cur = cmd[1]
        elif cmd[0] == "C":
            c1, c2, p1 = cmd[1], cmd[2], cmd[3]
            for k in range(1, per_segment + 1):
                pts.append(cubic_point(cur, c1, c2, p1, k / per_segment))
            cur = p1
        elif cmd[0] == "Z" and start is not None and cur != start:
            pts.append(start)
            cur = start
    return pts


def path_length(cmds: list[PathCommand], per_segment: int = BEZIER_SAMPLES) -> float:
    pts = sample_path(cmds, per_segment)
    return sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))


def _nearest_on_path(cmds: list[PathCommand], target: Point) -> Point:
    pts = sample_path(cmds)
    return min(pts, key=lambda p: (p[0] - target[0]) ** 2 + (p[1] - target[1]) ** 2)


# ---------------------------------------------------------------------------
# per-element builders

def link_ribbon(
    centers: list[Point], width_start: float, width_end: float
) -> list[PathCommand]:
    """Closed ribbon through *centers*, width interpolated start to end."""
    if len(centers) < 2:
        return []
    n = len(centers) - 1
    widths = [width_start + (width_end - width_start) * (i / n) for i in range(n + 1)]
    top = [(x, y - w / 2.0) for (x, y), w in zip(centers, widths)]
    bottom = [(x, y + w / 2.0) for (x, y), w in zip(centers, widths)]
    cmds: list[PathCommand] = [("M", top[0])]
    cmds += _curve_through(top)
    cmds.append(("L", bottom[-1]))
    cmds += _reverse_curve(bottom)
    cmds.append(("Z",))
    return cmds


def label_geometry(
    label: LabelDef,
    index: int,
    chain: list[Point],
    stream_color: str,
    stream_depth: int,
    stream_path: list[PathCommand],
    base_font_px: float,
    box_shape: str = "ellipse",
) -> LabelShape | None:
    """Geometry for one label; None when the text is empty.

    ``out``: a box at the chain centroid plus a straight connector to the
    nearest point of the stream outline, stroked in the stream's displayed
    color. ``in``: the same box, filled one nesting shade deeper than the
    stream, no connector. ``on``: no box; a curved baseline through the
    chain nodes with the text centered along its arc length.
    """
    if not label.text:
        return None
    font_px = label.size * base_font_px
    shape = LabelShape(
        label=label, index=index, font_px=font_px,
        color=nested_shade(stream_color, stream_depth),
    )

    if label.type == "on":
        pts = sorted(chain)
        if len(pts) == 1:
            # degenerate chain: short horizontal baseline under the glyphs
            half = textmetrics.text_width_px(label.text, label.size, base_font_px) / 2.0
            x, y = pts[0]
            baseline = [("M", (x - half, y)), ("L", (x + half, y))]
        else:
            baseline = [("M", pts[0])] + _curve_through(pts)
        shape.baseline = baseline
        shape.baseline_length = path_length(baseline)
        text_w = textmetrics.text_width_px(label.text, label.size, base_font_px)
        shape.text_offset = max(0.0, (shape.baseline_length - text_w) / 2.0)
        return shape

    cx = sum(p[0] for p in chain) / len(chain)
    cy = sum(p[1] for p in chain) / len(chain)
    w = textmetrics.box_width_px(label.text, label.size, base_font_px)
    h = textmetrics.box_height_px(label.size, base_font_px)
    if box_shape == "rect":
        shape.box = ("rect", cx - w / 2.0, cy - h / 2.0, w, h)
    else:
        rx, ry = (w / 2.0) * math.sqrt(2.0), (h / 2.0) * math.sqrt(2.0)
        shape.box = ("ellipse", cx, cy, rx, ry)
    shape.anchor_pos = (cx, cy)

    if label.type == "in":
        shape.box_fill = nested_shade(stream_color, stream_depth + 1)
    else:
        shape.box_fill = "#FFFFFF"
        target = _nearest_on_path(stream_path, (cx, cy))
        shape.connector = (_box_edge_point((cx, cy), shape.box, target), target)
    return shape


def _box_edge_point(center: Point, box: tuple, target: Point) -> Point:
    """Intersection of the ray center->target with the box boundary."""
    dx, dy = target[0] - center[0], target[1] - center[1]
    if dx == 0 and dy == 0:
        return center
    if box[0] == "ellipse":
        _, cx, cy, rx, ry = box
        scale = 1.0 / math.hypot(dx / rx if rx else 0.0, dy / ry if ry else 0.0)
    else:
        _, x, y, w, h = box
        sx = (w / 2.0) / abs(dx) if dx else math.inf
        sy = (h / 2.0) / abs(dy) if dy else math.inf
        scale = min(sx, sy)
    scale = min(scale, 1.0)  # target inside the box: connector collapses
    return (center[0] + dx * scale, center[1] + dy * scale)


# ---------------------------------------------------------------------------
# scene assembly

def build_scene(
    spec: ChartSpec,
    graph: LayoutGraph,
    positions,
    base_font_px: float = 16.0,
    box_shape: str = "ellipse",
) -> SceneModel:
    """Assemble the full scene from layout output, in paint order."""
    scene = SceneModel(
        width=graph.canvas.width, height=graph.canvas.height,
        t_min=graph.t_min, t_max=graph.t_max,
    )
    scene._margin = graph.canvas.margin

    def node_pos(nid: int) -> Point:
        return (graph.nodes[nid].x, float(positions[nid]))

    depths = {s.id: graph.depth(graph.stream_nodes[s.id][0]) for s in spec.streams}
    fills = {s.id: nested_shade(s.color, depths[s.id]) for s in spec.streams}
    paths: dict[str, list[PathCommand]] = {}
    order = [spec.streams[i] for i in sorted(range(len(spec.streams)),
                                             key=lambda i: (depths[spec.streams[i].id], i))]
    for s in order:
        ids = graph.stream_nodes[s.id]
        pts = [(graph.nodes[i].x, float(positions[i]), graph.nodes[i].size) for i in ids]
        path = stream_outline(pts, cap_width=max(graph.px_per_step, 4.0))
        paths[s.id] = path
        scene.streams.append(
            StreamShape(stream_id=s.id, path=path, depth=depths[s.id], fill=fills[s.id],
                        parent_id=s.parent)
        )

    for le in graph.link_expansions:
        src = spec.stream_by_id(le.link.src)
        fill = fills[src.id]
        centers = [node_pos(i) for i in le.path_ids]
        src_size = graph.nodes[le.path_ids[0]].size
        w = min(4.0, src_size)
        if le.link.merge:
            end_size = graph.nodes[le.path_ids[-1]].size
            ribbon = link_ribbon(centers, w, end_size)
        else:
            ribbon = link_ribbon(centers, w, w)
        if ribbon:
            scene.links.append(LinkShape(link_index=le.index, path=ribbon, fill=fill))
        if le.anchor_id is not None:
            nd = graph.nodes[le.anchor_id]
            scene.anchors.append(
                AnchorShape(
                    link_index=le.index,
                    path=capsule(nd.x, float(positions[nd.id]), max(graph.px_per_step * 0.5, 4.0), nd.size),
                    fill=fill,
                )
            )

    colors = {s.id: s.color for s in spec.streams}
    for lc in graph.label_chains:
        sid = lc.label.stream
        chain_pts = [node_pos(i) for i in lc.node_ids]
        shape = label_geometry(
            lc.label, lc.index, chain_pts, colors[sid], depths[sid], paths[sid],
            base_font_px, box_shape,
        )
        if shape is not None:
            scene.labels.append(shape)

    return scene
