"""Build the nested layout DAG from a chart spec.

Every stream becomes a chain of per-timepoint nodes; labels become a center
node plus wing nodes sized by text length; links become edge chains with
intermediate nodes per timestep and, for non-merge links, a small anchor node
nested in the target stream. Nodes are fixed in x (time) and mobile in y.

Nesting is expressed through ``Node.parent``: a nested node's parent is the
containing stream's node at the same time. The graph restricted to stream and
link edges is acyclic because every such edge advances time.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

from .model import ChartSpec, LabelDef, LinkDef, StreamDef, ValidationError, Violation, validate
from .textmetrics import box_height_px

STREAM = "stream"
LABEL_CENTER = "label-center"
LABEL_WING = "label-wing"
LINK_INTERMEDIATE = "link-intermediate"
LINK_ANCHOR = "link-anchor"

# times are matched exactly after quantization, so grids of nested streams
# line up despite float arithmetic
_T_DECIMALS = 9


def _tkey(t: float) -> float:
    return round(t, _T_DECIMALS)


@dataclass
class Canvas:
    width: float = 1200.0
    height: float = 800.0
    margin: float = 20.0


@dataclass
class Node:
    id: int
    kind: str
    owner: str
    t: float
    x: float
    y: float
    size: float
    parent: int | None = None


@dataclass
class Edge:
    src: int
    dst: int
    cls: str  # stream | label | link


@dataclass
class LabelChain:
    label: LabelDef
    index: int
    node_ids: list[int]
    center_id: int


@dataclass
class LinkExpansion:
    link: LinkDef
    index: int
    path_ids: list[int]  # source stream node, intermediates, terminal
    anchor_id: int | None


@dataclass
class LayoutGraph:
    nodes: list[Node] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)
    stream_nodes: dict[str, list[int]] = field(default_factory=dict)
    label_chains: list[LabelChain] = field(default_factory=list)
    link_expansions: list[LinkExpansion] = field(default_factory=list)
    children: dict[int, list[int]] = field(default_factory=lambda: defaultdict(list))
    # time transform
    t_min: float = 0.0
    t_max: float = 1.0
    step: float = 1.0
    canvas: Canvas = field(default_factory=Canvas)
    default_size: float = 5.0

    @property
    def px_per_unit(self) -> float:
        span = self.t_max - self.t_min
        return (self.canvas.width - 2 * self.canvas.margin) / span if span > 0 else 0.0

    @property
    def px_per_step(self) -> float:
        return self.step * self.px_per_unit

    def time_to_px(self, t: float) -> float:
        if self.t_max == self.t_min:
            return self.canvas.width / 2.0
        return self.canvas.margin + (t - self.t_min) * self.px_per_unit

    def node_key(self, node: Node) -> tuple[str, str, float]:
        """Stable identity used to match nodes across rebuilds."""
        return (node.kind, node.owner, _tkey(node.t))

    def depth(self, node_id: int) -> int:
        d = 0
        p = self.nodes[node_id].parent
        while p is not None:
            d += 1
            p = self.nodes[p].parent
        return d

    def nesting_order(self) -> list[int]:
        """Node ids sorted parents-before-children (by nesting depth)."""
        return sorted(range(len(self.nodes)), key=lambda i: (self.depth(i), i))


# ---------------------------------------------------------------------------
# operations

def size_at(stream: StreamDef, t: float, default_size: float) -> float:
    """Stream thickness at time *t*.

    Piecewise-linear through (t0, default), each size knot, (t1, default);
    exact at the knots.

    Raises:
        ValueError: *t* outside the stream interval.
    """
    if not (stream.t0 - 1e-9 <= t <= stream.t1 + 1e-9):
        raise ValueError(f"t={t} outside stream {stream.id} interval [{stream.t0}, {stream.t1}]")
    knots: list[tuple[float, float]] = [(stream.t0, default_size)]
    for kt, ks in stream.sizes:
        if kt > knots[-1][0]:
            knots.append((kt, ks))
        else:
            knots[-1] = (kt, ks)  # knot at t0 overrides the default endpoint
    if stream.t1 > knots[-1][0]:
        knots.append((stream.t1, default_size))
    if t <= knots[0][0]:
        return knots[0][1]
    for (ta, sa), (tb, sb) in zip(knots, knots[1:]):
        if t <= tb:
            if tb == ta:
                return sb
            return sa + (sb - sa) * (t - ta) / (tb - ta)
    return knots[-1][1]


def _grid_times(t0: float, t1: float, step: float) -> list[float]:
    """t0, t0+step, ... t1; the endpoint is always included even off-grid."""
    if t1 <= t0:
        return [t0]
    n = int(math.floor((t1 - t0) / step + 1e-9))
    times = [t0 + k * step for k in range(n + 1)]
    if t1 - times[-1] > 1e-9:
        times.append(t1)
    return times


def _nesting_depth(spec: ChartSpec, sid: str) -> int:
    by_id = {s.id: s for s in spec.streams}
    d = 0
    cur = by_id[sid].parent
    while cur is not None:
        d += 1
        cur = by_id[cur].parent
    return d


def _nearest(times: list[float], t: float) -> float:
    return min(times, key=lambda u: (abs(u - t), u))


def build_graph(
    spec: ChartSpec,
    step: float,
    canvas: Canvas,
    default_size: float = 5.0,
    base_font_px: float = 16.0,
    avg_char_em: float = 0.6,
    anchor_fraction: float = 0.3,
) -> LayoutGraph:
    """Transform a validated spec into the layout graph.

    Raises:
        ValidationError: propagated spec violations (validate runs first).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    violations = validate(spec, step=step)
    if violations:
        raise ValidationError(violations)

    g = LayoutGraph(step=step, canvas=canvas, default_size=default_size)
    if spec.streams:
        g.t_min = min(s.t0 for s in spec.streams)
        g.t_max = max(s.t1 for s in spec.streams)
    by_id = {s.id: s for s in spec.streams}

    # per-stream time sets; a nested stream's times are folded into every
    # ancestor so each nested node has a parent node at exactly its time
    times: dict[str, set[float]] = {
        s.id: {_tkey(t) for t in _grid_times(s.t0, s.t1, step)} for s in spec.streams
    }
    for s in sorted(spec.streams, key=lambda s: _nesting_depth(spec, s.id), reverse=True):
        if s.parent is not None:
            times[s.parent] |= times[s.id]

    node_at: dict[tuple[str, float], int] = {}
    for s in spec.streams:  # declaration order drives initial stacking
        ids = []
        for t in sorted(times[s.id]):
            nid = len(g.nodes)
            g.nodes.append(
                Node(
                    id=nid,
                    kind=STREAM,
                    owner=f"stream:{s.id}",
                    t=t,
                    x=g.time_to_px(t),
                    y=0.0,
                    size=size_at(s, t, default_size),
                )
            )
            node_at[(s.id, _tkey(t))] = nid
            ids.append(nid)
        g.stream_nodes[s.id] = ids
        for a, b in zip(ids, ids[1:]):
            g.edges.append(Edge(a, b, "stream"))

    for s in spec.streams:
        if s.parent is None:
            continue
        for nid in g.stream_nodes[s.id]:
            pid = node_at[(s.parent, _tkey(g.nodes[nid].t))]
            g.nodes[nid].parent = pid
            g.children[pid].append(nid)

    occ: dict[tuple, int] = defaultdict(int)
    for i, label in enumerate(spec.labels):
        key = (label.stream, _tkey(label.t), label.type, label.text, label.size)
        owner = f"label:{':'.join(map(str, key))}:{occ[key]}"
        occ[key] += 1
        g.label_chains.append(
            build_label_chain(label, i, owner, g, node_at, base_font_px, avg_char_em)
        )

    occ.clear()
    for i, link in enumerate(spec.links):
        key = (link.src, _tkey(link.t0), link.dst, link.t1, link.merge)
        owner = f"link:{':'.join(map(str, key))}:{occ[key]}"
        occ[key] += 1
        g.link_expansions.append(
            expand_link(link, i, owner, g, by_id, node_at, anchor_fraction)
        )

    return g


def build_label_chain(
    label: LabelDef,
    index: int,
    owner: str,
    g: LayoutGraph,
    node_at: dict[tuple[str, float], int],
    base_font_px: float,
    avg_char_em: float,
) -> LabelChain:
    """Create the center + wing node chain for one label.

    The wing count per side is ``ceil((est_width/2) / px_per_step)`` with the
    width estimated from character count. Wings extend at one step per node;
    for ``in`` and ``on`` labels each chain node is nested in the stream node
    at its time (wings without such a node are clipped), for ``out`` labels
    the chain is free and the center gets an extra edge to the stream node.
    """
    stream_ids = g.stream_nodes[label.stream]
    stream_times = [g.nodes[nid].t for nid in stream_ids]
    center_t = _nearest(stream_times, label.t)

    font_px = label.size * base_font_px
    width_px = len(label.text) * avg_char_em * font_px
    k = math.ceil((width_px / 2) / g.px_per_step) if g.px_per_step > 0 and width_px > 0 else 0
    node_size = box_height_px(label.size, base_font_px)
    nested = label.type in ("in", "on")

    def make(t: float) -> int | None:
        parent = None
        if nested:
            pid = node_at.get((label.stream, _tkey(t)))
            if pid is None:
                return None  # wing beyond the stream's nodes: clipped
            parent = pid
        elif not (g.t_min - 1e-9 <= t <= g.t_max + 1e-9):
            return None  # out-label wing clipped to the chart's time range
        kind = LABEL_CENTER if t == center_t else LABEL_WING
        nid = len(g.nodes)
        g.nodes.append(
            Node(
                id=nid, kind=kind, owner=owner, t=t, x=g.time_to_px(t), y=0.0,
                size=node_size, parent=parent,
            )
        )
        if parent is not None:
            g.children[parent].append(nid)
        return nid

    center_id = make(center_t)
    assert center_id is not None
    chain = [center_id]
    for j in range(1, k + 1):
        for t in (center_t - j * g.step, center_t + j * g.step):
            nid = make(t)
            if nid is not None:
                chain.append(nid)
    chain.sort(key=lambda nid: g.nodes[nid].t)
    for a, b in zip(chain, chain[1:]):
        g.edges.append(Edge(a, b, "label"))
    if label.type == "out":
        g.edges.append(Edge(center_id, node_at[(label.stream, _tkey(center_t))], "label"))
    return LabelChain(label=label, index=index, node_ids=chain, center_id=center_id)


def expand_link(
    link: LinkDef,
    index: int,
    owner: str,
    g: LayoutGraph,
    by_id: dict[str, StreamDef],
    node_at: dict[tuple[str, float], int],
    anchor_fraction: float,
) -> LinkExpansion:
    """Expand one link into edges, intermediate nodes and an optional anchor.

    The effective end time is ``t1`` or ``t0 + step``; both endpoint times
    snap to the nearest existing node of their stream so the chain always
    starts and ends on real nodes. Non-merge links terminate in a small
    anchor node nested in the target; merge links end on the target's own
    node so the ribbon visually flows into it.

    Raises:
        ValidationError: effective end time outside the target interval.
    """
    src_times = [g.nodes[nid].t for nid in g.stream_nodes[link.src]]
    dst_times = [g.nodes[nid].t for nid in g.stream_nodes[link.dst]]
    t0 = _nearest(src_times, link.t0)
    t1_eff = link.t1 if link.t1 is not None else link.t0 + g.step
    dst_def = by_id[link.dst]
    if not (dst_def.t0 - 1e-9 <= t1_eff <= dst_def.t1 + 1e-9):
        raise ValidationError(
            [Violation("links", f"{link.src}->{link.dst}#{index}",
                       f"effective end time {t1_eff} outside target interval")]
        )
    t1 = _nearest(dst_times, t1_eff)
    if t1 <= t0:
        later = [t for t in dst_times if t > t0 + 1e-9]
        if not later:
            raise ValidationError(
                [Violation("links", f"{link.src}->{link.dst}#{index}",
                           "target has no node after the link start")]
            )
        t1 = later[0]

    path = [node_at[(link.src, _tkey(t0))]]
    t = t0 + g.step
    while t < t1 - 1e-9:
        nid = len(g.nodes)
        g.nodes.append(
            Node(id=nid, kind=LINK_INTERMEDIATE, owner=owner, t=t, x=g.time_to_px(t), y=0.0,
                 size=4.0)
        )
        path.append(nid)
        t += g.step

    anchor_id = None
    if link.merge:
        path.append(node_at[(link.dst, _tkey(t1))])
    else:
        target_size = size_at(dst_def, t1, g.default_size)
        if target_size >= 4.0:
            size = min(max(anchor_fraction * target_size, 2.0), target_size - 2.0)
        else:
            size = target_size / 2.0
        pid = node_at[(link.dst, _tkey(t1))]
        nid = len(g.nodes)
        g.nodes.append(
            Node(id=nid, kind=LINK_ANCHOR, owner=owner, t=t1, x=g.time_to_px(t1), y=0.0,
                 size=size, parent=pid)
        )
        g.children[pid].append(nid)
        path.append(nid)
        anchor_id = nid

    for a, b in zip(path, path[1:]):
        g.edges.append(Edge(a, b, "link"))
    return LinkExpansion(link=link, index=index, path_ids=path, anchor_id=anchor_id)


def check_acyclic(g: LayoutGraph) -> bool:
    """True iff a topological order exists over stream and link edges."""
    indeg = [0] * len(g.nodes)
    adj: dict[int, list[int]] = defaultdict(list)
    for e in g.edges:
        if e.cls in ("stream", "link"):
            adj[e.src].append(e.dst)
            indeg[e.dst] += 1
    queue = [i for i in range(len(g.nodes)) if indeg[i] == 0]
    seen = 0
    while queue:
        n = queue.pop()
        seen += 1
        for m in adj[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    return seen == len(g.nodes)
