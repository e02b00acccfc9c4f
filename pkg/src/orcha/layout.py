"""Constrained force layout over the node graph.

Nodes are fixed in x and simulated in y under four influences: gravity toward
the canvas mid-height, inverse-square repulsion between nodes at the same or
adjacent timepoints, per-class springs along edges, and hard clamps (canvas
boundary, parent containment) applied as a projection after each integration
step. The simulation cools on a geometric alpha schedule.

The inner loop runs in the compiled ``orcha._kernels`` extension when it is
available and otherwise in the bit-identical pure-Python twin; see
``ACTIVE_BACKEND``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .graph import Canvas, LayoutGraph

try:
    from . import _kernels as _backend
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build-environment dependent
    from . import _kernels_py as _backend
    HAVE_COMPILED = False

ACTIVE_BACKEND = "compiled" if HAVE_COMPILED else "python"

_MASK = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _pair_direction(seed: int, i: int, j: int) -> float:
    """Deterministic +-1 used when two nodes coincide exactly."""
    h = _splitmix64(_splitmix64(seed & _MASK) ^ (i * 0x100000001B3 + j))
    return 1.0 if h & 1 else -1.0


@dataclass
class ForceParams:
    """Force simulation parameters; all exposed through the JSON config."""

    gravity: float = 0.05
    repulsion: float = 900.0  # 30^2
    repulsion_cutoff: float = 150.0
    stiffness: dict[str, float] = field(
        default_factory=lambda: {"stream": 1.0, "label": 0.5, "link": 0.1}
    )
    spring_rest_length: float = 0.0
    velocity_decay: float = 0.6
    alpha_start: float = 1.0
    alpha_decay: float | None = None  # derived: alpha_min at max_ticks
    alpha_min: float = 0.001
    max_ticks: int = 300
    padding: float = 20.0

    def __post_init__(self):
        if self.gravity < 0 or self.repulsion < 0 or any(v < 0 for v in self.stiffness.values()):
            raise ValueError("force strengths must be non-negative")
        if not (0 < self.velocity_decay < 1):
            raise ValueError("velocity_decay must be in (0, 1)")
        if not (self.alpha_min < self.alpha_start):
            raise ValueError("alpha_min must be below alpha_start")

    @property
    def decay_factor(self) -> float:
        if self.alpha_decay is not None:
            return self.alpha_decay
        return (self.alpha_min / self.alpha_start) ** (1.0 / self.max_ticks)


@dataclass
class SimPlan:
    """Static per-graph arrays consumed by the kernels."""

    x: np.ndarray
    size: np.ndarray
    parent: np.ndarray
    order: np.ndarray
    pair_i: np.ndarray
    pair_j: np.ndarray
    pair_dir: np.ndarray
    spr_src: np.ndarray
    spr_dst: np.ndarray
    spr_k: np.ndarray
    spr_rest: np.ndarray


@dataclass
class SimulationState:
    """Mutable per-node positions/velocities plus the cooling temperature."""

    y: np.ndarray
    vy: np.ndarray
    alpha: float
    tick_count: int = 0
    rng_seed: int = 0
    plan: SimPlan | None = None


def _ancestors(graph: LayoutGraph, nid: int) -> set[int]:
    out = set()
    p = graph.nodes[nid].parent
    while p is not None:
        out.add(p)
        p = graph.nodes[p].parent
    return out


def build_plan(graph: LayoutGraph, params: ForceParams, seed: int) -> SimPlan:
    """Precompute the kernel arrays: pair list, springs, clamp order.

    Repulsion pairs cover nodes sharing a timepoint and nodes at adjacent
    timepoints; ancestor-descendant pairs are excluded so containers do not
    repel their own content.
    """
    n = len(graph.nodes)
    x = np.array([nd.x for nd in graph.nodes], dtype=np.float64)
    size = np.array([nd.size for nd in graph.nodes], dtype=np.float64)
    parent = np.array(
        [nd.parent if nd.parent is not None else -1 for nd in graph.nodes], dtype=np.int32
    )
    order = np.array(graph.nesting_order(), dtype=np.int32)

    anc = [_ancestors(graph, i) for i in range(n)]
    buckets: dict[float, list[int]] = defaultdict(list)
    for nd in graph.nodes:
        buckets[round(nd.t, 9)].append(nd.id)
    keys = sorted(buckets)

    pi: list[int] = []
    pj: list[int] = []
    for ki, key in enumerate(keys):
        ids = sorted(buckets[key])
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                i, j = ids[a], ids[b]
                if i in anc[j] or j in anc[i]:
                    continue
                pi.append(i)
                pj.append(j)
        if ki + 1 < len(keys):
            for i in ids:
                for j in sorted(buckets[keys[ki + 1]]):
                    pi.append(i)
                    pj.append(j)

    pair_dir = np.array([_pair_direction(seed, i, j) for i, j in zip(pi, pj)], dtype=np.float64)

    spr_src = np.array([e.src for e in graph.edges], dtype=np.int32)
    spr_dst = np.array([e.dst for e in graph.edges], dtype=np.int32)
    spr_k = np.array([params.stiffness.get(e.cls, 0.0) for e in graph.edges], dtype=np.float64)
    spr_rest = np.full(len(graph.edges), params.spring_rest_length, dtype=np.float64)

    return SimPlan(
        x=x, size=size, parent=parent, order=order,
        pair_i=np.array(pi, dtype=np.int32), pair_j=np.array(pj, dtype=np.int32),
        pair_dir=pair_dir,
        spr_src=spr_src, spr_dst=spr_dst, spr_k=spr_k, spr_rest=spr_rest,
    )


def init_positions(
    graph: LayoutGraph, params: ForceParams, canvas: Canvas | None = None, seed: int = 0
) -> SimulationState:
    """Stack nodes per timepoint in declaration order, centered vertically.

    Free nodes at each timepoint form a top-to-bottom stack separated by
    their sizes plus padding; nested nodes start at their parent's center.
    """
    canvas = canvas or graph.canvas
    n = len(graph.nodes)
    y = np.zeros(n, dtype=np.float64)
    center = canvas.height / 2.0

    buckets: dict[float, list[int]] = defaultdict(list)
    for nd in graph.nodes:
        if nd.parent is None:
            buckets[round(nd.t, 9)].append(nd.id)
    for ids in buckets.values():
        ids.sort()  # node creation order == declaration order
        total = sum(graph.nodes[i].size for i in ids) + params.padding * (len(ids) - 1)
        top = center - total / 2.0
        offset = 0.0
        for i in ids:
            y[i] = top + offset + graph.nodes[i].size / 2.0
            offset += graph.nodes[i].size + params.padding
    for i in graph.nesting_order():
        p = graph.nodes[i].parent
        if p is not None:
            y[i] = y[p]

    state = SimulationState(
        y=y, vy=np.zeros(n, dtype=np.float64), alpha=params.alpha_start, rng_seed=seed
    )
    state.plan = build_plan(graph, params, seed)
    return state


def _simulate(state, graph, params, canvas, max_ticks, alpha_min):
    canvas = canvas or graph.canvas
    plan = state.plan
    if plan is None:
        plan = state.plan = build_plan(graph, params, state.rng_seed)
    f = np.zeros(len(state.y), dtype=np.float64)
    alpha, ticks = _backend.simulate(
        state.y, state.vy, f, plan.x, plan.size, plan.parent, plan.order,
        plan.pair_i, plan.pair_j, plan.pair_dir,
        plan.spr_src, plan.spr_dst, plan.spr_k, plan.spr_rest,
        params.gravity, params.repulsion, params.repulsion_cutoff,
        params.velocity_decay, canvas.height / 2.0, canvas.height, params.padding,
        state.alpha, params.decay_factor, alpha_min, max_ticks,
    )
    state.alpha = alpha
    state.tick_count += ticks
    return ticks


def tick(
    state: SimulationState, graph: LayoutGraph, params: ForceParams,
    canvas: Canvas | None = None,
) -> SimulationState:
    """One simulation step (forces, integration, clamps, alpha decay)."""
    _simulate(state, graph, params, canvas, max_ticks=1, alpha_min=0.0)
    return state


def run(
    state: SimulationState, graph: LayoutGraph, params: ForceParams,
    canvas: Canvas | None = None, max_ticks: int | None = None,
) -> np.ndarray:
    """Tick until alpha reaches alpha_min or the tick budget is spent.

    Returns the position array and writes final positions back into the
    graph's nodes.
    """
    if len(graph.nodes) == 0:
        return state.y
    budget = max_ticks if max_ticks is not None else params.max_ticks
    _simulate(state, graph, params, canvas, max_ticks=max(0, budget - state.tick_count),
              alpha_min=params.alpha_min)
    for nd in graph.nodes:
        nd.y = float(state.y[nd.id])
    return state.y


def incremental_relayout(
    old_state: SimulationState,
    old_graph: LayoutGraph,
    new_graph: LayoutGraph,
    params: ForceParams,
    reheat: float = 0.3,
) -> SimulationState:
    """Warm-start a new simulation from a previous layout.

    Nodes matched by (kind, owner, t) keep their old position; new nodes copy
    the nearest surviving node of their own chain, anything else falls back
    to the cold stacking. Alpha restarts at the (lower) reheat temperature.
    """
    old_index = {old_graph.node_key(nd): nd.id for nd in old_graph.nodes}
    cold = init_positions(new_graph, params, new_graph.canvas, seed=old_state.rng_seed)
    y = cold.y  # fallback for genuinely new structure

    by_owner: dict[str, list] = defaultdict(list)
    for nd in new_graph.nodes:
        by_owner[nd.owner].append(nd)

    for nd in new_graph.nodes:
        key = new_graph.node_key(nd)
        if key in old_index:
            y[nd.id] = old_state.y[old_index[key]]
        else:
            siblings = [
                s for s in by_owner[nd.owner]
                if s.id != nd.id and new_graph.node_key(s) in old_index
            ]
            if siblings:
                nearest = min(siblings, key=lambda s: abs(s.t - nd.t))
                y[nd.id] = old_state.y[old_index[new_graph.node_key(nearest)]]

    state = SimulationState(
        y=y, vy=np.zeros(len(new_graph.nodes), dtype=np.float64),
        alpha=min(reheat, params.alpha_start), rng_seed=old_state.rng_seed,
    )
    state.plan = build_plan(new_graph, params, old_state.rng_seed)
    return state


# ---------------------------------------------------------------------------
# diagnostics used by tests and the acceptance suite

def check_constraints(
    graph: LayoutGraph, state: SimulationState, params: ForceParams,
    canvas: Canvas | None = None, tol: float = 1e-6,
) -> list[str]:
    """Return violated layout constraints (empty list = all hold).

    A node larger than its container cannot satisfy extent containment, so
    extents are measured with the effective half-size min(own, container);
    for fitting nodes that is exactly full extent containment.
    """
    canvas = canvas or graph.canvas
    problems = []
    for nd in graph.nodes:
        yv = float(state.y[nd.id])
        half = nd.size / 2.0
        if nd.parent is None:
            avail = (canvas.height - 2 * params.padding) / 2.0
            eh = min(half, avail)
            if yv - eh < params.padding - tol or yv + eh > canvas.height - params.padding + tol:
                problems.append(f"node {nd.id} ({nd.kind}) outside canvas: y={yv:.3f}")
        else:
            pd = graph.nodes[nd.parent]
            py = float(state.y[pd.id])
            ph = pd.size / 2.0
            eh = min(half, ph)
            if yv - eh < py - ph - tol or yv + eh > py + ph + tol:
                problems.append(
                    f"node {nd.id} ({nd.kind}) escapes parent {pd.id}: y={yv:.3f} parent={py:.3f}"
                )
        expected_x = graph.time_to_px(nd.t)
        if nd.x != expected_x:
            problems.append(f"node {nd.id} moved in x: {nd.x} != {expected_x}")
    return problems


def wiggle_energy(graph: LayoutGraph, y: np.ndarray, stream_id: str) -> float:
    """Sum of squared consecutive y-differences along one stream chain."""
    ids = graph.stream_nodes[stream_id]
    return float(sum((y[b] - y[a]) ** 2 for a, b in zip(ids, ids[1:])))


def kinetic_energy(state: SimulationState) -> float:
    return float(np.sum(state.vy * state.vy))
