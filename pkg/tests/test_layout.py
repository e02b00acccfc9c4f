import random

import numpy as np
import pytest

from orcha.graph import Canvas, build_graph
from orcha.layout import (
    ForceParams,
    check_constraints,
    incremental_relayout,
    init_positions,
    kinetic_energy,
    run,
    tick,
    wiggle_energy,
)
from orcha.model import ChartSpec, LabelDef, LinkDef, StreamDef
from orcha.synth import random_spec

CANVAS = Canvas(width=600, height=400)


def zero_forces() -> ForceParams:
    return ForceParams(
        gravity=0.0, repulsion=0.0, stiffness={"stream": 0.0, "label": 0.0, "link": 0.0}
    )


def crossing_spec() -> ChartSpec:
    """Two full-width streams pulled across each other by merge links."""
    return ChartSpec(
        streams=[
            StreamDef(id="X", t0=0, t1=10, color="#D73B2F"),
            StreamDef(id="Y", t0=0, t1=10, color="#3E6DA8"),
        ],
        links=[
            LinkDef(src="X", t0=8, dst="Y", merge=True),
            LinkDef(src="Y", t0=2, dst="X", merge=True),
        ],
    )


class TestInitPositions:
    def test_fig2a_declaration_order_stacking(self, fig2a_spec):
        g = build_graph(fig2a_spec, step=1.0, canvas=Canvas())
        params = ForceParams()
        state = init_positions(g, params, seed=1)
        at4 = {nd.owner: nd.id for nd in g.nodes if nd.t == 4.0 and nd.kind == "stream"}
        y = state.y
        assert y[at4["stream:A"]] < y[at4["stream:B"]]  # A above B
        assert y[at4["stream:C"]] == y[at4["stream:B"]]  # nested starts at parent center

    def test_single_stream_at_mid_height(self):
        spec = ChartSpec(streams=[StreamDef(id="S", t0=0, t1=4, color="red")])
        g = build_graph(spec, step=1.0, canvas=CANVAS)
        state = init_positions(g, ForceParams(), seed=1)
        assert np.all(state.y == CANVAS.height / 2)

    def test_two_identical_streams_symmetric(self):
        spec = ChartSpec(
            streams=[
                StreamDef(id="S1", t0=0, t1=4, color="red"),
                StreamDef(id="S2", t0=0, t1=4, color="blue"),
            ]
        )
        g = build_graph(spec, step=1.0, canvas=CANVAS)
        state = init_positions(g, ForceParams(), seed=1)
        mid = CANVAS.height / 2
        y1 = state.y[g.stream_nodes["S1"][0]]
        y2 = state.y[g.stream_nodes["S2"][0]]
        assert y1 < mid < y2
        assert (mid - y1) == pytest.approx(y2 - mid, abs=1e-9)

    def test_velocities_zero_alpha_start(self):
        g = build_graph(crossing_spec(), step=1.0, canvas=CANVAS)
        params = ForceParams()
        state = init_positions(g, params, seed=1)
        assert np.all(state.vy == 0.0)
        assert state.alpha == params.alpha_start


class TestTick:
    def test_coincident_nodes_separate(self):
        spec = ChartSpec(
            streams=[
                StreamDef(id="P", t0=0, t1=0, color="red"),
                StreamDef(id="Q", t0=0, t1=0, color="blue"),
            ]
        )
        g = build_graph(spec, step=1.0, canvas=CANVAS)
        params = ForceParams(gravity=0.0)
        state = init_positions(g, params, seed=3)
        state.y[:] = 200.0  # force exact overlap
        tick(state, g, params)
        assert state.y[0] != state.y[1]

    def test_zero_forces_fixed_point(self):
        g = build_graph(crossing_spec(), step=1.0, canvas=CANVAS)
        params = zero_forces()
        state = init_positions(g, params, seed=3)
        before = state.y.copy()
        tick(state, g, params)
        assert np.array_equal(state.y, before)

    def test_escaped_child_clamped_back(self, fig2a_spec):
        g = build_graph(fig2a_spec, step=1.0, canvas=Canvas())
        params = zero_forces()
        state = init_positions(g, params, seed=3)
        child = g.stream_nodes["C"][0]
        parent = g.nodes[child].parent
        state.y[child] = state.y[parent] + 300.0
        tick(state, g, params)
        ph = g.nodes[parent].size / 2
        ch = min(g.nodes[child].size / 2, ph)
        assert state.y[child] - ch >= state.y[parent] - ph - 1e-9
        assert state.y[child] + ch <= state.y[parent] + ph + 1e-9

    def test_alpha_decays(self):
        g = build_graph(crossing_spec(), step=1.0, canvas=CANVAS)
        params = ForceParams()
        state = init_positions(g, params, seed=3)
        tick(state, g, params)
        assert state.alpha == params.alpha_start * params.decay_factor
        assert state.tick_count == 1


class TestRun:
    def test_fig2a_converges_with_constraints(self, fig2a_spec):
        g = build_graph(fig2a_spec, step=1.0, canvas=Canvas())
        params = ForceParams()
        state = init_positions(g, params, seed=42)
        run(state, g, params)
        assert state.tick_count <= params.max_ticks
        assert check_constraints(g, state, params) == []

    def test_empty_graph_immediate(self):
        g = build_graph(ChartSpec(), step=1.0, canvas=CANVAS)
        params = ForceParams()
        state = init_positions(g, params, seed=1)
        run(state, g, params)
        assert state.tick_count == 0

    def test_determinism_same_seed(self, fig2a_spec):
        results = []
        for _ in range(2):
            g = build_graph(fig2a_spec, step=1.0, canvas=Canvas())
            params = ForceParams()
            state = init_positions(g, params, seed=42)
            run(state, g, params)
            results.append(state.y.copy())
        assert np.array_equal(results[0], results[1])

    def test_positions_written_back_to_nodes(self, fig2a_spec):
        g = build_graph(fig2a_spec, step=1.0, canvas=Canvas())
        params = ForceParams()
        state = init_positions(g, params, seed=42)
        run(state, g, params)
        for nd in g.nodes:
            assert nd.y == state.y[nd.id]

    def test_x_never_moves(self, fig2a_spec):
        g = build_graph(fig2a_spec, step=1.0, canvas=Canvas())
        expected = [g.time_to_px(nd.t) for nd in g.nodes]
        params = ForceParams()
        state = init_positions(g, params, seed=42)
        run(state, g, params)
        assert [nd.x for nd in g.nodes] == expected  # bitwise: x is untouched

    def test_random_specs_constraint_suite(self):
        params = ForceParams()
        for seed in range(15):
            spec = random_spec(random.Random(seed + 500))
            g = build_graph(spec, step=1.0, canvas=Canvas())
            state = init_positions(g, params, seed=seed)
            run(state, g, params)
            assert check_constraints(g, state, params) == [], f"seed {seed}"


class TestDamping:
    def test_kinetic_energy_non_increasing_without_forces(self):
        g = build_graph(crossing_spec(), step=1.0, canvas=CANVAS)
        params = zero_forces()
        state = init_positions(g, params, seed=3)
        rng = np.random.default_rng(0)
        state.vy[:] = rng.normal(0, 10, size=len(state.vy))
        prev = kinetic_energy(state)
        for _ in range(20):
            tick(state, g, params)
            cur = kinetic_energy(state)
            assert cur <= prev + 1e-12
            prev = cur


class TestWiggle:
    def test_wiggle_non_increasing_with_stream_stiffness(self):
        energies = {"X": [], "Y": []}
        for k in (0.1, 0.5, 1.0):
            params = ForceParams(stiffness={"stream": k, "label": 0.5, "link": 0.1})
            g = build_graph(crossing_spec(), step=1.0, canvas=CANVAS)
            state = init_positions(g, params, seed=42)
            y = run(state, g, params)
            for sid in energies:
                energies[sid].append(wiggle_energy(g, y, sid))
        for sid, es in energies.items():
            assert es[0] >= es[1] >= es[2], (sid, es)


class TestIncrementalRelayout:
    def converged(self, spec):
        g = build_graph(spec, step=1.0, canvas=Canvas())
        params = ForceParams()
        state = init_positions(g, params, seed=42)
        run(state, g, params)
        return g, params, state

    def test_add_label_keeps_old_positions_at_tick_zero(self, fig2a_spec):
        old_graph, params, old_state = self.converged(fig2a_spec)
        new_spec = fig2a_spec.copy()
        new_spec.labels.append(LabelDef(stream="B", t=5, text="new", type="in", size=1))
        new_graph = build_graph(new_spec, step=1.0, canvas=Canvas())
        new_state = incremental_relayout(old_state, old_graph, new_graph, params)
        old_keys = {old_graph.node_key(nd): nd.id for nd in old_graph.nodes}
        for nd in new_graph.nodes:
            key = new_graph.node_key(nd)
            if key in old_keys:
                assert new_state.y[nd.id] == old_state.y[old_keys[key]]
        assert new_state.alpha < params.alpha_start

    def test_edit_tick_budget(self, fig2a_spec):
        old_graph, params, old_state = self.converged(fig2a_spec)
        new_spec = fig2a_spec.copy()
        new_spec.labels.append(LabelDef(stream="B", t=5, text="new", type="in", size=1))
        new_graph = build_graph(new_spec, step=1.0, canvas=Canvas())
        new_state = incremental_relayout(old_state, old_graph, new_graph, params)
        run(new_state, new_graph, params, max_ticks=120)
        assert new_state.tick_count <= 120

    def test_noop_edit_positionally_identical(self, fig2a_spec):
        old_graph, params, old_state = self.converged(fig2a_spec)
        new_graph = build_graph(fig2a_spec, step=1.0, canvas=Canvas())
        new_state = incremental_relayout(old_state, old_graph, new_graph, params)
        assert np.array_equal(new_state.y, old_state.y)

    def test_delete_stream_keeps_survivors(self, fig2a_spec):
        old_graph, params, old_state = self.converged(fig2a_spec)
        new_spec = fig2a_spec.copy()
        new_spec.streams = [s for s in new_spec.streams if s.id != "C"]
        new_spec.links = [l for l in new_spec.links if "C" not in (l.src, l.dst)]
        new_graph = build_graph(new_spec, step=1.0, canvas=Canvas())
        new_state = incremental_relayout(old_state, old_graph, new_graph, params)
        old_keys = {old_graph.node_key(nd): nd.id for nd in old_graph.nodes}
        for nd in new_graph.nodes:
            key = new_graph.node_key(nd)
            assert key in old_keys
            assert new_state.y[nd.id] == old_state.y[old_keys[key]]

    def test_new_node_seeds_from_chain_neighbor(self, fig2a_spec):
        old_graph, params, old_state = self.converged(fig2a_spec)
        new_spec = fig2a_spec.copy()
        new_spec.streams[0].t1 = 8.0  # extend A: nodes at t=7,8 are new
        new_graph = build_graph(new_spec, step=1.0, canvas=Canvas())
        new_state = incremental_relayout(old_state, old_graph, new_graph, params)
        a_nodes = {new_graph.nodes[i].t: i for i in new_graph.stream_nodes["A"]}
        old_a = {old_graph.nodes[i].t: i for i in old_graph.stream_nodes["A"]}
        assert new_state.y[a_nodes[7.0]] == old_state.y[old_a[6.0]]


class TestBoundary:
    def test_tall_stack_clamped_into_canvas(self):
        streams = [StreamDef(id=f"S{i}", t0=0, t1=3, color="red") for i in range(20)]
        g = build_graph(ChartSpec(streams=streams), step=1.0, canvas=Canvas(width=300, height=120))
        params = ForceParams()
        state = init_positions(g, params, Canvas(width=300, height=120), seed=1)
        run(state, g, params, Canvas(width=300, height=120))
        assert check_constraints(g, state, params, Canvas(width=300, height=120)) == []
