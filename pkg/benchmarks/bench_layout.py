#!/usr/bin/env python3
"""Benchmark the compiled layout kernel against the pure-Python twin.

Runs the same tick loop with both backends on synthetic charts and reports
per-tick timings, the speedup, and verifies that the resulting positions are
bit-identical.

    python3 benchmarks/bench_layout.py [--ticks N] [--scales small,medium,full]
"""

import argparse
import sys
import time

import numpy as np

from orcha.config import RenderConfig
from orcha.graph import build_graph
from orcha.layout import HAVE_COMPILED, ForceParams, init_positions
from orcha.synth import downtown_scale_spec

SCALES = {
    "small": dict(n_streams=6, n_links=6, n_labels=20),
    "medium": dict(n_streams=20, n_links=25, n_labels=120),
    "full": dict(n_streams=44, n_links=61, n_labels=369),
}


def run_backend(mod, graph, params, ticks, seed=42):
    state = init_positions(graph, params, seed=seed)
    plan = state.plan
    f = np.zeros(len(state.y))
    started = time.perf_counter()
    mod.simulate(
        state.y, state.vy, f, plan.x, plan.size, plan.parent, plan.order,
        plan.pair_i, plan.pair_j, plan.pair_dir,
        plan.spr_src, plan.spr_dst, plan.spr_k, plan.spr_rest,
        params.gravity, params.repulsion, params.repulsion_cutoff,
        params.velocity_decay, graph.canvas.height / 2.0, graph.canvas.height,
        params.padding, state.alpha, params.decay_factor, 0.0, ticks,
    )
    return state.y, time.perf_counter() - started


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--ticks", type=int, default=60)
    parser.add_argument("--scales", default="small,medium,full")
    args = parser.parse_args(argv)

    if not HAVE_COMPILED:
        print("compiled kernel not available; nothing to compare", file=sys.stderr)
        return 1
    import orcha._kernels as kernels_c
    import orcha._kernels_py as kernels_py

    config = RenderConfig()
    print(f"{'scale':<8} {'nodes':>6} {'pairs':>9} {'C ms/tick':>10} {'py ms/tick':>11} "
          f"{'speedup':>8}  identical")
    for name in args.scales.split(","):
        spec = downtown_scale_spec(**SCALES[name])
        graph = build_graph(spec, step=config.step, canvas=config.canvas,
                            default_size=config.default_size,
                            base_font_px=config.base_font_px)
        params = ForceParams()
        y_c, t_c = run_backend(kernels_c, graph, params, args.ticks)
        y_py, t_py = run_backend(kernels_py, graph, params, args.ticks)
        plan_pairs = len(init_positions(graph, params, seed=42).plan.pair_i)
        same = np.array_equal(y_c, y_py)
        print(
            f"{name:<8} {len(graph.nodes):>6} {plan_pairs:>9} "
            f"{1000 * t_c / args.ticks:>10.2f} {1000 * t_py / args.ticks:>11.2f} "
            f"{t_py / t_c:>7.1f}x  {same}"
        )
        if not same:
            print("ERROR: backends disagree", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
