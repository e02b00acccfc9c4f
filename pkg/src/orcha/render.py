"""End-to-end pipeline: spec -> graph -> layout -> scene -> SVG.

The CLI and the HTTP service both render through this module, which is what
makes their outputs byte-identical for equal inputs.
"""

from __future__ import annotations

from .config import RenderConfig
from .geometry import SceneModel, build_scene
from .graph import LayoutGraph, build_graph
from .layout import SimulationState, init_positions, run
from .model import ChartSpec
from .style import SvgDocument, axis_blocks, emit_svg


def layout_spec(spec: ChartSpec, config: RenderConfig) -> tuple[LayoutGraph, SimulationState]:
    """Build the graph and run the force layout to convergence."""
    graph = build_graph(
        spec,
        step=config.step,
        canvas=config.canvas,
        default_size=config.default_size,
        base_font_px=config.base_font_px,
    )
    state = init_positions(graph, config.force, config.canvas, seed=config.seed)
    run(state, graph, config.force, config.canvas)
    return graph, state


def scene_from_layout(
    spec: ChartSpec, graph: LayoutGraph, state: SimulationState, config: RenderConfig
) -> SceneModel:
    scene = build_scene(
        spec, graph, state.y, base_font_px=config.base_font_px, box_shape=config.box_shape
    )
    t_range = (scene.t_min, scene.t_max)
    scene.background_blocks = axis_blocks(
        t_range, config.style.background_step, config.style.background_colors, "background", scene
    )
    scene.axis_blocks = axis_blocks(
        t_range, config.style.axis_step, config.style.axis_colors, "axis", scene
    )
    return scene


def render_layout(
    spec: ChartSpec, graph: LayoutGraph, state: SimulationState, config: RenderConfig
) -> SvgDocument:
    """Serialize an already-computed layout (used by the live service)."""
    scene = scene_from_layout(spec, graph, state, config)
    return emit_svg(scene, config.style)


def render_spec(spec: ChartSpec, config: RenderConfig) -> SvgDocument:
    """Cold render: full layout from scratch, then serialize."""
    graph, state = layout_spec(spec, config)
    return render_layout(spec, graph, state, config)
