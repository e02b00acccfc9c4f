"""Render configuration: canvas, discretization, force and style parameters.

Loaded from a JSON file (camelCase keys, matching the HTTP API), overridden
by CLI flags; the ORCHA_SEED environment variable trumps both so CI renders
are reproducible.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

from .graph import Canvas
from .layout import ForceParams
from .style import StyleParams


@dataclass
class RenderConfig:
    canvas: Canvas = field(default_factory=Canvas)
    step: float = 1.0
    default_size: float = 5.0
    base_font_px: float = 16.0
    box_shape: str = "ellipse"  # default label box: ellipse | rect
    seed: int = 42
    force: ForceParams = field(default_factory=ForceParams)
    style: StyleParams = field(default_factory=StyleParams)

    def copy(self) -> "RenderConfig":
        return RenderConfig(
            canvas=replace(self.canvas),
            step=self.step,
            default_size=self.default_size,
            base_font_px=self.base_font_px,
            box_shape=self.box_shape,
            seed=self.seed,
            force=replace(self.force, stiffness=dict(self.force.stiffness)),
            style=replace(self.style),
        )


def force_from_json(data: dict) -> ForceParams:
    p = ForceParams()
    mapping = {
        "gravity": "gravity",
        "repulsion": "repulsion",
        "repulsionCutoff": "repulsion_cutoff",
        "springRestLength": "spring_rest_length",
        "velocityDecay": "velocity_decay",
        "alphaStart": "alpha_start",
        "alphaDecay": "alpha_decay",
        "alphaMin": "alpha_min",
        "maxTicks": "max_ticks",
        "padding": "padding",
    }
    kw = {attr: data[key] for key, attr in mapping.items() if key in data}
    if "stiffness" in data:
        kw["stiffness"] = {**p.stiffness, **data["stiffness"]}
    return replace(p, **kw)


def force_to_json(p: ForceParams) -> dict:
    return {
        "gravity": p.gravity,
        "repulsion": p.repulsion,
        "repulsionCutoff": p.repulsion_cutoff,
        "stiffness": dict(p.stiffness),
        "springRestLength": p.spring_rest_length,
        "velocityDecay": p.velocity_decay,
        "alphaDecay": p.alpha_decay,
        "alphaStart": p.alpha_start,
        "alphaMin": p.alpha_min,
        "maxTicks": p.max_ticks,
        "padding": p.padding,
    }


def config_from_json(data: dict) -> RenderConfig:
    cfg = RenderConfig()
    canvas = data.get("canvas", {})
    cfg.canvas = Canvas(
        width=canvas.get("width", cfg.canvas.width),
        height=canvas.get("height", cfg.canvas.height),
        margin=canvas.get("margin", cfg.canvas.margin),
    )
    cfg.step = data.get("step", cfg.step)
    cfg.default_size = data.get("defaultSize", cfg.default_size)
    cfg.base_font_px = data.get("baseFontPx", cfg.base_font_px)
    cfg.box_shape = data.get("boxShape", cfg.box_shape)
    cfg.seed = data.get("seed", cfg.seed)
    if "force" in data:
        cfg.force = force_from_json(data["force"])
    if "style" in data:
        cfg.style = StyleParams.from_json(data["style"])
    return cfg


def config_to_json(cfg: RenderConfig) -> dict:
    return {
        "canvas": {
            "width": cfg.canvas.width,
            "height": cfg.canvas.height,
            "margin": cfg.canvas.margin,
        },
        "step": cfg.step,
        "defaultSize": cfg.default_size,
        "baseFontPx": cfg.base_font_px,
        "boxShape": cfg.box_shape,
        "seed": cfg.seed,
        "force": force_to_json(cfg.force),
        "style": cfg.style.to_json(),
    }


def load_config(path: str | None = None, overrides: dict | None = None) -> RenderConfig:
    """Build the effective config: file, then overrides, then ORCHA_SEED."""
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = config_from_json(json.load(fh))
    else:
        cfg = RenderConfig()
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in ("width", "height"):
            setattr(cfg.canvas, key, float(value))
        elif key == "seed":
            cfg.seed = int(value)
            cfg.style = replace(cfg.style, seed=int(value))
        else:
            setattr(cfg, key, value)
    env_seed = os.environ.get("ORCHA_SEED")
    if env_seed is not None:
        cfg.seed = int(env_seed)
        cfg.style = replace(cfg.style, seed=int(env_seed))
    return cfg
