"""Serialize a scene into a styled, byte-deterministic SVG document.

The hand-drawn look is built from standard SVG filter primitives: a seeded
grayscale fractal noise multiplied onto each element's fill, an inner shadow
hugging the bottom-left interior edges, an offset black outer shadow, and a
strong stroke outline. Alternating time blocks are drawn across the full
background and, more saturated, on an axis strip along the bottom edge.

All numeric attributes are written with fixed precision so output bytes are
identical for identical (scene, style, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

from .colors import saturation
from .geometry import Block, LabelShape, PathCommand, SceneModel

FONT_STACK = "Futura, 'Trebuchet MS', Verdana, sans-serif"
AXIS_STRIP_HEIGHT = 18.0
INNER_SHADOW_OPACITY = 0.55
OUTER_SHADOW_OPACITY = 0.45


@dataclass
class StyleParams:
    """Artistic style knobs; JSON schema mirrors the config block."""

    noise_base_frequency: float = 0.02
    noise_octaves: int = 4
    noise_contrast: float = 0.6
    outline_width: float = 2.5
    shadow_dx: float = -3.0
    shadow_dy: float = 3.0
    shadow_blur: float = 2.0
    axis_step: float = 1.0
    axis_colors: tuple[str, str] = ("#E8B84B", "#D96C3F")
    background_step: float = 2.0
    background_colors: tuple[str, str] = ("#F2E8D5", "#E5D9C0")
    seed: int = 42
    effects_enabled: bool = True

    def __post_init__(self):
        if not (self.shadow_dx < 0 and self.shadow_dy > 0):
            raise ValueError("shadow offset must point down-left (dx < 0, dy > 0)")
        if self.axis_step <= 0 or self.background_step <= 0:
            raise ValueError("block steps must be positive")
        axis_sat = sum(saturation(c) for c in self.axis_colors) / len(self.axis_colors)
        bg_sat = sum(saturation(c) for c in self.background_colors) / len(self.background_colors)
        if axis_sat + 1e-9 < bg_sat:
            raise ValueError("axis colors must be at least as saturated as background colors")

    def to_json(self) -> dict:
        return {
            "noise": {
                "baseFrequency": self.noise_base_frequency,
                "octaves": self.noise_octaves,
                "contrast": self.noise_contrast,
            },
            "outlineWidth": self.outline_width,
            "shadow": {"dx": self.shadow_dx, "dy": self.shadow_dy, "blur": self.shadow_blur},
            "axis": {"step": self.axis_step, "colors": list(self.axis_colors)},
            "background": {"step": self.background_step, "colors": list(self.background_colors)},
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "StyleParams":
        kw = {}
        noise = data.get("noise", {})
        if "baseFrequency" in noise:
            kw["noise_base_frequency"] = noise["baseFrequency"]
        if "octaves" in noise:
            kw["noise_octaves"] = noise["octaves"]
        if "contrast" in noise:
            kw["noise_contrast"] = noise["contrast"]
        if "outlineWidth" in data:
            kw["outline_width"] = data["outlineWidth"]
        shadow = data.get("shadow", {})
        for src, dst in (("dx", "shadow_dx"), ("dy", "shadow_dy"), ("blur", "shadow_blur")):
            if src in shadow:
                kw[dst] = shadow[src]
        axis = data.get("axis", {})
        if "step" in axis:
            kw["axis_step"] = axis["step"]
        if "colors" in axis:
            kw["axis_colors"] = tuple(axis["colors"])
        bg = data.get("background", {})
        if "step" in bg:
            kw["background_step"] = bg["step"]
        if "colors" in bg:
            kw["background_colors"] = tuple(bg["colors"])
        if "seed" in data:
            kw["seed"] = data["seed"]
        return cls(**kw)


@dataclass
class SvgDocument:
    text: str
    width: float
    height: float
    defs: str

    @property
    def data(self) -> bytes:
        return self.text.encode("utf-8")


def _f(v: float) -> str:
    if abs(v) < 0.005:
        v = 0.0
    return f"{v:.2f}"


def _path_d(cmds: list[PathCommand]) -> str:
    parts = []
    for cmd in cmds:
        if cmd[0] == "M":
            parts.append(f"M {_f(cmd[1][0])} {_f(cmd[1][1])}")
        elif cmd[0] == "L":
            parts.append(f"L {_f(cmd[1][0])} {_f(cmd[1][1])}")
        elif cmd[0] == "C":
            (c1, c2, p) = cmd[1], cmd[2], cmd[3]
            parts.append(
                f"C {_f(c1[0])} {_f(c1[1])} {_f(c2[0])} {_f(c2[1])} {_f(p[0])} {_f(p[1])}"
            )
        elif cmd[0] == "Z":
            parts.append("Z")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# blocks

def axis_blocks(
    t_range: tuple[float, float],
    step: float,
    colors: tuple[str, str],
    lane: str,
    scene: SceneModel,
) -> list[Block]:
    """Alternating-color time blocks tiled from the range start.

    ``lane="background"`` spans the full canvas height behind everything;
    ``lane="axis"`` is the fixed-height strip along the bottom edge.
    """
    if step <= 0:
        raise ValueError("block step must be positive")
    t0, t1 = t_range
    span = t1 - t0
    count = max(1, math.ceil(span / step - 1e-9))
    if lane == "axis":
        y, h = scene.height - AXIS_STRIP_HEIGHT, AXIS_STRIP_HEIGHT
    else:
        y, h = 0.0, scene.height
    blocks = []
    for i in range(count):
        ta = t0 + i * step
        tb = min(ta + step, t1)
        xa, xb = scene.time_to_px(ta), scene.time_to_px(tb)
        blocks.append(Block(x=xa, y=y, width=max(xb - xa, 0.0), height=h, fill=colors[i % 2]))
    return blocks


# ---------------------------------------------------------------------------
# filters

def _one_filter(fid: str, style: StyleParams, seed: int) -> str:
    c = style.noise_contrast
    slope, intercept = c, 1.0 - 0.5 * c
    dx, dy = style.shadow_dx, style.shadow_dy
    blur = style.shadow_blur
    funcs = "\n".join(
        f'      <feFunc{ch} type="linear" slope="{_f(slope)}" intercept="{_f(intercept)}"/>'
        for ch in "RGB"
    )
    # the inner band uses the negated offset so the darkened interior edge
    # sits bottom-left, matching the outer shadow direction
    return f'''  <filter id="{fid}" x="-25%" y="-25%" width="150%" height="150%">
    <feTurbulence type="fractalNoise" baseFrequency="{style.noise_base_frequency:g}" numOctaves="{style.noise_octaves}" seed="{seed}" result="noise"/>
    <feColorMatrix in="noise" type="saturate" values="0" result="gray"/>
    <feComponentTransfer in="gray" result="mul">
{funcs}
      <feFuncA type="linear" slope="0" intercept="1"/>
    </feComponentTransfer>
    <feComposite in="mul" in2="SourceGraphic" operator="arithmetic" k1="1" k2="0" k3="0" k4="0" result="noised"/>
    <feOffset in="SourceAlpha" dx="{_f(-dx)}" dy="{_f(-dy)}" result="ioff"/>
    <feGaussianBlur in="ioff" stdDeviation="{_f(blur)}" result="iblur"/>
    <feComposite in="SourceAlpha" in2="iblur" operator="out" result="iband"/>
    <feFlood flood-color="#000000" flood-opacity="{INNER_SHADOW_OPACITY}" result="iink"/>
    <feComposite in="iink" in2="iband" operator="in" result="ishadow"/>
    <feComposite in="ishadow" in2="noised" operator="over" result="shaded"/>
    <feOffset in="SourceAlpha" dx="{_f(dx)}" dy="{_f(dy)}" result="ooff"/>
    <feGaussianBlur in="ooff" stdDeviation="{_f(blur)}" result="oblur"/>
    <feFlood flood-color="#000000" flood-opacity="{OUTER_SHADOW_OPACITY}" result="oink"/>
    <feComposite in="oink" in2="oblur" operator="in" result="oshadow"/>
    <feMerge>
      <feMergeNode in="oshadow"/>
      <feMergeNode in="shaded"/>
    </feMerge>
  </filter>'''


def filter_defs(style: StyleParams) -> str:
    """One reusable filter chain per element class (stream, link, label)."""
    return "\n".join(
        _one_filter(f"f-{name}", style, style.seed + off)
        for off, name in enumerate(("stream", "link", "label"))
    )


# ---------------------------------------------------------------------------
# document emission

def emit_svg(scene: SceneModel, style: StyleParams, canvas=None) -> SvgDocument:
    """Serialize the scene: background blocks, streams (outer to inner),
    links, labels, then the axis strip."""
    width = canvas.width if canvas is not None else scene.width
    height = canvas.height if canvas is not None else scene.height
    styled = style.effects_enabled
    stroke = (
        f' stroke="#000000" stroke-width="{_f(style.outline_width)}" stroke-linejoin="round"'
        if styled
        else ""
    )

    def filt(name: str) -> str:
        return f' filter="url(#f-{name})"' if styled else ""

    stream_index = {sh.stream_id: i for i, sh in enumerate(scene.streams)}

    defs_parts = []
    if styled:
        defs_parts.append(filter_defs(style))
    clip_parents = {sh.parent_id for sh in scene.streams if sh.parent_id is not None}
    for sh in scene.streams:
        if sh.stream_id in clip_parents:
            defs_parts.append(
                f'  <clipPath id="clip-{stream_index[sh.stream_id]}">\n'
                f'    <path d="{_path_d(sh.path)}"/>\n'
                "  </clipPath>"
            )
    for lab in scene.labels:
        if lab.baseline is not None:
            defs_parts.append(
                f'  <path id="lblpath-{lab.index}" d="{_path_d(lab.baseline)}" fill="none"/>'
            )
    defs = "\n".join(defs_parts)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
        f'width="{_f(width)}" height="{_f(height)}" viewBox="0 0 {_f(width)} {_f(height)}">',
        "<defs>",
        defs,
        "</defs>",
    ]

    if not scene.background_blocks and not scene.axis_blocks:
        _attach_blocks(scene, style)

    out.append('<g class="layer-background">')
    for b in scene.background_blocks:
        out.append(
            f'  <rect x="{_f(b.x)}" y="{_f(b.y)}" width="{_f(b.width)}" '
            f'height="{_f(b.height)}" fill="{b.fill}"/>'
        )
    out.append("</g>")

    out.append('<g class="layer-streams">')
    for sh in scene.streams:
        clip = ""
        if sh.parent_id is not None and sh.parent_id in stream_index:
            clip = f' clip-path="url(#clip-{stream_index[sh.parent_id]})"'
        out.append(
            f'  <path class="stream-outline" data-stream={quoteattr(sh.stream_id)} '
            f'd="{_path_d(sh.path)}" fill="{sh.fill}"{stroke}{filt("stream")}{clip}/>'
        )
    out.append("</g>")

    out.append('<g class="layer-links">')
    for lk in scene.links:
        out.append(
            f'  <path class="link-ribbon" d="{_path_d(lk.path)}" '
            f'fill="{lk.fill}"{stroke}{filt("link")}/>'
        )
    for an in scene.anchors:
        out.append(
            f'  <path class="link-anchor" d="{_path_d(an.path)}" '
            f'fill="{an.fill}"{stroke}{filt("link")}/>'
        )
    out.append("</g>")

    out.append('<g class="layer-labels">')
    for lab in scene.labels:
        out.append(_emit_label(lab, style, styled, filt))
    out.append("</g>")

    out.append('<g class="layer-axis">')
    for b in scene.axis_blocks:
        out.append(
            f'  <rect x="{_f(b.x)}" y="{_f(b.y)}" width="{_f(b.width)}" '
            f'height="{_f(b.height)}" fill="{b.fill}"{stroke if styled else ""}{filt("label")}/>'
        )
    out.append("</g>")

    out.append("</svg>")
    text = "\n".join(out) + "\n"
    return SvgDocument(text=text, width=width, height=height, defs=defs)


def _attach_blocks(scene: SceneModel, style: StyleParams) -> None:
    t_range = (scene.t_min, scene.t_max)
    scene.background_blocks = axis_blocks(
        t_range, style.background_step, style.background_colors, "background", scene
    )
    scene.axis_blocks = axis_blocks(t_range, style.axis_step, style.axis_colors, "axis", scene)


def _emit_label(lab: LabelShape, style: StyleParams, styled: bool, filt) -> str:
    text = escape(lab.label.text.upper())
    parts = [f'  <g class="label label-{lab.label.type}">']
    if lab.connector is not None:
        (x1, y1), (x2, y2) = lab.connector
        parts.append(
            f'    <line class="label-connector" x1="{_f(x1)}" y1="{_f(y1)}" '
            f'x2="{_f(x2)}" y2="{_f(y2)}" stroke="{lab.color}" '
            f'stroke-width="{_f(max(1.5, style.outline_width * 0.8)) if styled else "1.00"}"/>'
        )
    if lab.box is not None:
        if lab.box[0] == "ellipse":
            _, cx, cy, rx, ry = lab.box
            parts.append(
                f'    <ellipse cx="{_f(cx)}" cy="{_f(cy)}" rx="{_f(rx)}" ry="{_f(ry)}" '
                f'fill="{lab.box_fill}"'
                + (f' stroke="#000000" stroke-width="{_f(style.outline_width)}"' if styled else "")
                + f'{filt("label")}/>'
            )
        else:
            _, x, y, w, h = lab.box
            parts.append(
                f'    <rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
                f'fill="{lab.box_fill}"'
                + (f' stroke="#000000" stroke-width="{_f(style.outline_width)}"' if styled else "")
                + f'{filt("label")}/>'
            )
    font = f'font-family="{FONT_STACK}" font-size="{_f(lab.font_px)}" fill="#000000"'
    if lab.baseline is not None:
        parts.append(
            f'    <text {font}><textPath href="#lblpath-{lab.index}" '
            f'startOffset="{_f(lab.text_offset)}">{text}</textPath></text>'
        )
    elif lab.anchor_pos is not None:
        x, y = lab.anchor_pos
        parts.append(
            f'    <text x="{_f(x)}" y="{_f(y)}" {font} text-anchor="middle" '
            f'dominant-baseline="central">{text}</text>'
        )
    parts.append("  </g>")
    return "\n".join(parts)
