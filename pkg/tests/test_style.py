import re
import xml.etree.ElementTree as ET

import pytest

from orcha.geometry import SceneModel
from orcha.render import render_spec
from orcha.style import (
    StyleParams,
    SvgDocument,
    axis_blocks,
    emit_svg,
    filter_defs,
)
from svgfilter import SVG_NS, apply_filter, luminance, rect_source


def scene_stub(t0=2.0, t1=9.0, width=400.0, height=300.0) -> SceneModel:
    scene = SceneModel(width=width, height=height, t_min=t0, t_max=t1)
    scene._margin = 20.0
    return scene


class TestAxisBlocks:
    def test_tiling_and_alternation(self):
        scene = scene_stub()
        blocks = axis_blocks((2, 9), 1.0, ("#AAA000", "#BBB000"), "axis", scene)
        assert len(blocks) == 7
        assert [b.fill for b in blocks[:4]] == ["#AAA000", "#BBB000", "#AAA000", "#BBB000"]

    def test_single_block_when_step_exceeds_range(self):
        blocks = axis_blocks((2, 9), 10.0, ("#AAA000", "#BBB000"), "axis", scene_stub())
        assert len(blocks) == 1
        assert blocks[0].fill == "#AAA000"

    def test_background_lane_spans_full_height(self):
        scene = scene_stub()
        blocks = axis_blocks((2, 9), 2.0, ("#AAA000", "#BBB000"), "background", scene)
        assert all(b.y == 0.0 and b.height == scene.height for b in blocks)

    def test_axis_lane_is_bottom_strip(self):
        scene = scene_stub()
        blocks = axis_blocks((2, 9), 2.0, ("#AAA000", "#BBB000"), "axis", scene)
        assert all(b.y + b.height == scene.height for b in blocks)
        assert all(b.height < scene.height for b in blocks)

    def test_default_palette_saturation_rule(self):
        StyleParams()  # must not raise: axis at least as saturated as background

    def test_saturation_rule_enforced(self):
        with pytest.raises(ValueError, match="saturated"):
            StyleParams(
                axis_colors=("#888888", "#999999"),
                background_colors=("#FF0000", "#00FF00"),
            )

    def test_shadow_direction_enforced(self):
        with pytest.raises(ValueError, match="down-left"):
            StyleParams(shadow_dx=3.0, shadow_dy=3.0)


class TestStyleJson:
    def test_round_trip(self):
        style = StyleParams(noise_contrast=0.4, outline_width=3.0, seed=9)
        again = StyleParams.from_json(style.to_json())
        assert again == style

    def test_schema_keys(self):
        data = StyleParams().to_json()
        assert set(data) == {"noise", "outlineWidth", "shadow", "axis", "background", "seed"}
        assert set(data["noise"]) == {"baseFrequency", "octaves", "contrast"}


def _parse(doc: SvgDocument) -> ET.Element:
    return ET.fromstring(doc.text)


def _first_filter(doc: SvgDocument, fid: str) -> ET.Element:
    root = _parse(doc)
    for f in root.iter(f"{SVG_NS}filter"):
        if f.attrib.get("id") == fid:
            return f
    raise KeyError(fid)


class TestFilterDefs:
    def test_same_seed_byte_identical(self):
        assert filter_defs(StyleParams(seed=7)) == filter_defs(StyleParams(seed=7))

    def test_different_seed_differs(self):
        assert filter_defs(StyleParams(seed=7)) != filter_defs(StyleParams(seed=8))

    def test_contrast_zero_noise_stage_is_identity(self):
        doc = emit_svg(scene_stub(), StyleParams(noise_contrast=0.0))
        filt = _first_filter(doc, "f-stream")
        src = rect_source(40, 40, (10, 30, 10, 30))
        # truncate the chain right after the noise multiply
        prims = list(filt)
        keep = []
        for p in prims:
            keep.append(p)
            if p.attrib.get("result") == "noised":
                break
        filt[:] = keep
        out = apply_filter(filt, src)
        inside = out[12:28, 12:28]
        src_inside = src[12:28, 12:28]
        assert abs(inside - src_inside).max() < 1e-9

    def test_inner_shadow_darkens_bottom_left(self):
        doc = emit_svg(scene_stub(), StyleParams(noise_contrast=0.0))
        filt = _first_filter(doc, "f-stream")
        src = rect_source(40, 40, (10, 30, 10, 30))
        out = apply_filter(filt, src)
        bottom_left = luminance(out, (24, 29, 11, 16))
        top_right = luminance(out, (11, 16, 24, 29))
        assert bottom_left < top_right - 0.05

    def test_outer_shadow_below_left_of_rect(self):
        doc = emit_svg(scene_stub(), StyleParams(noise_contrast=0.0))
        filt = _first_filter(doc, "f-stream")
        src = rect_source(40, 40, (10, 30, 10, 30))
        out = apply_filter(filt, src)
        below = out[30:34, 10:28, 3].mean()  # alpha under the rect: shadow
        above = out[6:10, 12:30, 3].mean()
        assert below > above + 0.05


class TestEmitSvg:
    def render_fig2a(self, fig2a_spec, config):
        return render_spec(fig2a_spec, config)

    def test_fig2a_element_counts(self, fig2a_spec, config):
        doc = self.render_fig2a(fig2a_spec, config)
        root = _parse(doc)
        classes = [el.attrib.get("class", "") for el in root.iter()]
        assert classes.count("stream-outline") == 3
        assert classes.count("link-ribbon") == 2
        assert classes.count("link-anchor") == 1
        assert sum(1 for c in classes if c.startswith("label label-")) == 3

    def test_layer_order(self, fig2a_spec, config):
        doc = self.render_fig2a(fig2a_spec, config)
        root = _parse(doc)
        layers = [g.attrib["class"] for g in root.findall(f"{SVG_NS}g")]
        assert layers == [
            "layer-background", "layer-streams", "layer-links", "layer-labels", "layer-axis",
        ]

    def test_empty_scene_still_valid(self):
        doc = emit_svg(scene_stub(), StyleParams())
        root = _parse(doc)
        assert root.tag == f"{SVG_NS}svg"
        layers = [g.attrib["class"] for g in root.findall(f"{SVG_NS}g")]
        assert "layer-background" in layers and "layer-axis" in layers
        assert not list(root.find(f"{SVG_NS}g[@class='layer-streams']"))

    def test_byte_determinism(self, fig2a_spec, config):
        a = render_spec(fig2a_spec, config).data
        b = render_spec(fig2a_spec, config.copy()).data
        assert a == b

    def test_all_idrefs_resolve(self, fig2a_spec, config):
        doc = self.render_fig2a(fig2a_spec, config)
        ids = set(re.findall(r'id="([^"]+)"', doc.text))
        refs = set(re.findall(r'url\(#([^)]+)\)', doc.text))
        refs |= set(re.findall(r'href="#([^"]+)"', doc.text))
        assert refs <= ids

    def test_uppercase_text(self, fig2a_spec, config):
        doc = self.render_fig2a(fig2a_spec, config)
        assert "INSIDE LABEL" in doc.text
        assert "inside label" not in doc.text

    def test_style_never_moves_geometry(self, fig2a_spec, config):
        styled = render_spec(fig2a_spec, config)
        plain_cfg = config.copy()
        plain_cfg.style = StyleParams(effects_enabled=False)
        plain = render_spec(fig2a_spec, plain_cfg)
        assert 'filter="url(' not in plain.text
        d_styled = re.findall(r'class="(?:stream-outline|link-ribbon|link-anchor)"[^/]*? d="([^"]+)"', styled.text)
        d_plain = re.findall(r'class="(?:stream-outline|link-ribbon|link-anchor)"[^/]*? d="([^"]+)"', plain.text)
        assert d_styled and d_styled == d_plain

    def test_two_decimal_precision(self, fig2a_spec, config):
        doc = self.render_fig2a(fig2a_spec, config)
        d = re.search(r'class="stream-outline"[^/]*? d="([^"]+)"', doc.text).group(1)
        for num in re.findall(r"-?\d+\.?\d*", d):
            assert re.fullmatch(r"-?\d+\.\d{2}", num), num
