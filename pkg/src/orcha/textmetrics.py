"""Bundled text metrics so geometry is identical across platforms.

Advance widths (in em, for the default sans face) drive label box fitting and
glyph placement along curved baselines. Rendering engines with real font
access may substitute at paint time only; nothing downstream of geometry may
re-measure text.
"""

from __future__ import annotations

LINE_HEIGHT_EM = 1.2
BOX_PADDING_EM = 0.4  # padding around text metrics on every side

# Advance widths per character class; anything unlisted falls back to AVG_EM
# (the same constant the label-chain width estimate uses).
AVG_EM = 0.6

_WIDTHS = {}
for ch in "iIl.,:;'|!jt()[]f ":
    _WIDTHS[ch] = 0.30
for ch in "r-\"`":
    _WIDTHS[ch] = 0.38
for ch in "abcdeghknopqsuvxyz0123456789":
    _WIDTHS[ch] = 0.56
for ch in "ABCDEFGHJKLNOPQRSTUVXYZ&#$":
    _WIDTHS[ch] = 0.70
for ch in "mwMW@%":
    _WIDTHS[ch] = 0.92


def char_width_em(ch: str) -> float:
    return _WIDTHS.get(ch, AVG_EM)


def text_width_px(text: str, size_em: float, base_font_px: float) -> float:
    """Advance width of *text* at the given size."""
    font_px = size_em * base_font_px
    return sum(char_width_em(ch) for ch in text) * font_px


def text_height_px(size_em: float, base_font_px: float) -> float:
    return LINE_HEIGHT_EM * size_em * base_font_px


def box_height_px(size_em: float, base_font_px: float) -> float:
    """Label box height: one text line plus padding above and below."""
    font_px = size_em * base_font_px
    return text_height_px(size_em, base_font_px) + 2 * BOX_PADDING_EM * font_px


def box_width_px(text: str, size_em: float, base_font_px: float) -> float:
    font_px = size_em * base_font_px
    return text_width_px(text, size_em, base_font_px) + 2 * BOX_PADDING_EM * font_px
