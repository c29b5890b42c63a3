"""Rasterize a PageLayout to a page image plus pixel annotations.

Acceptance of generated data is defined on geometry, not pixels: pixel
output is deterministic per platform given fixed fonts, while annotation
geometry is deterministic everywhere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from PIL import Image, ImageDraw

from . import assets as assets_mod
from .fonts import default_font_map, resolve_font, substitution_record
from .labels import label_id

log = logging.getLogger(__name__)

# US letter at 150 dpi; the short edge comfortably exceeds common detector
# input sizes
DEFAULT_PAGE_PX = (1275, 1650)
PT_PER_INCH = 72.0


@dataclass
class RenderSpec:
    width: int = DEFAULT_PAGE_PX[0]
    height: int = DEFAULT_PAGE_PX[1]
    dpi: float = 150.0
    background: str = "white"
    font_map: dict = field(default_factory=default_font_map)
    antialiasing: bool = True

    def __post_init__(self):
        if self.width < 200 or self.height < 200:
            raise ValueError("page must be at least 200 px on each side")

    def px_box(self, box):
        """Normalized box -> integer [x, y, w, h] pixel box."""
        x = round(box.x * self.width)
        y = round(box.y * self.height)
        w = max(1, round(box.x2 * self.width) - x)
        h = max(1, round(box.y2 * self.height) - y)
        return [x, y, w, h]

    def font_px(self, size_pt):
        return size_pt * self.dpi / PT_PER_INCH


def _wrap(draw, words, font, max_w):
    lines, cur = [], ""
    for word in words:
        if word == "\n":
            lines.append(cur)
            cur = ""
            continue
        trial = f"{cur} {word}".strip()
        if cur and draw.textlength(trial, font=font) > max_w:
            lines.append(cur)
            cur = word
        else:
            cur = trial
    if cur:
        lines.append(cur)
    return lines


def _apply_caps(text, caps):
    if caps == "all-caps" or caps == "small-caps":
        # true small caps need glyph support; full caps is the stand-in
        return text.upper()
    return text


def _draw_text_box(draw, spec, px, font_spec, size_pt, words, align,
                   start_y=None, prefix=None):
    """Wrapped, truncated text inside a pixel box; returns last y drawn."""
    x, y, w, h = px
    size_px = spec.font_px(size_pt)
    line_h = size_px * 1.3
    # shrink to fit at least one line in very short boxes
    if line_h > h:
        size_px = max(5.0, h / 1.3)
        line_h = size_px * 1.3
    font = resolve_font(spec.font_map, font_spec.family, font_spec.weight,
                        font_spec.slant, size_px)
    text_words = list(words)
    if prefix:
        text_words = prefix.split() + text_words
    text_words = [_apply_caps(t, font_spec.caps) for t in text_words]
    lines = _wrap(draw, text_words, font, w - 2)
    max_lines = int(h // line_h)
    if len(lines) > max_lines:
        lines = lines[:max_lines]
        log.debug("text truncated to %d lines", max_lines)
    cy = start_y if start_y is not None else y
    for line in lines:
        if cy + line_h > y + h + 1:
            break
        if align == "center":
            lx = x + (w - draw.textlength(line, font=font)) / 2
        else:
            lx = x
        draw.text((lx, cy), line, fill="black", font=font)
        cy += line_h
    return cy


def _paste_asset(img, ref, px):
    x, y, w, h = px
    asset = assets_mod.materialize(ref)
    scale = min(w / asset.width, h / asset.height)
    # letterbox: preserve the asset aspect ratio inside the box
    tw = max(1, int(asset.width * scale))
    th = max(1, int(asset.height * scale))
    resized = asset.resize((tw, th), Image.LANCZOS)
    img.paste(resized, (x + (w - tw) // 2, y + (h - th) // 2))


def render_page(layout, spec: RenderSpec, text=None, assets=None):
    """Draw every placed element; returns (PIL image, pixel annotations).

    ``text`` and ``assets`` are accepted for interface symmetry; content
    was already bound at compose time and lives in the layout.
    """
    img = Image.new("RGB", (spec.width, spec.height), spec.background)
    draw = ImageDraw.Draw(img)
    annotations = []
    config = layout.config
    for elem in layout.elements:
        px = spec.px_box(elem.box)
        content = elem.content
        if content.get("kind") == "asset":
            _paste_asset(img, content["ref"], px)
        elif content.get("kind") == "text":
            _render_text_element(draw, spec, config, elem, px)
        annotations.append({
            "label": elem.label,
            "category_id": label_id(elem.label),
            "bbox": px,
            "element_id": elem.id,
        })
    return img, annotations


def _role_font(config, role):
    return config.chosen_fonts[role]


def _render_text_element(draw, spec, config, elem, px):
    block = elem.content["block"]
    if elem.label == "title":
        fs, size = _role_font(config, "title")
        _draw_text_box(draw, spec, px, fs, size, block.tokens, fs.alignment)
    elif elem.label == "author":
        fs, size = _role_font(config, "author")
        _draw_text_box(draw, spec, px, fs, size, block.tokens, "center")
    elif elem.label == "abstract":
        hf, hsize = _role_font(config, "abstract_header")
        tf, tsize = _role_font(config, "abstract_text")
        y = _draw_text_box(draw, spec, px, hf, hsize, ["Abstract"], hf.alignment)
        body_px = [px[0], px[1], px[2], px[3]]
        _draw_text_box(draw, spec, body_px, tf, tsize, block.tokens,
                       tf.alignment, start_y=y + 2)
        kw = elem.content.get("keywords")
        if kw is not None and "keywords" in config.chosen_fonts:
            kf, ksize = _role_font(config, "keywords")
            label = elem.content.get("keywords_label") or "Keywords:"
            kw_h = spec.font_px(ksize) * 1.3
            kw_px = [px[0], int(px[1] + px[3] - kw_h), px[2], int(kw_h) + 1]
            if kw_px[1] > y:
                _draw_text_box(draw, spec, kw_px, kf, ksize,
                               list(kw.tokens), "left", prefix=label)
    elif elem.label == "caption":
        nf, nsize = _role_font(config, "caption_number")
        cf, csize = _role_font(config, "caption")
        _draw_text_box(draw, spec, px, cf, csize, block.tokens, cf.alignment,
                       prefix=elem.content.get("prefix"))
    elif elem.label == "body-text":
        heading = elem.content.get("heading")
        start = None
        if heading is not None:
            level = elem.content.get("heading_level", 1)
            hf, hsize = _role_font(config, f"section_{level}")
            start = _draw_text_box(draw, spec, px, hf, hsize,
                                   heading.tokens, hf.alignment)
            start += 2
        bf, bsize = _role_font(config, "body")
        _draw_text_box(draw, spec, px, bf, bsize, block.tokens, bf.alignment,
                       start_y=start)
    else:  # pragma: no cover - non-text elements handled by _paste_asset
        raise ValueError(f"unexpected text element {elem.label!r}")


def render_substitutions(spec: RenderSpec):
    return substitution_record(spec.font_map)
