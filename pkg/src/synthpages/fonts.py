"""Logical font families mapped to loadable font files.

Licensed fonts (Times New Roman, Helvetica) are substituted by metrically
similar open fonts; the substitution actually used is recorded in the
corpus manifest.  A custom map file (YAML: family -> {variant: path}) can
override the defaults.
"""

from __future__ import annotations

import functools
import os
from pathlib import Path

import yaml
from PIL import ImageFont

_SEARCH_DIRS = [
    "/usr/share/fonts/truetype/dejavu",
    "/usr/share/fonts/truetype",
    "/usr/share/fonts",
]
try:  # matplotlib bundles a complete DejaVu set including italics
    import matplotlib
    _SEARCH_DIRS.insert(0, os.path.join(matplotlib.get_data_path(), "fonts", "ttf"))
except ImportError:
    pass

# variant key: (weight, slant)
_VARIANT_FILES = {
    "serif": {
        ("regular", "upright"): "DejaVuSerif.ttf",
        ("bold", "upright"): "DejaVuSerif-Bold.ttf",
        ("regular", "italic"): "DejaVuSerif-Italic.ttf",
        ("bold", "italic"): "DejaVuSerif-BoldItalic.ttf",
    },
    "sans": {
        ("regular", "upright"): "DejaVuSans.ttf",
        ("bold", "upright"): "DejaVuSans-Bold.ttf",
        ("regular", "italic"): "DejaVuSans-Oblique.ttf",
        ("bold", "italic"): "DejaVuSans-BoldOblique.ttf",
    },
    "mono": {
        ("regular", "upright"): "DejaVuSansMono.ttf",
        ("bold", "upright"): "DejaVuSansMono-Bold.ttf",
        ("regular", "italic"): "DejaVuSansMono-Oblique.ttf",
        ("bold", "italic"): "DejaVuSansMono-BoldOblique.ttf",
    },
}

# logical families appearing in profiles -> substitute group
FAMILY_GROUPS = {
    "times new roman": "serif",
    "times": "serif",
    "helvetica": "sans",
    "courier": "mono",
}


class FontResolutionError(RuntimeError):
    pass


def _find_file(name):
    for d in _SEARCH_DIRS:
        p = Path(d) / name
        if p.is_file():
            return str(p)
    return None


@functools.lru_cache(maxsize=1)
def default_font_map():
    """family -> {(weight, slant): path}; falls back to upright variants."""
    fmap = {}
    for family, group in FAMILY_GROUPS.items():
        variants = {}
        for key, fname in _VARIANT_FILES[group].items():
            path = _find_file(fname)
            if path:
                variants[key] = path
        if ("regular", "upright") not in variants:
            raise FontResolutionError(
                f"no font file found for family {family!r} (searched {_SEARCH_DIRS})")
        fmap[family] = variants
    return fmap


def load_font_map(path):
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    fmap = {}
    for family, variants in raw.items():
        fmap[family.lower()] = {
            (v.get("weight", "regular"), v.get("slant", "upright")): v["path"]
            for v in variants
        }
    return fmap


def resolve_font(font_map, family, weight, slant, size_px):
    variants = font_map.get(family.lower())
    if variants is None:
        raise FontResolutionError(f"unmapped font family {family!r}")
    path = (variants.get((weight, slant))
            or variants.get((weight, "upright"))
            or variants.get(("regular", slant))
            or variants.get(("regular", "upright")))
    if path is None:
        raise FontResolutionError(f"no usable variant for {family!r}")
    return ImageFont.truetype(path, max(4, int(round(size_px))))


def substitution_record(font_map):
    """What each logical family actually resolves to, for the manifest."""
    return {
        family: os.path.basename(variants[("regular", "upright")])
        for family, variants in font_map.items()
    }
