"""Seeded sampling of concrete page configurations from a style profile.

All randomness flows from an explicit (seed, stream_id) pair through a
counter-based generator, so pages can be drawn independently and in
parallel with bit-identical results across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .style import FontSpec, PlacementSpec, Range, StyleProfile

_MASK64 = (1 << 64) - 1

COLUMN_FIT_TOL = 0.01
COLUMN_RESAMPLE_ATTEMPTS = 100


class GeometryError(ValueError):
    """Margins plus minimum column widths cannot fit on the page."""


@dataclass(frozen=True)
class RngSeed:
    """Key for one independent random stream (stream_id = page index)."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def split(self, lane: int) -> "RngSeed":
        # decorrelate sub-streams without touching the page stream itself
        mixed = (self.stream_id * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03 * (lane + 1)) & _MASK64
        return RngSeed(self.seed, mixed)


def _rng(seed):
    return seed.generator() if isinstance(seed, RngSeed) else seed


def uniform(rng, r: Range) -> float:
    if r.min == r.max:
        return r.min
    return float(rng.uniform(r.min, r.max))


def uniform_int(rng, r: Range) -> int:
    return int(rng.integers(int(r.min), int(r.max) + 1))


def choose(rng, options):
    return options[int(rng.integers(len(options)))]


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box, top-left origin, normalized page fractions."""

    x: float
    y: float
    w: float
    h: float

    @property
    def x2(self):
        return self.x + self.w

    @property
    def y2(self):
        return self.y + self.h

    @property
    def cx(self):
        return self.x + self.w / 2

    @property
    def cy(self):
        return self.y + self.h / 2

    @property
    def area(self):
        return self.w * self.h

    def intersection_area(self, other: "BBox") -> float:
        iw = min(self.x2, other.x2) - max(self.x, other.x)
        ih = min(self.y2, other.y2) - max(self.y, other.y)
        if iw <= 0 or ih <= 0:
            return 0.0
        return iw * ih

    def clamped(self, x0=0.0, y0=0.0, x1=1.0, y1=1.0) -> "BBox":
        """Shift (and if necessary shrink) the box into [x0,x1] x [y0,y1]."""
        w = min(self.w, x1 - x0)
        h = min(self.h, y1 - y0)
        x = min(max(self.x, x0), x1 - w)
        y = min(max(self.y, y0), y1 - h)
        return BBox(x, y, w, h)

    def valid(self):
        return (self.x >= -1e-9 and self.y >= -1e-9 and self.w > 0 and self.h > 0
                and self.x2 <= 1 + 1e-9 and self.y2 <= 1 + 1e-9)


@dataclass
class PageConfig:
    """One concrete draw from a StyleProfile."""

    profile: StyleProfile
    page_kind: str                      # "title" | "inner"
    top: float
    bottom: float
    left: float
    right: float
    column_width: float
    column_spacing: float
    element_counts: dict                # count name -> int
    chosen_fonts: dict                  # role -> (FontSpec, resolved size_pt)
    chosen_distances: dict              # distance name -> float
    abstract_layout: str = "left-column"
    keywords_line: object = None        # None or {"label": ...}
    teaser: bool = False

    @property
    def usable_width(self):
        return self.right - self.left

    @property
    def usable_height(self):
        return self.bottom - self.top

    def column_x(self, index):
        return self.left + index * (self.column_width + self.column_spacing)

    def validate(self):
        p = self.profile
        assert self.page_kind in ("title", "inner")
        assert p.top_margin.contains(self.top)
        assert p.bottom_edge.contains(self.bottom)
        assert p.left_margin.contains(self.left)
        assert p.right_edge.contains(self.right)
        assert self.usable_width > 0 and self.usable_height > 0
        assert p.column_width.contains(self.column_width)
        assert 2 * self.column_width + self.column_spacing <= self.usable_width + COLUMN_FIT_TOL
        for key, n in self.element_counts.items():
            assert p.element_counts[key].contains(n)
        for name, value in self.chosen_distances.items():
            assert p.distances[name].contains(value)
        return self


def _sample_geometry(rng, profile):
    """Margins and columns drawn jointly until two columns fit.

    Each range is a per-parameter envelope, so joint extremes (widest
    margins with widest columns) need not be feasible together; resampling
    the whole tuple keeps every scalar inside its own range.
    """
    best_usable = profile.right_edge.max - profile.left_margin.min
    if 2 * profile.column_width.min + profile.column_spacing.min \
            > best_usable + COLUMN_FIT_TOL:
        raise GeometryError(
            f"minimum columns never fit: need "
            f"{2 * profile.column_width.min + profile.column_spacing.min:.3f}, "
            f"best usable width {best_usable:.3f}")
    for _ in range(COLUMN_RESAMPLE_ATTEMPTS):
        top = uniform(rng, profile.top_margin)
        bottom = uniform(rng, profile.bottom_edge)
        left = uniform(rng, profile.left_margin)
        right = uniform(rng, profile.right_edge)
        if bottom - top <= 0 or right - left <= 0:
            continue
        cw = uniform(rng, profile.column_width)
        cs = uniform(rng, profile.column_spacing)
        if 2 * cw + cs <= right - left + COLUMN_FIT_TOL:
            return top, bottom, left, right, cw, cs
    # fall back to the most permissive corner of the envelopes
    top = profile.top_margin.min
    bottom = profile.bottom_edge.max
    left = profile.left_margin.min
    right = profile.right_edge.max
    cw = profile.column_width.min
    cs = max(profile.column_spacing.min,
             min(right - left - 2 * cw, profile.column_spacing.max))
    return top, bottom, left, right, cw, cs


def sample_page_config(profile: StyleProfile, seed) -> PageConfig:
    """Draw a full page configuration; scalars uniform within their ranges."""
    rng = _rng(seed)
    counts = profile.page_type_counts
    total = counts["title"] + counts["inner"]
    page_kind = "title" if rng.random() < counts["title"] / total else "inner"

    top, bottom, left, right, cw, cs = _sample_geometry(rng, profile)

    element_counts = {
        key: uniform_int(rng, r) for key, r in sorted(profile.element_counts.items())
    }
    chosen_fonts = {}
    for role in sorted(profile.fonts):
        spec = choose(rng, profile.fonts[role])
        size = uniform_int(rng, spec.size_pt)
        chosen_fonts[role] = (spec, size)
    chosen_distances = {
        name: uniform(rng, r) for name, r in sorted(profile.distances.items())
    }
    abstract_layout = choose(rng, sorted(profile.abstract_layouts))
    keywords_line = choose(rng, profile.keywords_options)
    teaser = bool(rng.random() < profile.teaser_probability)

    return PageConfig(
        profile=profile,
        page_kind=page_kind,
        top=top,
        bottom=bottom,
        left=left,
        right=right,
        column_width=cw,
        column_spacing=cs,
        element_counts=element_counts,
        chosen_fonts=chosen_fonts,
        chosen_distances=chosen_distances,
        abstract_layout=abstract_layout,
        keywords_line=keywords_line,
        teaser=teaser,
    ).validate()


def sample_placement(spec: PlacementSpec, seed) -> BBox:
    """Sample a box from a placement slot, clamped into the unit page."""
    rng = _rng(seed)
    cx = uniform(rng, spec.center_x)
    cy = uniform(rng, spec.center_y)
    w = uniform(rng, spec.width)
    h = uniform(rng, spec.height)
    return BBox(cx - w / 2, cy - h / 2, w, h).clamped()
