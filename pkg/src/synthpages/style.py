"""Style profiles: the per-venue randomization parameter space.

A profile is a human-editable YAML file (``*.profile``) holding min/max
ranges for page geometry, element counts, placement slots, inter-element
distances, and font choices.  All geometric quantities are normalized to
page width or height; pixel conversion happens in the renderer.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field, replace

import yaml

from .labels import CLASS_LABELS

PLACEMENT_SLOTS = ("mini", "left", "right", "center")
FONT_WEIGHTS = ("regular", "bold")
FONT_SLANTS = ("upright", "italic")
FONT_CAPS = ("none", "small-caps", "all-caps")
FONT_ALIGNMENTS = ("left", "center", "distributed")
ABSTRACT_LAYOUTS = ("left-column", "two-column")
CAPTION_SIDES = ("above", "below")

DISTANCE_NAMES = (
    "title_author",
    "author_abstract",
    "abstract_text",
    "header_title",
    "image_caption",
    "image_text",
)

FONT_ROLES = (
    "title",
    "author",
    "abstract_header",
    "abstract_text",
    "section_1",
    "section_2",
    "section_3",
    "body",
    "caption",
    "caption_number",
    "keywords",
)


class ProfileError(ValueError):
    """Raised when a profile file fails validation; names the bad field."""


@dataclass(frozen=True)
class Range:
    min: float
    max: float

    def validate(self, name="range", integer=False, unit=True):
        if self.min > self.max:
            raise ProfileError(f"{name}: min > max ({self.min} > {self.max})")
        if self.min < 0:
            raise ProfileError(f"{name}: min < 0 ({self.min})")
        if unit and not integer and self.max > 1:
            raise ProfileError(f"{name}: max > 1 ({self.max})")
        if integer and (self.min != int(self.min) or self.max != int(self.max)):
            raise ProfileError(f"{name}: expected integer bounds, got {self}")

    def contains(self, value, tol=0.0):
        return self.min - tol <= value <= self.max + tol

    def hull(self, other):
        return Range(min(self.min, other.min), max(self.max, other.max))

    def as_list(self):
        return [self.min, self.max]


@dataclass(frozen=True)
class PlacementSpec:
    slot: str
    center_x: Range
    center_y: Range
    width: Range
    height: Range

    def validate(self, name):
        if self.slot not in PLACEMENT_SLOTS:
            raise ProfileError(f"{name}: unknown slot {self.slot!r}")
        for part in ("center_x", "center_y", "width", "height"):
            getattr(self, part).validate(f"{name}.{part}")


@dataclass(frozen=True)
class FontSpec:
    family: str
    size_pt: Range
    weight: str = "regular"
    slant: str = "upright"
    caps: str = "none"
    alignment: str = "left"

    def validate(self, name):
        if not self.family:
            raise ProfileError(f"{name}: empty font family")
        self.size_pt.validate(f"{name}.size_pt", integer=True, unit=False)
        if self.size_pt.min < 4:
            raise ProfileError(f"{name}: size_pt.min < 4")
        if self.weight not in FONT_WEIGHTS:
            raise ProfileError(f"{name}: bad weight {self.weight!r}")
        if self.slant not in FONT_SLANTS:
            raise ProfileError(f"{name}: bad slant {self.slant!r}")
        if self.caps not in FONT_CAPS:
            raise ProfileError(f"{name}: bad caps {self.caps!r}")
        if self.alignment not in FONT_ALIGNMENTS:
            raise ProfileError(f"{name}: bad alignment {self.alignment!r}")


@dataclass(frozen=True)
class CaptionSpec:
    center_y: Range
    width: Range
    height: Range
    figure_side: tuple = ("below",)
    table_side: tuple = ("below",)
    algorithm_side: tuple = ("above",)

    def validate(self, name="caption"):
        for part in ("center_y", "width", "height"):
            getattr(self, part).validate(f"{name}.{part}")
        for part in ("figure_side", "table_side", "algorithm_side"):
            for side in getattr(self, part):
                if side not in CAPTION_SIDES:
                    raise ProfileError(f"{name}.{part}: bad side {side!r}")


@dataclass(frozen=True)
class StyleProfile:
    name: str
    # margins are edge positions: top/left are offsets from the page origin,
    # bottom/right are the far edge positions, all as page fractions
    top_margin: Range
    bottom_edge: Range
    left_margin: Range
    right_edge: Range
    column_width: Range
    column_spacing: Range
    page_type_counts: dict          # {"title": int, "inner": int}
    element_counts: dict            # name -> Range (integer)
    placements: dict                # class -> tuple of PlacementSpec
    abstract_layouts: dict          # layout name -> {"width": Range, "height": Range}
    caption: CaptionSpec
    distances: dict                 # distance name -> Range
    fonts: dict                     # role -> tuple of FontSpec
    keywords_options: tuple = (None,)   # entries: None or {"label": str}
    teaser_probability: float = 0.1

    def validate(self):
        for part in ("top_margin", "bottom_edge", "left_margin", "right_edge",
                     "column_width", "column_spacing"):
            getattr(self, part).validate(part)
        for kind in ("title", "inner"):
            n = self.page_type_counts.get(kind)
            if n is None or n < 0:
                raise ProfileError(f"page_type_counts.{kind}: missing or negative")
        for key, rng in self.element_counts.items():
            rng.validate(f"element_counts.{key}", integer=True, unit=False)
        for cls, specs in self.placements.items():
            if cls not in CLASS_LABELS:
                raise ProfileError(f"placements: unknown class {cls!r}")
            for i, spec in enumerate(specs):
                spec.validate(f"placements.{cls}[{i}]")
        for layout, dims in self.abstract_layouts.items():
            if layout not in ABSTRACT_LAYOUTS:
                raise ProfileError(f"abstract_layouts: unknown layout {layout!r}")
            dims["width"].validate(f"abstract.{layout}.width")
            dims["height"].validate(f"abstract.{layout}.height")
        if not self.abstract_layouts:
            raise ProfileError("abstract_layouts: at least one layout required")
        self.caption.validate()
        for dist in DISTANCE_NAMES:
            if dist not in self.distances:
                raise ProfileError(f"distances.{dist}: missing")
            self.distances[dist].validate(f"distances.{dist}")
        for role in FONT_ROLES:
            if role == "keywords":
                continue
            if role not in self.fonts or not self.fonts[role]:
                raise ProfileError(f"fonts.{role}: missing")
        for role, specs in self.fonts.items():
            for i, spec in enumerate(specs):
                spec.validate(f"fonts.{role}[{i}]")
        if not 0.0 <= self.teaser_probability <= 1.0:
            raise ProfileError("teaser_probability: outside [0, 1]")
        return self


# ---------------------------------------------------------------------------
# serialization

def _range(value, name):
    if (not isinstance(value, (list, tuple))) or len(value) != 2:
        raise ProfileError(f"{name}: expected [min, max], got {value!r}")
    return Range(float(value[0]), float(value[1]))


def _font(d, name):
    return FontSpec(
        family=d.get("family", ""),
        size_pt=_range(d.get("size"), f"{name}.size"),
        weight=d.get("weight", "regular"),
        slant=d.get("slant", "upright"),
        caps=d.get("caps", "none"),
        alignment=d.get("alignment", "left"),
    )


def profile_from_dict(raw):
    try:
        page = raw["page"]
        placements = {}
        for cls, specs in raw.get("placements", {}).items():
            placements[cls] = tuple(
                PlacementSpec(
                    slot=s["slot"],
                    center_x=_range(s["center_x"], f"placements.{cls}.center_x"),
                    center_y=_range(s["center_y"], f"placements.{cls}.center_y"),
                    width=_range(s["width"], f"placements.{cls}.width"),
                    height=_range(s["height"], f"placements.{cls}.height"),
                )
                for s in specs
            )
        abstract_layouts = {
            layout: {
                "width": _range(dims["width"], f"abstract.{layout}.width"),
                "height": _range(dims["height"], f"abstract.{layout}.height"),
            }
            for layout, dims in raw["abstract"].items()
        }
        cap = raw["caption"]
        caption = CaptionSpec(
            center_y=_range(cap["center_y"], "caption.center_y"),
            width=_range(cap["width"], "caption.width"),
            height=_range(cap["height"], "caption.height"),
            figure_side=tuple(cap.get("figure_side", ["below"])),
            table_side=tuple(cap.get("table_side", ["below"])),
            algorithm_side=tuple(cap.get("algorithm_side", ["above"])),
        )
        fonts = {
            role: tuple(_font(f, f"fonts.{role}") for f in specs)
            for role, specs in raw["fonts"].items()
        }
        keywords = tuple(raw.get("keywords", [None]))
        profile = StyleProfile(
            name=raw["name"],
            top_margin=_range(page["top_margin"], "page.top_margin"),
            bottom_edge=_range(page["bottom_edge"], "page.bottom_edge"),
            left_margin=_range(page["left_margin"], "page.left_margin"),
            right_edge=_range(page["right_edge"], "page.right_edge"),
            column_width=_range(page["column_width"], "page.column_width"),
            column_spacing=_range(page["column_spacing"], "page.column_spacing"),
            page_type_counts=dict(raw["page_type_counts"]),
            element_counts={
                k: _range(v, f"element_counts.{k}")
                for k, v in raw["element_counts"].items()
            },
            placements=placements,
            abstract_layouts=abstract_layouts,
            caption=caption,
            distances={
                k: _range(v, f"distances.{k}") for k, v in raw["distances"].items()
            },
            fonts=fonts,
            keywords_options=keywords,
            teaser_probability=float(raw.get("teaser_probability", 0.1)),
        )
    except KeyError as exc:
        raise ProfileError(f"missing profile field: {exc}") from None
    return profile.validate()


def profile_to_dict(p: StyleProfile):
    return {
        "name": p.name,
        "page": {
            "top_margin": p.top_margin.as_list(),
            "bottom_edge": p.bottom_edge.as_list(),
            "left_margin": p.left_margin.as_list(),
            "right_edge": p.right_edge.as_list(),
            "column_width": p.column_width.as_list(),
            "column_spacing": p.column_spacing.as_list(),
        },
        "page_type_counts": dict(p.page_type_counts),
        "element_counts": {k: v.as_list() for k, v in p.element_counts.items()},
        "placements": {
            cls: [
                {
                    "slot": s.slot,
                    "center_x": s.center_x.as_list(),
                    "center_y": s.center_y.as_list(),
                    "width": s.width.as_list(),
                    "height": s.height.as_list(),
                }
                for s in specs
            ]
            for cls, specs in p.placements.items()
        },
        "abstract": {
            layout: {"width": dims["width"].as_list(), "height": dims["height"].as_list()}
            for layout, dims in p.abstract_layouts.items()
        },
        "caption": {
            "center_y": p.caption.center_y.as_list(),
            "width": p.caption.width.as_list(),
            "height": p.caption.height.as_list(),
            "figure_side": list(p.caption.figure_side),
            "table_side": list(p.caption.table_side),
            "algorithm_side": list(p.caption.algorithm_side),
        },
        "distances": {k: v.as_list() for k, v in p.distances.items()},
        "fonts": {
            role: [
                {
                    "family": f.family,
                    "size": f.size_pt.as_list(),
                    "weight": f.weight,
                    "slant": f.slant,
                    "caps": f.caps,
                    "alignment": f.alignment,
                }
                for f in specs
            ]
            for role, specs in p.fonts.items()
        },
        "keywords": list(p.keywords_options),
        "teaser_probability": p.teaser_probability,
    }


def load_style_profile(path) -> StyleProfile:
    """Load and validate a ``*.profile`` YAML file."""
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ProfileError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ProfileError(f"{path}: not a mapping")
    return profile_from_dict(raw)


def save_style_profile(profile: StyleProfile, path):
    with open(path, "w") as fh:
        yaml.safe_dump(profile_to_dict(profile), fh, sort_keys=False)


def bundled_profile(name) -> StyleProfile:
    """Return one of the shipped profiles: acl, vis, cs150, or acl+vis."""
    key = name.lower()
    if key in ("acl+vis", "vis+acl"):
        return merge_profiles(bundled_profile("acl"), bundled_profile("vis"))
    ref = importlib.resources.files("synthpages") / "profiles" / f"{key}.profile"
    if not ref.is_file():
        raise ProfileError(f"no bundled profile named {name!r}")
    with importlib.resources.as_file(ref) as path:
        return load_style_profile(path)


# ---------------------------------------------------------------------------
# merging

def _merge_placements(a, b):
    merged = {}
    for cls in set(a) | set(b):
        sa = {s.slot: s for s in a.get(cls, ())}
        sb = {s.slot: s for s in b.get(cls, ())}
        specs = []
        for slot in PLACEMENT_SLOTS:
            if slot in sa and slot in sb:
                x, y = sa[slot], sb[slot]
                specs.append(PlacementSpec(
                    slot=slot,
                    center_x=x.center_x.hull(y.center_x),
                    center_y=x.center_y.hull(y.center_y),
                    width=x.width.hull(y.width),
                    height=x.height.hull(y.height),
                ))
            elif slot in sa:
                specs.append(sa[slot])
            elif slot in sb:
                specs.append(sb[slot])
        merged[cls] = tuple(specs)
    return merged


def _dedup(seq):
    out = []
    for item in seq:
        if item not in out:
            out.append(item)
    return out


def merge_profiles(a: StyleProfile, b: StyleProfile) -> StyleProfile:
    """Union of two profiles: range hulls, concatenated font variants.

    Merging a profile with itself is the identity (up to the name).
    """
    abstract = {}
    for layout in set(a.abstract_layouts) | set(b.abstract_layouts):
        da = a.abstract_layouts.get(layout)
        db = b.abstract_layouts.get(layout)
        if da and db:
            abstract[layout] = {
                "width": da["width"].hull(db["width"]),
                "height": da["height"].hull(db["height"]),
            }
        else:
            abstract[layout] = da or db
    fonts = {}
    for role in set(a.fonts) | set(b.fonts):
        fonts[role] = tuple(_dedup(a.fonts.get(role, ()) + b.fonts.get(role, ())))
    counts = {}
    for key in set(a.element_counts) | set(b.element_counts):
        ra = a.element_counts.get(key)
        rb = b.element_counts.get(key)
        counts[key] = ra.hull(rb) if ra and rb else (ra or rb)
    name = a.name if a.name == b.name else f"{a.name}+{b.name}"
    merged = StyleProfile(
        name=name,
        top_margin=a.top_margin.hull(b.top_margin),
        bottom_edge=a.bottom_edge.hull(b.bottom_edge),
        left_margin=a.left_margin.hull(b.left_margin),
        right_edge=a.right_edge.hull(b.right_edge),
        column_width=a.column_width.hull(b.column_width),
        column_spacing=a.column_spacing.hull(b.column_spacing),
        page_type_counts={
            "title": a.page_type_counts["title"] + b.page_type_counts["title"],
            "inner": a.page_type_counts["inner"] + b.page_type_counts["inner"],
        } if a is not b and a.page_type_counts != b.page_type_counts
        else dict(a.page_type_counts),
        element_counts=counts,
        placements=_merge_placements(a.placements, b.placements),
        abstract_layouts=abstract,
        caption=CaptionSpec(
            center_y=a.caption.center_y.hull(b.caption.center_y),
            width=a.caption.width.hull(b.caption.width),
            height=a.caption.height.hull(b.caption.height),
            figure_side=tuple(_dedup(a.caption.figure_side + b.caption.figure_side)),
            table_side=tuple(_dedup(a.caption.table_side + b.caption.table_side)),
            algorithm_side=tuple(_dedup(a.caption.algorithm_side + b.caption.algorithm_side)),
        ),
        distances={
            k: a.distances[k].hull(b.distances[k]) for k in DISTANCE_NAMES
        },
        fonts=fonts,
        keywords_options=tuple(_dedup(a.keywords_options + b.keywords_options)),
        teaser_probability=max(a.teaser_probability, b.teaser_probability),
    )
    return merged.validate()
