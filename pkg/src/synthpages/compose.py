"""Page composition: turn a PageConfig into a PageLayout with ground truth.

Placement strategy: title block first (title pages), then non-text elements
largest first with rejection sampling against overlap, captions placed
together with their element, and finally body text tiling the residual
column space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .labels import CLASS_LABELS
from .sampler import BBox, PageConfig, RngSeed, _rng, choose, sample_placement, uniform
from .textgen import TextBlock, pseudo_authors, pseudo_text

OVERLAP_TOL = 1e-6
PLACEMENT_ATTEMPTS = 50
TITLE_TOP_LIMIT = 0.30
CAPTION_PROBABILITY = 0.85
HEADING_PROBABILITY = 0.3
POINTS_PER_PAGE_HEIGHT = 792.0  # US letter, 11 in at 72 pt/in
LINE_SPACING = 1.35


class ComposeError(RuntimeError):
    """The page constraints cannot be satisfied even without elements."""


class TextSource:
    """Seeded text supplier; swap vocabulary/name files via constructor."""

    def __init__(self, vocab_path=None, names_path=None):
        self.vocab_path = vocab_path
        self.names_path = names_path

    def text(self, role, approx_tokens, rng) -> TextBlock:
        return pseudo_text(role, approx_tokens, rng, vocab_path=self.vocab_path)

    def authors(self, count, profile, rng) -> TextBlock:
        return pseudo_authors(count, profile, rng, names_path=self.names_path)


@dataclass
class PlacedElement:
    id: int
    label: str
    box: BBox
    content: dict = field(default_factory=dict)
    linked_caption: int | None = None
    slot: str | None = None


@dataclass
class PageLayout:
    page_kind: str
    elements: list
    config: PageConfig
    page_id: int = 0
    dropped: list = field(default_factory=list)

    def by_label(self, label):
        return [e for e in self.elements if e.label == label]

    def nontext(self):
        return [e for e in self.elements
                if e.label in ("figure", "table", "algorithm", "equation", "caption")]


def place_nonoverlapping(boxes, candidate, max_attempts, resample, tol=OVERLAP_TOL):
    """Return a box overlapping none of ``boxes``, or None after exhausting
    ``max_attempts`` draws (the candidate counts as the first attempt)."""
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    cand = candidate
    for attempt in range(max_attempts):
        if all(cand.intersection_area(b) < tol for b in boxes):
            return cand
        if attempt + 1 < max_attempts:
            cand = resample()
    return None


def _line_height(config, role="body"):
    _, size = config.chosen_fonts[role]
    return size * LINE_SPACING / POINTS_PER_PAGE_HEIGHT


def _tokens_for_area(box, config, role="body"):
    lines = max(1, int(box.h / _line_height(config, role)))
    words_per_line = max(3, int(box.w / config.column_width * 9))
    return max(1, lines * words_per_line)


def _try_title_block(config, rng, force=False):
    p = config.profile
    title_spec = p.placements["title"][0]
    title_box = None
    for _ in range(50):
        cand = sample_placement(title_spec, rng)
        if cand.y2 < TITLE_TOP_LIMIT - 1e-3:
            title_box = cand
            break
    if title_box is None:
        if not force:
            return None
        # shortest title at the highest slot position
        w = title_spec.width.min
        h = title_spec.height.min
        title_box = BBox(title_spec.center_x.min - w / 2,
                         title_spec.center_y.min - h / 2, w, h)

    gap_ta = config.chosen_distances["title_author"]
    author_spec = p.placements["author"][0]
    a = sample_placement(author_spec, rng)
    if force:
        a = BBox(a.cx - a.w / 2, a.y, a.w, author_spec.height.min)
    author_y = title_box.y2 + gap_ta
    if author_y >= TITLE_TOP_LIMIT:
        author_y = title_box.y2  # clamp the gap to its minimum (zero)
    author_box = BBox(a.cx - a.w / 2, author_y, a.w, a.h).clamped(
        config.left, 0.0, config.right, config.bottom)

    gap_aa = config.chosen_distances["author_abstract"]
    layout = config.abstract_layout
    dims = p.abstract_layouts[layout]
    aw = uniform(rng, dims["width"])
    ah = dims["height"].min if force else uniform(rng, dims["height"])
    ay = author_box.y2 + gap_aa
    if layout == "left-column":
        ax = config.left
        aw = min(aw, config.column_width)
    else:
        ax = (config.left + config.right) / 2 - aw / 2
    if ay + ah > config.bottom:
        ah = config.bottom - ay
    if ah <= 0.02:
        return None
    abstract_box = BBox(ax, ay, aw, ah).clamped(
        config.left, 0.0, config.right, config.bottom)
    return title_box, author_box, abstract_box


def _sample_title_block(config, text, rng):
    """Title, author, abstract stack; tops of title and author stay < 30%."""
    for _ in range(50):
        stack = _try_title_block(config, rng)
        if stack is not None:
            return stack
    stack = _try_title_block(config, rng, force=True)
    if stack is None:
        raise ComposeError("no room for the title block on this page")
    return stack


def _candidate(cls, mini, config, rng):
    specs = config.profile.placements[cls]
    pool = [s for s in specs if (s.slot == "mini") == mini]
    if not pool:
        return None
    spec = choose(rng, pool)
    box = sample_placement(spec, rng)
    # reject boxes poking outside the margins; clamping them in would drag
    # the centroid out of its sampled slot range
    if (box.x < config.left - 1e-9 or box.x2 > config.right + 1e-9
            or box.y < config.top - 1e-9 or box.y2 > config.bottom + 1e-9):
        return None
    return spec.slot, box


def _caption_box(elem_box, side, config, rng):
    cap_spec = config.profile.caption
    gap = config.chosen_distances["image_caption"]
    w = min(uniform(rng, cap_spec.width), elem_box.w)
    w = max(w, min(elem_box.w, cap_spec.width.min))
    h = uniform(rng, cap_spec.height)
    h = min(h, 0.95 * (config.bottom - config.top))
    x = elem_box.cx - w / 2
    if side == "below":
        y = elem_box.y2 + gap
        if y + h > config.bottom:
            h = config.bottom - y
    else:
        y = elem_box.y - gap - h
        if y < config.top:
            h = h - (config.top - y)
            y = config.top
    if h < 0.008:
        return None
    return BBox(x, y, w, h).clamped(config.left, config.top, config.right, config.bottom)


def _caption_side(cls, config, rng):
    cap = config.profile.caption
    options = {"figure": cap.figure_side, "table": cap.table_side,
               "algorithm": cap.algorithm_side}[cls]
    return choose(rng, options)


def compose_page(config: PageConfig, assets, text: TextSource, seed) -> PageLayout:
    """Compose one page; dropped elements are recorded, not errors."""
    rng = _rng(seed)
    page_id = seed.stream_id if isinstance(seed, RngSeed) else 0
    elements = []
    dropped = []
    blocking = []        # boxes that nothing may overlap
    next_id = [0]

    def add(label, box, content, slot=None):
        elem = PlacedElement(id=next_id[0], label=label, box=box,
                             content=content, slot=slot)
        next_id[0] += 1
        elements.append(elem)
        return elem

    counts = dict(config.element_counts)
    if config.page_kind == "title":
        title_box, author_box, abstract_box = _sample_title_block(config, text, rng)
        if config.teaser and counts.get("figure", 0) > 0:
            # a teaser sits fully above the title; sampled from the normal
            # figure slots so its centroid obeys the profile ranges
            for _ in range(PLACEMENT_ATTEMPTS):
                cand = _candidate("figure", False, config, rng)
                if cand is not None and cand[1].y2 < title_box.y - 1e-3:
                    slot, tb = cand
                    ref = assets.draw("figure", tb.w / max(tb.h, 1e-6), rng)
                    add("figure", tb, {"kind": "asset", "ref": ref}, slot=slot)
                    blocking.append(tb)
                    counts["figure"] -= 1
                    break
        n_authors = int(rng.integers(1, 7))
        add("title", title_box,
            {"kind": "text",
             "block": text.text("title", max(4, int(title_box.w * 16)), rng)})
        add("author", author_box,
            {"kind": "text", "block": text.authors(n_authors, config.profile, rng)})
        add("abstract", abstract_box,
            {"kind": "text",
             "block": text.text("abstract", _tokens_for_area(abstract_box, config, "abstract_text"), rng),
             "keywords": (text.text("keywords", 6, rng)
                          if config.keywords_line else None),
             "keywords_label": (config.keywords_line or {}).get("label")
             if isinstance(config.keywords_line, dict) else None})
        blocking.extend([title_box, author_box, abstract_box])

    # non-text elements, largest sampled first
    requests = []
    for cls in ("figure", "table", "algorithm", "equation"):
        for _ in range(counts.get(cls, 0)):
            requests.append((cls, False))
    for key, cls in (("mini_figure", "figure"), ("mini_table", "table")):
        for _ in range(counts.get(key, 0)):
            requests.append((cls, True))

    staged = []
    for cls, mini in requests:
        cand = None
        for _ in range(PLACEMENT_ATTEMPTS):
            cand = _candidate(cls, mini, config, rng)
            if cand is not None:
                break
        if cand is None:
            dropped.append({"label": cls, "mini": mini, "reason": "no-slot"})
            continue
        staged.append((cand[1].area, cls, mini, cand))
    staged.sort(key=lambda item: -item[0])

    for _, cls, mini, first in staged:
        captioned = (not mini and cls != "equation"
                     and rng.random() < CAPTION_PROBABILITY)
        side = _caption_side(cls, config, rng) if captioned else None
        placed = None
        cand = first
        for attempt in range(PLACEMENT_ATTEMPTS):
            if cand is not None:
                slot, box = cand
                cap = _caption_box(box, side, config, rng) if captioned else None
                group = [box] + ([cap] if cap else [])
                ok = (not captioned or cap is not None) and all(
                    g.intersection_area(b) < OVERLAP_TOL
                    for g in group for b in blocking)
                ok = ok and (len(group) < 2
                             or group[0].intersection_area(group[1]) < OVERLAP_TOL)
                if ok:
                    placed = (slot, box, cap)
                    break
            cand = _candidate(cls, mini, config, rng)
        if placed is None:
            dropped.append({"label": cls, "mini": mini, "reason": "no-space"})
            continue
        slot, box, cap = placed
        ref = assets.draw(cls, box.w / max(box.h, 1e-6), rng)
        elem = add(cls, box, {"kind": "asset", "ref": ref}, slot=slot)
        blocking.append(box)
        if cap is not None:
            number = int(rng.integers(1, 20))
            label_word = {"figure": "Figure", "table": "Table",
                          "algorithm": "Algorithm"}[cls]
            block = text.text("caption", _tokens_for_area(cap, config, "caption"), rng)
            cap_elem = add("caption", cap,
                           {"kind": "text", "block": block,
                            "prefix": f"{label_word} {number}:"})
            elem.linked_caption = cap_elem.id
            blocking.append(cap)

    layout = PageLayout(page_kind=config.page_kind, elements=elements,
                        config=config, page_id=page_id, dropped=dropped)
    fill_body_text(layout, text, rng)
    _sort_reading_order(layout)
    return layout


def _sort_reading_order(layout):
    config = layout.config
    mid = config.left + config.column_width + config.column_spacing / 2

    def key(elem):
        head = {"title": 0, "author": 1, "abstract": 2}.get(elem.label)
        if head is not None and layout.page_kind == "title":
            return (0, head, 0.0)
        spans = elem.box.w > config.column_width * 1.2
        col = 0 if spans or elem.box.cx < mid else 1
        return (1, col, elem.box.y)

    layout.elements.sort(key=key)


def _column_spans(layout, col_x, col_w, pad):
    """Free vertical intervals of one column after obstacle subtraction."""
    config = layout.config
    top, bottom = config.top, config.bottom
    if layout.page_kind == "title":
        pass  # the title block is handled as obstacles below
    intervals = []
    for elem in layout.elements:
        if elem.label == "body-text":
            continue
        b = elem.box
        overlap = min(b.x2, col_x + col_w) - max(b.x, col_x)
        if overlap <= 0.01:
            continue
        lo = b.y - pad
        hi = b.y2 + pad
        if elem.label == "abstract":
            hi = b.y2 + config.chosen_distances["abstract_text"]
        intervals.append((lo, hi))
    intervals.sort()
    spans = []
    cursor = top
    for lo, hi in intervals:
        if lo > cursor:
            spans.append((cursor, min(lo, bottom)))
        cursor = max(cursor, hi)
        if cursor >= bottom:
            break
    if cursor < bottom:
        spans.append((cursor, bottom))
    return [(a, b) for a, b in spans if b > a]


def fill_body_text(layout: PageLayout, text: TextSource, seed=None) -> PageLayout:
    """Tile residual column space with body-text blocks."""
    config = layout.config
    rng = _rng(seed if seed is not None else RngSeed(0, layout.page_id))
    pad = config.chosen_distances["image_text"]
    lh = _line_height(config)
    for col in (0, 1):
        col_x = config.column_x(col)
        for y0, y1 in _column_spans(layout, col_x, config.column_width, pad):
            if y1 - y0 < lh:
                continue
            box = BBox(col_x, y0, config.column_width, y1 - y0)
            heading = None
            level = 0
            if rng.random() < HEADING_PROBABILITY and box.h > 3 * lh:
                level = int(rng.integers(1, 4))
                heading = text.text(f"heading-{level}", int(rng.integers(2, 6)), rng)
            block = text.text("body", _tokens_for_area(box, config), rng)
            layout.elements.append(PlacedElement(
                id=max((e.id for e in layout.elements), default=-1) + 1,
                label="body-text", box=box,
                content={"kind": "text", "block": block,
                         "heading": heading, "heading_level": level}))
    return layout
