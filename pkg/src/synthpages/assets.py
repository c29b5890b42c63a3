"""Graphical content for the four visual classes.

Assets come either from a user directory laid out as ``<class>/<file>.png``
or from a built-in procedural generator (charts, ruled tables, pseudo-code
boxes, operator strings).  Procedural assets are the default so corpora can
be generated with no external data.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .fonts import default_font_map, resolve_font
from .labels import VISUAL_CLASSES
from .sampler import RngSeed, _rng

_BASE_H = 256  # procedural canvas height in px


class AssetError(ValueError):
    pass


class ExhaustedAssetsError(AssetError):
    """A once-only pool ran out of images for some class."""


@dataclass(frozen=True)
class AssetRef:
    id: str
    class_name: str
    width_px: int
    height_px: int
    source: str                 # "external" | "procedural"
    path: str = ""
    seed: int = 0

    @property
    def aspect(self):
        return self.width_px / self.height_px


class AssetPool:
    """Per-class asset source; thread-safe checkout for the `once` policy."""

    def __init__(self, refs=None, policy="with-replacement"):
        if policy not in ("once", "with-replacement"):
            raise AssetError(f"unknown policy {policy!r}")
        self.policy = policy
        self.procedural = refs is None
        self._refs = {c: [] for c in VISUAL_CLASSES}
        self._cursor = {c: 0 for c in VISUAL_CLASSES}
        self._lock = threading.Lock()
        for ref in refs or ():
            self._refs[ref.class_name].append(ref)

    @property
    def refs(self):
        return [r for cls in VISUAL_CLASSES for r in self._refs[cls]]

    def available(self, class_name):
        if self.procedural:
            return None  # unbounded
        if self.policy == "once":
            return len(self._refs[class_name]) - self._cursor[class_name]
        return len(self._refs[class_name])

    def draw(self, class_name, target_aspect, rng) -> AssetRef:
        if class_name not in VISUAL_CLASSES:
            raise AssetError(f"not a visual class: {class_name!r}")
        if self.procedural:
            return procedural_asset(class_name, target_aspect,
                                    int(rng.integers(1 << 62)))
        refs = self._refs[class_name]
        if not refs:
            raise ExhaustedAssetsError(f"no assets for class {class_name!r}")
        with self._lock:
            if self.policy == "once":
                i = self._cursor[class_name]
                if i >= len(refs):
                    raise ExhaustedAssetsError(
                        f"asset pool exhausted for class {class_name!r} "
                        f"after {len(refs)} placements")
                self._cursor[class_name] = i + 1
                return refs[i]
        return refs[int(rng.integers(len(refs)))]

    def split(self, fraction, rng):
        """Partition an external pool into two disjoint pools (train/val)."""
        if self.procedural:
            return AssetPool(policy=self.policy), AssetPool(policy=self.policy)
        first, second = [], []
        for cls in VISUAL_CLASSES:
            refs = list(self._refs[cls])
            rng.shuffle(refs)
            k = int(round(fraction * len(refs)))
            first.extend(refs[:k])
            second.extend(refs[k:])
        return (AssetPool(first, policy=self.policy),
                AssetPool(second, policy=self.policy))


def load_asset_dir(path, class_map=None, policy="with-replacement") -> AssetPool:
    """Index ``<class>/<file>`` images; every file must decode."""
    root = Path(path)
    if not root.is_dir():
        raise AssetError(f"asset directory not found: {path}")
    refs = []
    for file in sorted(root.rglob("*")):
        if file.suffix.lower() not in (".png", ".jpg", ".jpeg"):
            continue
        cls = (class_map or {}).get(file.name, file.parent.name)
        if cls not in VISUAL_CLASSES:
            raise AssetError(f"{file}: class {cls!r} is not one of {VISUAL_CLASSES}")
        try:
            with Image.open(file) as im:
                im.verify()
            with Image.open(file) as im:
                w, h = im.size
        except Exception as exc:
            raise AssetError(f"unreadable image {file}: {exc}") from exc
        refs.append(AssetRef(
            id=str(file.relative_to(root)), class_name=cls,
            width_px=w, height_px=h, source="external", path=str(file)))
    if not refs:
        raise AssetError(f"asset directory {path} contains no images")
    pool = AssetPool(refs, policy=policy)
    # a class directory that exists but holds nothing usable is a setup error;
    # classes with no directory at all are simply absent from the pool
    for cls in VISUAL_CLASSES:
        if (root / cls).is_dir() and not pool._refs[cls]:
            raise AssetError(f"asset directory has no images for class {cls!r}")
    return pool


def procedural_asset(class_name, target_aspect, seed) -> AssetRef:
    """Deterministic placeholder asset reference for one visual class."""
    if class_name not in VISUAL_CLASSES:
        raise AssetError(f"not a visual class: {class_name!r}")
    if target_aspect <= 0:
        raise AssetError("target_aspect must be positive")
    h = _BASE_H
    w = max(16, int(round(h * target_aspect)))
    seed = int(seed.seed ^ seed.stream_id) if isinstance(seed, RngSeed) else int(seed)
    return AssetRef(
        id=f"proc-{class_name}-{seed:x}-{w}x{h}",
        class_name=class_name, width_px=w, height_px=h,
        source="procedural", seed=seed)


def materialize(ref: AssetRef) -> Image.Image:
    """Load or synthesize the pixels behind an AssetRef."""
    if ref.source == "external":
        with Image.open(ref.path) as im:
            return im.convert("RGB")
    draw_fn = {
        "figure": _draw_figure,
        "table": _draw_table,
        "algorithm": _draw_algorithm,
        "equation": _draw_equation,
    }[ref.class_name]
    img = Image.new("RGB", (ref.width_px, ref.height_px), "white")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(ref.seed & ((1 << 64) - 1))))
    draw_fn(ImageDraw.Draw(img), ref.width_px, ref.height_px, rng)
    return img


def _draw_figure(d, w, h, rng):
    m = max(6, w // 16)
    x0, y0, x1, y1 = m, m // 2, w - m // 2, h - m
    # axes are always present so figures stay recognizable as charts
    d.line([(x0, y0), (x0, y1)], fill="black", width=2)
    d.line([(x0, y1), (x1, y1)], fill="black", width=2)
    kind = int(rng.integers(3))
    if kind == 0:  # polyline
        n = int(rng.integers(6, 14))
        xs = np.linspace(x0 + 2, x1 - 2, n)
        ys = y1 - rng.random(n) * (y1 - y0 - 4)
        d.line(list(zip(xs.tolist(), ys.tolist())), fill="black", width=2)
    elif kind == 1:  # scatter
        n = int(rng.integers(15, 40))
        for _ in range(n):
            px = x0 + 3 + rng.random() * (x1 - x0 - 6)
            py = y0 + 3 + rng.random() * (y1 - y0 - 6)
            r = 2
            d.ellipse([px - r, py - r, px + r, py + r], fill="black")
    else:  # bars
        n = int(rng.integers(4, 9))
        bw = (x1 - x0 - 4) / n
        for i in range(n):
            bh = (0.2 + 0.8 * rng.random()) * (y1 - y0 - 4)
            bx = x0 + 2 + i * bw
            d.rectangle([bx + 1, y1 - bh, bx + bw - 2, y1 - 1], outline="black",
                        fill="gray" if rng.random() < 0.5 else "white")


def _draw_table(d, w, h, rng):
    rows = int(rng.integers(3, 8))
    cols = int(rng.integers(2, 6))
    m = 4
    x0, y0, x1, y1 = m, m, w - m, h - m
    for i in range(rows + 1):
        y = y0 + i * (y1 - y0) / rows
        d.line([(x0, y), (x1, y)], fill="black", width=2 if i in (0, 1, rows) else 1)
    for j in range(cols + 1):
        x = x0 + j * (x1 - x0) / cols
        d.line([(x, y0), (x, y1)], fill="black", width=1)
    # dashes as cell pseudo-text
    for i in range(rows):
        for j in range(cols):
            cy = y0 + (i + 0.5) * (y1 - y0) / rows
            cx0 = x0 + j * (x1 - x0) / cols + 4
            cx1 = cx0 + (0.3 + 0.5 * rng.random()) * ((x1 - x0) / cols - 8)
            d.line([(cx0, cy), (cx1, cy)], fill="black", width=2)


def _draw_algorithm(d, w, h, rng):
    d.line([(2, 2), (w - 2, 2)], fill="black", width=3)
    d.line([(2, h - 3), (w - 2, h - 3)], fill="black", width=3)
    n = int(rng.integers(5, 12))
    lh = (h - 16) / n
    font = resolve_font(default_font_map(), "courier", "regular", "upright",
                        min(14, int(lh * 0.7)))
    indent = 0
    for i in range(n):
        y = 10 + (i + 0.5) * lh
        d.text((4, y - 6), f"{i + 1}:", fill="black", font=font)
        x0 = 28 + indent * 12
        x1 = x0 + (0.3 + 0.55 * rng.random()) * (w - x0 - 8)
        d.line([(x0, y), (min(x1, w - 4), y)], fill="black", width=2)
        step = int(rng.integers(3))
        indent = max(0, min(3, indent + (1 if step == 0 else -1 if step == 1 else 0)))


def _draw_equation(d, w, h, rng):
    symbols = list("αβγλμσφωxyzijk")
    ops = [" = ", " + ", " − ", " · ", " ≤ "]
    parts = [symbols[int(rng.integers(len(symbols)))]]
    for _ in range(int(rng.integers(2, 6))):
        parts.append(ops[int(rng.integers(len(ops)))])
        parts.append(symbols[int(rng.integers(len(symbols)))])
    text = "".join(parts)
    font = resolve_font(default_font_map(), "times new roman", "regular",
                        "italic", int(h * 0.35))
    tw = d.textlength(text, font=font)
    if tw > w - 4:
        font = resolve_font(default_font_map(), "times new roman", "regular",
                            "italic", max(8, int(h * 0.35 * (w - 4) / tw)))
        tw = d.textlength(text, font=font)
    d.text((max(2, (w - tw) / 2), h * 0.3), text, fill="black", font=font)
