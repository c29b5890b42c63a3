"""Corpus-level orchestration and manifest tooling.

Manifests follow the common detection-dataset JSON layout (images,
annotations, categories) plus an ``info`` block recording provenance:
profile, master seed, generator version, noise rate, sample fraction, and
the font substitutions in effect.
"""

from __future__ import annotations

import copy
import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .assets import AssetPool
from .compose import TextSource, compose_page
from .labels import CLASS_LABELS, NOISE_ELIGIBLE, label_id
from .render import RenderSpec, render_page, render_substitutions
from .sampler import RngSeed, sample_page_config


@dataclass
class NoiseConfig:
    rate: float
    seed: int = 0

    def validate(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("noise rate must be in [0, 1]")
        if self.rate > 0.10:
            warnings.warn(f"noise rate {self.rate} exceeds the studied 0.10 range")
        return self


def _categories():
    return [{"id": label_id(name), "name": name} for name in CLASS_LABELS]


def empty_manifest(profile_name, master_seed, substitutions=None):
    return {
        "info": {
            "generator": "synthpages",
            "version": __version__,
            "profile": profile_name,
            "seed": int(master_seed),
            "noise_rate": 0.0,
            "sample_fraction": 1.0,
            "font_substitutions": substitutions or {},
        },
        "images": [],
        "annotations": [],
        "categories": _categories(),
    }


def save_manifest(manifest, path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def load_manifest(path):
    with open(path) as fh:
        return json.load(fh)


def layout_records(layout, spec: RenderSpec, image_id, file_name, ann_start):
    """Image + annotation records for one composed page (no rasterization)."""
    image = {
        "id": int(image_id),
        "file_name": file_name,
        "width": spec.width,
        "height": spec.height,
        "page_kind": layout.page_kind,
        "stream_id": int(layout.page_id),
        "dropped_elements": len(layout.dropped),
    }
    annotations = []
    for offset, elem in enumerate(layout.elements):
        bbox = spec.px_box(elem.box)
        annotations.append({
            "id": int(ann_start + offset),
            "image_id": int(image_id),
            "category_id": label_id(elem.label),
            "bbox": bbox,
            "area": bbox[2] * bbox[3],
            "iscrowd": 0,
        })
    return image, annotations


def export_coco(pages, out_dir, profile_name="", master_seed=0, spec=None):
    """Write page images plus one manifest binding them to ground truth.

    ``pages`` is a list of (image-or-None, layout) pairs; images are saved
    as PNG when present.
    """
    spec = spec or RenderSpec()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = empty_manifest(profile_name, master_seed,
                              render_substitutions(spec))
    ann_id = 0
    for i, (img, layout) in enumerate(pages):
        name = f"page_{layout.page_id:06d}.png"
        rec, anns = layout_records(layout, spec, i, name, ann_id)
        manifest["images"].append(rec)
        manifest["annotations"].extend(anns)
        ann_id += len(anns)
        if img is not None:
            img.save(out / name)
    save_manifest(manifest, out / "manifest.json")
    return manifest


def compose_corpus_page(profile, master_seed, stream_id, pool, text):
    """Deterministically compose the page at one stream index."""
    cfg_seed = RngSeed(master_seed, stream_id)
    config = sample_page_config(profile, cfg_seed)
    layout = compose_page(config, pool, text, cfg_seed.split(1))
    layout.page_id = stream_id
    return layout


def _page_task(profile, master_seed, stream, spec, image_path):
    """Worker for parallel generation; procedural assets only."""
    layout = compose_corpus_page(profile, master_seed, stream, AssetPool(),
                                 TextSource())
    if image_path:
        img, _ = render_page(layout, spec)
        img.save(image_path)
    return layout


def generate_corpus(profile, n_train, n_val, master_seed, *, assets=None,
                    render_spec=None, text=None, out_dir=None,
                    write_images=False, jobs=1):
    """Generate train/val splits with disjoint page streams.

    Under the `once` asset policy the external pool is partitioned before
    generation so no asset appears in both splits.  ``jobs > 1`` fans pages
    out over a process pool (procedural assets only; an external pool's
    reservation is process-local, so it forces serial generation).
    """
    if n_train < 0 or n_val < 0:
        raise ValueError("page counts must be >= 0")
    spec = render_spec or RenderSpec()
    text = text or TextSource()
    pool = assets or AssetPool()
    if pool.policy == "once" and not pool.procedural and n_train + n_val:
        split_rng = RngSeed(master_seed, 0xA55E7).generator()
        train_pool, val_pool = pool.split(n_train / (n_train + n_val), split_rng)
    else:
        train_pool = val_pool = pool
    parallel = jobs > 1 and pool.procedural

    subs = render_substitutions(spec)
    out = Path(out_dir) if out_dir else None
    results = {}
    for split, count, start, split_pool in (
            ("train", n_train, 0, train_pool),
            ("val", n_val, n_train, val_pool)):
        manifest = empty_manifest(profile.name, master_seed, subs)
        manifest["info"]["split"] = split
        ann_id = 0
        split_dir = out / split if out else None
        if split_dir and write_images:
            split_dir.mkdir(parents=True, exist_ok=True)

        def page_name(stream):
            return f"page_{stream:06d}.png"

        if parallel and count:
            from concurrent.futures import ProcessPoolExecutor
            streams = list(range(start, start + count))
            paths = [str(split_dir / page_name(s))
                     if split_dir and write_images else None for s in streams]
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                layouts = list(ex.map(
                    _page_task, [profile] * count, [master_seed] * count,
                    streams, [spec] * count, paths, chunksize=8))
        else:
            layouts = []
            for i in range(count):
                stream = start + i
                layout = compose_corpus_page(profile, master_seed, stream,
                                             split_pool, text)
                if split_dir and write_images:
                    img, _ = render_page(layout, spec)
                    img.save(split_dir / page_name(stream))
                layouts.append(layout)

        for i, layout in enumerate(layouts):
            rec, anns = layout_records(layout, spec, i,
                                       page_name(layout.page_id), ann_id)
            manifest["images"].append(rec)
            manifest["annotations"].extend(anns)
            ann_id += len(anns)
        if out:
            save_manifest(manifest, out / f"{split}_manifest.json")
        results[split] = manifest
    return results


def inject_label_noise(manifest, cfg: NoiseConfig):
    """Flip eligible annotation labels uniformly; boxes never change."""
    cfg.validate()
    out = copy.deepcopy(manifest)
    rng = RngSeed(cfg.seed, 0x4015E).generator()
    eligible_ids = {label_id(name) for name in NOISE_ELIGIBLE}
    id_to_label = {c["id"]: c["name"] for c in out["categories"]}
    flipped = 0
    for ann in out["annotations"]:
        cid = ann["category_id"]
        if cid not in eligible_ids:
            continue
        if rng.random() < cfg.rate:
            others = [label_id(n) for n in NOISE_ELIGIBLE if label_id(n) != cid]
            ann["category_id"] = others[int(rng.integers(len(others)))]
            flipped += 1
    out["info"]["noise_rate"] = cfg.rate
    out["info"]["noise_seed"] = int(cfg.seed)
    out["info"]["noise_flipped"] = flipped
    return out


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def downsample(manifest, fraction, seed):
    """Uniformly retain round(fraction * n_pages) pages without replacement."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    out = copy.deepcopy(manifest)
    images = out["images"]
    keep_n = _round_half_up(fraction * len(images))
    rng = RngSeed(seed, 0xD05A).generator()
    idx = sorted(rng.choice(len(images), size=keep_n, replace=False).tolist()) \
        if keep_n < len(images) else list(range(len(images)))
    keep_ids = {images[i]["id"] for i in idx}
    out["images"] = [images[i] for i in idx]
    out["annotations"] = [a for a in out["annotations"]
                          if a["image_id"] in keep_ids]
    out["info"]["sample_fraction"] = out["info"].get("sample_fraction", 1.0) * fraction
    out["info"]["downsample_seed"] = int(seed)
    return out


@dataclass
class StatsTable:
    rows: list            # per-annotation dicts
    counts_per_page: list  # per-image dicts: image_id + one column per class

    def per_class(self, field):
        table = {name: [] for name in CLASS_LABELS}
        for row in self.rows:
            table[row["label"]].append(row[field])
        return table

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=[
                "image_id", "label", "center_x", "center_y", "width", "height"])
            writer.writeheader()
            writer.writerows(self.rows)

    def counts_to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["image_id", *CLASS_LABELS])
            writer.writeheader()
            writer.writerows(self.counts_per_page)


def corpus_stats(manifest) -> StatsTable:
    """Normalized per-class centroid/extent rows plus per-page class counts."""
    dims = {im["id"]: (im["width"], im["height"]) for im in manifest["images"]}
    id_to_label = {c["id"]: c["name"] for c in manifest["categories"]}
    rows = []
    counts = {im["id"]: {"image_id": im["id"], **{n: 0 for n in CLASS_LABELS}}
              for im in manifest["images"]}
    for ann in manifest["annotations"]:
        w, h = dims[ann["image_id"]]
        x, y, bw, bh = ann["bbox"]
        label = id_to_label[ann["category_id"]]
        rows.append({
            "image_id": ann["image_id"],
            "label": label,
            "center_x": (x + bw / 2) / w,
            "center_y": (y + bh / 2) / h,
            "width": bw / w,
            "height": bh / h,
        })
        counts[ann["image_id"]][label] += 1
    return StatsTable(rows=rows, counts_per_page=list(counts.values()))
