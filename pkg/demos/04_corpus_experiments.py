"""Corpus manipulation for robustness experiments.

Two controlled degradations: uniform label noise over the eight
non-body-text classes (boxes untouched), and page-level downsampling.
Both are seeded and stamp their parameters into the manifest provenance.
"""

from collections import Counter

from synthpages.corpus import (
    NoiseConfig,
    corpus_stats,
    downsample,
    generate_corpus,
    inject_label_noise,
)
from synthpages.style import bundled_profile

manifest = generate_corpus(bundled_profile("vis"), 60, 0, 555)["train"]
print(f"base corpus: {len(manifest['images'])} pages, "
      f"{len(manifest['annotations'])} annotations")

# --- label noise ------------------------------------------------------
noisy = inject_label_noise(manifest, NoiseConfig(rate=0.10, seed=1))
flipped = sum(a["category_id"] != b["category_id"]
              for a, b in zip(manifest["annotations"], noisy["annotations"]))
print(f"\n10% label noise: {flipped} labels flipped "
      f"({flipped / len(manifest['annotations']):.1%} of all annotations; "
      f"body text is never eligible)")

# --- downsampling -----------------------------------------------------
print("\ndownsampling ladder (halving, matching the published schedule):")
cur = manifest
for frac in (0.5, 0.5, 0.5, 0.5):
    cur = downsample(cur, frac, seed=8)
    print(f"  fraction {cur['info']['sample_fraction']:.4f}: "
          f"{len(cur['images'])} pages")

# --- layout statistics ------------------------------------------------
table = corpus_stats(manifest)
centers = table.per_class("center_y")
print("\nmean vertical centroid per class:")
for name, vals in sorted(centers.items()):
    if vals:
        print(f"  {name:10s} {sum(vals) / len(vals):.3f}  (n={len(vals)})")
table.to_csv("/tmp/demo_centroids.csv")
table.counts_to_csv("/tmp/demo_counts.csv")
print("\nwrote /tmp/demo_centroids.csv and /tmp/demo_counts.csv")
