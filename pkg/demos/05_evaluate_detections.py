"""Score a (simulated) detector against ground truth.

A fake detector is built by perturbing the ground truth: jittered boxes,
some dropped, some relabeled, plus hallucinated extras. The evaluation
stack then reports per-class P/R/F1/AP, applies structural heuristics,
and breaks the remaining errors into failure modes.
"""

import numpy as np

from synthpages.corpus import generate_corpus
from synthpages.evaluation import (
    Detection,
    PredictionSet,
    apply_heuristics,
    error_distribution,
    evaluate,
)
from synthpages.style import bundled_profile

manifest = generate_corpus(bundled_profile("acl"), 40, 0, 31)["train"]
classes = {c["id"]: c["name"] for c in manifest["categories"]}
rng = np.random.default_rng(0)

dets = []
for ann in manifest["annotations"]:
    if rng.random() < 0.08:
        continue  # miss
    x, y, w, h = ann["bbox"]
    jitter = rng.normal(0, 3, size=4)
    label = classes[ann["category_id"]]
    if rng.random() < 0.05:
        label = "figure" if label != "figure" else "table"  # confusion
    dets.append(Detection(ann["image_id"], label,
                          (x + jitter[0], y + jitter[1],
                           max(4, w + jitter[2]), max(4, h + jitter[3])),
                          float(np.clip(rng.beta(8, 2), 0.01, 0.99))))
for _ in range(30):  # hallucinations, including impossible ones
    img = manifest["images"][int(rng.integers(len(manifest["images"])))]
    dets.append(Detection(img["id"], "abstract",
                          (100, 900, 300, 150), float(rng.uniform(0.3, 0.6))))

preds = PredictionSet(dets, space="pixel")

for report in evaluate(preds, manifest, thresholds=(0.5, 0.8)):
    print(f"\nIoU {report.iou_threshold}: mAP {report.map:.3f}")
    for name, m in report.per_class.items():
        if m.ap is None:
            continue
        print(f"  {name:10s} P={m.precision:.3f} R={m.recall:.3f} "
              f"F1={m.f1:.3f} AP={m.ap:.3f}")

# Structural heuristics: an abstract can only live on the first page, a
# title only in the top 30% of it. Free precision, no model involved.
filtered = apply_heuristics(preds, manifest)
print(f"\nheuristics removed {len(filtered.removed)} impossible detections")
after = evaluate(filtered, manifest, thresholds=(0.5,))[0]
print(f"mAP at IoU 0.5 after filtering: {after.map:.3f}")

breakdown = error_distribution(filtered, manifest, iou_threshold=0.5)
print("\nfalse positives by mode (classes with any):")
for name, modes in breakdown.false_positives.items():
    if sum(modes.values()):
        print(f"  {name:10s} {modes}")
print("false negatives by mode (classes with any):")
for name, modes in breakdown.false_negatives.items():
    if sum(modes.values()):
        print(f"  {name:10s} {modes}")
