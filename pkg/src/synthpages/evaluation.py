"""Detection evaluation: IoU matching, P/R/F1/AP/mAP, post-hoc heuristics,
and error-mode breakdowns.

Matching is greedy by descending confidence with per-class separation;
ties on confidence break by higher IoU, then insertion order.  AP uses the
all-points monotone precision envelope.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field

from .labels import CLASS_LABELS, ID_TO_LABEL, label_id

log = logging.getLogger(__name__)

PAGE_HEAD_FRACTION = 0.30  # titles live in the top 30% of first pages
FIRST_PAGE_ONLY_CLASSES = ("abstract", "author", "title")


def iou(a, b):
    """Intersection over union of two [x, y, w, h] boxes."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    ix = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    iy = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    if union <= 0:
        return 0.0
    return inter / union


@dataclass(frozen=True)
class Detection:
    image_id: int
    label: str
    box: tuple          # [x, y, w, h] in the set's coordinate space
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass
class PredictionSet:
    detections: list
    space: str = "pixel"   # "pixel" | "normalized"

    def per_image(self):
        grouped = {}
        for det in self.detections:
            grouped.setdefault(det.image_id, []).append(det)
        return grouped


def load_predictions(path, space="pixel") -> PredictionSet:
    """JSON-lines {image_id, category_id, bbox, score} detector output."""
    dets = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            dets.append(Detection(
                image_id=rec["image_id"],
                label=ID_TO_LABEL[rec["category_id"]],
                box=tuple(rec["bbox"]),
                confidence=rec["score"],
            ))
    return PredictionSet(dets, space=space)


def save_predictions(pred_set: PredictionSet, path):
    with open(path, "w") as fh:
        for det in pred_set.detections:
            fh.write(json.dumps({
                "image_id": det.image_id,
                "category_id": label_id(det.label),
                "bbox": list(det.box),
                "score": det.confidence,
            }) + "\n")


def match_detections(preds, gts, iou_threshold):
    """Greedy same-class single-image matching.

    ``preds``: list of (box, confidence); ``gts``: list of boxes.
    Returns (tp_pairs, fp_indices, fn_indices) where tp_pairs are
    (pred_index, gt_index, iou) triples.
    """
    if not 0 < iou_threshold <= 1:
        raise ValueError("iou_threshold must be in (0, 1]")
    order = sorted(range(len(preds)),
                   key=lambda i: (-preds[i][1], i))
    matched_gt = set()
    tp, fp = [], []
    for i in order:
        box = preds[i][0]
        best_iou, best_j = 0.0, None
        for j, gt in enumerate(gts):
            if j in matched_gt:
                continue
            v = iou(box, gt)
            if v > best_iou:
                best_iou, best_j = v, j
        if best_j is not None and best_iou >= iou_threshold:
            matched_gt.add(best_j)
            tp.append((i, best_j, best_iou))
        else:
            fp.append(i)
    fn = [j for j in range(len(gts)) if j not in matched_gt]
    return tp, fp, fn


def _pr_curve(flags, n_gt):
    """Cumulative precision/recall from confidence-ordered TP flags."""
    precisions, recalls = [], []
    tp = 0
    for k, is_tp in enumerate(flags, start=1):
        tp += is_tp
        precisions.append(tp / k)
        recalls.append(tp / n_gt if n_gt else 0.0)
    return precisions, recalls


def _ap_all_points(precisions, recalls):
    # monotone non-increasing precision envelope, then step integration
    env = list(precisions)
    for i in range(len(env) - 2, -1, -1):
        env[i] = max(env[i], env[i + 1])
    ap = 0.0
    prev_r = 0.0
    for p, r in zip(env, recalls):
        ap += p * (r - prev_r)
        prev_r = r
    return ap


def average_precision(preds_by_image, gts_by_image, class_name, iou_threshold):
    """AP for one class over a set of images.

    ``preds_by_image``: image_id -> list of (box, confidence) of this class;
    ``gts_by_image``: image_id -> list of boxes of this class.
    Returns None when the class has no ground truth.
    """
    n_gt = sum(len(v) for v in gts_by_image.values())
    if n_gt == 0:
        return None
    scored = []
    for image_id, preds in preds_by_image.items():
        gts = gts_by_image.get(image_id, [])
        tp, fp, _ = match_detections(preds, gts, iou_threshold)
        tp_idx = {i for i, _, _ in tp}
        for i, (box, conf) in enumerate(preds):
            scored.append((conf, i in tp_idx))
    scored.sort(key=lambda t: -t[0])
    if not scored:
        return 0.0
    flags = [is_tp for _, is_tp in scored]
    precisions, recalls = _pr_curve(flags, n_gt)
    return _ap_all_points(precisions, recalls)


@dataclass
class ClassMetrics:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    ap: float | None = None


@dataclass
class EvalReport:
    iou_threshold: float
    per_class: dict = field(default_factory=dict)
    map: float = 0.0
    classes_without_gt: list = field(default_factory=list)

    def to_dict(self):
        return {
            "iou_threshold": self.iou_threshold,
            "map": self.map,
            "classes_without_gt": self.classes_without_gt,
            "per_class": {
                name: vars(m) for name, m in self.per_class.items()
            },
        }


def _ground_truth_tables(manifest):
    """(image_id, class) -> gt boxes; plus image metadata."""
    id_to_label = {c["id"]: c["name"] for c in manifest["categories"]}
    gts = {}
    for ann in manifest["annotations"]:
        key = (ann["image_id"], id_to_label[ann["category_id"]])
        gts.setdefault(key, []).append(tuple(ann["bbox"]))
    return gts


def _pixel_detections(pred_set, manifest):
    if pred_set.space == "pixel":
        return pred_set.detections
    dims = {im["id"]: (im["width"], im["height"]) for im in manifest["images"]}
    out = []
    for det in pred_set.detections:
        w, h = dims[det.image_id]
        x, y, bw, bh = det.box
        out.append(Detection(det.image_id, det.label,
                             (x * w, y * h, bw * w, bh * h), det.confidence))
    return out


def evaluate(pred_set: PredictionSet, manifest, thresholds=(0.8,)):
    """One EvalReport per IoU threshold."""
    known = {im["id"] for im in manifest["images"]}
    for det in pred_set.detections:
        if det.image_id not in known:
            raise ValueError(f"prediction references unknown image id {det.image_id}")
    dets = _pixel_detections(pred_set, manifest)
    gts = _ground_truth_tables(manifest)

    preds_by = {}
    for det in dets:
        preds_by.setdefault((det.image_id, det.label), []).append(
            (det.box, det.confidence))

    reports = []
    for thr in thresholds:
        report = EvalReport(iou_threshold=thr)
        aps = []
        for name in CLASS_LABELS:
            m = ClassMetrics()
            class_gts = {img: boxes for (img, cls), boxes in gts.items()
                         if cls == name}
            class_preds = {img: boxes for (img, cls), boxes in preds_by.items()
                           if cls == name}
            for image_id in known:
                p = class_preds.get(image_id, [])
                g = class_gts.get(image_id, [])
                tp, fp, fn = match_detections(p, g, thr)
                m.tp += len(tp)
                m.fp += len(fp)
                m.fn += len(fn)
            if m.tp + m.fp > 0:
                m.precision = m.tp / (m.tp + m.fp)
            if m.tp + m.fn > 0:
                m.recall = m.tp / (m.tp + m.fn)
            if m.precision is not None and m.recall is not None \
                    and m.precision + m.recall > 0:
                m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall)
            m.ap = average_precision(class_preds, class_gts, name, thr)
            if m.ap is None:
                report.classes_without_gt.append(name)
            else:
                aps.append(m.ap)
            report.per_class[name] = m
        report.map = sum(aps) / len(aps) if aps else 0.0
        reports.append(report)
    return reports


def _first_page_flags(manifest):
    flags = {}
    for im in manifest["images"]:
        if "page_ordinal" in im:
            flags[im["id"]] = im["page_ordinal"] == 0
        elif "page_kind" in im:
            flags[im["id"]] = im["page_kind"] == "title"
        else:
            return None
    return flags


def apply_heuristics(pred_set: PredictionSet, manifest,
                     which=("page-order", "position")):
    """Remove detections that are structurally impossible.

    page-order: abstract/author/title cannot appear off the first page.
    position: a title cannot start below the top 30% of the page.
    Removals are logged; the operation is idempotent.
    """
    first = _first_page_flags(manifest)
    dims = {im["id"]: (im["width"], im["height"]) for im in manifest["images"]}
    kept, removed = [], []
    for det in pred_set.detections:
        reason = None
        if "page-order" in which:
            if first is None:
                warnings.warn("no page-ordinal metadata; page-order heuristic skipped")
            elif det.label in FIRST_PAGE_ONLY_CLASSES and not first.get(det.image_id, True):
                reason = "page-order"
        if reason is None and "position" in which and det.label == "title":
            top = det.box[1]
            if pred_set.space == "pixel":
                top = top / dims[det.image_id][1]
            if top > PAGE_HEAD_FRACTION:
                reason = "position"
        if reason is None:
            kept.append(det)
        else:
            removed.append((det, reason))
            log.info("removed %s on image %s (%s)", det.label, det.image_id, reason)
    out = PredictionSet(kept, space=pred_set.space)
    out.removed = removed
    return out


@dataclass
class ErrorBreakdown:
    # per class: false positives split by failure mode
    false_positives: dict = field(default_factory=dict)
    # per class: false negatives split into missed / absorbed-by-other-class
    false_negatives: dict = field(default_factory=dict)


def error_distribution(pred_set: PredictionSet, manifest, iou_threshold):
    """Partition FPs into misplaced-box / misclassified / hallucinated and
    FNs into missed / absorbed-by-other-class."""
    dets = _pixel_detections(pred_set, manifest)
    gts = _ground_truth_tables(manifest)
    known = {im["id"] for im in manifest["images"]}

    preds_by = {}
    for det in dets:
        preds_by.setdefault((det.image_id, det.label), []).append(
            (det.box, det.confidence))

    out = ErrorBreakdown(
        false_positives={n: {"misplaced-box": 0, "misclassified": 0,
                             "hallucinated": 0} for n in CLASS_LABELS},
        false_negatives={n: {"missed": 0, "absorbed-by-other-class": 0}
                         for n in CLASS_LABELS},
    )
    for name in CLASS_LABELS:
        for image_id in known:
            p = preds_by.get((image_id, name), [])
            g = gts.get((image_id, name), [])
            tp, fp, fn = match_detections(p, g, iou_threshold)
            other_gts = [(cls, box) for (img, cls), boxes in gts.items()
                         if img == image_id and cls != name for box in boxes]
            other_preds = [(cls, box) for (img, cls), boxes in preds_by.items()
                           if img == image_id and cls != name
                           for box, _ in boxes]
            for i in fp:
                box = p[i][0]
                if any(0 < iou(box, gt) < iou_threshold for gt in g):
                    out.false_positives[name]["misplaced-box"] += 1
                elif any(iou(box, gb) >= iou_threshold for _, gb in other_gts):
                    out.false_positives[name]["misclassified"] += 1
                else:
                    out.false_positives[name]["hallucinated"] += 1
            for j in fn:
                gt = g[j]
                if any(iou(pb, gt) >= iou_threshold for _, pb in other_preds):
                    out.false_negatives[name]["absorbed-by-other-class"] += 1
                else:
                    out.false_negatives[name]["missed"] += 1
    return out
