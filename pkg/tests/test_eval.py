"""Matching, AP, report assembly, heuristics, and error modes.

The matcher and AP tests are checked against independent reference
implementations written in a deliberately different style (global pair
selection instead of per-prediction greediness; numpy envelope instead of
the backwards loop).
"""

import math
import random

import numpy as np
import pytest

from synthpages.evaluation import (
    Detection,
    PredictionSet,
    apply_heuristics,
    average_precision,
    error_distribution,
    evaluate,
    iou,
    load_predictions,
    match_detections,
    save_predictions,
)

from conftest import gt_as_predictions, make_manifest


# ---------------------------------------------------------------- iou

def test_iou_hand_computed():
    # two 100x100 boxes offset by 50 in x: inter 50*100, union 15000
    assert iou((0, 0, 100, 100), (50, 0, 100, 100)) == pytest.approx(5000 / 15000)


def test_iou_identity_and_disjoint():
    assert iou((10, 10, 30, 40), (10, 10, 30, 40)) == 1.0
    assert iou((0, 0, 10, 10), (20, 20, 5, 5)) == 0.0


def test_iou_zero_area():
    assert iou((0, 0, 0, 0), (0, 0, 0, 0)) == 0.0


def test_iou_containment():
    # 50x50 inside 100x100
    assert iou((0, 0, 100, 100), (25, 25, 50, 50)) == pytest.approx(2500 / 10000)


# ---------------------------------------------------------------- matcher

def reference_match(preds, gts, thr):
    """Global pair selection: repeatedly take the best remaining
    (confidence, iou, -pred index) pair at or above the threshold."""
    pairs = []
    for i, (box, conf) in enumerate(preds):
        for j, gt in enumerate(gts):
            v = iou(box, gt)
            if v >= thr:
                pairs.append((conf, v, -i, i, j))
    pairs.sort(reverse=True)
    used_p, used_g = set(), set()
    tp = []
    for conf, v, _, i, j in pairs:
        if i in used_p or j in used_g:
            continue
        used_p.add(i)
        used_g.add(j)
        tp.append((i, j))
    fp = sorted(set(range(len(preds))) - used_p)
    fn = sorted(set(range(len(gts))) - used_g)
    return sorted(tp), fp, fn


def random_instance(rnd, max_boxes=8):
    def boxes(n):
        out = []
        for _ in range(n):
            x, y = rnd.uniform(0, 80), rnd.uniform(0, 80)
            out.append((x, y, rnd.uniform(5, 40), rnd.uniform(5, 40)))
        return out
    preds = [(b, round(rnd.random(), 3)) for b in boxes(rnd.randint(0, max_boxes))]
    gts = boxes(rnd.randint(0, max_boxes))
    return preds, gts


def test_matcher_equals_reference_bulk():
    rnd = random.Random(1234)
    mismatches = 0
    for _ in range(10_000):
        preds, gts = random_instance(rnd)
        thr = rnd.choice([0.3, 0.5, 0.7])
        tp, fp, fn = match_detections(preds, gts, thr)
        got = (sorted((i, j) for i, j, _ in tp), sorted(fp), sorted(fn))
        want = reference_match(preds, gts, thr)
        if got != want:
            mismatches += 1
    assert mismatches == 0


def test_matcher_prefers_higher_confidence():
    gts = [(0, 0, 10, 10)]
    preds = [((0, 0, 10, 10), 0.3), ((1, 0, 10, 10), 0.9)]
    tp, fp, fn = match_detections(preds, gts, 0.5)
    assert [(i, j) for i, j, _ in tp] == [(1, 0)]
    assert fp == [0] and fn == []


def test_matcher_picks_best_iou():
    # the prediction sits closer to gt 1 than gt 0
    gts = [(0, 0, 10, 10), (0.5, 0, 10, 10)]
    preds = [((0.4, 0, 10, 10), 0.8)]
    tp, _, fn = match_detections(preds, gts, 0.5)
    assert tp[0][1] == 1
    assert fn == [0]


def test_matcher_threshold_validation():
    with pytest.raises(ValueError):
        match_detections([], [], 0.0)
    with pytest.raises(ValueError):
        match_detections([], [], 1.5)


def test_matcher_empty_sides():
    tp, fp, fn = match_detections([], [(0, 0, 5, 5)], 0.5)
    assert (tp, fp, fn) == ([], [], [0])
    tp, fp, fn = match_detections([((0, 0, 5, 5), 0.9)], [], 0.5)
    assert (tp, fp, fn) == ([], [0], [])


# ---------------------------------------------------------------- AP

def reference_ap(flags, n_gt):
    """Numpy all-points AP from confidence-ordered TP flags."""
    flags = np.asarray(flags, dtype=float)
    tp = np.cumsum(flags)
    precision = tp / np.arange(1, len(flags) + 1)
    recall = tp / n_gt
    env = np.maximum.accumulate(precision[::-1])[::-1]
    prev = np.concatenate([[0.0], recall[:-1]])
    return float(np.sum(env * (recall - prev)))


def ap_from_fixture(flags, n_gt):
    """Drive average_precision with synthetic boxes realizing the flags."""
    gts, preds = [], []
    gx = 0.0
    for k, is_tp in enumerate(flags):
        conf = 1.0 - k * 0.01
        if is_tp:
            box = (gx, 0, 10, 10)
            gts.append(box)
            preds.append((box, conf))
        else:
            preds.append(((gx, 500, 10, 10), conf))  # hits nothing
        gx += 100
    while len(gts) < n_gt:
        gts.append((gx, 0, 10, 10))
        gx += 100
    return average_precision({0: preds}, {0: gts}, "figure", 0.5)


@pytest.mark.parametrize("flags,n_gt", [
    ([1, 1, 1], 3),
    ([1, 0, 1, 0, 1], 5),
    ([0, 1], 1),
    ([1, 0, 0, 0], 2),
    ([0, 0, 1, 1, 0, 1, 0, 1], 6),
    ([1], 10),
])
def test_ap_matches_independent_enumeration(flags, n_gt):
    got = ap_from_fixture(flags, n_gt)
    want = reference_ap(flags, n_gt)
    assert got == pytest.approx(want, abs=1e-9)


def test_ap_no_gt_is_none():
    assert average_precision({0: [((0, 0, 5, 5), 0.5)]}, {}, "figure", 0.5) is None


def test_ap_no_predictions_is_zero():
    assert average_precision({}, {0: [(0, 0, 5, 5)]}, "figure", 0.5) == 0.0


def test_ap_perfect_detector_is_one():
    boxes = [(i * 50, 0, 20, 20) for i in range(4)]
    preds = [(b, 0.9) for b in boxes]
    assert average_precision({0: preds}, {0: boxes}, "table", 0.9) == 1.0


# ---------------------------------------------------------------- evaluate

@pytest.fixture
def tiny_manifest():
    return make_manifest(
        images=[(0, 1000, 1000, "title"), (1, 1000, 1000, "inner")],
        annotations=[
            (0, 0, "title", (100, 50, 500, 60)),
            (1, 0, "abstract", (100, 200, 300, 200)),
            (2, 1, "figure", (100, 100, 300, 300)),
            (3, 1, "caption", (100, 420, 300, 40)),
        ])


def test_self_evaluation_identity(tiny_manifest):
    ps = gt_as_predictions(tiny_manifest)
    for report in evaluate(ps, tiny_manifest, (0.7, 0.8, 0.9)):
        assert report.map == 1.0
        for name, m in report.per_class.items():
            if m.ap is None:
                assert name in report.classes_without_gt
            else:
                assert m.precision == 1.0 and m.recall == 1.0 and m.f1 == 1.0


def test_evaluate_unknown_image_rejected(tiny_manifest):
    ps = PredictionSet([Detection(99, "figure", (0, 0, 10, 10), 0.5)])
    with pytest.raises(ValueError, match="unknown image"):
        evaluate(ps, tiny_manifest)


def test_evaluate_normalized_space(tiny_manifest):
    dets = [Detection(0, "title", (0.1, 0.05, 0.5, 0.06), 0.9)]
    report = evaluate(PredictionSet(dets, space="normalized"),
                      tiny_manifest, (0.8,))[0]
    assert report.per_class["title"].tp == 1


def test_evaluate_report_dict_shape(tiny_manifest):
    report = evaluate(gt_as_predictions(tiny_manifest), tiny_manifest)[0]
    d = report.to_dict()
    assert set(d) == {"iou_threshold", "map", "classes_without_gt", "per_class"}
    assert len(d["per_class"]) == 9


def test_confidence_out_of_range():
    with pytest.raises(ValueError):
        Detection(0, "figure", (0, 0, 1, 1), 1.5)


def test_prediction_roundtrip(tmp_path, tiny_manifest):
    ps = gt_as_predictions(tiny_manifest, score=0.75)
    path = tmp_path / "preds.jsonl"
    save_predictions(ps, path)
    back = load_predictions(path)
    assert [(d.image_id, d.label, d.box, d.confidence) for d in back.detections] \
        == [(d.image_id, d.label, d.box, d.confidence) for d in ps.detections]


# ---------------------------------------------------------------- heuristics

def first_page_manifest(n_pages=4):
    images = [(i, 1000, 1000, "title" if i == 0 else "inner")
              for i in range(n_pages)]
    return make_manifest(images, [])


def test_heuristics_remove_crafted_violations():
    m = first_page_manifest()
    good = [Detection(0, "abstract", (100, 300, 300, 200), 0.9),
            Detection(0, "title", (100, 100, 500, 60), 0.9),
            Detection(1, "figure", (100, 100, 300, 300), 0.9)]
    bad_abstracts = [Detection(1 + i % 3, "abstract", (50, 400, 200, 100), 0.8)
                     for i in range(10)]
    bad_titles = [Detection(0, "title", (100, 400 + i * 10, 300, 50), 0.8)
                  for i in range(10)]
    ps = PredictionSet(good + bad_abstracts + bad_titles)
    out = apply_heuristics(ps, m)
    assert len(out.removed) == 20
    assert len(out.detections) == 3
    reasons = [r for _, r in out.removed]
    assert reasons.count("page-order") == 10
    assert reasons.count("position") == 10


def test_heuristics_idempotent():
    m = first_page_manifest()
    ps = PredictionSet(
        [Detection(1, "title", (0, 0, 100, 50), 0.9),
         Detection(0, "figure", (0, 500, 100, 100), 0.9)])
    once = apply_heuristics(ps, m)
    twice = apply_heuristics(once, m)
    assert len(twice.removed) == 0
    assert len(twice.detections) == len(once.detections)


def test_heuristics_title_boundary():
    # top exactly at 30% stays; just below goes
    m = first_page_manifest(1)
    keep = Detection(0, "title", (0, 300, 100, 50), 0.9)
    drop = Detection(0, "title", (0, 301, 100, 50), 0.9)
    out = apply_heuristics(PredictionSet([keep, drop]), m, which=("position",))
    assert len(out.detections) == 1
    assert out.detections[0].box[1] == 300


def test_heuristics_page_ordinal_metadata_preferred():
    m = first_page_manifest(2)
    for im in m["images"]:
        im["page_ordinal"] = 1  # no page is first in document order
        del im["page_kind"]
    ps = PredictionSet([Detection(0, "abstract", (0, 0, 100, 100), 0.9)])
    out = apply_heuristics(ps, m, which=("page-order",))
    assert len(out.removed) == 1


def test_heuristics_missing_metadata_warns():
    m = first_page_manifest(1)
    del m["images"][0]["page_kind"]
    ps = PredictionSet([Detection(0, "abstract", (0, 0, 100, 100), 0.9)])
    with pytest.warns(UserWarning, match="page-ordinal"):
        out = apply_heuristics(ps, m, which=("page-order",))
    assert len(out.detections) == 1


def test_heuristics_normalized_space():
    m = first_page_manifest(1)
    ps = PredictionSet([Detection(0, "title", (0.1, 0.5, 0.3, 0.05), 0.9)],
                       space="normalized")
    out = apply_heuristics(ps, m)
    assert len(out.removed) == 1


# ---------------------------------------------------------------- error modes

def test_error_modes():
    m = make_manifest(
        images=[(0, 1000, 1000, "inner")],
        annotations=[(0, 0, "figure", (100, 100, 200, 200)),
                     (1, 0, "table", (500, 500, 200, 200)),
                     (2, 0, "figure", (100, 700, 200, 200))])
    preds = [
        # slightly off the first figure: misplaced-box + that gt stays FN->missed? no, misplaced means IoU>0 but < thr
        Detection(0, "figure", (150, 150, 200, 200), 0.9),
        # right box, wrong class on the table: misclassified FP + absorbed FN
        Detection(0, "algorithm", (500, 500, 200, 200), 0.8),
        # nowhere near anything
        Detection(0, "equation", (800, 50, 50, 50), 0.7),
    ]
    out = error_distribution(PredictionSet(preds), m, 0.8)
    assert out.false_positives["figure"]["misplaced-box"] == 1
    assert out.false_positives["algorithm"]["misclassified"] == 1
    assert out.false_positives["equation"]["hallucinated"] == 1
    assert out.false_negatives["table"]["absorbed-by-other-class"] == 1
    assert out.false_negatives["figure"]["missed"] == 2
