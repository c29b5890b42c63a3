"""Seeded sampling: determinism, range containment, coverage."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthpages.sampler import (
    BBox,
    RngSeed,
    sample_page_config,
    sample_placement,
    uniform,
)
from synthpages.style import Range


def test_rngseed_deterministic():
    a = RngSeed(7, 3).generator().random(8)
    b = RngSeed(7, 3).generator().random(8)
    assert np.array_equal(a, b)


def test_rngseed_streams_differ():
    a = RngSeed(7, 0).generator().random(8)
    b = RngSeed(7, 1).generator().random(8)
    assert not np.array_equal(a, b)


def test_rngseed_split_decorrelates():
    base = RngSeed(7, 5)
    assert base.split(1) != base
    assert base.split(1) != base.split(2)
    # splitting is itself deterministic
    assert base.split(3) == base.split(3)


@given(st.floats(0, 0.5), st.floats(0, 0.5), st.integers(0, 2**32 - 1))
@settings(max_examples=200)
def test_uniform_stays_inside_range(lo, width, seed):
    r = Range(lo, lo + width)
    rng = RngSeed(seed).generator()
    for _ in range(20):
        v = uniform(rng, r)
        assert r.min <= v <= r.max


def test_uniform_degenerate_range():
    r = Range(0.25, 0.25)
    assert uniform(RngSeed(0).generator(), r) == 0.25


@pytest.mark.parametrize("name", ["acl", "vis", "cs150", "acl+vis"])
def test_page_config_always_valid(name, request):
    from synthpages.style import bundled_profile
    profile = bundled_profile(name)
    for i in range(300):
        cfg = sample_page_config(profile, RngSeed(17, i))
        cfg.validate()
        assert cfg.right - cfg.left >= 2 * cfg.column_width + cfg.column_spacing - 0.01


def test_page_config_deterministic(acl):
    a = sample_page_config(acl, RngSeed(3, 44))
    b = sample_page_config(acl, RngSeed(3, 44))
    assert (a.top, a.bottom, a.left, a.right) == (b.top, b.bottom, b.left, b.right)
    assert a.element_counts == b.element_counts
    assert a.chosen_distances == b.chosen_distances
    assert a.page_kind == b.page_kind


def test_page_kind_frequency_tracks_counts(vis):
    # VIS: 287 title / 2619 total ~ 11%
    kinds = [sample_page_config(vis, RngSeed(23, i)).page_kind
             for i in range(3000)]
    frac = kinds.count("title") / len(kinds)
    expect = 287 / (287 + 2332)
    assert abs(frac - expect) < 0.03


def test_margin_coverage(vis):
    # sampled top margins should span most of the envelope [0.001, 0.151]
    tops = [sample_page_config(vis, RngSeed(5, i)).top for i in range(2000)]
    lo, hi = min(tops), max(tops)
    width = 0.151 - 0.001
    assert (hi - lo) / width > 0.9


def test_sample_placement_contained(acl):
    spec = acl.placements["figure"][1]  # left slot
    for i in range(500):
        box = sample_placement(spec, RngSeed(9, i))
        assert box.valid()


def test_column_x(acl):
    cfg = sample_page_config(acl, RngSeed(1, 0))
    assert cfg.column_x(0) == cfg.left
    assert cfg.column_x(1) == pytest.approx(
        cfg.left + cfg.column_width + cfg.column_spacing)


# ---------------------------------------------------------------- BBox

def test_bbox_geometry():
    b = BBox(0.1, 0.2, 0.3, 0.4)
    assert b.x2 == pytest.approx(0.4)
    assert b.y2 == pytest.approx(0.6)
    assert (b.cx, b.cy) == (pytest.approx(0.25), pytest.approx(0.4))
    assert b.area == pytest.approx(0.12)


def test_bbox_intersection():
    a = BBox(0, 0, 0.5, 0.5)
    b = BBox(0.25, 0.25, 0.5, 0.5)
    assert a.intersection_area(b) == pytest.approx(0.0625)
    assert a.intersection_area(BBox(0.6, 0.6, 0.1, 0.1)) == 0.0


@given(st.floats(-0.5, 1.5), st.floats(-0.5, 1.5),
       st.floats(0.01, 0.9), st.floats(0.01, 0.9))
@settings(max_examples=300)
def test_bbox_clamped_always_valid(x, y, w, h):
    assert BBox(x, y, w, h).clamped().valid()


def test_bbox_clamp_shrinks_oversize():
    b = BBox(0, 0, 2.0, 0.5).clamped()
    assert b.w == 1.0 and b.x == 0.0
