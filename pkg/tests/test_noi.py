import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from rlfkit.detection import detect
from rlfkit.errors import DimensionMismatch
from rlfkit.noi import RegionPair, annotate_observability, classify_noi
from rlfkit.snapshot import BBox


def pair(visible, hidden, region=None):
    region = region or BBox(0, 0, visible.shape[1], visible.shape[0])
    return RegionPair(visible, hidden, region, "rlf-test")


def blank(h=20, w=30, value=200):
    return np.full((h, w, 4), value, dtype=np.uint8)


def test_identical_images_are_noi():
    img = blank()
    verdict = classify_noi(pair(img, img.copy()))
    assert verdict.observability == "noi"
    assert verdict.differing_pixels == 0


def test_single_pixel_difference_is_observable():
    visible = blank()
    hidden = blank()
    visible[3, 4] = (0, 0, 0, 255)
    verdict = classify_noi(pair(visible, hidden), min_diff_pixels=1)
    assert verdict.observability == "observable"
    assert verdict.differing_pixels == 1


def test_region_limits_the_diff():
    visible = blank()
    hidden = blank()
    visible[10:, :] = 0  # damage outside the region below
    verdict = classify_noi(pair(visible, hidden, region=BBox(0, 0, 30, 10)))
    assert verdict.observability == "noi"


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionMismatch):
        pair(blank(10, 10), blank(10, 11))


raster = arrays(dtype=np.uint8, shape=(8, 8, 4))


@given(raster, raster)
@settings(max_examples=50, deadline=None)
def test_symmetry(a, b):
    assert (
        classify_noi(pair(a, b)).differing_pixels
        == classify_noi(pair(b, a)).differing_pixels
    )


@given(raster, raster, st.integers(0, 254))
@settings(max_examples=50, deadline=None)
def test_raising_threshold_never_increases_count(a, b, threshold):
    low = classify_noi(pair(a, b), channel_threshold=threshold)
    high = classify_noi(pair(a, b), channel_threshold=threshold + 1)
    assert high.differing_pixels <= low.differing_pixels


@given(raster)
@settings(max_examples=100, deadline=None)
def test_self_comparison_is_always_noi(img):
    assert classify_noi(pair(img, img.copy())).observability == "noi"


# -- fixture flows -----------------------------------------------------------


def test_opaque_protruder_is_observable(bundles):
    bundle = bundles("noi_opaque")
    failures = detect(bundle)
    annotated, warnings = annotate_observability(bundle, failures)
    assert warnings == []
    assert [f.observability for f in annotated] == ["observable"]


def test_transparent_protruder_is_noi_and_retained(bundles):
    bundle = bundles("noi_transparent")
    failures = detect(bundle)
    annotated, _ = annotate_observability(bundle, failures)
    assert [f.observability for f in annotated] == ["noi"]
    assert len(annotated) == len(failures)  # flagged, never dropped


def test_missing_pair_keeps_unknown(bundles):
    bundle = bundles("clean")
    failures = detect(bundles("noi_opaque"))
    annotated, warnings = annotate_observability(bundle, failures)
    assert [f.observability for f in annotated] == ["unknown"]
    assert warnings
