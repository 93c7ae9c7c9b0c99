"""Phase 1b: observability classification of detected failures.

A failure found through geometry may have no visible pixel footprint (a
transparent or background-colored protruder). Each failure region is
screenshot twice — with the affected element shown and hidden — and the two
rasters are diffed inside the region. No difference means the failure is a
non-observable issue (NOI); such failures are kept in the output, flagged,
never dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image

from .detection import FailureReport
from .errors import DimensionMismatch
from .snapshot import BBox, CaptureBundle

DEFAULT_CHANNEL_THRESHOLD = 0
DEFAULT_MIN_DIFF_PIXELS = 1

VISIBLE_SUFFIX = ".visible.png"
HIDDEN_SUFFIX = ".hidden.png"


@dataclass(frozen=True)
class RegionPair:
    """Two same-size RGBA rasters of one failure region."""

    visible_image: np.ndarray
    hidden_image: np.ndarray
    region: BBox
    failure_id: str

    def __post_init__(self) -> None:
        if self.visible_image.shape != self.hidden_image.shape:
            raise DimensionMismatch(
                f"{self.failure_id}: visible {self.visible_image.shape} vs "
                f"hidden {self.hidden_image.shape}"
            )


@dataclass(frozen=True)
class NoiVerdict:
    observability: str       # "observable" | "noi"
    differing_pixels: int


def classify_noi(
    pair: RegionPair,
    channel_threshold: int = DEFAULT_CHANNEL_THRESHOLD,
    min_diff_pixels: int = DEFAULT_MIN_DIFF_PIXELS,
) -> NoiVerdict:
    """Count region pixels where any channel differs by more than the
    threshold; the failure is observable iff enough pixels differ."""
    vis = pair.visible_image.astype(np.int16)
    hid = pair.hidden_image.astype(np.int16)

    height, width = vis.shape[0], vis.shape[1]
    x0 = max(0, int(pair.region.left))
    y0 = max(0, int(pair.region.top))
    x1 = min(width, int(np.ceil(pair.region.right)))
    y1 = min(height, int(np.ceil(pair.region.bottom)))
    if x1 <= x0 or y1 <= y0:
        return NoiVerdict("noi", 0)

    delta = np.abs(vis[y0:y1, x0:x1] - hid[y0:y1, x0:x1])
    differing = int(np.count_nonzero((delta > channel_threshold).any(axis=-1)))
    verdict = "observable" if differing >= min_diff_pixels else "noi"
    return NoiVerdict(verdict, differing)


def load_region_pair(images_dir: Path, failure: FailureReport) -> Optional[RegionPair]:
    """Read the screenshot pair for a failure from the bundle's images
    directory; None when either layer is missing.

    The stored rasters are already clipped to the failure region by the
    capture side, so the pair's region covers the whole raster.
    """
    visible_path = images_dir / f"{failure.id}{VISIBLE_SUFFIX}"
    hidden_path = images_dir / f"{failure.id}{HIDDEN_SUFFIX}"
    if not visible_path.is_file() or not hidden_path.is_file():
        return None
    visible = np.asarray(Image.open(visible_path).convert("RGBA"))
    hidden = np.asarray(Image.open(hidden_path).convert("RGBA"))
    region = BBox(0, 0, visible.shape[1], visible.shape[0])
    return RegionPair(
        visible_image=visible,
        hidden_image=hidden,
        region=region,
        failure_id=failure.id,
    )


def failure_region(bundle: CaptureBundle, failure: FailureReport) -> BBox:
    """Bounding box of the affected elements at the narrowest failing width,
    in page coordinates."""
    if not failure.affected:
        rec = bundle.record(failure.fail_min)
        body = rec.entries.get(bundle.body_xpath)
        return body.bbox if body else BBox(0, 0, 0, 0)
    boxes = [bundle.element_box(xp, failure.fail_min) for xp in failure.affected]
    left = min(b.left for b in boxes)
    top = min(b.top for b in boxes)
    right = max(b.right for b in boxes)
    bottom = max(b.bottom for b in boxes)
    return BBox(left, top, right - left, bottom - top)


def annotate_observability(
    bundle: CaptureBundle,
    failures: list[FailureReport],
    channel_threshold: int = DEFAULT_CHANNEL_THRESHOLD,
    min_diff_pixels: int = DEFAULT_MIN_DIFF_PIXELS,
) -> tuple[list[FailureReport], list[str]]:
    """Classify every failure with an available screenshot pair; failures
    without one keep observability 'unknown'."""
    annotated = []
    warnings = []
    for failure in failures:
        if bundle.images_dir is None:
            annotated.append(failure)
            warnings.append(f"{failure.id}: bundle has no images directory")
            continue
        pair = load_region_pair(bundle.images_dir, failure)
        if pair is None:
            annotated.append(failure)
            warnings.append(f"{failure.id}: no screenshot pair recorded")
            continue
        verdict = classify_noi(pair, channel_threshold, min_diff_pixels)
        annotated.append(replace(failure, observability=verdict.observability))
    return annotated, warnings
