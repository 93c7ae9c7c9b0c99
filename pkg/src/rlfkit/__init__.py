"""Detection, CSS-property localization and impact ranking of responsive
layout failures, operating on captured page bundles."""

from .snapshot import BBox, CaptureBundle, DomNode, load_bundle, save_bundle
from .detection import FailureReport, detect, contains, intersects
from .css import StyleIndex, media_active, normalize_length, resolve_authored, specificity
from .localization import (
    Candidate,
    Direction,
    PROPERTY_SETS,
    axis_relevant,
    collect_candidates,
    failure_direction,
    localize_small_range,
    neighbor_search,
)
from .prioritization import RankedList, rank, render_report
from .noi import RegionPair, classify_noi
from .metrics import GroundTruth, Mutation, evaluate, mrr, oracle_verify, p_at_k, top_n

__all__ = [
    "BBox",
    "CaptureBundle",
    "Candidate",
    "Direction",
    "DomNode",
    "FailureReport",
    "GroundTruth",
    "Mutation",
    "PROPERTY_SETS",
    "RankedList",
    "RegionPair",
    "StyleIndex",
    "axis_relevant",
    "classify_noi",
    "collect_candidates",
    "contains",
    "detect",
    "evaluate",
    "failure_direction",
    "intersects",
    "load_bundle",
    "localize_small_range",
    "media_active",
    "mrr",
    "neighbor_search",
    "normalize_length",
    "oracle_verify",
    "p_at_k",
    "rank",
    "render_report",
    "resolve_authored",
    "save_bundle",
    "specificity",
    "top_n",
]

__version__ = "0.1.0"
