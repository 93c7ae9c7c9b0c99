"""Phase 1: scan every sampled viewport width, classify the five failure
types, and merge contiguous failing widths into fail_min..fail_max reports.

Failure types
  EP  element protrusion   child escapes its DOM container's box
  EC  element collision    two non-nested elements overlap
  VP  viewport protrusion  element crosses the body's horizontal bounds
  WE  wrapping elements    a row member drops below the row band
  SR  small-range anomaly  the relation map flips inside one narrow interior
                           interval while both neighbors agree

Elements carrying a transition or transform are dropped from the element
pool before any classification: self-animating widgets (carousels,
slideshows) would otherwise show up as layout changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .snapshot import BBox, CaptureBundle

DEFAULT_EPS = 1.0
DEFAULT_SR_MAX_SPAN = 50
ROW_OVERLAP_FRACTION = 0.5

RLF_TYPES = ("EC", "EP", "VP", "WE", "SR")


def intersects(a: BBox, b: BBox, eps: float) -> bool:
    """True when the boxes overlap by more than eps on both axes."""
    overlap_x = min(a.right, b.right) - max(a.left, b.left)
    overlap_y = min(a.bottom, b.bottom) - max(a.top, b.top)
    return overlap_x > eps and overlap_y > eps


def contains(parent: BBox, child: BBox, eps: float) -> bool:
    """True when the child lies inside the parent expanded by eps per side."""
    return (
        child.left >= parent.left - eps
        and child.right <= parent.right + eps
        and child.top >= parent.top - eps
        and child.bottom <= parent.bottom + eps
    )


@dataclass(frozen=True)
class FailureReport:
    id: str
    rlf_type: str
    affected: tuple[str, ...]
    fail_min: int
    fail_max: int
    boundary: str            # left | right | top | bottom | none
    observability: str = "unknown"

    def key(self) -> tuple:
        """Identity of the failure independent of its width range."""
        return (self.rlf_type, self.affected)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "rlf_type": self.rlf_type,
            "affected": list(self.affected),
            "fail_min": self.fail_min,
            "fail_max": self.fail_max,
            "boundary": self.boundary,
            "observability": self.observability,
        }

    @staticmethod
    def from_json(data: dict) -> "FailureReport":
        return FailureReport(
            id=str(data["id"]),
            rlf_type=str(data["rlf_type"]),
            affected=tuple(data["affected"]),
            fail_min=int(data["fail_min"]),
            fail_max=int(data["fail_max"]),
            boundary=str(data["boundary"]),
            observability=str(data.get("observability", "unknown")),
        )


@dataclass(frozen=True)
class RelationMap:
    """Boolean layout relations at one width, in canonical (hashable) form."""

    containment: frozenset            # (parent, child) DOM pairs that hold
    rows: frozenset                   # frozensets of sibling xpaths per row
    overlaps: frozenset               # frozensets {a, b} of intersecting pairs


@dataclass
class _Hit:
    """One per-width classification, prior to range merging."""

    width: int
    rlf_type: str
    affected: tuple[str, ...]
    boundary: str


def element_pool(bundle: CaptureBundle, width: int) -> list[str]:
    """Visible, non-animated elements at a width, in document order."""
    rec = bundle.record(width)
    pool = []
    for xp, state in rec.entries.items():
        if not state.visible:
            continue
        if state.computed.has_transition or state.computed.has_transform:
            continue
        pool.append(xp)
    pool.sort(key=bundle.doc_order)
    return pool


def _y_overlap_fraction(a: BBox, b: BBox) -> float:
    overlap = min(a.bottom, b.bottom) - max(a.top, b.top)
    smaller = min(a.h, b.h)
    if smaller <= 0:
        return 0.0
    return overlap / smaller


def _row_clusters(
    bundle: CaptureBundle, width: int, members: list[str]
) -> list[list[str]]:
    """Greedy top-sorted clustering of siblings into horizontal rows.

    Two members share a row when their vertical extents overlap by at least
    half of the smaller extent.
    """
    boxes = {xp: bundle.element_box(xp, width) for xp in members}
    ordered = sorted(members, key=lambda xp: (boxes[xp].top, bundle.doc_order(xp)))
    clusters: list[list[str]] = []
    for xp in ordered:
        placed = False
        for cluster in clusters:
            if all(
                _y_overlap_fraction(boxes[xp], boxes[other]) >= ROW_OVERLAP_FRACTION
                for other in cluster
            ):
                cluster.append(xp)
                placed = True
                break
        if not placed:
            clusters.append([xp])
    for cluster in clusters:
        cluster.sort(key=bundle.doc_order)
    return clusters


def relation_map(bundle: CaptureBundle, width: int, eps: float) -> RelationMap:
    """Containment, row and overlap relations among the pooled elements."""
    pool = element_pool(bundle, width)
    pool_set = set(pool)
    boxes = {xp: bundle.element_box(xp, width) for xp in pool}

    containment = set()
    for xp in pool:
        parent = bundle.parent_of(xp)
        if parent is None or parent not in pool_set:
            continue
        if contains(boxes[parent], boxes[xp], eps):
            containment.add((parent, xp))

    sibling_groups: dict[str, list[str]] = {}
    for xp in pool:
        parent = bundle.parent_of(xp)
        if parent is not None:
            sibling_groups.setdefault(parent, []).append(xp)
    rows = set()
    for members in sibling_groups.values():
        if len(members) < 2:
            continue
        for cluster in _row_clusters(bundle, width, members):
            if len(cluster) >= 2:
                rows.add(frozenset(cluster))

    overlaps = set()
    body = bundle.body_xpath
    html = bundle.html_xpath
    candidates = [xp for xp in pool if xp not in (body, html)]
    for i, a in enumerate(candidates):
        for b in candidates[i + 1 :]:
            if bundle.is_ancestor(a, b) or bundle.is_ancestor(b, a):
                continue
            if intersects(boxes[a], boxes[b], eps):
                overlaps.add(frozenset((a, b)))

    return RelationMap(
        containment=frozenset(containment),
        rows=frozenset(rows),
        overlaps=frozenset(overlaps),
    )


def _classify_width(
    bundle: CaptureBundle,
    width: int,
    eps: float,
    relmap: RelationMap,
    row_baseline: dict[frozenset, tuple[str, ...]],
) -> list[_Hit]:
    """All EP/EC/VP/WE hits at one width."""
    hits: list[_Hit] = []
    pool = element_pool(bundle, width)
    pool_set = set(pool)
    boxes = {xp: bundle.element_box(xp, width) for xp in pool}
    body = bundle.body_xpath
    html = bundle.html_xpath

    # EP: a child breaking the containment relation of its DOM parent.
    # Protrusion out of the body itself is viewport protrusion, not EP.
    for xp in pool:
        parent = bundle.parent_of(xp)
        if parent is None or parent in (body, html) or parent not in pool_set:
            continue
        if (parent, xp) not in relmap.containment:
            boundary = _violated_boundary(boxes[parent], boxes[xp], eps)
            hits.append(_Hit(width, "EP", (xp, parent), boundary))

    # EC: two visible non-nested elements overlapping.
    for pair in relmap.overlaps:
        a, b = sorted(pair, key=bundle.doc_order)
        hits.append(_Hit(width, "EC", (a, b), "none"))

    # VP: crossing the body's horizontal bounds.
    if body in pool_set:
        body_box = boxes[body]
        for xp in pool:
            if xp in (body, html):
                continue
            box = boxes[xp]
            crosses_left = box.left < body_box.left - eps
            crosses_right = box.right > body_box.right + eps
            if crosses_left or crosses_right:
                over_left = body_box.left - box.left
                over_right = box.right - body_box.right
                boundary = "right" if over_right >= over_left else "left"
                hits.append(_Hit(width, "VP", (xp, body), boundary))

    # WE: a member of a known row dropped below the row band.
    for group_key, members in row_baseline.items():
        if any(m not in pool_set for m in members):
            continue
        if group_key in relmap.rows:
            continue
        member_boxes = {m: boxes[m] for m in members}
        tops = [member_boxes[m].top for m in members]
        t0 = min(tops)
        band = [m for m in members if member_boxes[m].top <= t0 + eps]
        band_bottom = max(member_boxes[m].bottom for m in band)
        wrapped = [
            m
            for m in members
            if m not in band and member_boxes[m].top >= band_bottom - eps
        ]
        if not wrapped:
            continue
        rest = [m for m in members if m not in wrapped]
        hits.append(_Hit(width, "WE", tuple(wrapped + rest), "none"))

    return hits


def _violated_boundary(parent: BBox, child: BBox, eps: float) -> str:
    """The most-violated parent edge; 'none' when axes tie across both."""
    depths = {
        "left": (parent.left - eps) - child.left,
        "right": child.right - (parent.right + eps),
        "top": (parent.top - eps) - child.top,
        "bottom": child.bottom - (parent.bottom + eps),
    }
    violated = {k: v for k, v in depths.items() if v > 0}
    if not violated:
        return "none"
    horizontal = {k for k in violated if k in ("left", "right")}
    vertical = {k for k in violated if k in ("top", "bottom")}
    if horizontal and vertical:
        return "none"
    return max(violated, key=lambda k: violated[k])


def merge_ranges(hits: list[_Hit], widths: list[int]) -> list[FailureReport]:
    """Merge runs of consecutive sampled widths with equal (type, affected)
    into single reports. Ranges are maximal by construction; the report's
    boundary is the one observed at the run's narrowest width."""
    width_pos = {w: i for i, w in enumerate(widths)}
    by_key: dict[tuple, list[int]] = {}
    boundary_at: dict[tuple, str] = {}
    for hit in hits:
        key = (hit.rlf_type, hit.affected)
        by_key.setdefault(key, []).append(hit.width)
        boundary_at[(key, hit.width)] = hit.boundary

    reports: list[FailureReport] = []
    for key, key_widths in by_key.items():
        rlf_type, affected = key
        key_widths.sort()
        run_start = key_widths[0]
        prev = key_widths[0]
        for w in key_widths[1:]:
            if width_pos[w] == width_pos[prev] + 1:
                prev = w
                continue
            reports.append(
                FailureReport(
                    "", rlf_type, affected, run_start, prev,
                    boundary_at[(key, run_start)],
                )
            )
            run_start = w
            prev = w
        reports.append(
            FailureReport(
                "", rlf_type, affected, run_start, prev,
                boundary_at[(key, run_start)],
            )
        )

    return _finalize(reports)


def _finalize(reports: list[FailureReport]) -> list[FailureReport]:
    """Deterministic ordering and stable ids."""
    reports.sort(
        key=lambda r: (r.fail_min, r.fail_max, RLF_TYPES.index(r.rlf_type), r.affected)
    )
    return [replace(r, id=f"rlf-{i:03d}") for i, r in enumerate(reports)]


def detect(
    bundle: CaptureBundle,
    eps: float = DEFAULT_EPS,
    sr_max_span: int = DEFAULT_SR_MAX_SPAN,
) -> list[FailureReport]:
    """Run the full per-width scan and return merged failure reports.

    Deterministic: the same bundle and parameters always produce the same
    report list, ids included.
    """
    widths = bundle.widths()
    relmaps = {w: relation_map(bundle, w, eps) for w in widths}

    # Row baselines: a sibling set counts as a row group wherever it forms a
    # single row at some wider sampled width. Scanning from the widest down
    # keeps this a suffix accumulation.
    row_baseline_at: dict[int, dict[frozenset, tuple[str, ...]]] = {}
    seen_rows: dict[frozenset, tuple[str, ...]] = {}
    for w in reversed(widths):
        row_baseline_at[w] = dict(seen_rows)
        for row in relmaps[w].rows:
            seen_rows[row] = tuple(sorted(row, key=bundle.doc_order))

    hits: list[_Hit] = []
    for w in widths:
        hits.extend(_classify_width(bundle, w, eps, relmaps[w], row_baseline_at[w]))
    reports = merge_ranges(hits, widths)

    reports.extend(_detect_small_range(bundle, widths, relmaps, sr_max_span))
    return _finalize(reports)


def _detect_small_range(
    bundle: CaptureBundle,
    widths: list[int],
    relmaps: dict[int, RelationMap],
    sr_max_span: int,
) -> list[FailureReport]:
    """Interior intervals whose relation map differs from both agreeing
    neighbors, no wider than sr_max_span sampled widths."""
    if len(widths) < 3:
        return []
    reports = []
    runs: list[tuple[int, int]] = []
    start = 0
    for i in range(1, len(widths)):
        if relmaps[widths[i]] != relmaps[widths[start]]:
            runs.append((start, i - 1))
            start = i
    runs.append((start, len(widths) - 1))

    for start_idx, end_idx in runs:
        if start_idx == 0 or end_idx == len(widths) - 1:
            continue
        span = end_idx - start_idx + 1
        if span > sr_max_span:
            continue
        before = relmaps[widths[start_idx - 1]]
        after = relmaps[widths[end_idx + 1]]
        inside = relmaps[widths[start_idx]]
        if before == after and before != inside:
            reports.append(
                FailureReport(
                    "", "SR", (), widths[start_idx], widths[end_idx], "none"
                )
            )
    return reports
