"""Phase 2: from a failure report to the candidate set E of
(element, CSS property) pairs worth inspecting.

Three steps, all evaluated at the narrowest failing width where the failure
is most pronounced:

  1. failure direction from the affected elements' geometry;
  2. neighbor filtering — affected elements, their siblings and DOM parents,
     kept only when aligned with an affected element along the failure axis;
  3. property collection against the per-failure-type ranked search set of
     CSS properties, keeping only declarations the developer actually wrote.

Small-range failures skip 2-3: their suspects are pairs of media-conditioned
rules that are simultaneously active across the failing interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .css import AuthoredValue, StyleIndex, media_active, resolve_authored
from .detection import FailureReport, element_pool
from .snapshot import BBox, CaptureBundle

MARGIN_LONGHANDS = ("margin-top", "margin-right", "margin-bottom", "margin-left")
PADDING_LONGHANDS = ("padding-top", "padding-right", "padding-bottom", "padding-left")

# Properties that matter regardless of the failure axis.
_AXIS_NEUTRAL = {"font-size", "white-space", "display", "position", "float", "flex-wrap"}
_VERTICAL_ONLY = {
    "height", "min-height", "max-height",
    "margin-top", "margin-bottom", "padding-top", "padding-bottom",
}
_HORIZONTAL_ONLY = {
    "width", "min-width", "max-width",
    "margin-left", "margin-right", "padding-left", "padding-right",
}


@dataclass(frozen=True)
class Direction:
    axis: str        # horizontal | vertical | both | none
    boundary: str    # left | right | top | bottom | none


@dataclass(frozen=True)
class SetEntry:
    rank: int
    matcher: str                 # see _apply_entry for the matcher kinds
    properties: tuple[str, ...] = ()
    value: Optional[str] = None


@dataclass(frozen=True)
class PropertySet:
    rlf_type: str
    entries: tuple[SetEntry, ...]


# Ranked search sets per failure type; rank order doubles as the tie-break
# criterion during prioritization.
PROPERTY_SETS: dict[str, PropertySet] = {
    "EP": PropertySet(
        "EP",
        (
            SetEntry(1, "exact", ("position",), "absolute"),
            SetEntry(2, "name", ("float",)),
            SetEntry(3, "fixed_px_dimension", ("height", "width")),
            SetEntry(4, "name", ("display",)),
            SetEntry(5, "family", MARGIN_LONGHANDS + PADDING_LONGHANDS),
            SetEntry(6, "length", ("font-size",)),
            SetEntry(7, "name", ("white-space",)),
        ),
    ),
    "EC": PropertySet(
        "EC",
        (
            SetEntry(1, "exact", ("position",), "absolute"),
            SetEntry(2, "name", ("float",)),
            SetEntry(3, "negative_margin", MARGIN_LONGHANDS),
            SetEntry(4, "fixed_px_dimension", ("height", "width")),
            SetEntry(5, "family", MARGIN_LONGHANDS + PADDING_LONGHANDS),
            SetEntry(6, "missing_flex_wrap", ("flex-wrap",)),
            SetEntry(7, "family", ("max-height", "max-width")),
        ),
    ),
    "VP": PropertySet(
        "VP",
        (
            SetEntry(1, "exact", ("position",), "absolute"),
            SetEntry(2, "name", ("float",)),
            SetEntry(3, "fixed_px_dimension", ("height", "width")),
            SetEntry(4, "family", MARGIN_LONGHANDS + PADDING_LONGHANDS),
            SetEntry(5, "length", ("font-size",)),
            SetEntry(6, "name", ("white-space",)),
        ),
    ),
    "WE": PropertySet(
        "WE",
        (
            SetEntry(1, "missing_flex", ("display",)),
            SetEntry(2, "name", ("float",)),
            SetEntry(3, "parent_width", ("width",)),
            SetEntry(4, "family", MARGIN_LONGHANDS + PADDING_LONGHANDS),
            SetEntry(5, "length", ("font-size",)),
        ),
    ),
}


@dataclass(frozen=True)
class Candidate:
    xpath: str
    property: str
    kind: str                    # authored | missing
    authored: Optional[AuthoredValue]
    normalized_px: Optional[float]
    tier: str                    # affected | neighbor
    set_rank: int

    def to_json(self) -> dict:
        return {
            "xpath": self.xpath,
            "property": self.property,
            "kind": self.kind,
            "value": self.authored.raw_value if self.authored else None,
            "normalized_px": self.normalized_px,
            "tier": self.tier,
            "set_rank": self.set_rank,
            "origin": self.authored.origin if self.authored else None,
        }


def failure_direction(report: FailureReport, bundle: CaptureBundle) -> Direction:
    """Axis and boundary of the failure, judged at the narrowest failing
    width."""
    width = report.fail_min
    if report.rlf_type in ("EP", "VP"):
        child = bundle.element_box(report.affected[0], width)
        container = bundle.element_box(report.affected[1], width)
        return _edge_direction(container, child)
    if report.rlf_type == "EC":
        a = bundle.element_box(report.affected[0], width)
        b = bundle.element_box(report.affected[1], width)
        depth_x = min(a.right, b.right) - max(a.left, b.left)
        depth_y = min(a.bottom, b.bottom) - max(a.top, b.top)
        # The axis with the shallower overlap is the approach direction.
        return Direction("horizontal" if depth_x <= depth_y else "vertical", "none")
    if report.rlf_type == "WE":
        # The wrap shows up vertically but is caused by horizontal shortage,
        # so both axes stay in scope.
        return Direction("both", "none")
    return Direction("none", "none")


def _edge_direction(container: BBox, child: BBox) -> Direction:
    depths = {
        "left": container.left - child.left,
        "right": child.right - container.right,
        "top": container.top - child.top,
        "bottom": child.bottom - container.bottom,
    }
    violated = {k: v for k, v in depths.items() if v > 0}
    if not violated:
        return Direction("none", "none")
    has_h = any(k in violated for k in ("left", "right"))
    has_v = any(k in violated for k in ("top", "bottom"))
    if has_h and has_v:
        return Direction("both", "none")
    boundary = max(violated, key=lambda k: violated[k])
    axis = "horizontal" if boundary in ("left", "right") else "vertical"
    return Direction(axis, boundary)


def _aligned(a: BBox, b: BBox, axis: str) -> bool:
    x_overlap = min(a.right, b.right) - max(a.left, b.left) > 0
    y_overlap = min(a.bottom, b.bottom) - max(a.top, b.top) > 0
    if axis == "vertical":
        return x_overlap
    if axis == "horizontal":
        return y_overlap
    if axis == "both":
        return x_overlap or y_overlap
    return False


def search_roles(
    report: FailureReport, bundle: CaptureBundle, direction: Direction
) -> dict[str, str]:
    """The filtered search set with each element's structural role:
    'affected', 'sibling' (of an affected element) or 'parent' (DOM parent
    hop, admitted for structural-predicate matchers only)."""
    width = report.fail_min
    pool = set(element_pool(bundle, width))

    roles: dict[str, str] = {}
    for xp in report.affected:
        roles[xp] = "affected"
    for xp in report.affected:
        for sibling in bundle.tree_neighbors(xp)["siblings"]:
            roles.setdefault(sibling, "sibling")
    for xp in report.affected:
        parent = bundle.parent_of(xp)
        if parent is not None:
            roles.setdefault(parent, "parent")

    affected_boxes = [
        bundle.element_box(xp, width) for xp in report.affected if xp in pool
    ]

    kept: dict[str, str] = {}
    for xp, role in roles.items():
        if xp not in pool:
            continue
        box = bundle.element_box(xp, width)
        if role == "affected" or any(
            _aligned(box, other, direction.axis) for other in affected_boxes
        ):
            kept[xp] = role
    return dict(sorted(kept.items(), key=lambda item: bundle.doc_order(item[0])))


def neighbor_search(
    report: FailureReport, bundle: CaptureBundle, direction: Direction
) -> list[str]:
    """Elements worth searching, in document order."""
    return list(search_roles(report, bundle, direction))


def axis_relevant(property_name: str, direction: Direction) -> bool:
    """Whether a property can influence geometry along the failure axis."""
    if direction.axis == "none":
        return False
    if direction.axis == "both":
        return True
    if property_name in _AXIS_NEUTRAL:
        return True
    if direction.axis == "vertical":
        return property_name in _VERTICAL_ONLY
    return property_name in _HORIZONTAL_ONLY


def _is_container_of_affected(
    xpath: str, report: FailureReport, bundle: CaptureBundle
) -> bool:
    """True for the failure's container element and for DOM parents of any
    affected element: resizing those would distort the surrounding layout,
    so their dimension properties stay out of the candidate set."""
    for affected in report.affected:
        if affected != xpath and bundle.is_ancestor(xpath, affected):
            return True
    return False


def collect_candidates(
    report: FailureReport,
    bundle: CaptureBundle,
    index: StyleIndex,
    sets: dict[str, PropertySet] = PROPERTY_SETS,
) -> list[Candidate]:
    """Assemble the candidate set E for one non-SR failure.

    Authored candidates require a developer-written declaration that wins
    the cascade at the narrowest failing width; structural predicates
    (negative margin, missing flex-wrap, missing flex container) inspect the
    authored styles and may emit kind='missing' candidates.
    """
    if report.rlf_type == "SR":
        return []
    prop_set = sets[report.rlf_type]
    direction = failure_direction(report, bundle)
    roles = search_roles(report, bundle, direction)
    width = report.fail_min

    chosen: dict[tuple[str, str], Candidate] = {}

    def admit(candidate: Candidate) -> None:
        key = (candidate.xpath, candidate.property)
        existing = chosen.get(key)
        if existing is None or candidate.set_rank < existing.set_rank:
            chosen[key] = candidate

    for xpath, role in roles.items():
        is_parent_hop = role == "parent"
        is_container = _is_container_of_affected(xpath, report, bundle)
        tier = "affected" if role == "affected" else "neighbor"
        for entry in prop_set.entries:
            for cand in _apply_entry(
                entry, xpath, tier, is_parent_hop, is_container,
                report, bundle, index, width, direction,
            ):
                admit(cand)

    ordered = sorted(
        chosen.values(),
        key=lambda c: (bundle.doc_order(c.xpath), c.set_rank, c.property),
    )
    return ordered


def _apply_entry(
    entry: SetEntry,
    xpath: str,
    tier: str,
    is_parent_hop: bool,
    is_container: bool,
    report: FailureReport,
    bundle: CaptureBundle,
    index: StyleIndex,
    width: int,
    direction: Direction,
) -> list[Candidate]:
    structural = entry.matcher in ("missing_flex", "missing_flex_wrap")
    parent_scoped = structural or entry.matcher == "parent_width"
    if is_parent_hop and not parent_scoped:
        return []
    if parent_scoped and not (is_parent_hop or is_container):
        return []

    out: list[Candidate] = []

    def authored_for(prop: str) -> Optional[AuthoredValue]:
        return resolve_authored(index, xpath, prop, width)

    if entry.matcher == "exact":
        prop = entry.properties[0]
        if not axis_relevant(prop, direction):
            return []
        value = authored_for(prop)
        if value is not None and value.raw_value.strip().lower() == entry.value:
            out.append(Candidate(xpath, prop, "authored", value, None, tier, entry.rank))

    elif entry.matcher == "name":
        prop = entry.properties[0]
        if not axis_relevant(prop, direction):
            return []
        value = authored_for(prop)
        if value is not None and value.raw_value.strip().lower() != "none":
            out.append(Candidate(xpath, prop, "authored", value, None, tier, entry.rank))

    elif entry.matcher == "length":
        prop = entry.properties[0]
        if not axis_relevant(prop, direction):
            return []
        value = authored_for(prop)
        if value is not None:
            out.append(
                Candidate(xpath, prop, "authored", value, value.normalized_px, tier, entry.rank)
            )

    elif entry.matcher == "fixed_px_dimension":
        if is_container:
            return []
        for prop in entry.properties:
            if not axis_relevant(prop, direction):
                continue
            value = authored_for(prop)
            if value is not None and value.raw_value.strip().lower().endswith("px"):
                out.append(
                    Candidate(xpath, prop, "authored", value, value.normalized_px, tier, entry.rank)
                )

    elif entry.matcher == "family":
        if is_container and any(p.startswith("max-") for p in entry.properties):
            return []
        for prop in entry.properties:
            if not axis_relevant(prop, direction):
                continue
            value = authored_for(prop)
            if value is not None:
                out.append(
                    Candidate(xpath, prop, "authored", value, value.normalized_px, tier, entry.rank)
                )

    elif entry.matcher == "negative_margin":
        for prop in entry.properties:
            if not axis_relevant(prop, direction):
                continue
            value = authored_for(prop)
            if value is not None and value.normalized_px is not None and value.normalized_px < 0:
                out.append(
                    Candidate(xpath, prop, "authored", value, value.normalized_px, tier, entry.rank)
                )

    elif entry.matcher == "missing_flex_wrap":
        display = authored_for("display")
        if display is not None and display.raw_value.strip().lower() == "flex":
            wrap = authored_for("flex-wrap")
            if wrap is None or wrap.raw_value.strip().lower() != "wrap":
                out.append(Candidate(xpath, "flex-wrap", "missing", None, None, tier, entry.rank))

    elif entry.matcher == "missing_flex":
        display = authored_for("display")
        if display is None or display.raw_value.strip().lower() != "flex":
            out.append(Candidate(xpath, "display", "missing", None, None, tier, entry.rank))

    elif entry.matcher == "parent_width":
        value = authored_for("width")
        if value is not None:
            out.append(
                Candidate(xpath, "width", "authored", value, value.normalized_px, tier, entry.rank)
            )

    return out


@dataclass(frozen=True)
class MediaRulePair:
    """Two simultaneously active media rules fighting over one property."""

    xpath: str
    property: str
    rule_a: str
    rule_b: str
    condition_a: str
    condition_b: str
    overlap_min: float
    overlap_max: float

    def to_json(self) -> dict:
        return {
            "xpath": self.xpath,
            "property": self.property,
            "rule_a": self.rule_a,
            "rule_b": self.rule_b,
            "condition_a": self.condition_a,
            "condition_b": self.condition_b,
            "overlap": [self.overlap_min, self.overlap_max],
        }


def localize_small_range(
    report: FailureReport, bundle: CaptureBundle, index: StyleIndex
) -> list[MediaRulePair]:
    """For a small-range failure, find pairs of media-conditioned rules that
    are both active across the whole failing interval and set the same
    property on the same element."""
    if report.rlf_type != "SR":
        return []
    lo, hi = report.fail_min, report.fail_max
    pairs: list[MediaRulePair] = []
    seen: set[tuple] = set()
    for xpath in element_pool(bundle, lo):
        rules = [
            r
            for r in index.matching_rules(xpath)
            if r.media_condition is not None
            and media_active(r.media_condition, lo)
            and media_active(r.media_condition, hi)
        ]
        for i, rule_a in enumerate(rules):
            props_a = {d.property for d in rule_a.declarations}
            for rule_b in rules[i + 1 :]:
                shared = props_a & {d.property for d in rule_b.declarations}
                for prop in sorted(shared):
                    key = (xpath, prop, rule_a.source, rule_b.source)
                    if key in seen:
                        continue
                    seen.add(key)
                    cond_a, cond_b = rule_a.media_condition, rule_b.media_condition
                    mins = [c.min_width for c in (cond_a, cond_b) if c.min_width is not None]
                    maxes = [c.max_width for c in (cond_a, cond_b) if c.max_width is not None]
                    overlap_min = max(mins) if mins else float(bundle.width_min)
                    overlap_max = min(maxes) if maxes else float(bundle.width_max)
                    pairs.append(
                        MediaRulePair(
                            xpath=xpath,
                            property=prop,
                            rule_a=f"sheet {rule_a.source[0]} rule {rule_a.source[1]}",
                            rule_b=f"sheet {rule_b.source[0]} rule {rule_b.source[1]}",
                            condition_a=cond_a.text(),
                            condition_b=cond_b.text(),
                            overlap_min=overlap_min,
                            overlap_max=overlap_max,
                        )
                    )
    pairs.sort(key=lambda p: (p.xpath, p.property, p.rule_a, p.rule_b))
    return pairs
