"""Small helpers for building synthetic bundles inside tests."""

from __future__ import annotations

from typing import Callable, Optional

from rlfkit.snapshot import (
    BBox,
    CaptureBundle,
    ComputedSubset,
    DomNode,
    ElementState,
    Stylesheet,
    ViewportRecord,
)

Box = tuple[float, float, float, float]


def build_tree(spec) -> DomNode:
    """spec: (tag, {props}, [children]); xpaths use per-tag child indices,
    with /html and /html/body left unindexed."""

    def build(node_spec, parent_xpath: str, counts: dict) -> DomNode:
        tag, props, children = node_spec
        counts[tag] = counts.get(tag, 0) + 1
        if not parent_xpath:
            xpath = "/html"
        elif parent_xpath == "/html" and tag == "body":
            xpath = "/html/body"
        else:
            xpath = f"{parent_xpath}/{tag}[{counts[tag]}]"
        node = DomNode(
            xpath=xpath,
            tag=tag,
            id=props.get("id"),
            classes=props.get("classes", []),
            attributes=props.get("attributes", {}),
            inline_style_text=props.get("style", ""),
        )
        child_counts: dict = {}
        node.children = [build(c, xpath, child_counts) for c in children]
        return node

    return build(spec, "", {})


def build_bundle(
    tree,
    boxes: dict[str, Box | Callable[[int], Box]],
    css_text: str = "",
    widths=(320,),
    height: int = 1000,
    computed: Optional[dict[str, ComputedSubset]] = None,
    hidden: Optional[set[str]] = None,
    step: int = 1,
) -> CaptureBundle:
    """Assemble a one-stylesheet bundle; missing elements get page-sized
    boxes (html/body) or a zero box."""
    dom = build_tree(tree)
    computed = computed or {}
    hidden = hidden or set()
    records = []
    width_list = sorted(widths)
    if len(width_list) > 1:
        diffs = {b - a for a, b in zip(width_list, width_list[1:])}
        assert len(diffs) == 1, "test widths must be evenly spaced"
        step = diffs.pop()
    for w in width_list:
        entries = {}
        for node in dom.walk():
            xp = node.xpath
            spec_box = boxes.get(xp)
            if callable(spec_box):
                box = spec_box(w)
            elif spec_box is not None:
                box = spec_box
            elif xp in ("/html", "/html/body"):
                box = (0.0, 0.0, float(w), float(height))
            else:
                box = (0.0, 0.0, 0.0, 0.0)
            entries[xp] = ElementState(
                bbox=BBox(*[float(v) for v in box]),
                visible=xp not in hidden,
                computed=computed.get(xp, ComputedSubset()),
            )
        records.append(ViewportRecord(width=w, entries=entries))
    return CaptureBundle(
        url="test://synthetic",
        height=height,
        width_min=width_list[0],
        width_max=width_list[-1],
        step=step,
        dom=dom,
        stylesheets=[Stylesheet(label="inline.css", text=css_text)] if css_text else [],
        records=records,
    )
