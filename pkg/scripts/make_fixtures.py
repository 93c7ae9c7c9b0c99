#!/usr/bin/env python3
"""Regenerate the committed fixture bundles under fixtures/.

Each fixture is a small synthetic page: a DOM tree, an authored stylesheet,
and a layout model that derives per-width geometry *from the authored style
values*. Deleting or overriding a declaration and re-running the layout
model therefore produces an honest mutated bundle, which is how the
pre-recorded oracle mutants are made.

Usage:  python scripts/make_fixtures.py [--out fixtures]
"""

from __future__ import annotations

import argparse
import copy
import json
import shutil
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from PIL import Image

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rlfkit.css import expand_declaration
from rlfkit.detection import detect
from rlfkit.metrics import GroundTruth, Mutation, TruthEntry, mutant_dirname, oracle_verify, prerecorded_recapture
from rlfkit.snapshot import (
    BBox,
    CaptureBundle,
    ComputedSubset,
    DomNode,
    ElementState,
    Stylesheet,
    ViewportRecord,
    round_px,
    save_bundle,
)

FULL_RANGE = (320, 1400)
FAULT_RANGE = (320, 420)
NOI_RANGE = (320, 340)
PAGE_HEIGHT = 1000


# -- authored styles ------------------------------------------------------


@dataclass
class StyleTable:
    """Authored stylesheet as structured data, so the layout models and the
    emitted CSS text always agree."""

    rules: list[tuple[str, list[tuple[str, str]], Optional[str]]] = field(
        default_factory=list
    )

    def add(self, selector: str, decls: list[tuple[str, str]], media: Optional[str] = None):
        self.rules.append((selector, list(decls), media))
        return self

    def css(self) -> str:
        chunks = []
        for selector, decls, media in self.rules:
            body = " ".join(f"{p}: {v};" for p, v in decls)
            rule = f"{selector} {{ {body} }}"
            if media:
                rule = f"@media {media} {{ {rule} }}"
            chunks.append(rule)
        return "\n".join(chunks) + "\n"

    def _expanded(self, decls: list[tuple[str, str]]) -> list[tuple[str, str]]:
        out = []
        for prop, value in decls:
            for d in expand_declaration(prop, value, False):
                out.append((d.property, d.raw_value))
        return out

    def value(self, selector: str, longhand: str, media: Optional[str] = None) -> Optional[str]:
        found = None
        for sel, decls, rule_media in self.rules:
            if sel != selector or rule_media != media:
                continue
            for prop, value in self._expanded(decls):
                if prop == longhand:
                    found = value
        return found

    def px(self, selector: str, longhand: str, media: Optional[str] = None) -> Optional[float]:
        raw = self.value(selector, longhand, media)
        if raw is None or not raw.endswith("px"):
            return None
        return float(raw[:-2])

    def pct(self, selector: str, longhand: str, media: Optional[str] = None) -> Optional[float]:
        raw = self.value(selector, longhand, media)
        if raw is None or not raw.endswith("%"):
            return None
        return float(raw[:-1]) / 100.0

    def delete(self, selector: str, longhand: str) -> "StyleTable":
        table = StyleTable(copy.deepcopy(self.rules))
        for i, (sel, decls, media) in enumerate(table.rules):
            if sel != selector:
                continue
            new_decls = []
            for prop, value in decls:
                if prop == longhand:
                    continue
                if prop in ("margin", "padding") and longhand.startswith(prop + "-"):
                    for d in expand_declaration(prop, value, False):
                        if d.property != longhand:
                            new_decls.append((d.property, d.raw_value))
                    continue
                new_decls.append((prop, value))
            table.rules[i] = (sel, new_decls, media)
        return table

    def set(self, selector: str, longhand: str, value: str) -> "StyleTable":
        table = self.delete(selector, longhand)
        for i, (sel, decls, media) in enumerate(table.rules):
            if sel == selector and media is None:
                decls.append((longhand, value))
                return table
        table.rules.append((selector, [(longhand, value)], None))
        return table


def aligned_x(st: StyleTable, selector: str, outer_w: float, inner_w: float) -> float:
    """Horizontal placement honoring auto margins: both auto centers, only
    margin-left auto right-aligns, otherwise the left margin offsets."""
    ml = st.value(selector, "margin-left")
    mr = st.value(selector, "margin-right")
    if ml == "auto" and mr == "auto":
        return (outer_w - inner_w) / 2
    if ml == "auto":
        return outer_w - inner_w
    if ml is not None and ml.endswith("px"):
        return float(ml[:-2])
    return 0.0


def computed(
    font: float = 16.0,
    display: str = "block",
    position: str = "static",
    float_: str = "none",
    transition: bool = False,
    transform: bool = False,
) -> ComputedSubset:
    return ComputedSubset(
        font_size=font,
        display=display,
        position=position,
        float_=float_,
        has_transition=transition,
        has_transform=transform,
    )


def state(x: float, y: float, w: float, h: float, comp: ComputedSubset, visible: bool = True) -> ElementState:
    return ElementState(
        bbox=BBox(round_px(x), round_px(y), round_px(w), round_px(h)),
        visible=visible,
        computed=comp,
    )


HIDDEN = ElementState(bbox=BBox(0, 0, 0, 0), visible=False, computed=computed(display="none"))


# -- DOM assembly ---------------------------------------------------------


def build_dom(spec) -> DomNode:
    """spec: (tag, {attrs}, [children]); xpaths derive from per-tag indices."""

    def build(node_spec, parent_xpath: str, tag_counts: dict) -> DomNode:
        tag, props, children = node_spec
        tag_counts[tag] = tag_counts.get(tag, 0) + 1
        if not parent_xpath:
            xpath = "/html"
        elif parent_xpath == "/html" and tag == "body":
            xpath = "/html/body"
        else:
            xpath = f"{parent_xpath}/{tag}[{tag_counts[tag]}]"
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


@dataclass
class Fixture:
    name: str
    dom: DomNode
    styles: StyleTable
    layout: Callable[[StyleTable, int], dict[str, ElementState]]
    width_range: tuple[int, int] = FULL_RANGE

    def bundle(self, styles: Optional[StyleTable] = None) -> CaptureBundle:
        styles = styles if styles is not None else self.styles
        lo, hi = self.width_range
        records = [
            ViewportRecord(w, self.layout(styles, w)) for w in range(lo, hi + 1)
        ]
        return CaptureBundle(
            url=f"fixture://{self.name}",
            height=PAGE_HEIGHT,
            width_min=lo,
            width_max=hi,
            step=1,
            dom=self.dom,
            stylesheets=[Stylesheet(label=f"{self.name}.css", text=styles.css())],
            records=records,
        )


# -- shared layout pieces -------------------------------------------------


def page_chrome(entries: dict, w: float, content_bottom: float) -> None:
    body_h = max(float(PAGE_HEIGHT), content_bottom)
    entries["/html"] = state(0, 0, w, body_h, computed())
    entries["/html/body"] = state(0, 0, w, body_h, computed())


# -- fixture: clean -------------------------------------------------------


def make_clean() -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("header", {"classes": ["top"]}, []),
                ("main", {"classes": ["grid"]}, [
                    ("section", {"classes": ["col-a"]}, []),
                    ("section", {"classes": ["col-b"]}, []),
                ]),
                ("footer", {"classes": ["bottom"]}, []),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0")])
        .add(".top", [("height", "64px")])
        .add(".grid", [("width", "90%")])
        .add(".col-a", [("width", "40%"), ("height", "200px")])
        .add(".col-b", [("width", "50%"), ("height", "200px")])
        .add(".bottom", [("height", "80px")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        top_h = st.px(".top", "height") or 40.0
        grid_w = (st.pct(".grid", "width") or 1.0) * w
        grid_x = (w - grid_w) / 2
        col_h = st.px(".col-a", "height") or 100.0
        a_w = (st.pct(".col-a", "width") or 0.4) * grid_w
        b_w = (st.pct(".col-b", "width") or 0.5) * grid_w
        bottom_h = st.px(".bottom", "height") or 40.0

        entries["/html/body/header[1]"] = state(0, 0, w, top_h, computed())
        entries["/html/body/main[1]"] = state(grid_x, top_h, grid_w, col_h, computed())
        entries["/html/body/main[1]/section[1]"] = state(grid_x, top_h, a_w, col_h, computed())
        entries["/html/body/main[1]/section[2]"] = state(
            grid_x + grid_w - b_w, top_h, b_w, col_h, computed()
        )
        footer_y = top_h + col_h
        entries["/html/body/footer[1]"] = state(0, footer_y, w, bottom_h, computed())
        page_chrome(entries, w, footer_y + bottom_h)
        return entries

    return Fixture("clean", dom, styles, layout)


# -- fixture: ep_button (child wider than its container below 361px) ------


def make_ep_button(name: str = "ep_button", width_range=FULL_RANGE) -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("div", {"classes": ["wrap"]}, [
                    ("a", {"classes": ["cta"]}, []),
                ]),
                ("p", {"classes": ["note"]}, []),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0"), ("padding-top", "20px")])
        .add(".wrap", [("width", "60%"), ("margin", "0 auto"), ("padding", "8px")])
        .add(".cta", [("width", "220px"), ("height", "48px"), ("font-size", "18px")])
        .add(".cta", [("width", "80%")], media="(min-width: 361px)")
        .add(".note", [("color", "#666")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        pad_top = st.px("body", "padding-top") or 0.0
        wrap_w = (st.pct(".wrap", "width") or 1.0) * w
        wrap_x = aligned_x(st, ".wrap", w, wrap_w)
        wrap_pad = st.px(".wrap", "padding-top") or 0.0
        wrap_pad_l = st.px(".wrap", "padding-left") or 0.0
        cta_h = st.px(".cta", "height") or 20.0
        base_w = st.px(".cta", "width")
        media_pct = st.pct(".cta", "width", media="(min-width: 361px)")
        inner_w = wrap_w - wrap_pad_l - (st.px(".wrap", "padding-right") or 0.0)
        if w >= 361 and media_pct is not None:
            cta_w = media_pct * inner_w
        elif base_w is not None:
            cta_w = base_w
        else:
            cta_w = inner_w
        wrap_h = wrap_pad * 2 + cta_h
        entries["/html/body/div[1]"] = state(wrap_x, pad_top, wrap_w, wrap_h, computed())
        entries["/html/body/div[1]/a[1]"] = state(
            wrap_x + wrap_pad_l, pad_top + wrap_pad, cta_w, cta_h,
            computed(font=st.px(".cta", "font-size") or 16.0, display="inline-block"),
        )
        note_y = pad_top + wrap_h + 16
        entries["/html/body/p[1]"] = state(0, note_y, w, 24, computed())
        page_chrome(entries, w, note_y + 24)
        return entries

    return Fixture(name, dom, styles, layout, width_range)


# -- fixture: case_study (card with date, title, protruding button) -------


def make_case_study(name: str = "case_study", width_range=FULL_RANGE) -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("div", {"classes": ["card"]}, [
                    ("div", {"classes": ["date"]}, []),
                    ("h2", {"classes": ["title"]}, []),
                    ("a", {"classes": ["btn"]}, []),
                ]),
                ("div", {"classes": ["footer"]}, []),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0"), ("padding-top", "24px")])
        .add(".card", [("width", "90%"), ("margin-left", "auto"), ("margin-right", "auto"), ("height", "260px")])
        .add(".date", [("color", "#999")])
        .add(".title", [("height", "120px"), ("padding", "10px")])
        .add(".btn", [("margin-top", "40px"), ("width", "140px")])
        .add(".footer", [("color", "#333")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        pad_top = st.px("body", "padding-top") or 0.0
        card_w = (st.pct(".card", "width") or 1.0) * w
        if st.value(".card", "width") == "0":
            card_w = 0.0
        card_x = (w - card_w) / 2
        card_y = pad_top
        card_h_auth = st.px(".card", "height")

        # Content model: the date line wraps to two lines in narrow cards;
        # degenerate zero-width cards stack text one glyph per line.
        squeezed = card_w < 100
        date_h = (56.0 if w <= 360 else 28.0) * (6.0 if squeezed else 1.0)
        title_pad_t = st.px(".title", "padding-top") or 0.0
        title_pad_b = st.px(".title", "padding-bottom") or 0.0
        title_h_auth = st.px(".title", "height")
        title_content = (28.0 if title_h_auth is None else title_h_auth) * (
            6.0 if squeezed and title_h_auth is None else 1.0
        )
        title_h = title_content + title_pad_t + title_pad_b
        btn_mt = st.px(".btn", "margin-top") or 0.0
        btn_w = st.px(".btn", "width") or 96.0
        btn_h = 44.0

        date_y = card_y
        title_y = date_y + date_h
        btn_y = title_y + title_h + btn_mt
        content_h = date_h + title_h + btn_mt + btn_h
        card_h = card_h_auth if card_h_auth is not None else content_h

        entries["/html/body/div[1]"] = state(card_x, card_y, card_w, card_h, computed())
        entries["/html/body/div[1]/div[1]"] = state(card_x, date_y, card_w, date_h, computed(font=14.0))
        entries["/html/body/div[1]/h2[1]"] = state(
            card_x, title_y, card_w, title_h, computed(font=24.0)
        )
        entries["/html/body/div[1]/a[1]"] = state(
            card_x, btn_y, btn_w, btn_h, computed(display="inline-block")
        )
        footer_y = card_y + card_h + 24
        entries["/html/body/div[2]"] = state(card_x, footer_y, card_w, 80, computed())
        page_chrome(entries, w, footer_y + 80)
        return entries

    return Fixture(name, dom, styles, layout, width_range)


# -- fixture: ec_buttons (two floats colliding below 333px) ---------------


def make_ec_buttons() -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("div", {"classes": ["row"]}, [
                    ("button", {"classes": ["save"]}, []),
                    ("button", {"classes": ["cancel"]}, []),
                ]),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0"), ("padding-top", "30px")])
        .add(".row", [("width", "90%"), ("margin", "0 auto"), ("height", "44px")])
        .add(".save", [("width", "150px"), ("height", "44px"), ("float", "left")])
        .add(".cancel", [("width", "150px"), ("height", "44px"), ("float", "right")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        pad_top = st.px("body", "padding-top") or 0.0
        row_w = (st.pct(".row", "width") or 1.0) * w
        row_x = (w - row_w) / 2
        a_w = st.px(".save", "width") or 80.0
        b_w = st.px(".cancel", "width") or 80.0
        h = st.px(".save", "height") or 44.0
        entries["/html/body/div[1]"] = state(row_x, pad_top, row_w, h, computed())
        entries["/html/body/div[1]/button[1]"] = state(
            row_x, pad_top, a_w, h, computed(display="inline-block", float_="left")
        )
        entries["/html/body/div[1]/button[2]"] = state(
            row_x + row_w - b_w, pad_top, b_w, h,
            computed(display="inline-block", float_="right"),
        )
        page_chrome(entries, w, pad_top + h)
        return entries

    return Fixture("ec_buttons", dom, styles, layout)


# -- fixture: vp_nav (fixed-width ribbon crossing the right page edge) ----


def make_vp_nav() -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("nav", {"classes": ["ribbon"]}, []),
                ("main", {"classes": ["content"]}, []),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0")])
        .add(".ribbon", [("margin-left", "12px"), ("width", "420px"), ("height", "60px")])
        .add(".content", [("height", "400px")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        ml = st.px(".ribbon", "margin-left") or 0.0
        rw = st.px(".ribbon", "width")
        rh = st.px(".ribbon", "height") or 40.0
        ribbon_w = rw if rw is not None else (w - ml)
        entries["/html/body/nav[1]"] = state(ml, 40, ribbon_w, rh, computed())
        content_y = 40 + rh + 20
        ch = st.px(".content", "height") or 200.0
        entries["/html/body/main[1]"] = state(0, content_y, w, ch, computed())
        page_chrome(entries, w, content_y + ch)
        return entries

    return Fixture("vp_nav", dom, styles, layout)


# -- fixture: we_tags (three chips, last one wraps below 423px) -----------


def make_we_tags(
    name: str = "we_tags",
    width_range=FULL_RANGE,
    chip_w: float = 120.0,
    chip_margin: float = 10.0,
) -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("header", {"classes": ["bar"]}, []),
                ("div", {"classes": ["tagrow"]}, [
                    ("span", {"classes": ["chip", "c1"]}, []),
                    ("span", {"classes": ["chip", "c2"]}, []),
                    ("span", {"classes": ["chip", "c3"]}, []),
                ]),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0")])
        .add(".bar", [("height", "60px")])
        .add(".tagrow", [("width", "90%")])
        .add(".chip", [("width", f"{chip_w:g}px"), ("height", "30px"),
                       ("margin-right", f"{chip_margin:g}px"), ("font-size", "14px")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        bar_h = st.px(".bar", "height") or 40.0
        row_pct = st.pct(".tagrow", "width")
        row_w = row_pct * w if row_pct is not None else float(w)
        row_x = (w - row_w) / 2 if row_pct is not None else 0.0
        cw = st.px(".chip", "width") or 60.0
        ch = st.px(".chip", "height") or 30.0
        mr = st.px(".chip", "margin-right") or 0.0
        fs = st.px(".chip", "font-size") or 16.0
        flex = st.value(".tagrow", "display") == "flex"

        xs: list[float] = []
        ys: list[float] = []
        if flex:
            # Single flex line; chips shrink evenly to fit.
            avail = row_w - 2 * mr
            cw = min(cw, avail / 3)
            for i in range(3):
                xs.append(row_x + i * (cw + mr))
                ys.append(bar_h)
        else:
            x = row_x
            y = bar_h
            for i in range(3):
                if x + cw > row_x + row_w + 0.01:
                    x = row_x
                    y += ch
                xs.append(x)
                ys.append(y)
                x += cw + mr
        row_h = (max(ys) + ch) - bar_h
        entries["/html/body/div[1]"] = state(
            row_x, bar_h, row_w, row_h,
            computed(display="flex" if flex else "block"),
        )
        entries["/html/body/header[1]"] = state(0, 0, w, bar_h, computed())
        for i, xp in enumerate(
            ["/html/body/div[1]/span[1]", "/html/body/div[1]/span[2]", "/html/body/div[1]/span[3]"]
        ):
            entries[xp] = state(xs[i], ys[i], cw, ch, computed(font=fs, display="inline-block"))
        page_chrome(entries, w, bar_h + row_h)
        return entries

    return Fixture(name, dom, styles, layout, width_range)


# -- fixture: sr_promo (media-query island at 768..807px) ------------------


def make_sr_promo() -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("section", {"classes": ["top"]}, []),
                ("div", {"classes": ["slot"]}, [
                    ("aside", {"classes": ["promo"]}, []),
                ]),
                ("section", {"classes": ["rest"]}, []),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0")])
        .add(".top", [("height", "100px")])
        .add(".slot", [("padding", "4px")])
        .add(".promo", [("display", "none"), ("height", "40px")])
        .add(".promo", [("margin-top", "4px")], media="(min-width: 768px)")
        .add(".promo", [("display", "block"), ("margin-top", "8px")],
             media="(min-width: 768px) and (max-width: 807px)")
        .add(".rest", [("height", "200px")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        top_h = st.px(".top", "height") or 80.0
        pad = st.px(".slot", "padding-top") or 0.0
        promo_h = st.px(".promo", "height") or 30.0
        visible = 768 <= w <= 807
        if visible:
            margin = st.px(".promo", "margin-top", media="(min-width: 768px) and (max-width: 807px)") or 0.0
            slot_h = pad * 2 + margin + promo_h
            entries["/html/body/div[1]/aside[1]"] = state(
                pad, top_h + pad + margin, w - 2 * pad, promo_h, computed()
            )
        else:
            slot_h = pad * 2
            entries["/html/body/div[1]/aside[1]"] = HIDDEN
        entries["/html/body/div[1]"] = state(0, top_h, w, slot_h, computed())
        entries["/html/body/section[1]"] = state(0, 0, w, top_h, computed())
        rest_h = st.px(".rest", "height") or 100.0
        entries["/html/body/section[2]"] = state(0, top_h + slot_h, w, rest_h, computed())
        page_chrome(entries, w, top_h + slot_h + rest_h)
        return entries

    return Fixture("sr_promo", dom, styles, layout)


# -- fixture: carousel (animated element excluded from detection) ----------


def make_carousel() -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("div", {"classes": ["carousel"]}, [
                    ("div", {"classes": ["slides"]}, []),
                ]),
                ("p", {"classes": ["caption"]}, []),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0")])
        .add(".carousel", [("width", "90%"), ("margin", "0 auto"), ("height", "150px")])
        .add(".slides", [("width", "300%"), ("height", "150px"),
                         ("transition", "transform 0.6s ease")])
        .add(".caption", [("color", "#222")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        car_w = (st.pct(".carousel", "width") or 1.0) * w
        car_x = (w - car_w) / 2
        car_h = st.px(".carousel", "height") or 100.0
        slides_w = (st.pct(".slides", "width") or 1.0) * car_w
        entries["/html/body/div[1]"] = state(car_x, 0, car_w, car_h, computed())
        entries["/html/body/div[1]/div[1]"] = state(
            car_x, 0, slides_w, car_h, computed(transition=True)
        )
        entries["/html/body/p[1]"] = state(0, car_h + 16, w, 24, computed())
        page_chrome(entries, w, car_h + 40)
        return entries

    return Fixture("carousel", dom, styles, layout)


# -- fixture: noi pair (protruding strip, opaque vs transparent) -----------


def make_noi(name: str, opaque: bool) -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("div", {"classes": ["strip"]}, []),
                ("main", {"classes": ["content"]}, []),
            ]),
        ])
    )
    color = [("background", "#e03131")] if opaque else [("opacity", "0")]
    styles = (
        StyleTable()
        .add("body", [("margin", "0")])
        .add(".strip", [("width", "380px"), ("height", "40px"), *color])
        .add(".content", [("height", "300px")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        sw = st.px(".strip", "width") or 100.0
        entries["/html/body/div[1]"] = state(0, 20, sw, 40, computed())
        entries["/html/body/main[1]"] = state(0, 80, w, 300, computed())
        page_chrome(entries, w, 380)
        return entries

    return Fixture(name, dom, styles, layout, NOI_RANGE)


def write_noi_images(bundle_dir: Path, failure_id: str, differs: bool) -> None:
    """Screenshot pair for the failure region: the hidden layer is flat
    background; the visible layer repaints the strip when it is opaque."""
    w, h = 400, 80
    background = np.full((h, w, 4), (250, 250, 250, 255), dtype=np.uint8)
    hidden = background.copy()
    visible = background.copy()
    if differs:
        visible[10:50, 0:380] = (224, 49, 49, 255)
    Image.fromarray(visible).save(bundle_dir / "images" / f"{failure_id}.visible.png")
    Image.fromarray(hidden).save(bundle_dir / "images" / f"{failure_id}.hidden.png")


# -- fault fixtures for the oracle-backed localization study ---------------


def make_f3_negative_margin() -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("div", {"classes": ["row"]}, [
                    ("button", {"classes": ["left"]}, []),
                    ("button", {"classes": ["right"]}, []),
                ]),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0"), ("padding-top", "30px")])
        .add(".row", [("width", "90%"), ("margin", "0 auto"), ("height", "44px")])
        .add(".left", [("display", "inline-block"), ("width", "120px"), ("height", "44px")])
        .add(".right", [("display", "inline-block"), ("width", "120px"),
                        ("height", "44px"), ("margin-left", "-40px")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        pad_top = st.px("body", "padding-top") or 0.0
        row_w = (st.pct(".row", "width") or 1.0) * w
        row_x = (w - row_w) / 2
        a_w = st.px(".left", "width") or 70.0
        b_w = st.px(".right", "width") or 70.0
        ml = st.px(".right", "margin-left") or 0.0
        h = 44.0
        entries["/html/body/div[1]"] = state(row_x, pad_top, row_w, h, computed())
        entries["/html/body/div[1]/button[1]"] = state(
            row_x, pad_top, a_w, h, computed(display="inline-block")
        )
        entries["/html/body/div[1]/button[2]"] = state(
            row_x + a_w + ml, pad_top, b_w, h, computed(display="inline-block")
        )
        page_chrome(entries, w, pad_top + h)
        return entries

    return Fixture("f3_negative_margin", dom, styles, layout, FAULT_RANGE)


def make_f5_banner_margin() -> Fixture:
    dom = build_dom(
        ("html", {}, [
            ("body", {}, [
                ("div", {"classes": ["banner"]}, []),
                ("main", {"classes": ["content"]}, []),
            ]),
        ])
    )
    styles = (
        StyleTable()
        .add("body", [("margin", "0")])
        .add(".banner", [("margin-left", "160px"), ("width", "300px"),
                         ("height", "56px"), ("font-size", "20px")])
        .add(".content", [("height", "400px")])
    )

    def layout(st: StyleTable, w: int) -> dict:
        entries: dict = {}
        ml = st.px(".banner", "margin-left") or 0.0
        bw = st.px(".banner", "width")
        bh = st.px(".banner", "height") or 40.0
        banner_w = bw if bw is not None else max(w - ml, 0.0)
        entries["/html/body/div[1]"] = state(
            ml, 20, banner_w, bh, computed(font=st.px(".banner", "font-size") or 16.0)
        )
        entries["/html/body/main[1]"] = state(0, 20 + bh + 20, w, 400, computed())
        page_chrome(entries, w, 440 + bh)
        return entries

    return Fixture("f5_banner_margin", dom, styles, layout, FAULT_RANGE)


# -- emission ---------------------------------------------------------------


SELECTOR_BY_CLASS_HINT = "fixture mutations address elements by xpath; the style edit needs the matching selector"


def selector_for(fixture: Fixture, xpath: str) -> str:
    node_classes = {
        node.xpath: node.classes for node in fixture.dom.walk()
    }
    classes = node_classes.get(xpath, [])
    tag = xpath.rsplit("/", 1)[-1].split("[")[0]
    for selector, _, _ in fixture.styles.rules:
        if selector.startswith(".") and selector[1:] in classes:
            return selector
        if selector == tag:
            return selector
    raise KeyError(f"no selector for {xpath}")


def apply_mutation(fixture: Fixture, mutation: Mutation) -> StyleTable:
    selector = selector_for(fixture, mutation.xpath)
    if mutation.strategy == "set":
        return fixture.styles.set(selector, mutation.property, mutation.value or "")
    return fixture.styles.delete(selector, mutation.property)


def emit_fixture(fixture: Fixture, out_root: Path) -> Path:
    path = out_root / fixture.name
    if path.exists():
        shutil.rmtree(path)
    save_bundle(fixture.bundle(), path)
    return path


def emit_fault_fixture(fixture: Fixture, mutations: list[Mutation], out_root: Path) -> Path:
    base_dir = out_root / fixture.name
    if base_dir.exists():
        shutil.rmtree(base_dir)
    save_bundle(fixture.bundle(), base_dir / "base")
    for mutation in mutations:
        mutated = fixture.bundle(apply_mutation(fixture, mutation))
        save_bundle(mutated, base_dir / "mutants" / mutant_dirname(mutation))
    return base_dir


def candidate_mutations(bundle: CaptureBundle) -> list[Mutation]:
    """Every pair the localizer can suggest for the bundle's failures, as
    mutations: delete for authored candidates, add for missing ones."""
    from rlfkit.cli import localize_failures
    from rlfkit.detection import detect as run_detect

    failures = run_detect(bundle)
    doc = localize_failures(bundle, failures)
    mutations = []
    seen = set()
    for failure in doc["failures"]:
        for entry in failure["entries"]:
            if entry["kind"] == "missing":
                value = "flex" if entry["property"] == "display" else "wrap"
                mutation = Mutation(entry["xpath"], entry["property"], "set", value)
            else:
                mutation = Mutation(entry["xpath"], entry["property"], "delete")
            if mutation.key() not in seen:
                seen.add(mutation.key())
                mutations.append(mutation)
    return mutations


def build_truth(fault_dirs: dict[str, Path], out_path: Path) -> None:
    """Oracle-verify every suggested pair against the pre-recorded mutants
    and freeze the verdicts as the ground-truth annotation file."""
    from rlfkit.snapshot import load_bundle

    truth = GroundTruth()
    for page_id, base_dir in sorted(fault_dirs.items()):
        bundle = load_bundle(base_dir / "base")
        recapture = prerecorded_recapture(base_dir / "mutants")
        failures = detect(bundle)
        entries = {}
        for failure in failures:
            acceptable = []
            for mutation in candidate_mutations(bundle):
                verdict = oracle_verify(
                    bundle,
                    failure,
                    (mutation.xpath, mutation.property),
                    recapture,
                    strategy=mutation.strategy,
                    value=mutation.value,
                )
                if verdict == "fixes":
                    acceptable.append((mutation.xpath, mutation.property))
            entries[failure.id] = TruthEntry(acceptable=tuple(acceptable))
        truth.pages[page_id] = entries
    with out_path.open("w") as fh:
        json.dump(truth.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "fixtures"))
    args = parser.parse_args()
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)

    corpus = [
        make_clean(),
        make_ep_button(),
        make_ec_buttons(),
        make_vp_nav(),
        make_we_tags(),
        make_sr_promo(),
        make_carousel(),
        make_case_study(),
    ]
    for fixture in corpus:
        path = emit_fixture(fixture, out_root)
        print(f"wrote {path}")

    for name, opaque in (("noi_opaque", True), ("noi_transparent", False)):
        fixture = make_noi(name, opaque)
        path = emit_fixture(fixture, out_root)
        bundle = fixture.bundle()
        failures = detect(bundle)
        assert len(failures) == 1, f"{name}: expected one failure, got {failures}"
        write_noi_images(path, failures[0].id, differs=opaque)
        print(f"wrote {path} (images for {failures[0].id})")

    faults_root = out_root / "faults"
    fault_fixtures = [
        make_case_study("f1_card_overflow", FAULT_RANGE),
        make_ep_button("f2_fixed_width", FAULT_RANGE),
        make_f3_negative_margin(),
        make_we_tags("f4_row_margin", FAULT_RANGE, chip_w=110.0, chip_margin=18.0),
        make_f5_banner_margin(),
    ]
    # Extra mutants beyond the localizer's own suggestions: an unrelated
    # declaration (stays broken) and an over-aggressive override (breaks
    # more), exercising the other two oracle verdicts.
    extra_mutations = {
        "f1_card_overflow": [
            Mutation("/html/body/div[2]", "color", "delete"),
            Mutation("/html/body/div[1]", "width", "set", "0"),
        ],
        "f2_fixed_width": [Mutation("/html/body/p[1]", "color", "delete")],
    }
    fault_dirs = {}
    for fixture in fault_fixtures:
        mutations = candidate_mutations(fixture.bundle())
        mutations.extend(extra_mutations.get(fixture.name, []))
        path = emit_fault_fixture(fixture, mutations, faults_root)
        fault_dirs[fixture.name] = path
        print(f"wrote {path} ({len(mutations)} mutants)")

    build_truth(fault_dirs, faults_root / "truth.json")
    print(f"wrote {faults_root / 'truth.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
