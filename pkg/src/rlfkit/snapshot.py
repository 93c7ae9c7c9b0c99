"""Capture-bundle format: the serialized rendering record that decouples
analysis from the browser.

A bundle is a directory:

    manifest.json     url, sampled width range, viewport height, schema version
    dom.json          one DOM tree (captured at the widest viewport), xpath-keyed
    stylesheets.json  author stylesheet texts in cascade source order
    geometry.jsonl    one line per sampled width: xpath -> box / visibility /
                      computed-style subset
    images/           optional screenshot pairs for observability checks

All geometry is stored as decimal CSS px rounded to 2 fractional digits.
The field names below are the wire contract with the capture bridge; they are
validated on load and must not drift.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from .errors import (
    DuplicateXPath,
    MissingViewport,
    SchemaError,
    UnknownXPath,
    UnsampledWidth,
)

SCHEMA_VERSION = 1

MANIFEST_FILE = "manifest.json"
DOM_FILE = "dom.json"
STYLESHEETS_FILE = "stylesheets.json"
GEOMETRY_FILE = "geometry.jsonl"
IMAGES_DIR = "images"


def round_px(value: float) -> float:
    """Round a CSS px quantity to the bundle's 2-digit grid."""
    return round(float(value) + 0.0, 2)


@dataclass(frozen=True)
class BBox:
    """Border box in page coordinates (CSS px)."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        for v in (self.x, self.y, self.w, self.h):
            if not math.isfinite(v):
                raise SchemaError(f"non-finite bbox coordinate: {self!r}")
        if self.w < 0 or self.h < 0:
            raise SchemaError(f"negative bbox extent: {self!r}")

    @property
    def left(self) -> float:
        return self.x

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def top(self) -> float:
        return self.y

    @property
    def bottom(self) -> float:
        return self.y + self.h

    def to_json(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]

    @staticmethod
    def from_json(data: object) -> "BBox":
        if not isinstance(data, list) or len(data) != 4:
            raise SchemaError(f"bbox must be a 4-element array, got {data!r}")
        return BBox(*(float(v) for v in data))


@dataclass(frozen=True)
class ComputedSubset:
    """The few computed-style signals detection needs per element."""

    font_size: float = 16.0
    display: str = "block"
    position: str = "static"
    float_: str = "none"
    has_transition: bool = False
    has_transform: bool = False

    def __post_init__(self) -> None:
        if self.font_size <= 0:
            raise SchemaError(f"font_size must be positive, got {self.font_size}")

    def to_json(self) -> dict:
        return {
            "font_size": self.font_size,
            "display": self.display,
            "position": self.position,
            "float": self.float_,
            "has_transition": self.has_transition,
            "has_transform": self.has_transform,
        }

    @staticmethod
    def from_json(data: dict) -> "ComputedSubset":
        try:
            return ComputedSubset(
                font_size=float(data["font_size"]),
                display=str(data["display"]),
                position=str(data["position"]),
                float_=str(data["float"]),
                has_transition=bool(data["has_transition"]),
                has_transform=bool(data["has_transform"]),
            )
        except KeyError as exc:
            raise SchemaError(f"computed subset missing field {exc}") from exc


@dataclass(frozen=True)
class ElementState:
    """One element's state at one sampled width."""

    bbox: BBox
    visible: bool
    computed: ComputedSubset


@dataclass
class DomNode:
    xpath: str
    tag: str
    id: Optional[str] = None
    classes: list[str] = field(default_factory=list)
    attributes: dict[str, str] = field(default_factory=dict)
    inline_style_text: str = ""
    children: list["DomNode"] = field(default_factory=list)

    def walk(self) -> Iterator["DomNode"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def to_json(self) -> dict:
        return {
            "xpath": self.xpath,
            "tag": self.tag,
            "id": self.id,
            "classes": list(self.classes),
            "attributes": dict(self.attributes),
            "inline_style_text": self.inline_style_text,
            "children": [c.to_json() for c in self.children],
        }

    @staticmethod
    def from_json(data: dict) -> "DomNode":
        try:
            return DomNode(
                xpath=str(data["xpath"]),
                tag=str(data["tag"]),
                id=data.get("id"),
                classes=[str(c) for c in data.get("classes", [])],
                attributes={str(k): str(v) for k, v in data.get("attributes", {}).items()},
                inline_style_text=str(data.get("inline_style_text", "")),
                children=[DomNode.from_json(c) for c in data.get("children", [])],
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise SchemaError(f"malformed DOM node: {exc}") from exc


@dataclass
class ViewportRecord:
    width: int
    entries: dict[str, ElementState]

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "entries": {
                xp: {
                    "bbox": st.bbox.to_json(),
                    "visible": st.visible,
                    "computed": st.computed.to_json(),
                }
                for xp, st in sorted(self.entries.items())
            },
        }

    @staticmethod
    def from_json(data: dict) -> "ViewportRecord":
        try:
            width = int(data["width"])
            raw_entries = data["entries"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed viewport record: {exc}") from exc
        entries = {}
        for xp, raw in raw_entries.items():
            try:
                entries[str(xp)] = ElementState(
                    bbox=BBox.from_json(raw["bbox"]),
                    visible=bool(raw["visible"]),
                    computed=ComputedSubset.from_json(raw["computed"]),
                )
            except (KeyError, TypeError) as exc:
                raise SchemaError(f"malformed entry for {xp!r} at width {width}: {exc}") from exc
        return ViewportRecord(width=width, entries=entries)


@dataclass(frozen=True)
class Stylesheet:
    """Raw author stylesheet text plus a label for diagnostics."""

    label: str
    text: str


class CaptureBundle:
    """A loaded, validated bundle.  Immutable once constructed; safe to share
    read-only across parallel workers."""

    def __init__(
        self,
        url: str,
        height: int,
        width_min: int,
        width_max: int,
        step: int,
        dom: DomNode,
        stylesheets: list[Stylesheet],
        records: list[ViewportRecord],
        images_dir: Optional[Path] = None,
    ):
        self.url = url
        self.height = height
        self.width_min = width_min
        self.width_max = width_max
        self.step = step
        self.dom = dom
        self.stylesheets = stylesheets
        self.images_dir = images_dir

        self._records: dict[int, ViewportRecord] = {}
        for rec in records:
            self._records[rec.width] = rec

        self._nodes: dict[str, DomNode] = {}
        self._parent: dict[str, Optional[str]] = {}
        self._order: dict[str, int] = {}
        self._index_tree()
        self._validate()

    # -- tree indexing -------------------------------------------------

    def _index_tree(self) -> None:
        for i, node in enumerate(self.dom.walk()):
            if node.xpath in self._nodes:
                raise DuplicateXPath(node.xpath)
            self._nodes[node.xpath] = node
            self._order[node.xpath] = i
        self._parent[self.dom.xpath] = None
        for node in self.dom.walk():
            for child in node.children:
                self._parent[child.xpath] = node.xpath

    def _validate(self) -> None:
        if self.dom.tag != "html":
            raise SchemaError(f"root node must be 'html', got {self.dom.tag!r}")
        if self.width_min > self.width_max:
            raise SchemaError(
                f"width_min {self.width_min} > width_max {self.width_max}"
            )
        if self.step <= 0:
            raise SchemaError(f"step must be positive, got {self.step}")
        for node in self.dom.walk():
            for child in node.children:
                if not child.xpath.startswith(node.xpath + "/"):
                    raise SchemaError(
                        f"child xpath {child.xpath!r} does not extend parent {node.xpath!r}"
                    )
        for w in self.widths():
            if w not in self._records:
                raise MissingViewport(f"no geometry record for width {w}")
        for w, rec in self._records.items():
            if not (self.width_min <= w <= self.width_max):
                raise SchemaError(f"record width {w} outside declared range")
            for xp in rec.entries:
                if xp not in self._nodes:
                    raise SchemaError(
                        f"geometry entry {xp!r} at width {w} not in the DOM tree"
                    )

    # -- queries -------------------------------------------------------

    def widths(self) -> list[int]:
        return list(range(self.width_min, self.width_max + 1, self.step))

    def record(self, width: int) -> ViewportRecord:
        try:
            return self._records[width]
        except KeyError:
            raise UnsampledWidth(f"width {width} was not sampled") from None

    def node(self, xpath: str) -> DomNode:
        try:
            return self._nodes[xpath]
        except KeyError:
            raise UnknownXPath(xpath) from None

    def has_node(self, xpath: str) -> bool:
        return xpath in self._nodes

    def parent_of(self, xpath: str) -> Optional[str]:
        self.node(xpath)
        return self._parent[xpath]

    def doc_order(self, xpath: str) -> int:
        self.node(xpath)
        return self._order[xpath]

    def is_ancestor(self, ancestor: str, descendant: str) -> bool:
        cur = self._parent.get(descendant)
        while cur is not None:
            if cur == ancestor:
                return True
            cur = self._parent.get(cur)
        return False

    def ancestors(self, xpath: str) -> list[str]:
        out = []
        cur = self.parent_of(xpath)
        while cur is not None:
            out.append(cur)
            cur = self._parent[cur]
        return out

    @property
    def html_xpath(self) -> str:
        return self.dom.xpath

    @property
    def body_xpath(self) -> str:
        for child in self.dom.children:
            if child.tag == "body":
                return child.xpath
        raise SchemaError("bundle DOM has no body element")

    def element_box(self, xpath: str, width: int) -> BBox:
        """Recorded border box of an element at a sampled width."""
        self.node(xpath)
        rec = self.record(width)
        try:
            return rec.entries[xpath].bbox
        except KeyError:
            raise UnknownXPath(
                f"{xpath} has no geometry entry at width {width}"
            ) from None

    def state(self, xpath: str, width: int) -> Optional[ElementState]:
        """Element state at a width, or None when the record lacks the element."""
        return self.record(width).entries.get(xpath)

    def tree_neighbors(self, xpath: str) -> dict:
        """Structural relatives from the DOM tree: parent, siblings, children.

        The root returns an empty parent and no siblings.
        """
        node = self.node(xpath)
        parent_xp = self._parent[xpath]
        siblings: list[str] = []
        if parent_xp is not None:
            parent = self._nodes[parent_xp]
            siblings = [c.xpath for c in parent.children if c.xpath != xpath]
        return {
            "parent": parent_xp or "",
            "siblings": siblings,
            "children": [c.xpath for c in node.children],
        }


# -- directory IO ------------------------------------------------------


def load_bundle(path: str | Path) -> CaptureBundle:
    """Load and validate a bundle directory.

    Raises MissingViewport, DuplicateXPath or SchemaError when the documents
    violate the bundle contract.
    """
    root = Path(path)
    manifest_path = root / MANIFEST_FILE
    if not manifest_path.is_file():
        raise SchemaError(f"{root} is not a bundle: missing {MANIFEST_FILE}")

    manifest = _read_json(manifest_path)
    for key in ("url", "height", "width_min", "width_max", "step"):
        if key not in manifest:
            raise SchemaError(f"manifest missing field {key!r}")
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported bundle schema_version {manifest.get('schema_version')!r}"
        )

    dom = DomNode.from_json(_read_json(root / DOM_FILE))

    sheets_raw = _read_json(root / STYLESHEETS_FILE)
    if not isinstance(sheets_raw, list):
        raise SchemaError("stylesheets.json must be an array")
    stylesheets = []
    for i, entry in enumerate(sheets_raw):
        try:
            stylesheets.append(Stylesheet(label=str(entry["label"]), text=str(entry["text"])))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed stylesheet entry {i}: {exc}") from exc

    geometry_path = root / GEOMETRY_FILE
    if not geometry_path.is_file():
        raise SchemaError(f"missing {GEOMETRY_FILE}")
    records = []
    with geometry_path.open() as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(ViewportRecord.from_json(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise SchemaError(f"geometry line {line_no}: {exc}") from exc

    images_dir = root / IMAGES_DIR
    return CaptureBundle(
        url=str(manifest["url"]),
        height=int(manifest["height"]),
        width_min=int(manifest["width_min"]),
        width_max=int(manifest["width_max"]),
        step=int(manifest["step"]),
        dom=dom,
        stylesheets=stylesheets,
        records=records,
        images_dir=images_dir if images_dir.is_dir() else None,
    )


def save_bundle(bundle: CaptureBundle, path: str | Path) -> Path:
    """Write a bundle directory.  Inverse of load_bundle (round-trip safe)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "url": bundle.url,
        "height": bundle.height,
        "width_min": bundle.width_min,
        "width_max": bundle.width_max,
        "step": bundle.step,
    }
    _write_json(root / MANIFEST_FILE, manifest)
    _write_json(root / DOM_FILE, bundle.dom.to_json())
    _write_json(
        root / STYLESHEETS_FILE,
        [{"label": s.label, "text": s.text} for s in bundle.stylesheets],
    )
    with (root / GEOMETRY_FILE).open("w") as fh:
        for w in bundle.widths():
            fh.write(json.dumps(bundle.record(w).to_json(), sort_keys=True))
            fh.write("\n")
    (root / IMAGES_DIR).mkdir(exist_ok=True)
    return root


def _read_json(path: Path):
    try:
        with path.open() as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"missing bundle document: {path.name}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path.name}: {exc}") from exc


def _write_json(path: Path, data) -> None:
    with path.open("w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")
