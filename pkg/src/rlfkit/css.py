"""Author-stylesheet model: parsing, selector matching, media-query
evaluation, cascade resolution and length normalization.

The parser is deliberately a subset engine. Supported:

  selectors     type, .class, #id, universal, attribute presence ([attr]),
                descendant (whitespace) and child (>) combinators
  at-rules      @media with (min-width: Npx) / (max-width: Npx) clauses
  declarations  property: value pairs, !important, margin/padding shorthand
                expansion into longhands

Anything else (pseudo-classes, sibling combinators, other at-rules) is
skipped and reported in the parse warnings, never raised: a skipped rule can
only make the developer-authored check conservative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Optional

from .snapshot import CaptureBundle, DomNode

# Properties whose percentage values resolve against the parent's horizontal
# extent; everything else length-like resolves against the vertical one.
_HORIZONTAL_PERCENT = {
    "width", "min-width", "max-width",
    "margin-left", "margin-right", "padding-left", "padding-right",
    "left", "right",
}

_SHORTHAND_SIDES = ("top", "right", "bottom", "left")

_LENGTH_RE = re.compile(
    r"^([+-]?(?:\d+\.?\d*|\.\d+))(px|em|rem|vw|vh|%)?$", re.IGNORECASE
)


@dataclass(frozen=True)
class Declaration:
    property: str
    raw_value: str
    important: bool = False


@total_ordering
@dataclass(frozen=True)
class Specificity:
    """Standard (id, class/attribute, type) selector weight."""

    a: int = 0
    b: int = 0
    c: int = 0

    def key(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def __lt__(self, other: "Specificity") -> bool:
        return self.key() < other.key()

    def __add__(self, other: "Specificity") -> "Specificity":
        return Specificity(self.a + other.a, self.b + other.b, self.c + other.c)


@dataclass(frozen=True)
class Compound:
    """One compound selector: optional tag plus simple selectors."""

    tag: Optional[str] = None        # None means universal / unspecified
    id: Optional[str] = None
    classes: tuple[str, ...] = ()
    attrs: tuple[str, ...] = ()      # attribute-presence names

    def specificity(self) -> Specificity:
        return Specificity(
            a=1 if self.id else 0,
            b=len(self.classes) + len(self.attrs),
            c=1 if self.tag else 0,
        )

    def matches(self, node: DomNode) -> bool:
        if self.tag is not None and node.tag != self.tag:
            return False
        if self.id is not None and node.id != self.id:
            return False
        for cls in self.classes:
            if cls not in node.classes:
                return False
        for attr in self.attrs:
            if attr not in node.attributes:
                return False
        return True


@dataclass(frozen=True)
class SelectorChain:
    """Compounds joined right-to-left by combinators.

    combinators[i] sits between compounds[i] and compounds[i+1]:
    " " for descendant, ">" for child.
    """

    compounds: tuple[Compound, ...]
    combinators: tuple[str, ...]
    text: str

    def specificity(self) -> Specificity:
        spec = Specificity()
        for comp in self.compounds:
            spec = spec + comp.specificity()
        return spec


@dataclass(frozen=True)
class MediaCondition:
    """Conjunction of min-width / max-width clauses (inclusive bounds)."""

    min_width: Optional[float] = None
    max_width: Optional[float] = None

    def text(self) -> str:
        parts = []
        if self.min_width is not None:
            parts.append(f"(min-width: {self.min_width:g}px)")
        if self.max_width is not None:
            parts.append(f"(max-width: {self.max_width:g}px)")
        return " and ".join(parts)


@dataclass(frozen=True)
class StyleRule:
    selectors: tuple[SelectorChain, ...]
    declarations: tuple[Declaration, ...]
    media_condition: Optional[MediaCondition]
    source: tuple[int, int]  # (sheet index, rule index) cascade order


@dataclass(frozen=True)
class AuthoredValue:
    """The winning developer-authored declaration for one property."""

    property: str
    raw_value: str
    normalized_px: Optional[float]
    origin: str                      # "inline" or "sheet <i> rule <j> (<selector>)"
    specificity: Specificity
    important: bool


@dataclass
class ParseResult:
    rules: list[StyleRule]
    warnings: list[str] = field(default_factory=list)


def specificity(selector: SelectorChain) -> Specificity:
    return selector.specificity()


def media_active(condition: Optional[MediaCondition], width: float) -> bool:
    """True when every clause of the condition holds at the given width."""
    if condition is None:
        return True
    if condition.min_width is not None and width < condition.min_width:
        return False
    if condition.max_width is not None and width > condition.max_width:
        return False
    return True


# -- tokenizing --------------------------------------------------------


def _strip_comments(text: str) -> str:
    return re.sub(r"/\*.*?\*/", " ", text, flags=re.DOTALL)


_MEDIA_CLAUSE_RE = re.compile(
    r"\(\s*(min-width|max-width)\s*:\s*([\d.]+)\s*px\s*\)", re.IGNORECASE
)

_COMPOUND_TOKEN_RE = re.compile(
    r"([a-zA-Z][\w-]*|\*)?((?:[#.][\w-]+|\[[\w-]+\])*)$"
)
_SIMPLE_PART_RE = re.compile(r"[#.][\w-]+|\[[\w-]+\]")


def parse_media_condition(text: str) -> Optional[MediaCondition]:
    """Parse a media-query condition; None when it uses unsupported features."""
    body = text.strip()
    clauses = _MEDIA_CLAUSE_RE.findall(body)
    # Remove the recognized clauses and connective glue; anything left over
    # means a feature we do not evaluate.
    leftover = _MEDIA_CLAUSE_RE.sub("", body)
    leftover = re.sub(r"\b(and|screen|all|only)\b", "", leftover, flags=re.IGNORECASE)
    if leftover.strip(" \t,"):
        return None
    if not clauses:
        return None
    min_w: Optional[float] = None
    max_w: Optional[float] = None
    for feature, value in clauses:
        px = float(value)
        if feature.lower() == "min-width":
            min_w = px if min_w is None else max(min_w, px)
        else:
            max_w = px if max_w is None else min(max_w, px)
    return MediaCondition(min_width=min_w, max_width=max_w)


def parse_compound(token: str) -> Optional[Compound]:
    m = _COMPOUND_TOKEN_RE.match(token)
    if not m or (not m.group(1) and not m.group(2)):
        return None
    tag_tok = m.group(1)
    tag: Optional[str] = None
    if tag_tok and tag_tok != "*":
        tag = tag_tok.lower()
    node_id = None
    classes: list[str] = []
    attrs: list[str] = []
    for part in _SIMPLE_PART_RE.findall(m.group(2) or ""):
        if part.startswith("#"):
            if node_id is not None:
                return None
            node_id = part[1:]
        elif part.startswith("."):
            classes.append(part[1:])
        else:
            attrs.append(part[1:-1].lower())
    return Compound(tag=tag, id=node_id, classes=tuple(classes), attrs=tuple(attrs))


def parse_selector(text: str) -> Optional[SelectorChain]:
    """Parse one selector chain; None when it falls outside the subset."""
    cleaned = text.strip()
    if not cleaned or any(ch in cleaned for ch in ":+~,"):
        return None
    tokens = re.split(r"(\s*>\s*|\s+)", cleaned)
    compounds: list[Compound] = []
    combinators: list[str] = []
    expect_compound = True
    for tok in tokens:
        if tok is None or tok == "":
            continue
        if expect_compound:
            comp = parse_compound(tok)
            if comp is None:
                return None
            compounds.append(comp)
            expect_compound = False
        else:
            combinators.append(">" if ">" in tok else " ")
            expect_compound = True
    if expect_compound or not compounds:
        return None
    return SelectorChain(
        compounds=tuple(compounds), combinators=tuple(combinators), text=cleaned
    )


def expand_declaration(prop: str, value: str, important: bool) -> list[Declaration]:
    """Expand margin/padding shorthands into longhands; pass others through."""
    prop = prop.strip().lower()
    value = value.strip()
    if not prop or not value:
        return []
    if prop in ("margin", "padding"):
        parts = value.split()
        if not 1 <= len(parts) <= 4:
            return [Declaration(prop, value, important)]
        if len(parts) == 1:
            per_side = [parts[0]] * 4
        elif len(parts) == 2:
            per_side = [parts[0], parts[1], parts[0], parts[1]]
        elif len(parts) == 3:
            per_side = [parts[0], parts[1], parts[2], parts[1]]
        else:
            per_side = parts
        return [
            Declaration(f"{prop}-{side}", per_side[i], important)
            for i, side in enumerate(_SHORTHAND_SIDES)
        ]
    return [Declaration(prop, value, important)]


def parse_declarations(block: str) -> list[Declaration]:
    decls: list[Declaration] = []
    for chunk in block.split(";"):
        if ":" not in chunk:
            continue
        prop, _, value = chunk.partition(":")
        value = value.strip()
        important = False
        if value.lower().endswith("!important"):
            important = True
            value = value[: -len("!important")].rstrip().rstrip("!").rstrip()
        decls.extend(expand_declaration(prop, value, important))
    return decls


def _iter_blocks(text: str):
    """Yield (prelude, body) pairs at one brace-nesting level."""
    i = 0
    n = len(text)
    while i < n:
        open_idx = text.find("{", i)
        if open_idx == -1:
            break
        prelude = text[i:open_idx].strip()
        depth = 1
        j = open_idx + 1
        while j < n and depth:
            if text[j] == "{":
                depth += 1
            elif text[j] == "}":
                depth -= 1
            j += 1
        body = text[open_idx + 1 : j - 1]
        yield prelude, body
        i = j


def parse_stylesheet(text: str, sheet_index: int) -> ParseResult:
    """Parse one stylesheet into rules in source order.

    Unparseable constructs are skipped and reported as warnings; the parser
    never raises on author CSS.
    """
    rules: list[StyleRule] = []
    warnings: list[str] = []
    rule_counter = 0

    def handle_plain(prelude: str, body: str, media: Optional[MediaCondition]):
        nonlocal rule_counter
        chains = []
        for sel_text in prelude.split(","):
            chain = parse_selector(sel_text)
            if chain is None:
                warnings.append(
                    f"sheet {sheet_index}: skipped unsupported selector {sel_text.strip()!r}"
                )
            else:
                chains.append(chain)
        decls = parse_declarations(body)
        if not chains or not decls:
            rule_counter += 1
            return
        rules.append(
            StyleRule(
                selectors=tuple(chains),
                declarations=tuple(decls),
                media_condition=media,
                source=(sheet_index, rule_counter),
            )
        )
        rule_counter += 1

    for prelude, body in _iter_blocks(_strip_comments(text)):
        if prelude.startswith("@media"):
            condition = parse_media_condition(prelude[len("@media"):])
            if condition is None:
                warnings.append(
                    f"sheet {sheet_index}: skipped @media with unsupported condition "
                    f"{prelude[len('@media'):].strip()!r}"
                )
                continue
            for inner_prelude, inner_body in _iter_blocks(body):
                handle_plain(inner_prelude, inner_body, condition)
        elif prelude.startswith("@"):
            warnings.append(f"sheet {sheet_index}: skipped at-rule {prelude.split('{')[0].strip()!r}")
        else:
            handle_plain(prelude, body, None)

    return ParseResult(rules=rules, warnings=warnings)


# -- matching and cascade ----------------------------------------------


def selector_matches(chain: SelectorChain, node: DomNode, bundle: CaptureBundle) -> bool:
    """Match a chain against a node, walking ancestors right-to-left."""
    compounds = chain.compounds
    if not compounds[-1].matches(node):
        return False
    idx = len(compounds) - 2
    current = node.xpath
    while idx >= 0:
        combinator = chain.combinators[idx]
        parent = bundle.parent_of(current)
        if combinator == ">":
            if parent is None or not compounds[idx].matches(bundle.node(parent)):
                return False
            current = parent
        else:
            found = None
            probe = parent
            while probe is not None:
                if compounds[idx].matches(bundle.node(probe)):
                    found = probe
                    break
                probe = bundle.parent_of(probe)
            if found is None:
                return False
            current = found
        idx -= 1
    return True


@dataclass(frozen=True)
class LengthContext:
    element_font_size: float
    root_font_size: float
    parent_extent: float
    viewport_width: float
    viewport_height: float


def normalize_length(raw_value: str, context: LengthContext) -> Optional[float]:
    """Resolve a raw length to px; None for keywords and non-size values."""
    m = _LENGTH_RE.match(raw_value.strip())
    if not m:
        return None
    number = float(m.group(1))
    unit = (m.group(2) or "").lower()
    if unit == "px":
        return number
    if unit == "":
        # Unitless zero is a valid CSS length; other bare numbers are not.
        return 0.0 if number == 0 else None
    if unit == "em":
        return number * context.element_font_size
    if unit == "rem":
        return number * context.root_font_size
    if unit == "%":
        return number * context.parent_extent / 100.0
    if unit == "vw":
        return number * context.viewport_width / 100.0
    if unit == "vh":
        return number * context.viewport_height / 100.0
    return None


class StyleIndex:
    """Parsed view of a bundle's stylesheets plus per-node inline styles.

    Immutable after construction; all queries are read-only.
    """

    def __init__(self, bundle: CaptureBundle):
        self.bundle = bundle
        self.rules: list[StyleRule] = []
        self.warnings: list[str] = []
        for i, sheet in enumerate(bundle.stylesheets):
            result = parse_stylesheet(sheet.text, i)
            self.rules.extend(result.rules)
            self.warnings.extend(result.warnings)
        self._inline: dict[str, list[Declaration]] = {}
        for node in bundle.dom.walk():
            if node.inline_style_text.strip():
                self._inline[node.xpath] = parse_declarations(node.inline_style_text)
        self._match_cache: dict[tuple[int, int, str], bool] = {}

    def inline_declarations(self, xpath: str) -> list[Declaration]:
        return self._inline.get(xpath, [])

    def matching_rules(self, xpath: str) -> list[StyleRule]:
        node = self.bundle.node(xpath)
        out = []
        for rule_idx, rule in enumerate(self.rules):
            hit = False
            for chain_idx, chain in enumerate(rule.selectors):
                key = (rule_idx, chain_idx, xpath)
                cached = self._match_cache.get(key)
                if cached is None:
                    cached = selector_matches(chain, node, self.bundle)
                    self._match_cache[key] = cached
                if cached:
                    hit = True
                    break
            if hit:
                out.append(rule)
        return out

    def matched_specificity(self, rule: StyleRule, xpath: str) -> Specificity:
        """Highest specificity among the rule's chains that match the node."""
        node = self.bundle.node(xpath)
        best: Optional[Specificity] = None
        for chain in rule.selectors:
            if selector_matches(chain, node, self.bundle):
                spec = chain.specificity()
                if best is None or spec > best:
                    best = spec
        return best if best is not None else Specificity()

    def authored_properties(self, xpath: str, width: float) -> set[str]:
        """All longhand property names with any author source active at width."""
        props = {d.property for d in self.inline_declarations(xpath)}
        for rule in self.matching_rules(xpath):
            if media_active(rule.media_condition, width):
                props.update(d.property for d in rule.declarations)
        return props


def length_context_for(
    bundle: CaptureBundle, xpath: str, property_name: str, width: int
) -> Optional[LengthContext]:
    """Assemble the normalization context for an element's property at a width."""
    state = bundle.state(xpath, width)
    if state is None:
        return None
    root_state = bundle.state(bundle.html_xpath, width)
    root_fs = root_state.computed.font_size if root_state else 16.0
    parent_xp = bundle.parent_of(xpath)
    parent_extent = float(width)
    if parent_xp is not None:
        parent_state = bundle.state(parent_xp, width)
        if parent_state is not None:
            if property_name in _HORIZONTAL_PERCENT:
                parent_extent = parent_state.bbox.w
            else:
                parent_extent = parent_state.bbox.h
    return LengthContext(
        element_font_size=state.computed.font_size,
        root_font_size=root_fs,
        parent_extent=parent_extent,
        viewport_width=float(width),
        viewport_height=float(bundle.height),
    )


def resolve_authored(
    index: StyleIndex, xpath: str, property_name: str, width: int
) -> Optional[AuthoredValue]:
    """The winning developer-authored declaration for a longhand property.

    Precedence: important inline > important rule (specificity, then source
    order) > normal inline > normal rule (specificity, then source order).
    User-agent defaults and inheritance never count as authored, so the
    result is None when no author source sets the property.
    """
    bundle = index.bundle
    property_name = property_name.lower()

    candidates: list[tuple[tuple, Declaration, str, Specificity]] = []
    for pos, decl in enumerate(index.inline_declarations(xpath)):
        if decl.property == property_name:
            key = (1 if decl.important else 0, 1, 0, 0, 0, 0, 0, pos)
            candidates.append((key, decl, "inline", Specificity()))
    for rule in index.matching_rules(xpath):
        if not media_active(rule.media_condition, width):
            continue
        for pos, decl in enumerate(rule.declarations):
            if decl.property != property_name:
                continue
            spec = index.matched_specificity(rule, xpath)
            key = (
                1 if decl.important else 0,
                0,
                spec.a,
                spec.b,
                spec.c,
                rule.source[0],
                rule.source[1],
                pos,
            )
            origin = f"sheet {rule.source[0]} rule {rule.source[1]}"
            candidates.append((key, decl, origin, spec))

    if not candidates:
        return None
    key, decl, origin, spec = max(candidates, key=lambda item: item[0])

    normalized = None
    ctx = length_context_for(bundle, xpath, property_name, width)
    if ctx is not None:
        normalized = normalize_length(decl.raw_value, ctx)

    return AuthoredValue(
        property=property_name,
        raw_value=decl.raw_value,
        normalized_px=normalized,
        origin=origin,
        specificity=spec,
        important=decl.important,
    )
