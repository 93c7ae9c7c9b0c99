"""Ranking-quality metrics against ground-truth annotations, plus the
mutation oracle that realizes the two ground-truth rules: a suggested pair
is a fix when neutralizing it removes the original failure without
introducing new ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .detection import FailureReport, detect
from .errors import CaptureUnavailable, SchemaError
from .prioritization import RankedList
from .snapshot import CaptureBundle

TOP_N_LEVELS = (1, 3, 5, 7)
DEFAULT_K = 3


@dataclass(frozen=True)
class TruthEntry:
    """Annotation for one failure: which pairs fix it, and whether engineers
    judged the behavior intentional (np = no problem)."""

    acceptable: tuple[tuple[str, str], ...]
    np_flag: bool = False
    note: str = ""


@dataclass
class GroundTruth:
    """Per-page, per-failure annotations."""

    pages: dict[str, dict[str, TruthEntry]] = field(default_factory=dict)

    @staticmethod
    def from_json(data: dict) -> "GroundTruth":
        try:
            pages = {}
            for page_id, failures in data["pages"].items():
                entries = {}
                for failure_id, raw in failures.items():
                    entries[str(failure_id)] = TruthEntry(
                        acceptable=tuple(
                            (str(xp), str(prop)) for xp, prop in raw.get("acceptable", [])
                        ),
                        np_flag=bool(raw.get("np", False)),
                        note=str(raw.get("note", "")),
                    )
                pages[str(page_id)] = entries
            return GroundTruth(pages=pages)
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise SchemaError(f"malformed ground-truth document: {exc}") from exc

    @staticmethod
    def load(path: str | Path) -> "GroundTruth":
        with Path(path).open() as fh:
            try:
                return GroundTruth.from_json(json.load(fh))
            except json.JSONDecodeError as exc:
                raise SchemaError(f"ground truth: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "pages": {
                page: {
                    fid: {
                        "acceptable": [list(p) for p in entry.acceptable],
                        "np": entry.np_flag,
                        "note": entry.note,
                    }
                    for fid, entry in failures.items()
                }
                for page, failures in self.pages.items()
            },
        }


def first_correct_rank(ranked: RankedList, entry: TruthEntry) -> Optional[int]:
    """Rank of the first acceptable pair, or None when no pair is correct."""
    acceptable = set(entry.acceptable)
    for ranked_entry in ranked.entries:
        pair = (ranked_entry.candidate.xpath, ranked_entry.candidate.property)
        if pair in acceptable:
            return ranked_entry.rank
    return None


def top_n(first_ranks: list[Optional[int]], n: int) -> float:
    """Fraction of failures whose first correct pair sits within rank n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not first_ranks:
        return 0.0
    hits = sum(1 for r in first_ranks if r is not None and r <= n)
    return hits / len(first_ranks)


def mrr(first_ranks: list[Optional[int]]) -> float:
    """Mean reciprocal rank; a failure that is never localized contributes 0."""
    if not first_ranks:
        return 0.0
    total = sum(1.0 / r for r in first_ranks if r is not None)
    return total / len(first_ranks)


def p_at_k(ranked: RankedList, entry: TruthEntry, k: int = DEFAULT_K) -> float:
    """Relevant pairs within the top k, divided by k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    acceptable = set(entry.acceptable)
    relevant = sum(
        1
        for ranked_entry in ranked.entries[:k]
        if (ranked_entry.candidate.xpath, ranked_entry.candidate.property) in acceptable
    )
    return relevant / k


def average_p_at_k(per_page_values: list[float]) -> float:
    if not per_page_values:
        return 0.0
    return sum(per_page_values) / len(per_page_values)


@dataclass
class MetricsReport:
    per_page: dict[str, dict]
    total: dict

    def to_json(self) -> dict:
        return {"schema_version": 1, "per_page": self.per_page, "total": self.total}


def evaluate(
    ranked_by_page: dict[str, dict[str, RankedList]],
    truth: GroundTruth,
    k: int = DEFAULT_K,
    exclude_np: bool = False,
    exclude_we_np: bool = False,
    rlf_types: Optional[dict[str, dict[str, str]]] = None,
) -> MetricsReport:
    """Compute per-page and total metrics.

    exclude_np drops every failure annotated 'no problem'; exclude_we_np
    drops only wrapping failures annotated so (requires rlf_types:
    page -> failure_id -> type).
    """
    per_page: dict[str, dict] = {}
    all_ranks: list[Optional[int]] = []
    all_ranks_no_np: list[Optional[int]] = []
    page_pk: list[float] = []

    for page_id, ranked_lists in sorted(ranked_by_page.items()):
        truth_entries = truth.pages.get(page_id, {})
        ranks: list[Optional[int]] = []
        pk_values: list[float] = []
        counted = 0
        for failure_id, ranked in sorted(ranked_lists.items()):
            entry = truth_entries.get(failure_id)
            if entry is None:
                continue
            skip = False
            if entry.np_flag:
                if exclude_np:
                    skip = True
                elif exclude_we_np and rlf_types is not None:
                    rlf_type = rlf_types.get(page_id, {}).get(failure_id)
                    skip = rlf_type == "WE"
            if skip:
                continue
            counted += 1
            rank_value = first_correct_rank(ranked, entry)
            ranks.append(rank_value)
            pk_values.append(p_at_k(ranked, entry, k))
            if not entry.np_flag:
                all_ranks_no_np.append(rank_value)
        all_ranks.extend(ranks)
        page_p_at_k = average_p_at_k(pk_values)
        page_pk.append(page_p_at_k)
        per_page[page_id] = {
            "rlf_count": counted,
            "top_n": {str(n): top_n(ranks, n) for n in TOP_N_LEVELS},
            "mrr": mrr(ranks),
            "p_at_k": page_p_at_k,
        }

    total = {
        "rlf_count": len(all_ranks),
        "top_n": {str(n): top_n(all_ranks, n) for n in TOP_N_LEVELS},
        "mrr": mrr(all_ranks),
        "mrr_excluding_np": mrr(all_ranks_no_np),
        "p_at_k": average_p_at_k(page_pk),
        "k": k,
    }
    return MetricsReport(per_page=per_page, total=total)


def render_metrics_table(report: MetricsReport) -> str:
    """Plain-text table with one row per page plus a totals row."""
    headers = ("page", "rlfs", "top-1", "top-3", "top-5", "top-7", "mrr", f"p@{report.total['k']}")

    def fmt_row(name: str, stats: dict) -> tuple[str, ...]:
        return (
            name,
            str(stats["rlf_count"]),
            *(f"{stats['top_n'][str(n)]:.4f}" for n in TOP_N_LEVELS),
            f"{stats['mrr']:.4f}",
            f"{stats['p_at_k']:.4f}",
        )

    rows = [fmt_row(page, stats) for page, stats in sorted(report.per_page.items())]
    rows.append(fmt_row("total", report.total))
    widths = [max(len(headers[i]), *(len(r[i]) for r in rows)) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines) + "\n"


# -- mutation oracle ----------------------------------------------------


@dataclass(frozen=True)
class Mutation:
    """A neutralization of one authored declaration."""

    xpath: str
    property: str
    strategy: str = "delete"          # delete | set
    value: Optional[str] = None

    def key(self) -> str:
        if self.strategy == "set":
            return f"set::{self.xpath}::{self.property}::{self.value}"
        return f"delete::{self.xpath}::{self.property}"


RecaptureFn = Callable[[Mutation], Optional[CaptureBundle]]


def oracle_verify(
    original: CaptureBundle,
    failure: FailureReport,
    pair: tuple[str, str],
    recapture: RecaptureFn,
    strategy: str = "delete",
    value: Optional[str] = None,
    eps: float = 1.0,
) -> str:
    """Judge one (element, property) pair against the two ground-truth rules.

    A recapture callback renders the page with the declaration neutralized
    and returns the mutated bundle (from a live capture bridge, or from a
    pre-recorded mutant directory). Returns 'fixes', 'no_effect' or
    'introduces_new'.
    """
    mutation = Mutation(pair[0], pair[1], strategy, value)
    mutated = recapture(mutation)
    if mutated is None:
        raise CaptureUnavailable(
            f"no capture available for mutation {mutation.key()}"
        )
    original_keys = {r.key() for r in detect(original, eps=eps)}
    mutated_reports = detect(mutated, eps=eps)
    mutated_keys = {r.key() for r in mutated_reports}

    original_gone = failure.key() not in mutated_keys
    new_failures = mutated_keys - original_keys
    if original_gone and not new_failures:
        return "fixes"
    if new_failures:
        return "introduces_new"
    return "no_effect"


def prerecorded_recapture(mutants_dir: str | Path) -> RecaptureFn:
    """Recapture backend that looks mutations up in a directory of
    pre-recorded bundles named by the mutation key."""
    from .snapshot import load_bundle

    root = Path(mutants_dir)

    def recapture(mutation: Mutation) -> Optional[CaptureBundle]:
        candidate = root / mutation.key().replace("::", "__").replace("/", "_")
        if candidate.is_dir():
            return load_bundle(candidate)
        return None

    return recapture


def mutant_dirname(mutation: Mutation) -> str:
    return mutation.key().replace("::", "__").replace("/", "_")
