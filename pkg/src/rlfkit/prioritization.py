"""Phase 3: order the candidate set E into the ranked list by impact.

Comparator, in precedence order:

  1. numeric candidates (a resolvable px value) sort among themselves by
     value, descending — larger values are likelier culprits;
  2. non-numeric and missing-property candidates sort among themselves by
     their search-set rank and sit ahead of the whole numeric block;
  3. ties break by search-set rank, then tier (affected element before
     neighbor), then document order, then property name.

The non-numeric-first placement can be inverted with numeric_first=True for
experimentation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .localization import Candidate
from .errors import EmptyCandidateSet
from .snapshot import CaptureBundle


@dataclass(frozen=True)
class RankedEntry:
    rank: int
    candidate: Candidate

    def to_json(self) -> dict:
        data = {"rank": self.rank}
        data.update(self.candidate.to_json())
        return data


@dataclass(frozen=True)
class RankedList:
    failure_id: str
    entries: tuple[RankedEntry, ...]

    def to_json(self) -> dict:
        return {
            "failure_id": self.failure_id,
            "entries": [e.to_json() for e in self.entries],
        }

    def pairs(self) -> list[tuple[str, str]]:
        return [(e.candidate.xpath, e.candidate.property) for e in self.entries]


def rank(
    candidates: list[Candidate],
    failure_id: str,
    bundle: CaptureBundle,
    numeric_first: bool = False,
) -> RankedList:
    """Produce the ranked list for one failure's candidate set.

    Raises EmptyCandidateSet when there is nothing to rank, which marks the
    failure as not localizable.
    """
    if not candidates:
        raise EmptyCandidateSet(failure_id)

    def sort_key(cand: Candidate):
        numeric = cand.normalized_px is not None
        if numeric:
            block = 1 if not numeric_first else 0
            primary = -cand.normalized_px
        else:
            block = 0 if not numeric_first else 1
            primary = cand.set_rank
        return (
            block,
            primary,
            cand.set_rank,
            0 if cand.tier == "affected" else 1,
            bundle.doc_order(cand.xpath),
            cand.property,
        )

    ordered = sorted(candidates, key=sort_key)
    entries = tuple(
        RankedEntry(rank=i + 1, candidate=cand) for i, cand in enumerate(ordered)
    )
    return RankedList(failure_id=failure_id, entries=entries)


def render_report(ranked: RankedList, bundle: CaptureBundle) -> str:
    """Plain-text table of one failure's ranked suggestions."""
    if not ranked.entries:
        return f"{ranked.failure_id}: no candidates\n"
    rows = []
    for entry in ranked.entries:
        cand = entry.candidate
        value = cand.authored.raw_value if cand.authored else "(missing)"
        origin = cand.authored.origin if cand.authored else "-"
        rows.append(
            (str(entry.rank), cand.xpath, cand.property, value, cand.tier, origin)
        )
    headers = ("rank", "element", "property", "value", "tier", "source")
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rows)) for i in range(len(headers))
    ]
    lines = [f"failure {ranked.failure_id}"]
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)))
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines) + "\n"
