import pytest
from hypothesis import given, settings, strategies as st

from rlfkit.css import AuthoredValue, Specificity, StyleIndex
from rlfkit.detection import detect
from rlfkit.errors import EmptyCandidateSet
from rlfkit.localization import Candidate, collect_candidates
from rlfkit.prioritization import RankedList, rank, render_report

from util import build_bundle


TREE = ("html", {}, [
    ("body", {}, [
        ("div", {"classes": ["a"]}, []),
        ("div", {"classes": ["b"]}, []),
        ("div", {"classes": ["c"]}, []),
        ("div", {"classes": ["d"]}, []),
    ]),
])
BUNDLE = build_bundle(TREE, {}, widths=(320,))
XPATHS = [f"/html/body/div[{i}]" for i in range(1, 5)]


def cand(xpath, prop, px=None, set_rank=5, tier="neighbor", kind="authored"):
    authored = None
    if kind == "authored":
        raw = f"{px}px" if px is not None else "keyword"
        authored = AuthoredValue(prop, raw, px, "sheet 0 rule 0", Specificity(), False)
    return Candidate(xpath, prop, kind, authored, px, tier, set_rank)


def test_numeric_candidates_sort_by_value_descending():
    cands = [
        cand(XPATHS[0], "margin-top", 40),
        cand(XPATHS[1], "height", 120),
        cand(XPATHS[2], "padding-top", 10),
    ]
    ranked = rank(cands, "rlf-0", BUNDLE)
    assert [e.candidate.normalized_px for e in ranked.entries] == [120, 40, 10]
    assert [e.rank for e in ranked.entries] == [1, 2, 3]


def test_equal_values_break_by_set_rank():
    cands = [
        cand(XPATHS[0], "margin-top", 20, set_rank=5),
        cand(XPATHS[1], "height", 20, set_rank=3),
    ]
    ranked = rank(cands, "rlf-0", BUNDLE)
    assert ranked.entries[0].candidate.set_rank == 3


def test_non_numeric_block_precedes_numeric_values():
    cands = [
        cand(XPATHS[0], "height", 500, set_rank=3),
        cand(XPATHS[1], "position", None, set_rank=1),
    ]
    ranked = rank(cands, "rlf-0", BUNDLE)
    assert ranked.entries[0].candidate.property == "position"
    assert ranked.entries[1].candidate.property == "height"


def test_numeric_first_flag_inverts_block_order():
    cands = [
        cand(XPATHS[0], "height", 500, set_rank=3),
        cand(XPATHS[1], "position", None, set_rank=1),
    ]
    ranked = rank(cands, "rlf-0", BUNDLE, numeric_first=True)
    assert ranked.entries[0].candidate.property == "height"


def test_value_tie_then_set_rank_tie_breaks_by_tier():
    cands = [
        cand(XPATHS[1], "margin-top", 20, tier="neighbor"),
        cand(XPATHS[2], "margin-top", 20, tier="affected"),
    ]
    ranked = rank(cands, "rlf-0", BUNDLE)
    assert ranked.entries[0].candidate.tier == "affected"


def test_full_tie_breaks_by_document_order():
    cands = [
        cand(XPATHS[2], "margin-top", 20),
        cand(XPATHS[0], "margin-top", 20),
    ]
    ranked = rank(cands, "rlf-0", BUNDLE)
    assert ranked.entries[0].candidate.xpath == XPATHS[0]


def test_missing_kind_sorts_with_keyword_block():
    cands = [
        cand(XPATHS[0], "display", None, set_rank=1, kind="missing"),
        cand(XPATHS[1], "width", 288, set_rank=3),
    ]
    ranked = rank(cands, "rlf-0", BUNDLE)
    assert ranked.entries[0].candidate.kind == "missing"


def test_empty_candidate_set_raises():
    with pytest.raises(EmptyCandidateSet):
        rank([], "rlf-0", BUNDLE)


@given(st.permutations(list(range(6))))
@settings(max_examples=40, deadline=None)
def test_permutation_invariance(order):
    base = [
        cand(XPATHS[0], "height", 120, set_rank=3),
        cand(XPATHS[1], "margin-top", 40, set_rank=5),
        cand(XPATHS[1], "padding-top", 40, set_rank=5),
        cand(XPATHS[2], "position", None, set_rank=1),
        cand(XPATHS[2], "float", None, set_rank=2),
        cand(XPATHS[3], "padding-bottom", 10, set_rank=5),
    ]
    shuffled = [base[i] for i in order]
    expected = rank(base, "rlf-0", BUNDLE)
    got = rank(shuffled, "rlf-0", BUNDLE)
    assert [e.candidate for e in got.entries] == [e.candidate for e in expected.entries]


@given(st.floats(1.01, 50.0))
@settings(max_examples=40, deadline=None)
def test_scaling_a_numeric_value_never_lowers_its_rank(factor):
    cands = [
        cand(XPATHS[0], "height", 30, set_rank=3),
        cand(XPATHS[1], "margin-top", 40, set_rank=5),
        cand(XPATHS[2], "padding-top", 55, set_rank=5),
    ]
    before = rank(cands, "rlf-0", BUNDLE)
    rank_before = next(
        e.rank for e in before.entries if e.candidate.property == "height"
    )
    scaled = [cand(XPATHS[0], "height", 30 * factor, set_rank=3)] + cands[1:]
    after = rank(scaled, "rlf-0", BUNDLE)
    rank_after = next(
        e.rank for e in after.entries if e.candidate.property == "height"
    )
    assert rank_after <= rank_before


def test_every_candidate_appears_exactly_once():
    cands = [
        cand(XPATHS[i % 4], prop, float(i * 7 % 31), set_rank=1 + i % 5)
        for i, prop in enumerate(
            ["height", "width", "margin-top", "margin-left", "padding-top", "font-size"]
        )
    ]
    ranked = rank(cands, "rlf-0", BUNDLE)
    assert sorted(
        (e.candidate.xpath, e.candidate.property) for e in ranked.entries
    ) == sorted((c.xpath, c.property) for c in cands)
    assert [e.rank for e in ranked.entries] == list(range(1, len(cands) + 1))


# -- report rendering ---------------------------------------------------------


def test_render_empty_list_prints_notice():
    text = render_report(RankedList("rlf-0", ()), BUNDLE)
    assert "no candidates" in text


def test_render_three_rows():
    cands = [
        cand(XPATHS[0], "height", 120, set_rank=3),
        cand(XPATHS[1], "margin-top", 40, set_rank=5),
        cand(XPATHS[2], "padding-top", 10, set_rank=5),
    ]
    text = render_report(rank(cands, "rlf-0", BUNDLE), BUNDLE)
    rows = [ln for ln in text.splitlines() if ln and ln[0].isdigit()]
    assert len(rows) == 3
    assert rows[0].startswith("1")


def test_case_study_report_matches_walkthrough_order(case_study):
    (report,) = detect(case_study)
    candidates = collect_candidates(report, case_study, StyleIndex(case_study))
    ranked = rank(candidates, report.id, case_study)
    text = render_report(ranked, case_study)
    lines = [ln for ln in text.splitlines() if ln and ln[0].isdigit()]
    assert "height" in lines[0]
    assert "margin-top" in lines[1]
    assert "padding" in lines[2]
