import json

import pytest

from rlfkit.errors import MissingViewport, SchemaError, UnknownXPath, UnsampledWidth
from rlfkit.snapshot import BBox, load_bundle, save_bundle

from conftest import fixture_path
from util import build_bundle


TREE = ("html", {}, [
    ("body", {}, [
        ("div", {"classes": ["a"]}, []),
        ("div", {"classes": ["b"]}, []),
        ("div", {"classes": ["c"]}, []),
    ]),
])


def test_load_ep_button_has_one_record_per_width(ep_button):
    assert len(ep_button.widths()) == 1081
    for w in (320, 700, 1400):
        assert ep_button.record(w).width == w


def test_degenerate_single_width_range(tmp_path):
    bundle = build_bundle(TREE, {}, widths=(320,))
    assert bundle.widths() == [320]
    save_bundle(bundle, tmp_path / "b")
    assert len(load_bundle(tmp_path / "b").widths()) == 1


def test_missing_viewport_record_rejected(tmp_path):
    bundle = build_bundle(TREE, {}, widths=(320, 321, 322))
    root = save_bundle(bundle, tmp_path / "b")
    lines = (root / "geometry.jsonl").read_text().splitlines()
    kept = [ln for ln in lines if json.loads(ln)["width"] != 321]
    (root / "geometry.jsonl").write_text("\n".join(kept) + "\n")
    with pytest.raises(MissingViewport):
        load_bundle(root)


def test_duplicate_xpath_rejected(tmp_path):
    bundle = build_bundle(TREE, {}, widths=(320,))
    root = save_bundle(bundle, tmp_path / "b")
    dom = json.loads((root / "dom.json").read_text())
    dom["children"][0]["children"][1]["xpath"] = dom["children"][0]["children"][0]["xpath"]
    (root / "dom.json").write_text(json.dumps(dom))
    with pytest.raises(SchemaError):
        load_bundle(root)


def test_malformed_manifest_rejected(tmp_path):
    bundle = build_bundle(TREE, {}, widths=(320,))
    root = save_bundle(bundle, tmp_path / "b")
    (root / "manifest.json").write_text("{not json")
    with pytest.raises(SchemaError):
        load_bundle(root)


def test_element_box_body_starts_at_origin(ep_button):
    assert ep_button.element_box("/html/body", 320).x == 0


def test_element_box_reads_back_recorded_button_box(ep_button):
    box = ep_button.element_box("/html/body/div[1]/a[1]", 340)
    wrap = ep_button.element_box("/html/body/div[1]", 340)
    assert box.right > wrap.right  # the recorded protrusion
    assert box == BBox(76.0, 28.0, 220.0, 48.0)


def test_element_box_unknown_xpath(ep_button):
    with pytest.raises(UnknownXPath):
        ep_button.element_box("/html/body/div[9]", 320)
    with pytest.raises(UnsampledWidth):
        ep_button.element_box("/html/body", 9999)


def test_tree_neighbors_root(ep_button):
    rel = ep_button.tree_neighbors("/html")
    assert rel["parent"] == ""
    assert rel["siblings"] == []


def test_tree_neighbors_middle_child():
    bundle = build_bundle(TREE, {}, widths=(320,))
    rel = bundle.tree_neighbors("/html/body/div[2]")
    assert rel["siblings"] == ["/html/body/div[1]", "/html/body/div[3]"]


def test_tree_neighbors_case_study_button_parent_is_card(case_study):
    rel = case_study.tree_neighbors("/html/body/div[1]/a[1]")
    assert rel["parent"] == "/html/body/div[1]"


def test_round_trip_identity(tmp_path, case_study):
    root = save_bundle(case_study, tmp_path / "copy")
    reloaded = load_bundle(root)
    assert reloaded.url == case_study.url
    assert reloaded.widths() == case_study.widths()
    assert reloaded.dom.to_json() == case_study.dom.to_json()
    for w in (320, 361, 1400):
        assert reloaded.record(w).to_json() == case_study.record(w).to_json()
    assert [s.text for s in reloaded.stylesheets] == [
        s.text for s in case_study.stylesheets
    ]


def test_serialization_is_byte_stable(tmp_path, case_study):
    first = save_bundle(case_study, tmp_path / "first")
    second = save_bundle(load_bundle(first), tmp_path / "second")
    for name in ("manifest.json", "dom.json", "stylesheets.json", "geometry.jsonl"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


@pytest.mark.parametrize("name", ["clean", "ep_button", "case_study", "sr_promo"])
def test_body_width_tracks_viewport(bundles, name):
    bundle = bundles(name)
    for w in bundle.widths()[:: max(1, len(bundle.widths()) // 25)]:
        assert abs(bundle.element_box("/html/body", w).w - w) <= 1.0


@pytest.mark.parametrize("name", ["clean", "we_tags", "sr_promo"])
def test_every_recorded_xpath_resolves(bundles, name):
    bundle = bundles(name)
    for w in (bundle.width_min, bundle.width_max):
        for xp in bundle.record(w).entries:
            bundle.tree_neighbors(xp)


def test_bbox_invariants():
    with pytest.raises(SchemaError):
        BBox(0, 0, -1, 5)
    with pytest.raises(SchemaError):
        BBox(float("nan"), 0, 1, 1)


def test_not_a_bundle(tmp_path):
    with pytest.raises(SchemaError):
        load_bundle(tmp_path)
