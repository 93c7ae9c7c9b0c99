import json
from pathlib import Path

import pytest

from rlfkit.cli import main

from conftest import fixture_path


def run(argv):
    return main([str(a) for a in argv])


def read(path: Path) -> dict:
    return json.loads(path.read_text())


def test_validate_reports_bundle_stats(capsys):
    assert run(["validate", fixture_path("clean")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["widths"] == 1081


def test_validate_rejects_non_bundle(tmp_path):
    assert run(["validate", tmp_path]) == 1


def test_detect_clean_fixture_writes_empty_list(tmp_path):
    out = tmp_path / "failures.json"
    assert run(["detect", fixture_path("clean"), "--out", out]) == 0
    doc = read(out)
    assert doc["failures"] == []
    assert doc["schema_version"] == 1


def test_detect_prints_config_on_stderr_only(tmp_path, capsys):
    out = tmp_path / "failures.json"
    run(["detect", fixture_path("clean"), "--out", out])
    captured = capsys.readouterr()
    assert "config" in captured.err
    assert captured.out == ""


def test_full_pipeline_matches_walkthrough_order(tmp_path):
    bundle = fixture_path("case_study")
    failures = tmp_path / "failures.json"
    ranked = tmp_path / "ranked.json"
    assert run(["detect", bundle, "--out", failures]) == 0
    assert run(["noi", bundle, "--failures", failures, "--out", failures]) == 0
    assert run(["localize", bundle, "--failures", failures, "--out", ranked]) == 0
    doc = read(ranked)
    (failure,) = doc["failures"]
    assert failure["direction"] == {"axis": "vertical", "boundary": "bottom"}
    entries = failure["entries"]
    assert entries[0]["property"] == "height"
    assert entries[1]["property"] == "margin-top"
    assert entries[2]["property"].startswith("padding")


def test_pipeline_stage_outputs_are_byte_identical(tmp_path):
    bundle = fixture_path("we_tags")
    blobs = []
    for tag in ("a", "b"):
        failures = tmp_path / f"failures-{tag}.json"
        ranked = tmp_path / f"ranked-{tag}.json"
        run(["detect", bundle, "--out", failures])
        run(["localize", bundle, "--failures", failures, "--out", ranked])
        blobs.append(failures.read_bytes() + ranked.read_bytes())
    assert blobs[0] == blobs[1]


def test_noi_annotates_observability(tmp_path):
    bundle = fixture_path("noi_transparent")
    failures = tmp_path / "failures.json"
    run(["detect", bundle, "--out", failures])
    assert run(["noi", bundle, "--failures", failures, "--out", failures]) == 0
    doc = read(failures)
    assert doc["failures"][0]["observability"] == "noi"


def test_localize_small_range_emits_media_pairs(tmp_path):
    bundle = fixture_path("sr_promo")
    failures = tmp_path / "failures.json"
    ranked = tmp_path / "ranked.json"
    run(["detect", bundle, "--out", failures])
    run(["localize", bundle, "--failures", failures, "--out", ranked])
    (failure,) = read(ranked)["failures"]
    assert failure["localized"]
    assert failure["media_pairs"]
    assert failure["entries"] == []


def test_evaluate_on_committed_truth(tmp_path, capsys):
    truth = fixture_path("faults") / "truth.json"
    ranked_specs = []
    for page_dir in sorted(fixture_path("faults").iterdir()):
        if not page_dir.is_dir():
            continue
        failures = tmp_path / f"{page_dir.name}-failures.json"
        ranked = tmp_path / f"{page_dir.name}-ranked.json"
        run(["detect", page_dir / "base", "--out", failures])
        run(["localize", page_dir / "base", "--failures", failures, "--out", ranked])
        ranked_specs += ["--ranked", f"{page_dir.name}={ranked}"]
    out = tmp_path / "metrics.json"
    code = run(["evaluate", *ranked_specs, "--truth", truth, "--out", out])
    assert code == 0
    doc = read(out)
    assert doc["total"]["rlf_count"] == 5
    assert doc["total"]["top_n"]["3"] == 1.0
    assert doc["total"]["top_n"]["1"] >= 0.4
    table = capsys.readouterr().out
    assert "total" in table


def test_evaluate_rejects_page_names_absent_from_truth(tmp_path, capsys):
    # a full page-id mismatch must fail loudly, not score all zeros
    page_dir = fixture_path("faults/f5_banner_margin")
    failures = tmp_path / "failures.json"
    ranked = tmp_path / "ranked.json"
    run(["detect", page_dir / "base", "--out", failures])
    run(["localize", page_dir / "base", "--failures", failures, "--out", ranked])
    code = run([
        "evaluate", "--ranked", f"wrong-alias={ranked}",
        "--truth", fixture_path("faults") / "truth.json",
        "--out", tmp_path / "metrics.json",
    ])
    assert code == 1
    assert "ground-truth" in capsys.readouterr().err


def test_evaluate_warns_on_partially_unmatched_failures(tmp_path, capsys):
    page = "f5_banner_margin"
    page_dir = fixture_path(f"faults/{page}")
    failures = tmp_path / "failures.json"
    ranked = tmp_path / "ranked.json"
    run(["detect", page_dir / "base", "--out", failures])
    run(["localize", page_dir / "base", "--failures", failures, "--out", ranked])
    doc = read(ranked)
    doc["failures"].append({**doc["failures"][0], "failure_id": "rlf-999"})
    ranked.write_text(json.dumps(doc))
    code = run([
        "evaluate", "--ranked", f"{page}={ranked}",
        "--truth", fixture_path("faults") / "truth.json",
        "--out", tmp_path / "metrics.json",
    ])
    assert code == 0
    assert "rlf-999" in capsys.readouterr().err


def test_evaluate_malformed_truth_exits_1(tmp_path):
    bad = tmp_path / "truth.json"
    bad.write_text("{broken")
    ranked = tmp_path / "ranked.json"
    ranked.write_text(json.dumps({"schema_version": 1, "failures": []}))
    assert run(["evaluate", "--ranked", f"p={ranked}", "--truth", bad]) == 1


def test_report_renders_ranked_table(tmp_path, capsys):
    bundle = fixture_path("case_study")
    failures = tmp_path / "failures.json"
    ranked = tmp_path / "ranked.json"
    run(["detect", bundle, "--out", failures])
    run(["localize", bundle, "--failures", failures, "--out", ranked])
    assert run(["report", ranked, "--bundle", bundle]) == 0
    out = capsys.readouterr().out
    assert "height" in out and "rank" in out


def test_report_renders_metrics_table(tmp_path, capsys):
    truth = fixture_path("faults") / "truth.json"
    page = "f5_banner_margin"
    failures = tmp_path / "failures.json"
    ranked = tmp_path / "ranked.json"
    run(["detect", fixture_path(f"faults/{page}") / "base", "--out", failures])
    run(["localize", fixture_path(f"faults/{page}") / "base", "--failures", failures, "--out", ranked])
    metrics_out = tmp_path / "metrics.json"
    run(["evaluate", "--ranked", f"{page}={ranked}", "--truth", truth, "--out", metrics_out])
    capsys.readouterr()
    assert run(["report", metrics_out]) == 0
    out = capsys.readouterr().out
    assert "total" in out and "mrr" in out


def test_report_rejects_unknown_document(tmp_path):
    bogus = tmp_path / "x.json"
    bogus.write_text('{"neither": true}')
    assert run(["report", bogus]) == 1


def test_capture_rejects_zero_step(tmp_path):
    code = run([
        "capture", "file:///nonexistent.html", "--out", tmp_path / "b", "--step", "0",
    ])
    assert code == 1


def test_capture_with_unavailable_bridge_exits_1(tmp_path, monkeypatch):
    monkeypatch.setenv("RLFKIT_BRIDGE", "/nonexistent/bridge-binary")
    code = run(["capture", "file:///x.html", "--out", tmp_path / "b"])
    assert code == 1
