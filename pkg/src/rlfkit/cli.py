"""Command-line pipeline over bundle directories.

Stages communicate only through files; re-running any stage on the same
inputs is byte-identical. Each subcommand prints its effective configuration
to stderr (the diagnostics stream) and keeps stdout for data.

Exit codes: 0 success, 1 validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import subprocess
import sys
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

from . import css, detection, localization, metrics, noi, prioritization
from .errors import BridgeMissing, EmptyCandidateSet, RlfkitError
from .snapshot import CaptureBundle, load_bundle

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    width_min: int = 320
    width_max: int = 1400
    step: int = 1
    height: int = 1000
    eps: float = detection.DEFAULT_EPS
    sr_max_span: int = detection.DEFAULT_SR_MAX_SPAN
    channel_threshold: int = noi.DEFAULT_CHANNEL_THRESHOLD
    min_diff_pixels: int = noi.DEFAULT_MIN_DIFF_PIXELS

    def validate(self) -> None:
        if self.step <= 0:
            raise RlfkitError(f"step must be positive, got {self.step}")
        if self.width_min > self.width_max:
            raise RlfkitError(
                f"width_min {self.width_min} exceeds width_max {self.width_max}"
            )
        if self.height <= 0:
            raise RlfkitError(f"height must be positive, got {self.height}")
        if self.eps < 0:
            raise RlfkitError(f"eps must be non-negative, got {self.eps}")


def _echo_config(command: str, config: dict) -> None:
    print(f"[{command}] config: {json.dumps(config, sort_keys=True)}", file=sys.stderr)


def _dump_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_json(path: Path) -> dict:
    with path.open() as fh:
        return json.load(fh)


# -- subcommands ---------------------------------------------------------


def cmd_capture(args: argparse.Namespace) -> int:
    config = RunConfig(
        width_min=args.width_min,
        width_max=args.width_max,
        step=args.step,
        height=args.height,
    )
    config.validate()
    _echo_config("capture", {**asdict(config), "target": args.target, "out": args.out})

    bridge_cmd = args.bridge_cmd or os.environ.get("RLFKIT_BRIDGE")
    if bridge_cmd is None:
        default_bridge = Path(__file__).resolve().parents[2] / "frontend" / "dist" / "main.js"
        if default_bridge.is_file():
            bridge_cmd = f"node {default_bridge}"
    if bridge_cmd is None:
        raise BridgeMissing(
            "no capture bridge configured; build frontend/ or set RLFKIT_BRIDGE"
        )

    job = {
        "schema_version": SCHEMA_VERSION,
        "target": args.target,
        "out_dir": args.out,
        "width_min": config.width_min,
        "width_max": config.width_max,
        "step": config.step,
        "height": config.height,
        "noi_requests": [],
    }
    with tempfile.NamedTemporaryFile(
        "w", suffix=".json", prefix="capture-job-", delete=False
    ) as fh:
        json.dump(job, fh)
        job_path = fh.name
    try:
        proc = subprocess.run([*bridge_cmd.split(), job_path], capture_output=True, text=True)
        if proc.stderr:
            sys.stderr.write(proc.stderr)
        if proc.returncode != 0:
            print(f"bridge failed with exit code {proc.returncode}", file=sys.stderr)
            return 1
    finally:
        os.unlink(job_path)

    load_bundle(args.out)  # emitted bundles must pass validation
    print(f"bundle written to {args.out}", file=sys.stderr)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    _echo_config("validate", {"bundle": args.bundle})
    bundle = load_bundle(args.bundle)
    print(
        json.dumps(
            {
                "url": bundle.url,
                "widths": len(bundle.widths()),
                "elements": len(list(bundle.dom.walk())),
                "stylesheets": len(bundle.stylesheets),
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    config = {"bundle": args.bundle, "eps": args.eps, "sr_max_span": args.sr_max_span}
    _echo_config("detect", config)
    bundle = load_bundle(args.bundle)
    failures = detection.detect(bundle, eps=args.eps, sr_max_span=args.sr_max_span)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "bundle": str(args.bundle),
        "eps": args.eps,
        "sr_max_span": args.sr_max_span,
        "failures": [f.to_json() for f in failures],
    }
    _dump_json(Path(args.out), doc)
    print(f"{len(failures)} failure(s) -> {args.out}", file=sys.stderr)
    return 0


def _read_failures(path: Path) -> list[detection.FailureReport]:
    doc = _load_json(path)
    if "failures" not in doc:
        raise RlfkitError(f"{path} is not a failures document")
    return [detection.FailureReport.from_json(f) for f in doc["failures"]]


def cmd_noi(args: argparse.Namespace) -> int:
    config = {
        "bundle": args.bundle,
        "failures": args.failures,
        "channel_threshold": args.channel_threshold,
        "min_diff_pixels": args.min_diff_pixels,
    }
    _echo_config("noi", config)
    bundle = load_bundle(args.bundle)
    failures = _read_failures(Path(args.failures))
    annotated, warnings = noi.annotate_observability(
        bundle,
        failures,
        channel_threshold=args.channel_threshold,
        min_diff_pixels=args.min_diff_pixels,
    )
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    doc = _load_json(Path(args.failures))
    doc["failures"] = [f.to_json() for f in annotated]
    _dump_json(Path(args.out), doc)
    noi_count = sum(1 for f in annotated if f.observability == "noi")
    print(f"{noi_count} non-observable of {len(annotated)} -> {args.out}", file=sys.stderr)
    return 0


def localize_failures(
    bundle: CaptureBundle,
    failures: list[detection.FailureReport],
    numeric_first: bool = False,
) -> dict:
    """Shared by cmd_localize and tests: candidate collection, ranking, and
    media-pair localization for small-range failures."""
    index = css.StyleIndex(bundle)
    out = []
    for failure in failures:
        direction = localization.failure_direction(failure, bundle)
        item = {
            "failure_id": failure.id,
            "rlf_type": failure.rlf_type,
            "observability": failure.observability,
            "fail_min": failure.fail_min,
            "fail_max": failure.fail_max,
            "direction": {"axis": direction.axis, "boundary": direction.boundary},
            "localized": False,
            "entries": [],
            "media_pairs": [],
        }
        if failure.rlf_type == "SR":
            pairs = localization.localize_small_range(failure, bundle, index)
            item["media_pairs"] = [p.to_json() for p in pairs]
            item["localized"] = bool(pairs)
        else:
            candidates = localization.collect_candidates(failure, bundle, index)
            try:
                ranked = prioritization.rank(
                    candidates, failure.id, bundle, numeric_first=numeric_first
                )
            except EmptyCandidateSet:
                out.append(item)
                continue
            item["entries"] = [e.to_json() for e in ranked.entries]
            item["localized"] = True
        out.append(item)
    return {"schema_version": SCHEMA_VERSION, "failures": out}


def cmd_localize(args: argparse.Namespace) -> int:
    config = {
        "bundle": args.bundle,
        "failures": args.failures,
        "numeric_first": args.numeric_first,
    }
    _echo_config("localize", config)
    bundle = load_bundle(args.bundle)
    failures = _read_failures(Path(args.failures))
    doc = localize_failures(bundle, failures, numeric_first=args.numeric_first)
    doc["bundle"] = str(args.bundle)
    _dump_json(Path(args.out), doc)
    localized = sum(1 for f in doc["failures"] if f["localized"])
    print(f"localized {localized}/{len(doc['failures'])} -> {args.out}", file=sys.stderr)
    return 0


def _ranked_lists_from_doc(doc: dict) -> dict[str, "prioritization.RankedList"]:
    from .css import AuthoredValue, Specificity
    from .localization import Candidate
    from .prioritization import RankedEntry, RankedList

    lists = {}
    for failure in doc.get("failures", []):
        entries = []
        for raw in failure.get("entries", []):
            authored = None
            if raw.get("value") is not None:
                authored = AuthoredValue(
                    property=raw["property"],
                    raw_value=raw["value"],
                    normalized_px=raw.get("normalized_px"),
                    origin=raw.get("origin") or "",
                    specificity=Specificity(),
                    important=False,
                )
            entries.append(
                RankedEntry(
                    rank=int(raw["rank"]),
                    candidate=Candidate(
                        xpath=raw["xpath"],
                        property=raw["property"],
                        kind=raw.get("kind", "authored"),
                        authored=authored,
                        normalized_px=raw.get("normalized_px"),
                        tier=raw.get("tier", "neighbor"),
                        set_rank=int(raw.get("set_rank", 0)),
                    ),
                )
            )
        lists[failure["failure_id"]] = RankedList(
            failure_id=failure["failure_id"], entries=tuple(entries)
        )
    return lists


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = {
        "ranked": args.ranked,
        "truth": args.truth,
        "k": args.k,
        "exclude_np": args.exclude_np,
        "exclude_we_np": args.exclude_we_np,
    }
    _echo_config("evaluate", config)

    ranked_by_page: dict[str, dict] = {}
    rlf_types: dict[str, dict[str, str]] = {}
    for spec in args.ranked:
        if "=" not in spec:
            raise RlfkitError(f"--ranked expects page=path, got {spec!r}")
        page_id, _, path = spec.partition("=")
        doc = _load_json(Path(path))
        if "failures" not in doc:
            raise RlfkitError(f"{path} is not a ranked document")
        ranked_by_page[page_id] = _ranked_lists_from_doc(doc)
        rlf_types[page_id] = {
            f["failure_id"]: f.get("rlf_type", "") for f in doc["failures"]
        }

    truth = metrics.GroundTruth.load(args.truth)

    total_failures = 0
    matched = 0
    for page_id, ranked_lists in ranked_by_page.items():
        annotations = truth.pages.get(page_id, {})
        for failure_id in ranked_lists:
            total_failures += 1
            if failure_id in annotations:
                matched += 1
            else:
                print(
                    f"warning: no ground-truth entry for {page_id}/{failure_id}",
                    file=sys.stderr,
                )
    if total_failures and not matched:
        raise RlfkitError(
            "no ranked failure matches any ground-truth entry; "
            "check the PAGE names given to --ranked against the truth file"
        )

    report = metrics.evaluate(
        ranked_by_page,
        truth,
        k=args.k,
        exclude_np=args.exclude_np,
        exclude_we_np=args.exclude_we_np,
        rlf_types=rlf_types,
    )
    _dump_json(Path(args.out), report.to_json())
    sys.stdout.write(metrics.render_metrics_table(report))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    _echo_config("report", {"input": args.input, "bundle": args.bundle})
    doc = _load_json(Path(args.input))
    if "per_page" in doc:
        report = metrics.MetricsReport(per_page=doc["per_page"], total=doc["total"])
        sys.stdout.write(metrics.render_metrics_table(report))
        return 0
    if "failures" not in doc:
        raise RlfkitError(f"{args.input} is neither a ranked nor a metrics document")
    bundle = load_bundle(args.bundle) if args.bundle else None
    if bundle is None:
        raise RlfkitError("ranked reports need --bundle for document order")
    for failure_id, ranked in sorted(_ranked_lists_from_doc(doc).items()):
        sys.stdout.write(prioritization.render_report(ranked, bundle))
        sys.stdout.write("\n")
    return 0


# -- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rlfkit",
        description="Detect, localize and rank responsive layout failures in capture bundles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_capture = sub.add_parser("capture", help="render a page into a bundle (needs the browser bridge)")
    p_capture.add_argument("target", help="URL or local file to capture")
    p_capture.add_argument("--out", required=True, help="bundle output directory")
    p_capture.add_argument("--width-min", type=int, default=320)
    p_capture.add_argument("--width-max", type=int, default=1400)
    p_capture.add_argument("--step", type=int, default=1)
    p_capture.add_argument("--height", type=int, default=1000)
    p_capture.add_argument("--bridge-cmd", default=None, help="command that runs the capture bridge")
    p_capture.set_defaults(func=cmd_capture)

    p_validate = sub.add_parser("validate", help="load a bundle and check the schema")
    p_validate.add_argument("bundle")
    p_validate.set_defaults(func=cmd_validate)

    p_detect = sub.add_parser("detect", help="scan a bundle for layout failures")
    p_detect.add_argument("bundle")
    p_detect.add_argument("--out", default="failures.json")
    p_detect.add_argument("--eps", type=float, default=detection.DEFAULT_EPS)
    p_detect.add_argument("--sr-max-span", type=int, default=detection.DEFAULT_SR_MAX_SPAN)
    p_detect.set_defaults(func=cmd_detect)

    p_noi = sub.add_parser("noi", help="classify failures as observable or not")
    p_noi.add_argument("bundle")
    p_noi.add_argument("--failures", default="failures.json")
    p_noi.add_argument("--out", default="failures.json")
    p_noi.add_argument("--channel-threshold", type=int, default=noi.DEFAULT_CHANNEL_THRESHOLD)
    p_noi.add_argument("--min-diff-pixels", type=int, default=noi.DEFAULT_MIN_DIFF_PIXELS)
    p_noi.set_defaults(func=cmd_noi)

    p_localize = sub.add_parser("localize", help="rank suspicious (element, property) pairs")
    p_localize.add_argument("bundle")
    p_localize.add_argument("--failures", default="failures.json")
    p_localize.add_argument("--out", default="ranked.json")
    p_localize.add_argument(
        "--numeric-first",
        action="store_true",
        help="experimental: put numeric candidates ahead of the keyword block",
    )
    p_localize.set_defaults(func=cmd_localize)

    p_eval = sub.add_parser("evaluate", help="score ranked output against ground truth")
    p_eval.add_argument("--ranked", action="append", required=True, metavar="PAGE=RANKED_JSON")
    p_eval.add_argument("--truth", required=True)
    p_eval.add_argument("--out", default="metrics.json")
    p_eval.add_argument("--k", type=int, default=metrics.DEFAULT_K)
    p_eval.add_argument("--exclude-np", action="store_true")
    p_eval.add_argument("--exclude-we-np", action="store_true")
    p_eval.set_defaults(func=cmd_evaluate)

    p_report = sub.add_parser("report", help="print a ranked or metrics document as text")
    p_report.add_argument("input")
    p_report.add_argument("--bundle", default=None)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RlfkitError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
