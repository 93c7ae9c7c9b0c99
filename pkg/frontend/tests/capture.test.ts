import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { spawnSync } from "node:child_process";

import { afterEach, describe, expect, it } from "vitest";

import { capture } from "../src/capture.js";
import { parseJob, sampledWidths, type CaptureJob } from "../src/types.js";
import { FakePageDriver } from "./fake-driver.js";

const dirs: string[] = [];

function tempDir(): string {
  const dir = mkdtempSync(join(tmpdir(), "bridge-test-"));
  dirs.push(dir);
  return dir;
}

afterEach(() => {
  while (dirs.length) rmSync(dirs.pop()!, { recursive: true, force: true });
});

function makeJob(overrides: Partial<CaptureJob> = {}): CaptureJob {
  return parseJob({
    schema_version: 1,
    target: "file:///fixture.html",
    out_dir: join(tempDir(), "bundle"),
    width_min: 320,
    width_max: 420,
    step: 10,
    height: 1000,
    noi_requests: [],
    ...overrides,
  });
}

describe("capture loop", () => {
  it("writes a schema-complete bundle directory", async () => {
    const job = makeJob();
    const driver = new FakePageDriver();
    const warnings = await capture(job, driver);

    const manifest = JSON.parse(readFileSync(join(job.out_dir, "manifest.json"), "utf-8"));
    expect(manifest.schema_version).toBe(1);
    expect(manifest.width_min).toBe(320);
    expect(manifest.width_max).toBe(420);
    expect(manifest.step).toBe(10);
    expect(manifest.height).toBe(1000);
    expect(manifest.url).toBe(job.target);
    expect(manifest.warnings).toHaveLength(1);
    expect(warnings).toHaveLength(1);

    const dom = JSON.parse(readFileSync(join(job.out_dir, "dom.json"), "utf-8"));
    expect(dom.tag).toBe("html");
    expect(dom.children[0].xpath).toBe("/html/body");

    const sheets = JSON.parse(
      readFileSync(join(job.out_dir, "stylesheets.json"), "utf-8")
    );
    expect(sheets).toHaveLength(1);
    expect(sheets[0].text).toContain(".wrap");
  });

  it("records one geometry line per sampled width with body tracking the viewport", async () => {
    const job = makeJob();
    await capture(job, new FakePageDriver());
    const lines = readFileSync(join(job.out_dir, "geometry.jsonl"), "utf-8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line));
    expect(lines.map((l) => l.width)).toEqual(sampledWidths(job));
    for (const line of lines) {
      expect(line.entries["/html/body"].bbox[2]).toBe(line.width);
      const computed = line.entries["/html/body/div[1]/a[1]"].computed;
      expect(Object.keys(computed).sort()).toEqual([
        "display",
        "float",
        "font_size",
        "has_transform",
        "has_transition",
        "position",
      ]);
    }
  });

  it("rounds geometry onto the 2-digit px grid", async () => {
    const job = makeJob({ width_min: 333, width_max: 333, step: 1 });
    await capture(job, new FakePageDriver());
    const line = JSON.parse(
      readFileSync(join(job.out_dir, "geometry.jsonl"), "utf-8").trim()
    );
    for (const entry of Object.values<any>(line.entries)) {
      for (const v of entry.bbox) {
        expect(Math.round(v * 100)).toBeCloseTo(v * 100, 6);
      }
    }
    // 0.6 * 333 = 199.79999... must land as 199.8
    expect(line.entries["/html/body/div[1]"].bbox[2]).toBe(199.8);
  });

  it("reads animation flags before freezing and merges them into every record", async () => {
    const job = makeJob();
    const driver = new FakePageDriver();
    await capture(job, driver);

    const flagsIdx = driver.calls.indexOf("flags");
    const freezeIdx = driver.calls.indexOf("freeze");
    const sheetsIdx = driver.calls.indexOf("stylesheets");
    const firstGeometry = driver.calls.findIndex((c) => c.startsWith("geometry:"));
    expect(sheetsIdx).toBeLessThan(freezeIdx);
    expect(flagsIdx).toBeLessThan(freezeIdx);
    expect(freezeIdx).toBeLessThan(firstGeometry);

    const lines = readFileSync(join(job.out_dir, "geometry.jsonl"), "utf-8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line));
    for (const line of lines) {
      expect(line.entries["/html/body/div[2]"].computed.has_transition).toBe(true);
      expect(line.entries["/html/body/div[1]"].computed.has_transition).toBe(false);
    }
  });

  it("captures visible/hidden screenshot pairs per request", async () => {
    const job = makeJob({
      noi_requests: [
        { failure_id: "rlf-000", xpath: "/html/body/div[1]/a[1]", width: 320 },
      ],
    });
    const driver = new FakePageDriver();
    await capture(job, driver);
    const visible = readFileSync(join(job.out_dir, "images", "rlf-000.visible.png"));
    const hidden = readFileSync(join(job.out_dir, "images", "rlf-000.hidden.png"));
    expect(visible.equals(hidden)).toBe(false);
    expect(driver.hiddenXPaths.size).toBe(0); // visibility restored
  });

  it("fails with ElementNotFound for an unknown screenshot target", async () => {
    const job = makeJob({
      noi_requests: [{ failure_id: "rlf-001", xpath: "/html/body/div[9]", width: 320 }],
    });
    await expect(capture(job, new FakePageDriver())).rejects.toThrow("rlf-001");
  });

  it("is deterministic across runs", async () => {
    const contents: string[] = [];
    for (let i = 0; i < 2; i++) {
      const job = makeJob();
      await capture(job, new FakePageDriver());
      contents.push(
        readFileSync(join(job.out_dir, "geometry.jsonl"), "utf-8") +
          readFileSync(join(job.out_dir, "dom.json"), "utf-8")
      );
    }
    expect(contents[0]).toBe(contents[1]);
  });
});

describe("cross-language conformance", () => {
  it("emitted bundles pass the analysis core's validation and detection", async () => {
    const probe = spawnSync("python3", ["-c", "import rlfkit"], { encoding: "utf-8" });
    if (probe.status !== 0) {
      console.warn("skipping: rlfkit not importable in this environment");
      return;
    }
    const job = makeJob();
    await capture(job, new FakePageDriver());
    const script = [
      "import sys",
      "from rlfkit.snapshot import load_bundle",
      "from rlfkit.detection import detect",
      "bundle = load_bundle(sys.argv[1])",
      "reports = detect(bundle)",
      "assert len(reports) == 1, reports",
      "assert reports[0].rlf_type == 'EP', reports",
      "assert (reports[0].fail_min, reports[0].fail_max) == (320, 360), reports",
      "print('conformance ok')",
    ].join("\n");
    const result = spawnSync("python3", ["-c", script, job.out_dir], {
      encoding: "utf-8",
    });
    expect(result.stderr).toBe("");
    expect(result.status).toBe(0);
    expect(result.stdout).toContain("conformance ok");
  });
});
