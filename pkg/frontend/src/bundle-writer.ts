/**
 * Serializes captured state into the bundle directory layout the analysis
 * core loads: manifest.json, dom.json, stylesheets.json, geometry.jsonl and
 * an images/ directory. All geometry lands on a 2-fractional-digit px grid.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import type {
  CaptureJob,
  DomNodeJson,
  ElementStateJson,
  GeometryEntries,
  StylesheetJson,
} from "./types.js";
import { SCHEMA_VERSION } from "./types.js";

export function roundPx(value: number): number {
  return Math.round(value * 100) / 100;
}

function roundedState(state: ElementStateJson): ElementStateJson {
  return {
    bbox: [
      roundPx(state.bbox[0]),
      roundPx(state.bbox[1]),
      roundPx(state.bbox[2]),
      roundPx(state.bbox[3]),
    ],
    visible: state.visible,
    computed: state.computed,
  };
}

export function geometryLine(width: number, entries: GeometryEntries): string {
  const ordered: GeometryEntries = {};
  for (const xpath of Object.keys(entries).sort()) {
    ordered[xpath] = roundedState(entries[xpath]);
  }
  return JSON.stringify({ width, entries: ordered });
}

export class BundleWriter {
  readonly root: string;
  private readonly geometryLines: string[] = [];

  constructor(root: string) {
    this.root = root;
    mkdirSync(root, { recursive: true });
    mkdirSync(join(root, "images"), { recursive: true });
  }

  writeManifest(job: CaptureJob, warnings: string[]): void {
    const manifest = {
      schema_version: SCHEMA_VERSION,
      url: job.target,
      height: job.height,
      width_min: job.width_min,
      width_max: job.width_max,
      step: job.step,
      warnings,
    };
    writeFileSync(
      join(this.root, "manifest.json"),
      JSON.stringify(manifest, null, 1) + "\n"
    );
  }

  writeDom(dom: DomNodeJson): void {
    writeFileSync(join(this.root, "dom.json"), JSON.stringify(dom, null, 1) + "\n");
  }

  writeStylesheets(sheets: StylesheetJson[]): void {
    writeFileSync(
      join(this.root, "stylesheets.json"),
      JSON.stringify(sheets, null, 1) + "\n"
    );
  }

  addGeometry(width: number, entries: GeometryEntries): void {
    this.geometryLines.push(geometryLine(width, entries));
  }

  writeGeometry(): void {
    writeFileSync(
      join(this.root, "geometry.jsonl"),
      this.geometryLines.join("\n") + "\n"
    );
  }

  writeImage(name: string, data: Buffer | Uint8Array): void {
    writeFileSync(join(this.root, "images", name), data);
  }
}
