/**
 * Wire types shared with the analysis core. The JSON field names here are
 * the bundle contract: the core validates them on load, so renames on either
 * side are breaking changes.
 */

export const SCHEMA_VERSION = 1;

export interface NoiRequest {
  failure_id: string;
  xpath: string;
  width: number;
  /** Optional page-coordinate clip; defaults to the element's box. */
  region?: [number, number, number, number];
}

export interface CaptureJob {
  schema_version: number;
  target: string;
  out_dir: string;
  width_min: number;
  width_max: number;
  step: number;
  height: number;
  noi_requests: NoiRequest[];
}

export interface DomNodeJson {
  xpath: string;
  tag: string;
  id: string | null;
  classes: string[];
  attributes: Record<string, string>;
  inline_style_text: string;
  children: DomNodeJson[];
}

export interface ComputedSubsetJson {
  font_size: number;
  display: string;
  position: string;
  float: string;
  has_transition: boolean;
  has_transform: boolean;
}

export interface ElementStateJson {
  bbox: [number, number, number, number];
  visible: boolean;
  computed: ComputedSubsetJson;
}

export type GeometryEntries = Record<string, ElementStateJson>;

export interface StylesheetJson {
  label: string;
  text: string;
}

export interface AnimationFlags {
  has_transition: boolean;
  has_transform: boolean;
}

export class JobError extends Error {}

export function parseJob(raw: unknown): CaptureJob {
  if (typeof raw !== "object" || raw === null) {
    throw new JobError("job document must be an object");
  }
  const job = raw as Record<string, unknown>;
  for (const key of [
    "target",
    "out_dir",
    "width_min",
    "width_max",
    "step",
    "height",
  ]) {
    if (!(key in job)) {
      throw new JobError(`job missing field '${key}'`);
    }
  }
  const widthMin = Number(job.width_min);
  const widthMax = Number(job.width_max);
  const step = Number(job.step);
  const height = Number(job.height);
  if (!Number.isInteger(step) || step <= 0) {
    throw new JobError(`step must be a positive integer, got ${job.step}`);
  }
  if (widthMin > widthMax) {
    throw new JobError(`width_min ${widthMin} exceeds width_max ${widthMax}`);
  }
  if (height <= 0) {
    throw new JobError(`height must be positive, got ${job.height}`);
  }
  const noiRaw = (job.noi_requests ?? []) as unknown[];
  if (!Array.isArray(noiRaw)) {
    throw new JobError("noi_requests must be an array");
  }
  const noi: NoiRequest[] = noiRaw.map((entry, i) => {
    const req = entry as Record<string, unknown>;
    if (typeof req.failure_id !== "string" || typeof req.xpath !== "string") {
      throw new JobError(`noi_requests[${i}] needs failure_id and xpath`);
    }
    return {
      failure_id: req.failure_id,
      xpath: req.xpath,
      width: Number(req.width ?? widthMin),
      region: req.region as [number, number, number, number] | undefined,
    };
  });
  return {
    schema_version: Number(job.schema_version ?? SCHEMA_VERSION),
    target: String(job.target),
    out_dir: String(job.out_dir),
    width_min: widthMin,
    width_max: widthMax,
    step,
    height,
    noi_requests: noi,
  };
}

export function sampledWidths(job: CaptureJob): number[] {
  const widths: number[] = [];
  for (let w = job.width_min; w <= job.width_max; w += job.step) {
    widths.push(w);
  }
  return widths;
}
