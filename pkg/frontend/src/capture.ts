/**
 * Capture loop: one DOM and stylesheet snapshot at the widest viewport,
 * then per-element geometry at every sampled width, then any requested
 * screenshot pairs for observability checks.
 *
 * Widths are sampled sequentially on one page session: layout must settle
 * per width before measuring.
 */

import type { BrowserDriver } from "./driver.js";
import { BundleWriter } from "./bundle-writer.js";
import type { AnimationFlags, CaptureJob, GeometryEntries } from "./types.js";
import { sampledWidths } from "./types.js";

export class ElementNotFound extends Error {}

export async function capture(job: CaptureJob, driver: BrowserDriver): Promise<string[]> {
  const warnings: string[] = [];
  const writer = new BundleWriter(job.out_dir);

  await driver.navigate(job.target);
  await driver.setViewport(job.width_max, job.height);
  await driver.settle();

  const dom = await driver.snapshotDom();
  const { sheets, warnings: sheetWarnings } = await driver.collectStylesheets();
  warnings.push(...sheetWarnings);

  // Transition/transform presence must be read before freezing animations;
  // afterwards every element would report none.
  const animationFlags = await driver.collectAnimationFlags();
  await driver.freezeAnimations();

  for (const width of sampledWidths(job)) {
    await driver.setViewport(width, job.height);
    await driver.settle();
    const entries = await driver.collectGeometry();
    writer.addGeometry(width, mergeFlags(entries, animationFlags));
  }

  writer.writeManifest(job, warnings);
  writer.writeDom(dom);
  writer.writeStylesheets(sheets);
  writer.writeGeometry();

  for (const request of job.noi_requests) {
    await captureNoiPair(job, driver, writer, request.failure_id, request.xpath, request.width, request.region);
  }
  return warnings;
}

function mergeFlags(
  entries: GeometryEntries,
  flags: Record<string, AnimationFlags>
): GeometryEntries {
  for (const [xpath, state] of Object.entries(entries)) {
    const flag = flags[xpath];
    if (flag) {
      state.computed.has_transition = flag.has_transition;
      state.computed.has_transform = flag.has_transform;
    }
  }
  return entries;
}

export async function captureNoiPair(
  job: CaptureJob,
  driver: BrowserDriver,
  writer: BundleWriter,
  failureId: string,
  xpath: string,
  width: number,
  region?: [number, number, number, number]
): Promise<void> {
  await driver.setViewport(width, job.height);
  await driver.settle();

  let clipBox = region ?? (await driver.elementBox(xpath));
  if (!clipBox) {
    throw new ElementNotFound(`${failureId}: no element at ${xpath}`);
  }
  const clip = {
    x: Math.max(0, Math.floor(clipBox[0])),
    y: Math.max(0, Math.floor(clipBox[1])),
    width: Math.max(1, Math.ceil(clipBox[2])),
    height: Math.max(1, Math.ceil(clipBox[3])),
  };

  const visible = await driver.screenshot(clip);
  // visibility (not display) keeps the element in flow: hiding must not
  // reflow the rest of the region.
  if (!(await driver.setVisibility(xpath, true))) {
    throw new ElementNotFound(`${failureId}: cannot hide ${xpath}`);
  }
  await driver.settle();
  const hidden = await driver.screenshot(clip);
  await driver.setVisibility(xpath, false);

  writer.writeImage(`${failureId}.visible.png`, visible);
  writer.writeImage(`${failureId}.hidden.png`, hidden);
}
