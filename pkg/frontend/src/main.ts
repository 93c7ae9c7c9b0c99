#!/usr/bin/env node
/**
 * Bridge entry point. Invoked with a JSON job file:
 *
 *     node dist/main.js job.json
 *     node dist/main.js --probe-browser
 *
 * Exit codes: 0 success, 1 validation/configuration error, 2 internal error.
 */

import { readFileSync } from "node:fs";

import { capture, ElementNotFound } from "./capture.js";
import { NavigationFailure, probeBrowser, PuppeteerDriver } from "./driver.js";
import { JobError, parseJob } from "./types.js";

async function run(): Promise<number> {
  const arg = process.argv[2];
  if (!arg) {
    process.stderr.write("usage: main.js <job.json> | --probe-browser\n");
    return 1;
  }

  if (arg === "--probe-browser") {
    try {
      const version = await probeBrowser();
      process.stderr.write(`browser ok: ${version}\n`);
      return 0;
    } catch (err) {
      process.stderr.write(`no usable browser: ${err}\n`);
      return 1;
    }
  }

  let job;
  try {
    job = parseJob(JSON.parse(readFileSync(arg, "utf-8")));
  } catch (err) {
    if (err instanceof JobError || err instanceof SyntaxError) {
      process.stderr.write(`invalid job: ${err}\n`);
      return 1;
    }
    throw err;
  }

  const widthCount = Math.floor((job.width_max - job.width_min) / job.step) + 1;
  process.stderr.write(
    `[capture] ${job.target} -> ${job.out_dir} ` +
      `(${widthCount} widths, ${job.width_min}..${job.width_max} step ${job.step})\n`
  );

  let driver;
  try {
    driver = await PuppeteerDriver.launch();
  } catch (err) {
    process.stderr.write(`cannot launch browser: ${err}\n`);
    return 1;
  }
  try {
    const warnings = await capture(job, driver);
    for (const warning of warnings) {
      process.stderr.write(`warning: ${warning}\n`);
    }
    return 0;
  } catch (err) {
    if (err instanceof NavigationFailure || err instanceof ElementNotFound) {
      process.stderr.write(`${err}\n`);
      return 1;
    }
    throw err;
  } finally {
    await driver.close();
  }
}

run().then(
  (code) => process.exit(code),
  (err) => {
    process.stderr.write(`internal error: ${err?.stack ?? err}\n`);
    process.exit(2);
  }
);
