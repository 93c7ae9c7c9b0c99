import { describe, expect, it } from "vitest";

import { JobError, parseJob, sampledWidths } from "../src/types.js";

const BASE = {
  schema_version: 1,
  target: "file:///x.html",
  out_dir: "/tmp/out",
  width_min: 320,
  width_max: 1400,
  step: 1,
  height: 1000,
  noi_requests: [],
};

describe("job parsing", () => {
  it("accepts a well-formed job", () => {
    const job = parseJob(BASE);
    expect(job.width_min).toBe(320);
    expect(sampledWidths(job)).toHaveLength(1081);
  });

  it("rejects a zero step", () => {
    expect(() => parseJob({ ...BASE, step: 0 })).toThrow(JobError);
  });

  it("rejects an inverted width range", () => {
    expect(() => parseJob({ ...BASE, width_min: 1401 })).toThrow(JobError);
  });

  it("rejects missing fields", () => {
    const { target, ...rest } = BASE;
    expect(() => parseJob(rest)).toThrow(/target/);
  });

  it("rejects malformed noi requests", () => {
    expect(() =>
      parseJob({ ...BASE, noi_requests: [{ xpath: 42 }] })
    ).toThrow(JobError);
  });

  it("defaults noi request width to the narrowest sample", () => {
    const job = parseJob({
      ...BASE,
      noi_requests: [{ failure_id: "rlf-000", xpath: "/html/body" }],
    });
    expect(job.noi_requests[0].width).toBe(320);
  });

  it("computes sampled widths with a coarse step", () => {
    const job = parseJob({ ...BASE, width_max: 350, step: 10 });
    expect(sampledWidths(job)).toEqual([320, 330, 340, 350]);
  });
});
