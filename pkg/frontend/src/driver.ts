/**
 * Narrow browser interface the capture loop runs against. The production
 * driver wraps puppeteer; tests substitute a deterministic fake.
 */

import type {
  AnimationFlags,
  DomNodeJson,
  GeometryEntries,
  StylesheetJson,
} from "./types.js";
import {
  pageCollectAnimationFlags,
  pageCollectGeometry,
  pageCollectStylesheets,
  pageElementBox,
  pageFreezeAnimations,
  pageSetVisibility,
  pageSnapshotDom,
} from "./page-script.js";

export interface BrowserDriver {
  navigate(url: string): Promise<void>;
  setViewport(width: number, height: number): Promise<void>;
  /** Wait for fonts and layout to settle at the current viewport. */
  settle(): Promise<void>;
  snapshotDom(): Promise<DomNodeJson>;
  collectStylesheets(): Promise<{ sheets: StylesheetJson[]; warnings: string[] }>;
  collectAnimationFlags(): Promise<Record<string, AnimationFlags>>;
  freezeAnimations(): Promise<void>;
  collectGeometry(): Promise<GeometryEntries>;
  elementBox(xpath: string): Promise<[number, number, number, number] | null>;
  setVisibility(xpath: string, hidden: boolean): Promise<boolean>;
  screenshot(clip: { x: number; y: number; width: number; height: number }): Promise<Uint8Array>;
  close(): Promise<void>;
}

export class NavigationFailure extends Error {}

/** Puppeteer-backed driver; imports lazily so job validation and tests do
 * not require a browser installation. */
export class PuppeteerDriver implements BrowserDriver {
  private browser: any;
  private page: any;

  static async launch(): Promise<PuppeteerDriver> {
    const { default: puppeteer } = await import("puppeteer");
    const driver = new PuppeteerDriver();
    driver.browser = await puppeteer.launch({
      headless: true,
      args: ["--no-sandbox", "--disable-dev-shm-usage", "--force-device-scale-factor=1"],
    });
    driver.page = await driver.browser.newPage();
    await driver.page.emulateMediaFeatures([
      { name: "prefers-reduced-motion", value: "reduce" },
    ]);
    return driver;
  }

  async navigate(url: string): Promise<void> {
    try {
      await this.page.goto(url, { waitUntil: "networkidle0", timeout: 30000 });
    } catch (err) {
      throw new NavigationFailure(`navigation to ${url} failed: ${err}`);
    }
  }

  async setViewport(width: number, height: number): Promise<void> {
    await this.page.setViewport({ width, height, deviceScaleFactor: 1 });
  }

  async settle(): Promise<void> {
    await this.page.evaluate(async () => {
      if (document.fonts && document.fonts.ready) {
        await document.fonts.ready;
      }
      await new Promise((resolve) =>
        requestAnimationFrame(() => requestAnimationFrame(resolve))
      );
    });
  }

  async snapshotDom(): Promise<DomNodeJson> {
    return this.page.evaluate(pageSnapshotDom);
  }

  async collectStylesheets() {
    return this.page.evaluate(pageCollectStylesheets);
  }

  async collectAnimationFlags() {
    return this.page.evaluate(pageCollectAnimationFlags);
  }

  async freezeAnimations(): Promise<void> {
    await this.page.evaluate(pageFreezeAnimations);
  }

  async collectGeometry(): Promise<GeometryEntries> {
    return this.page.evaluate(pageCollectGeometry);
  }

  async elementBox(xpath: string) {
    return this.page.evaluate(pageElementBox, xpath);
  }

  async setVisibility(xpath: string, hidden: boolean): Promise<boolean> {
    return this.page.evaluate(pageSetVisibility, xpath, hidden);
  }

  async screenshot(clip: { x: number; y: number; width: number; height: number }) {
    return this.page.screenshot({ clip, type: "png" });
  }

  async close(): Promise<void> {
    if (this.browser) {
      await this.browser.close();
    }
  }
}

/** Launch-and-quit check used by `--probe-browser`. */
export async function probeBrowser(): Promise<string> {
  const { default: puppeteer } = await import("puppeteer");
  const browser = await puppeteer.launch({
    headless: true,
    args: ["--no-sandbox"],
  });
  try {
    return await browser.version();
  } finally {
    await browser.close();
  }
}
