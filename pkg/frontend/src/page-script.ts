/**
 * Functions that run inside the page. Each is passed to page.evaluate as a
 * self-contained function: no captured bindings, browser globals only.
 */

import type {
  AnimationFlags,
  DomNodeJson,
  GeometryEntries,
  StylesheetJson,
} from "./types.js";

/** Tags that never carry layout and stay out of the DOM document. */
export const SKIP_TAGS = new Set([
  "head",
  "script",
  "style",
  "link",
  "meta",
  "title",
  "noscript",
  "template",
  "br",
  "wbr",
]);

export const DISABLE_STYLE_ID = "__rlf_bridge_freeze__";

/**
 * Absolute xpath with per-tag child indices; html and body stay unindexed
 * to match the analysis core's addressing.
 */
export function pageBuildXPath(el: Element): string {
  const tag = el.tagName.toLowerCase();
  const parent = el.parentElement;
  if (tag === "html") return "/html";
  if (tag === "body" && parent && parent.tagName.toLowerCase() === "html") {
    return "/html/body";
  }
  if (!parent) return "/" + tag;
  let index = 0;
  let position = 0;
  for (const sibling of Array.from(parent.children)) {
    if (sibling.tagName === el.tagName) {
      index += 1;
      if (sibling === el) position = index;
    }
  }
  return pageBuildXPath(parent) + "/" + tag + "[" + position + "]";
}

export function pageSnapshotDom(): DomNodeJson {
  const SKIP = new Set([
    "head", "script", "style", "link", "meta", "title", "noscript",
    "template", "br", "wbr",
  ]);

  function xpathOf(el: Element): string {
    const tag = el.tagName.toLowerCase();
    const parent = el.parentElement;
    if (tag === "html") return "/html";
    if (tag === "body" && parent && parent.tagName.toLowerCase() === "html") {
      return "/html/body";
    }
    if (!parent) return "/" + tag;
    let index = 0;
    let position = 0;
    for (const sibling of Array.from(parent.children)) {
      if (sibling.tagName === el.tagName) {
        index += 1;
        if (sibling === el) position = index;
      }
    }
    return xpathOf(parent) + "/" + tag + "[" + position + "]";
  }

  function serialize(el: Element): DomNodeJson {
    const attributes: Record<string, string> = {};
    for (const attr of Array.from(el.attributes)) {
      if (attr.name === "class" || attr.name === "style" || attr.name === "id") {
        continue;
      }
      attributes[attr.name] = attr.value;
    }
    const children: DomNodeJson[] = [];
    for (const child of Array.from(el.children)) {
      if (!SKIP.has(child.tagName.toLowerCase())) {
        children.push(serialize(child));
      }
    }
    return {
      xpath: xpathOf(el),
      tag: el.tagName.toLowerCase(),
      id: el.id || null,
      classes: Array.from(el.classList),
      attributes,
      inline_style_text: el.getAttribute("style") || "",
      children,
    };
  }

  return serialize(document.documentElement);
}

export function pageCollectGeometry(): GeometryEntries {
  const SKIP = new Set([
    "head", "script", "style", "link", "meta", "title", "noscript",
    "template", "br", "wbr",
  ]);

  function xpathOf(el: Element): string {
    const tag = el.tagName.toLowerCase();
    const parent = el.parentElement;
    if (tag === "html") return "/html";
    if (tag === "body" && parent && parent.tagName.toLowerCase() === "html") {
      return "/html/body";
    }
    if (!parent) return "/" + tag;
    let index = 0;
    let position = 0;
    for (const sibling of Array.from(parent.children)) {
      if (sibling.tagName === el.tagName) {
        index += 1;
        if (sibling === el) position = index;
      }
    }
    return xpathOf(parent) + "/" + tag + "[" + position + "]";
  }

  const entries: GeometryEntries = {};

  function visit(el: Element): void {
    const tag = el.tagName.toLowerCase();
    if (SKIP.has(tag)) return;
    const cs = window.getComputedStyle(el);
    const rect = el.getBoundingClientRect();
    const visible =
      cs.display !== "none" &&
      cs.visibility !== "hidden" &&
      rect.width > 0 &&
      rect.height > 0;
    entries[xpathOf(el)] = {
      bbox: [
        rect.left + window.scrollX,
        rect.top + window.scrollY,
        rect.width,
        rect.height,
      ],
      visible,
      computed: {
        font_size: parseFloat(cs.fontSize) || 16,
        display: cs.display,
        position: cs.position,
        float: cs.cssFloat || "none",
        has_transition: false,
        has_transform: false,
      },
    };
    for (const child of Array.from(el.children)) visit(child);
  }

  visit(document.documentElement);
  return entries;
}

/**
 * Transition/transform presence per element. Read once before animations
 * are frozen, then merged into every geometry record.
 */
export function pageCollectAnimationFlags(): Record<string, AnimationFlags> {
  const SKIP = new Set([
    "head", "script", "style", "link", "meta", "title", "noscript",
    "template", "br", "wbr",
  ]);

  function xpathOf(el: Element): string {
    const tag = el.tagName.toLowerCase();
    const parent = el.parentElement;
    if (tag === "html") return "/html";
    if (tag === "body" && parent && parent.tagName.toLowerCase() === "html") {
      return "/html/body";
    }
    if (!parent) return "/" + tag;
    let index = 0;
    let position = 0;
    for (const sibling of Array.from(parent.children)) {
      if (sibling.tagName === el.tagName) {
        index += 1;
        if (sibling === el) position = index;
      }
    }
    return xpathOf(parent) + "/" + tag + "[" + position + "]";
  }

  const flags: Record<string, AnimationFlags> = {};

  function visit(el: Element): void {
    if (SKIP.has(el.tagName.toLowerCase())) return;
    const cs = window.getComputedStyle(el);
    const hasDuration = (cs.transitionDuration || "")
      .split(",")
      .some((d) => parseFloat(d) > 0);
    flags[xpathOf(el)] = {
      has_transition: hasDuration,
      has_transform: cs.transform !== "none" && cs.transform !== "",
    };
    for (const child of Array.from(el.children)) visit(child);
  }

  visit(document.documentElement);
  return flags;
}

export function pageCollectStylesheets(): {
  sheets: StylesheetJson[];
  warnings: string[];
} {
  const sheets: StylesheetJson[] = [];
  const warnings: string[] = [];
  for (const sheet of Array.from(document.styleSheets)) {
    const owner = sheet.ownerNode as Element | null;
    if (owner && owner.id === "__rlf_bridge_freeze__") continue;
    let label = "inline <style>";
    if (sheet.href) {
      label = sheet.href;
    }
    if (owner && owner.tagName && owner.tagName.toLowerCase() === "style") {
      sheets.push({ label, text: owner.textContent || "" });
      continue;
    }
    try {
      const rules = Array.from(sheet.cssRules)
        .map((r) => r.cssText)
        .join("\n");
      sheets.push({ label, text: rules });
    } catch {
      warnings.push(`cross-origin stylesheet skipped: ${label}`);
      sheets.push({ label, text: "" });
    }
  }
  return { sheets, warnings };
}

export function pageFreezeAnimations(): void {
  if (document.getElementById("__rlf_bridge_freeze__")) return;
  const style = document.createElement("style");
  style.id = "__rlf_bridge_freeze__";
  style.textContent =
    "*, *::before, *::after {" +
    " transition: none !important;" +
    " animation: none !important;" +
    " scroll-behavior: auto !important; }";
  document.head.appendChild(style);
}

export function pageSetVisibility(xpath: string, hidden: boolean): boolean {
  const result = document.evaluate(
    xpath,
    document,
    null,
    XPathResult.FIRST_ORDERED_NODE_TYPE,
    null
  );
  const el = result.singleNodeValue as HTMLElement | null;
  if (!el) return false;
  el.style.visibility = hidden ? "hidden" : "";
  return true;
}

export function pageElementBox(
  xpath: string
): [number, number, number, number] | null {
  const result = document.evaluate(
    xpath,
    document,
    null,
    XPathResult.FIRST_ORDERED_NODE_TYPE,
    null
  );
  const el = result.singleNodeValue as Element | null;
  if (!el) return null;
  const rect = el.getBoundingClientRect();
  return [
    rect.left + window.scrollX,
    rect.top + window.scrollY,
    rect.width,
    rect.height,
  ];
}
