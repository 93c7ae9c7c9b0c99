"""Brute-force per-width failure oracle, kept independent of the pipeline.

Everything here is recomputed from raw bundle boxes with plain loops: no
relation-map caching, no shared helpers with rlfkit.detection beyond the
box dataclass. Used to cross-check detect() on every fixture.
"""

from __future__ import annotations

from itertools import combinations


def _boxes(bundle, w):
    rec = bundle.record(w)
    out = {}
    for xp, st in rec.entries.items():
        if not st.visible:
            continue
        if st.computed.has_transition or st.computed.has_transform:
            continue
        out[xp] = st.bbox
    return out


def _overlap(a, b):
    ox = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    oy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    return ox, oy


def _inside(parent, child, eps):
    return (
        child.x >= parent.x - eps
        and child.y >= parent.y - eps
        and child.x + child.w <= parent.x + parent.w + eps
        and child.y + child.h <= parent.y + parent.h + eps
    )


def _one_row(boxes, members):
    for a, b in combinations(members, 2):
        oy = min(boxes[a].y + boxes[a].h, boxes[b].y + boxes[b].h) - max(
            boxes[a].y, boxes[b].y
        )
        smaller = min(boxes[a].h, boxes[b].h)
        if smaller <= 0 or oy / smaller < 0.5:
            return False
    return True


def _signature(bundle, w, eps):
    """Hashable relation snapshot: DOM containments, overlap pairs, and
    one-row sibling sets."""
    boxes = _boxes(bundle, w)
    body, html = bundle.body_xpath, bundle.html_xpath
    contained = []
    for xp in boxes:
        p = bundle.parent_of(xp)
        if p in boxes:
            contained.append((p, xp, _inside(boxes[p], boxes[xp], eps)))
    over = []
    pool = [xp for xp in sorted(boxes) if xp not in (body, html)]
    for a, b in combinations(pool, 2):
        if bundle.is_ancestor(a, b) or bundle.is_ancestor(b, a):
            continue
        ox, oy = _overlap(boxes[a], boxes[b])
        if ox > eps and oy > eps:
            over.append((a, b))
    rows = []
    for xp in sorted(boxes):
        kids = [c for c in (n.xpath for n in bundle.node(xp).children) if c in boxes]
        if len(kids) >= 2:
            # greedy clustering by top coordinate
            remaining = sorted(kids, key=lambda k: (boxes[k].y, k))
            while remaining:
                seed = remaining.pop(0)
                cluster = [seed]
                rest = []
                for other in remaining:
                    trial = cluster + [other]
                    if _one_row(boxes, trial):
                        cluster.append(other)
                    else:
                        rest.append(other)
                remaining = rest
                if len(cluster) >= 2:
                    rows.append(tuple(sorted(cluster)))
    return (tuple(sorted(contained)), tuple(sorted(over)), tuple(sorted(rows)))


def brute_force_failures(bundle, eps=1.0, sr_max_span=50):
    """Set of (type, affected tuple, fail_min, fail_max) recomputed width by
    width from raw boxes."""
    widths = bundle.widths()
    body, html = bundle.body_xpath, bundle.html_xpath
    per_width = {}

    row_history: dict[tuple, bool] = {}
    rows_by_width = {}
    for w in widths:
        rows_by_width[w] = {r for r in _signature(bundle, w, eps)[2]}

    for w in widths:
        boxes = _boxes(bundle, w)
        hits = set()

        for xp in boxes:
            parent = bundle.parent_of(xp)
            if parent in (None, body, html) or parent not in boxes:
                continue
            if not _inside(boxes[parent], boxes[xp], eps):
                hits.add(("EP", (xp, parent)))

        pool = [p for p in sorted(boxes) if p not in (body, html)]
        for a, b in combinations(pool, 2):
            if bundle.is_ancestor(a, b) or bundle.is_ancestor(b, a):
                continue
            ox, oy = _overlap(boxes[a], boxes[b])
            if ox > eps and oy > eps:
                first, second = sorted((a, b), key=bundle.doc_order)
                hits.add(("EC", (first, second)))

        if body in boxes:
            bb = boxes[body]
            for xp in pool:
                box = boxes[xp]
                if box.x < bb.x - eps or box.x + box.w > bb.x + bb.w + eps:
                    hits.add(("VP", (xp, body)))

        # WE: sibling sets forming one row at some wider width, with a
        # member dropped below the band here.
        seen_wider = set()
        for wider in widths:
            if wider > w:
                seen_wider |= rows_by_width[wider]
        for members in seen_wider:
            if any(m not in boxes for m in members):
                continue
            if members in rows_by_width[w]:
                continue
            tops = {m: boxes[m].y for m in members}
            t0 = min(tops.values())
            band = [m for m in members if tops[m] <= t0 + eps]
            band_bottom = max(boxes[m].y + boxes[m].h for m in band)
            dropped = [
                m for m in members
                if m not in band and tops[m] >= band_bottom - eps
            ]
            if dropped:
                ordered = sorted(dropped, key=bundle.doc_order) + sorted(
                    (m for m in members if m not in dropped), key=bundle.doc_order
                )
                hits.add(("WE", tuple(ordered)))

        per_width[w] = hits

    failures = set()
    all_keys = set()
    for hits in per_width.values():
        all_keys |= hits
    for key in all_keys:
        run = None
        for i, w in enumerate(widths):
            present = key in per_width[w]
            if present and run is None:
                run = w
            if run is not None and (not present or i == len(widths) - 1):
                hi = w if present else widths[i - 1]
                failures.add((key[0], key[1], run, hi))
                run = None

    # SR: interior signature islands with agreeing neighbors.
    signatures = {w: _signature(bundle, w, eps) for w in widths}
    i = 0
    while i < len(widths):
        j = i
        while j + 1 < len(widths) and signatures[widths[j + 1]] == signatures[widths[i]]:
            j += 1
        if i > 0 and j < len(widths) - 1 and (j - i + 1) <= sr_max_span:
            if (
                signatures[widths[i - 1]] == signatures[widths[j + 1]]
                and signatures[widths[i]] != signatures[widths[i - 1]]
            ):
                failures.add(("SR", (), widths[i], widths[j]))
        i = j + 1
    return failures
