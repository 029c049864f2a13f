"""Pure NumPy/Python backend for the patch correspondence search.

Semantics match the Cython backend; only speed differs. Patch distance is
the sum of squared color differences over target-patch pixels that fall
inside the image, normalized by that pixel count (source patches always
fit entirely inside the known region).
"""
from __future__ import annotations

import numpy as np


def _dist(img, ty, tx, sy, sx, ph, h, w):
    a = max(-ph, -ty)
    b = min(ph, h - 1 - ty)
    c = max(-ph, -tx)
    d = min(ph, w - 1 - tx)
    tpatch = img[ty + a:ty + b + 1, tx + c:tx + d + 1]
    spatch = img[sy + a:sy + b + 1, sx + c:sx + d + 1]
    n = (b - a + 1) * (d - c + 1)
    return float(np.sum((tpatch - spatch) ** 2)) / n


def patch_dists(img, targets, nnf, patch_half):
    h, w = img.shape[:2]
    out = np.empty(len(targets), dtype=np.float64)
    for i, ((ty, tx), (sy, sx)) in enumerate(zip(targets, nnf)):
        out[i] = _dist(img, int(ty), int(tx), int(sy), int(sx), patch_half, h, w)
    return out


def propagate_search(img, targets, tindex, src_valid, nnf, best_d, patch_half,
                     rand01, radii, bbox, search_region, reverse):
    """One propagation + random-search pass over all targets (in place).

    Forward passes scan row-major and pull matches from the left/top
    neighbors; reverse passes scan backwards pulling from right/bottom.
    Random search proposes around the current best at geometrically
    decreasing radii, clamped to the source bounding box (and to a window
    around the target when search_region > 0).
    """
    h, w = img.shape[:2]
    y0b, y1b, x0b, x1b = bbox
    n = len(targets)
    order = range(n - 1, -1, -1) if reverse else range(n)
    step = 1 if reverse else -1

    for i in order:
        ty = int(targets[i, 0])
        tx = int(targets[i, 1])
        by, bx = int(nnf[i, 0]), int(nnf[i, 1])
        bd = float(best_d[i])

        for dy, dx in ((0, step), (step, 0)):
            ny, nx = ty + dy, tx + dx
            if 0 <= ny < h and 0 <= nx < w and tindex[ny, nx] >= 0:
                j = tindex[ny, nx]
                cy = int(nnf[j, 0]) - dy
                cx = int(nnf[j, 1]) - dx
                if y0b <= cy <= y1b and x0b <= cx <= x1b and src_valid[cy, cx]:
                    d = _dist(img, ty, tx, cy, cx, patch_half, h, w)
                    if d < bd:
                        bd, by, bx = d, cy, cx

        lo_y, hi_y, lo_x, hi_x = y0b, y1b, x0b, x1b
        if search_region > 0:
            lo_y = max(lo_y, ty - search_region)
            hi_y = min(hi_y, ty + search_region)
            lo_x = max(lo_x, tx - search_region)
            hi_x = min(hi_x, tx + search_region)
        for k, radius in enumerate(radii):
            cy = by + int(np.floor(radius * (2.0 * rand01[i, k, 0] - 1.0) + 0.5))
            cx = bx + int(np.floor(radius * (2.0 * rand01[i, k, 1] - 1.0) + 0.5))
            cy = min(max(cy, lo_y), hi_y)
            cx = min(max(cx, lo_x), hi_x)
            if (cy != by or cx != bx) and src_valid[cy, cx]:
                d = _dist(img, ty, tx, cy, cx, patch_half, h, w)
                if d < bd:
                    bd, by, bx = d, cy, cx

        nnf[i, 0] = by
        nnf[i, 1] = bx
        best_d[i] = bd


def vote(img, targets, nnf, unknown, patch_half):
    """Accumulate matched-source colors over overlapping patches.

    Returns (sums, counts); the filled value of an unknown pixel is
    sums/counts there.
    """
    h, w = img.shape[:2]
    sums = np.zeros((h, w, 3), dtype=np.float64)
    counts = np.zeros((h, w), dtype=np.float64)
    for (ty, tx), (sy, sx) in zip(targets, nnf):
        ty, tx, sy, sx = int(ty), int(tx), int(sy), int(sx)
        a = max(-patch_half, -ty)
        b = min(patch_half, h - 1 - ty)
        c = max(-patch_half, -tx)
        d = min(patch_half, w - 1 - tx)
        win = unknown[ty + a:ty + b + 1, tx + c:tx + d + 1].astype(np.float64)
        sums[ty + a:ty + b + 1, tx + c:tx + d + 1] += (
            win[..., None] * img[sy + a:sy + b + 1, sx + c:sx + d + 1])
        counts[ty + a:ty + b + 1, tx + c:tx + d + 1] += win
    return sums, counts
