"""Gradient-method circle Hough transform.

Canny edge pixels vote along their gradient line (both directions, one
vote per integer radius) into a center accumulator at resolution 1/dp.
Centers are local accumulator maxima over the vote threshold, greedily
separated by min_dist; the radius per center is estimated from the mode
of the edge-distance histogram (2 px bins).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from .filters import canny, sobel_gradients


@dataclass(frozen=True)
class CircleCandidate:
    center: tuple[float, float]
    radius: float
    score: int            # accumulator votes
    edge_strength: float  # mean Canny-mask value (0..255) on a thin ring


def _vote_accumulator(gray: np.ndarray, edges: np.ndarray, dp: float,
                      r_min: int, r_max: int) -> np.ndarray:
    """Center votes: each edge pixel votes along its gradient line in both
    directions, at most one vote per accumulator cell per direction (the
    ray is swept over integer radii in [r_min, r_max] and consecutive
    duplicate cells are dropped, like a rasterized line segment)."""
    h, w = gray.shape
    aw = int(np.ceil(w / dp))
    ah = int(np.ceil(h / dp))
    acc = np.zeros((ah, aw), dtype=np.int32)
    ey, ex = np.nonzero(edges)
    if ey.size == 0:
        return acc
    gx, gy = sobel_gradients(gray)
    gxe = gx[ey, ex].astype(np.float64)
    gye = gy[ey, ex].astype(np.float64)
    mag = np.sqrt(gxe * gxe + gye * gye)
    ok = mag > 0
    ex, ey, gxe, gye, mag = ex[ok], ey[ok], gxe[ok], gye[ok], mag[ok]
    ux = gxe / mag
    uy = gye / mag
    radii = np.arange(r_min, r_max + 1, dtype=np.float64)[:, None]
    for sign in (1.0, -1.0):
        cx = np.floor((ex[None, :] + sign * radii * ux[None, :]) / dp + 0.5).astype(np.int64)
        cy = np.floor((ey[None, :] + sign * radii * uy[None, :]) / dp + 0.5).astype(np.int64)
        fresh = np.ones_like(cx, dtype=bool)
        fresh[1:] = (cx[1:] != cx[:-1]) | (cy[1:] != cy[:-1])
        valid = fresh & (cx >= 0) & (cx < aw) & (cy >= 0) & (cy < ah)
        np.add.at(acc, (cy[valid], cx[valid]), 1)
    return acc


def hough_circles(gray: np.ndarray, dp: float = 1.2, min_dist: float = 50.0,
                  canny_high: float = 100.0, accum_thresh: int = 18,
                  r_min: int = 15, r_max: int = 200,
                  ring_thickness: float = 3.0) -> list[CircleCandidate]:
    if r_min > r_max:
        raise ParameterError("r_min must not exceed r_max")
    if dp <= 0:
        raise ParameterError("dp must be > 0")
    h, w = gray.shape
    edges = canny(gray, canny_high / 2.0, canny_high)
    ey, ex = np.nonzero(edges)
    if ey.size == 0:
        return []
    acc = _vote_accumulator(gray, edges, dp, r_min, r_max)
    ah, aw = acc.shape

    # Local maxima at or above threshold.
    p = np.pad(acc, 1, constant_values=-1)
    is_max = acc >= accum_thresh
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            is_max &= acc >= p[1 + dy:1 + dy + ah, 1 + dx:1 + dx + aw]
    cand_y, cand_x = np.nonzero(is_max)
    if cand_y.size == 0:
        return []
    votes = acc[cand_y, cand_x]
    order = np.lexsort((cand_x, cand_y, -votes))

    def refine(by: int, bx: int) -> tuple[float, float]:
        # Gradient-direction noise spreads a circle's votes over a few
        # cells; iterate a vote-weighted centroid of a 7x7 window until it
        # settles on the blob center.
        fy, fx = float(by), float(bx)
        for _ in range(3):
            cy0 = int(np.floor(fy + 0.5))
            cx0 = int(np.floor(fx + 0.5))
            y0, y1 = max(0, cy0 - 3), min(ah, cy0 + 4)
            x0, x1 = max(0, cx0 - 3), min(aw, cx0 + 4)
            win = acc[y0:y1, x0:x1].astype(np.float64)
            total = win.sum()
            if total == 0:
                break
            fy = (np.arange(y0, y1, dtype=np.float64)[:, None] * win).sum() / total
            fx = (np.arange(x0, x1, dtype=np.float64)[None, :] * win).sum() / total
        return fx * dp, fy * dp

    centers: list[tuple[float, float, int]] = []
    for idx in order:
        cx_img, cy_img = refine(int(cand_y[idx]), int(cand_x[idx]))
        if all((cx_img - ox) ** 2 + (cy_img - oy) ** 2 >= min_dist ** 2
               for ox, oy, _ in centers):
            centers.append((cx_img, cy_img, int(votes[idx])))

    out = []
    for cx_img, cy_img, score in centers:
        d = np.hypot(ex - cx_img, ey - cy_img)
        in_range = (d >= r_min) & (d <= r_max + 1)
        if not in_range.any():
            continue
        bins = ((d[in_range] - r_min) // 2).astype(np.int64)
        mode = np.bincount(bins).argmax()
        sel = bins == mode
        radius = float(d[in_range][sel].mean())
        # Mean Canny value over the full ring band (not just edge pixels).
        yy, xx = np.mgrid[max(0, int(cy_img - radius - 2)):min(h, int(cy_img + radius + 3)),
                          max(0, int(cx_img - radius - 2)):min(w, int(cx_img + radius + 3))]
        dd = np.hypot(xx - cx_img, yy - cy_img)
        band = np.abs(dd - radius) <= ring_thickness / 2.0
        strength = float(edges[yy[band], xx[band]].mean() * 255.0) if band.any() else 0.0
        out.append(CircleCandidate(center=(cx_img, cy_img), radius=radius,
                                   score=score, edge_strength=strength))
    out.sort(key=lambda c: (-c.score, c.center[1], c.center[0]))
    return out
