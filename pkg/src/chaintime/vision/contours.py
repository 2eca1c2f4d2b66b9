"""External contours of 8-connected components: moments, bbox, perimeter.

Components are found with run-based union-find labeling.  Moments are
computed over the filled component pixels (m00 = pixel count).  The
perimeter is the length of the Moore outer-boundary chain through pixel
centers, counting diagonal steps as sqrt(2); circularity thresholds in
the detectors are tuned to this metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_EPS = 1e-6

# Clockwise Moore neighborhood starting East, as (dy, dx).
_DIRS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))


@dataclass(frozen=True)
class ContourStats:
    area: float                 # filled pixel count
    perimeter: float            # boundary chain length
    bbox: tuple[int, int, int, int]  # x, y, w, h
    m00: float
    m10: float
    m01: float

    @property
    def circularity(self) -> float:
        return 4.0 * math.pi * self.area / (self.perimeter ** 2 + _EPS)

    @property
    def centroid(self) -> tuple[float, float]:
        return self.m10 / self.m00, self.m01 / self.m00


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _runs_by_row(mask: np.ndarray) -> list[list[tuple[int, int]]]:
    """Per row: list of half-open foreground runs (start, stop)."""
    h, _ = mask.shape
    padded = np.pad(mask, ((0, 0), (1, 1)), constant_values=False)
    diff = np.diff(padded.astype(np.int8), axis=1)
    rows: list[list[tuple[int, int]]] = []
    for y in range(h):
        starts = np.nonzero(diff[y] == 1)[0]
        stops = np.nonzero(diff[y] == -1)[0]
        rows.append(list(zip(starts.tolist(), stops.tolist())))
    return rows


def _trace_boundary(mask: np.ndarray, start: tuple[int, int]) -> float:
    """Length of the clockwise Moore boundary chain from the top-left pixel."""
    h, w = mask.shape

    def fg(y: int, x: int) -> bool:
        return 0 <= y < h and 0 <= x < w and mask[y, x]

    sy, sx = start
    # Entered the start pixel coming from the West (it is the leftmost
    # pixel of the topmost row of its component).
    prev_dir = 4  # W
    y, x = sy, sx
    length = 0.0
    first_move = None
    while True:
        found = None
        # Scan clockwise starting just past the backtrack direction.
        for k in range(1, 9):
            d = (prev_dir + k) % 8
            dy, dx = _DIRS[d]
            if fg(y + dy, x + dx):
                found = d
                break
        if found is None:
            return 0.0  # isolated pixel
        dy, dx = _DIRS[found]
        y, x = y + dy, x + dx
        length += math.sqrt(2.0) if dy != 0 and dx != 0 else 1.0
        if (y, x) == (sy, sx):
            if first_move is None:
                first_move = found
            # Jacob's criterion: stop when re-entering the start pixel
            # heading the same way as the first departure.
            next_prev = (found + 4) % 8
            probe = None
            for k in range(1, 9):
                d = (next_prev + k) % 8
                ddy, ddx = _DIRS[d]
                if fg(y + ddy, x + ddx):
                    probe = d
                    break
            if probe == first_move:
                return length
        if first_move is None:
            first_move = found
        prev_dir = (found + 4) % 8


def external_contours(mask: np.ndarray) -> list[ContourStats]:
    """Stats for every 8-connected foreground component, in scan order."""
    mask = mask.astype(bool)
    rows = _runs_by_row(mask)
    run_ids: list[list[int]] = []
    flat: list[tuple[int, int, int]] = []  # (y, start, stop)
    for y, row in enumerate(rows):
        ids = []
        for (s, e) in row:
            ids.append(len(flat))
            flat.append((y, s, e))
        run_ids.append(ids)
    uf = _UnionFind(len(flat))
    for y in range(1, len(rows)):
        for i, (s, e) in zip(run_ids[y], rows[y]):
            for j, (ps, pe) in zip(run_ids[y - 1], rows[y - 1]):
                # 8-connectivity: diagonal touch counts.
                if s <= pe and ps <= e:
                    uf.union(i, j)

    groups: dict[int, list[int]] = {}
    for i in range(len(flat)):
        groups.setdefault(uf.find(i), []).append(i)

    out = []
    for root in sorted(groups):
        area = 0
        m10 = 0
        m01 = 0
        x0, y0 = mask.shape[1], mask.shape[0]
        x1, y1 = -1, -1
        top: tuple[int, int] | None = None
        for i in groups[root]:
            y, s, e = flat[i]
            n = e - s
            area += n
            m10 += (s + e - 1) * n // 2  # sum of x over the run
            m01 += y * n
            x0, x1 = min(x0, s), max(x1, e - 1)
            y0, y1 = min(y0, y), max(y1, y)
            if top is None or (y, s) < top:
                top = (y, s)
        perimeter = _trace_boundary(mask, top)
        out.append(ContourStats(
            area=float(area), perimeter=perimeter,
            bbox=(x0, y0, x1 - x0 + 1, y1 - y0 + 1),
            m00=float(area), m10=float(m10), m01=float(m01)))
    return out
