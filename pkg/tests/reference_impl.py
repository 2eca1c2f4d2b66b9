"""Slow brute-force reference implementations used as test oracles.

Each function re-derives the documented primitive definition with plain
per-pixel loops (or scipy, where its semantics match exactly), kept
deliberately independent of the vectorized code paths in the package.
"""

import math

import numpy as np
from scipy import ndimage


def ref_rgb_to_hsv(image):
    h_, w_ = image.shape[:2]
    out = np.zeros((h_, w_, 3), dtype=np.uint8)
    for y in range(h_):
        for x in range(w_):
            r, g, b = (int(v) for v in image[y, x, :3])
            v = max(r, g, b)
            mn = min(r, g, b)
            delta = v - mn
            s = (2 * 255 * delta + v) // (2 * v) if v > 0 else 0
            if delta == 0:
                hh = 0
            else:
                if v == r:
                    n = (60 * (g - b)) % (360 * delta)
                elif v == g:
                    n = 120 * delta + 60 * (b - r)
                else:
                    n = 240 * delta + 60 * (r - g)
                # round-half-up of (n/delta)/2, folded into [0, 180)
                hh = ((n + delta) // (2 * delta)) % 180
            out[y, x] = (hh, s, v)
    return out


def ref_threshold(hsv, lower, upper):
    h_, w_ = hsv.shape[:2]
    out = np.zeros((h_, w_), dtype=bool)
    for y in range(h_):
        for x in range(w_):
            out[y, x] = all(lower[c] <= int(hsv[y, x, c]) <= upper[c] for c in range(3))
    return out


def ref_erode(mask, k):
    return ndimage.binary_erosion(mask, structure=np.ones((k, k), bool),
                                  border_value=0)


def ref_dilate(mask, k):
    return ndimage.binary_dilation(mask, structure=np.ones((k, k), bool),
                                   border_value=0)


def ref_morph(mask, op, k, iterations):
    out = mask.astype(bool)
    for _ in range(iterations):
        if op == "erode":
            out = ref_erode(out, k)
        elif op == "dilate":
            out = ref_dilate(out, k)
        else:
            out = ref_erode(ref_dilate(out, k), k)
    return out


def ref_components(mask):
    """BFS flood-fill labeling: per component (area, bbox, m10, m01)."""
    h_, w_ = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for sy in range(h_):
        for sx in range(w_):
            if not mask[sy, sx] or seen[sy, sx]:
                continue
            stack = [(sy, sx)]
            seen[sy, sx] = True
            pixels = []
            while stack:
                y, x = stack.pop()
                pixels.append((y, x))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        ny, nx = y + dy, x + dx
                        if 0 <= ny < h_ and 0 <= nx < w_ and mask[ny, nx] and not seen[ny, nx]:
                            seen[ny, nx] = True
                            stack.append((ny, nx))
            ys = [p[0] for p in pixels]
            xs = [p[1] for p in pixels]
            comps.append({
                "area": len(pixels),
                "bbox": (min(xs), min(ys), max(xs) - min(xs) + 1, max(ys) - min(ys) + 1),
                "m10": sum(xs),
                "m01": sum(ys),
                "top": min(pixels),  # topmost-leftmost pixel (y, x)
            })
    comps.sort(key=lambda c: (c["bbox"][1], c["bbox"][0], c["area"]))
    return comps


def ref_perimeter(mask, start):
    """Independent Moore-boundary walk: length of the clockwise chain."""
    h_, w_ = mask.shape

    def fg(y, x):
        return 0 <= y < h_ and 0 <= x < w_ and bool(mask[y, x])

    dirs = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)]

    def next_step(y, x, backtrack):
        for k in range(1, 9):
            d = (backtrack + k) % 8
            if fg(y + dirs[d][0], x + dirs[d][1]):
                return d
        return None

    sy, sx = start
    d0 = next_step(sy, sx, 4)
    if d0 is None:
        return 0.0
    length = 0.0
    y, x, d = sy, sx, d0
    while True:
        length += math.sqrt(2.0) if dirs[d][0] and dirs[d][1] else 1.0
        y, x = y + dirs[d][0], x + dirs[d][1]
        nd = next_step(y, x, (d + 4) % 8)
        if (y, x) == (sy, sx) and nd == d0:
            return length
        d = nd


def ref_gauss_taps(kernel, sigma):
    c = kernel // 2
    w = [math.exp(-((i - c) ** 2) / (2.0 * sigma * sigma)) for i in range(kernel)]
    total = sum(w)
    return [math.floor(x / total * 65536 + 0.5) for x in w]


def ref_gaussian_blur(gray, kernel, sigma):
    taps = ref_gauss_taps(kernel, sigma)
    s = sum(taps)
    pad = kernel // 2
    p = np.pad(gray.astype(np.int64), pad, mode="reflect")
    h_, w_ = gray.shape
    out = np.zeros((h_, w_), dtype=np.uint8)
    total = s * s
    for y in range(h_):
        for x in range(w_):
            acc = 0
            for i in range(kernel):
                for j in range(kernel):
                    acc += taps[i] * taps[j] * int(p[y + i, x + j])
            out[y, x] = (2 * acc + total) // (2 * total)
    return out


def ref_clahe(gray, clip_limit, tiles):
    ty, tx = tiles
    h_, w_ = gray.shape
    th = -(-h_ // ty)
    tw = -(-w_ // tx)
    padded = np.pad(gray, ((0, th * ty - h_), (0, tw * tx - w_)), mode="reflect")
    area = th * tw
    luts = {}
    for i in range(ty):
        for j in range(tx):
            tile = padded[i * th:(i + 1) * th, j * tw:(j + 1) * tw]
            hist = [0] * 256
            for v in tile.ravel():
                hist[int(v)] += 1
            limit = max(1, int(clip_limit * area / 256.0))
            clipped = [min(c, limit) for c in hist]
            excess = sum(hist) - sum(clipped)
            clipped = [c + excess // 256 for c in clipped]
            for b in range(excess % 256):
                clipped[b] += 1
            lut = []
            run = 0
            for c in clipped:
                run += c
                lut.append(min(255.0, max(0.0, math.floor(run * 255.0 / area + 0.5))))
            luts[(i, j)] = lut
    out = np.zeros((h_, w_), dtype=np.uint8)
    for y in range(h_):
        for x in range(w_):
            fy = y / th - 0.5
            fx = x / tw - 0.5
            i0 = min(max(int(math.floor(fy)), 0), ty - 1)
            j0 = min(max(int(math.floor(fx)), 0), tx - 1)
            i1 = min(i0 + 1, ty - 1)
            j1 = min(j0 + 1, tx - 1)
            wy = min(max(fy - i0, 0.0), 1.0)
            wx = min(max(fx - j0, 0.0), 1.0)
            v = int(padded[y, x])
            top = luts[(i0, j0)][v] * (1.0 - wx) + luts[(i0, j1)][v] * wx
            bot = luts[(i1, j0)][v] * (1.0 - wx) + luts[(i1, j1)][v] * wx
            out[y, x] = int(min(255.0, max(0.0, math.floor(top * (1.0 - wy) + bot * wy + 0.5))))
    return out


def _ref_sobel(gray):
    p = np.pad(gray.astype(np.int64), 1, mode="reflect")
    h_, w_ = gray.shape
    gx = np.zeros((h_, w_), dtype=np.int64)
    gy = np.zeros((h_, w_), dtype=np.int64)
    kx = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
    ky = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]]
    for y in range(h_):
        for x in range(w_):
            ax = ay = 0
            for i in range(3):
                for j in range(3):
                    ax += kx[i][j] * int(p[y + i, x + j])
                    ay += ky[i][j] * int(p[y + i, x + j])
            gx[y, x] = ax
            gy[y, x] = ay
    return gx, gy


def ref_canny(gray, low, high):
    gx, gy = _ref_sobel(gray)
    h_, w_ = gray.shape
    mag = np.zeros((h_, w_))
    for y in range(h_):
        for x in range(w_):
            mag[y, x] = math.sqrt(float(gx[y, x] ** 2 + gy[y, x] ** 2))
    t_low = math.sqrt(2.0) - 1.0
    t_high = math.sqrt(2.0) + 1.0
    neighbors = {0: ((0, -1), (0, 1)), 1: ((-1, -1), (1, 1)),
                 2: ((-1, 0), (1, 0)), 3: ((-1, 1), (1, -1))}

    def m(y, x):
        return mag[y, x] if 0 <= y < h_ and 0 <= x < w_ else 0.0

    strong = set()
    weak = set()
    for y in range(h_):
        for x in range(w_):
            ax, ay = abs(float(gx[y, x])), abs(float(gy[y, x]))
            if ay >= t_high * ax:
                sec = 2
            elif ay >= t_low * ax and gx[y, x] * gy[y, x] > 0:
                sec = 1
            elif ay >= t_low * ax and gx[y, x] * gy[y, x] < 0:
                sec = 3
            else:
                sec = 0
            (ny1, nx1), (ny2, nx2) = neighbors[sec]
            if not (mag[y, x] > m(y + ny1, x + nx1) and mag[y, x] >= m(y + ny2, x + nx2)):
                continue
            if mag[y, x] > high:
                strong.add((y, x))
            elif mag[y, x] > low:
                weak.add((y, x))
    out = set(strong)
    frontier = list(strong)
    while frontier:
        y, x = frontier.pop()
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                n = (y + dy, x + dx)
                if n in weak and n not in out:
                    out.add(n)
                    frontier.append(n)
    mask = np.zeros((h_, w_), dtype=bool)
    for (y, x) in out:
        mask[y, x] = True
    return mask


def ref_resize_area(image, new_w, new_h):
    h_, w_ = image.shape[:2]
    chans = 1 if image.ndim == 2 else image.shape[2]
    src = image.reshape(h_, w_, chans).astype(np.int64)
    out = np.zeros((new_h, new_w, chans), dtype=np.uint8)
    total = h_ * w_
    for d in range(new_h):
        for e in range(new_w):
            for c in range(chans):
                acc = 0
                for y in range(h_):
                    oy = min((d + 1) * h_, (y + 1) * new_h) - max(d * h_, y * new_h)
                    if oy <= 0:
                        continue
                    for x in range(w_):
                        ox = min((e + 1) * w_, (x + 1) * new_w) - max(e * w_, x * new_w)
                        if ox > 0:
                            acc += oy * ox * int(src[y, x, c])
                out[d, e, c] = (2 * acc + total) // (2 * total)
    return out.reshape((new_h, new_w) if image.ndim == 2 else (new_h, new_w, chans))


def ref_hough_accumulator(gray, edges, dp, r_min, r_max):
    """Scalar voting loop over edge pixels and radii (both directions)."""
    h_, w_ = gray.shape
    gx, gy = _ref_sobel(gray)
    aw = int(math.ceil(w_ / dp))
    ah = int(math.ceil(h_ / dp))
    acc = np.zeros((ah, aw), dtype=np.int32)
    for y in range(h_):
        for x in range(w_):
            if not edges[y, x]:
                continue
            mag = math.sqrt(float(gx[y, x] ** 2 + gy[y, x] ** 2))
            if mag == 0:
                continue
            ux = float(gx[y, x]) / mag
            uy = float(gy[y, x]) / mag
            for sign in (1.0, -1.0):
                prev = None
                for r in range(r_min, r_max + 1):
                    a = math.floor((x + sign * r * ux) / dp + 0.5)
                    b = math.floor((y + sign * r * uy) / dp + 0.5)
                    if (a, b) == prev:
                        continue  # one vote per cell along the ray
                    prev = (a, b)
                    if 0 <= a < aw and 0 <= b < ah:
                        acc[int(b), int(a)] += 1
    return acc


def exhaustive_circle_fit(edges, r_min, r_max, step=1):
    """Grid-score every (cx, cy, r): count edge pixels within 1 px of the
    ring; return the arg-max (cx, cy, r).  Vectorized over centers but
    algorithmically independent of the accumulator transform."""
    h_, w_ = edges.shape
    ys, xs = np.nonzero(edges)
    best = (0, 0.0, 0.0, 0.0)
    for cy in range(0, h_, step):
        dy2 = (ys.astype(np.float64) - cy) ** 2
        for cx in range(0, w_, step):
            d = np.sqrt((xs.astype(np.float64) - cx) ** 2 + dy2)
            ri = np.floor(d + 0.5).astype(np.int64)
            ok = (ri >= r_min) & (ri <= r_max)
            if not ok.any():
                continue
            counts = np.bincount(ri[ok], minlength=r_max + 2)
            # ring band of +-1 px
            band = counts[r_min:r_max + 1].copy()
            band[:-1] += counts[r_min + 1:r_max + 1]
            band[1:] += counts[r_min:r_max]
            r_idx = int(band.argmax())
            score = int(band[r_idx])
            if score > best[0]:
                best = (score, float(cx), float(cy), float(r_min + r_idx))
    return best[1], best[2], best[3], best[0]
