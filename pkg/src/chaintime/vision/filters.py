"""Grayscale filters: Gaussian blur, CLAHE, Canny edges, area resize.

Everything is computed either in exact integer arithmetic or in float64
with a fixed operation order, so outputs are bit-stable.  Rounding to
8 bits is always round-half-up.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ParameterError

_KERNEL_SCALE = 1 << 16


def _gauss_taps(kernel: int, sigma: float) -> np.ndarray:
    """Integer-quantized normalized 1-D Gaussian taps (sum ~= 2^16)."""
    c = kernel // 2
    xs = np.arange(kernel) - c
    w = np.exp(-(xs.astype(np.float64) ** 2) / (2.0 * sigma * sigma))
    w /= w.sum()
    taps = np.floor(w * _KERNEL_SCALE + 0.5).astype(np.int64)
    return taps


def gaussian_blur(gray: np.ndarray, kernel: int = 7, sigma: float = 1.5) -> np.ndarray:
    """Separable Gaussian with reflect-101 padding, single final rounding.

    Equivalent to one 2-D convolution with the outer product of the
    integer taps: both separable passes accumulate exactly in int64 and
    the division happens once.
    """
    if kernel < 1 or kernel % 2 == 0:
        raise ParameterError(f"kernel size must be odd, got {kernel}")
    if sigma <= 0:
        raise ParameterError("sigma must be > 0")
    taps = _gauss_taps(kernel, sigma)
    s = int(taps.sum())
    pad = kernel // 2
    acc = np.pad(gray.astype(np.int64), pad, mode="reflect")
    # Horizontal then vertical pass, no intermediate rounding.
    win = sliding_window_view(acc, kernel, axis=1)
    acc = (win * taps).sum(axis=-1)
    win = sliding_window_view(acc, kernel, axis=0)
    acc = (win * taps).sum(axis=-1)
    total = s * s
    out = (2 * acc + total) // (2 * total)  # round half up
    return out.astype(np.uint8)


def _clahe_lut(hist: np.ndarray, clip_limit: float, area: int) -> np.ndarray:
    limit = max(1, int(clip_limit * area / 256.0))
    clipped = np.minimum(hist, limit)
    excess = int(hist.sum() - clipped.sum())
    clipped = clipped + excess // 256
    rem = excess % 256
    if rem:
        clipped[:rem] += 1
    cdf = np.cumsum(clipped)
    lut = np.floor(cdf * 255.0 / area + 0.5)
    return np.clip(lut, 0, 255)


def clahe(gray: np.ndarray, clip_limit: float = 2.0,
          tiles: tuple[int, int] = (8, 8)) -> np.ndarray:
    """Contrast-limited adaptive histogram equalization.

    Clipped histogram excess is redistributed uniformly (remainder to the
    lowest bins); tile mappings are blended bilinearly between tile
    centers, clamped at the image border.
    """
    ty, tx = tiles
    h, w = gray.shape
    if h < ty or w < tx:
        raise ParameterError(f"image {w}x{h} smaller than the {tx}x{ty} tile grid")
    if clip_limit <= 0:
        raise ParameterError("clip limit must be > 0")
    th = -(-h // ty)
    tw = -(-w // tx)
    padded = np.pad(gray, ((0, th * ty - h), (0, tw * tx - w)), mode="reflect")
    area = th * tw

    luts = np.empty((ty, tx, 256), dtype=np.float64)
    for i in range(ty):
        for j in range(tx):
            tile = padded[i * th:(i + 1) * th, j * tw:(j + 1) * tw]
            hist = np.bincount(tile.ravel(), minlength=256)
            luts[i, j] = _clahe_lut(hist, clip_limit, area)

    ys = np.arange(h, dtype=np.float64)
    xs = np.arange(w, dtype=np.float64)
    fy = ys / th - 0.5
    fx = xs / tw - 0.5
    i0 = np.clip(np.floor(fy), 0, ty - 1).astype(np.int64)
    j0 = np.clip(np.floor(fx), 0, tx - 1).astype(np.int64)
    i1 = np.minimum(i0 + 1, ty - 1)
    j1 = np.minimum(j0 + 1, tx - 1)
    wy = np.clip(fy - i0, 0.0, 1.0)[:, None]
    wx = np.clip(fx - j0, 0.0, 1.0)[None, :]

    v = padded[:h, :w]
    g00 = luts[i0[:, None], j0[None, :], v]
    g01 = luts[i0[:, None], j1[None, :], v]
    g10 = luts[i1[:, None], j0[None, :], v]
    g11 = luts[i1[:, None], j1[None, :], v]
    top = g00 * (1.0 - wx) + g01 * wx
    bot = g10 * (1.0 - wx) + g11 * wx
    out = np.floor(top * (1.0 - wy) + bot * wy + 0.5)
    return np.clip(out, 0, 255).astype(np.uint8)


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.int64)
_SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.int64)


def sobel_gradients(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel gx, gy (y grows downward) with reflect-101 padding."""
    p = np.pad(gray.astype(np.int64), 1, mode="reflect")
    win = sliding_window_view(p, (3, 3))
    gx = (win * _SOBEL_X).sum(axis=(2, 3))
    gy = (win * _SOBEL_Y).sum(axis=(2, 3))
    return gx, gy


def canny(gray: np.ndarray, low_thresh: float, high_thresh: float) -> np.ndarray:
    """Sobel gradients, 4-sector non-maximum suppression, hysteresis.

    Magnitude is the L2 norm.  NMS keeps a pixel when its magnitude is
    strictly greater than the neighbor on the negative side of the
    quantized gradient direction and >= the one on the positive side
    (ideal steps thin to one pixel).  Strong pixels exceed high_thresh;
    weak pixels exceed low_thresh and survive only when 8-connected to a
    strong pixel.
    """
    if low_thresh > high_thresh:
        raise ParameterError("low threshold exceeds high threshold")
    gx, gy = sobel_gradients(gray)
    mag = np.sqrt((gx * gx + gy * gy).astype(np.float64))
    h, w = gray.shape

    # Quantize the gradient direction into 4 sectors by comparing |gy|
    # against tan(22.5 deg)*|gx| and tan(67.5 deg)*|gx|; integer Sobel
    # values can never tie these irrational slopes.
    t_low = np.sqrt(2.0) - 1.0
    t_high = np.sqrt(2.0) + 1.0
    ax = np.abs(gx).astype(np.float64)
    ay = np.abs(gy).astype(np.float64)
    diag = (ay >= t_low * ax) & (ay < t_high * ax)
    sector = np.zeros((h, w), dtype=np.int8)
    sector[diag & (gx * gy > 0)] = 1
    sector[ay >= t_high * ax] = 2
    sector[diag & (gx * gy < 0)] = 3

    padded = np.pad(mag, 1, constant_values=0.0)

    def shifted(dy: int, dx: int) -> np.ndarray:
        return padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]

    # (negative-side neighbor, positive-side neighbor) per sector.
    neighbors = {
        0: ((0, -1), (0, 1)),
        1: ((-1, -1), (1, 1)),
        2: ((-1, 0), (1, 0)),
        3: ((-1, 1), (1, -1)),
    }
    keep = np.zeros((h, w), dtype=bool)
    for sec, (nb, pb) in neighbors.items():
        m = sector == sec
        keep |= m & (mag > shifted(*nb)) & (mag >= shifted(*pb))

    strong = keep & (mag > high_thresh)
    weak = keep & (mag > low_thresh)
    # Hysteresis: grow strong through weak by 8-connectivity.
    out = strong.copy()
    frontier = strong
    while frontier.any():
        p = np.pad(out, 1, constant_values=False)
        grown = np.zeros_like(out)
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                grown |= p[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
        frontier = grown & weak & ~out
        out |= frontier
    return out


def _axis_area_acc(src: np.ndarray, n_dst: int) -> np.ndarray:
    """Weighted sums along axis 0 with integer footprint overlaps.

    Destination cell d covers [d, d+1) * n_src/n_dst in source cells;
    weights are overlaps scaled by n_dst (so each row of weights sums to
    exactly n_src) and everything stays in int64.
    """
    n_src = src.shape[0]
    k_max = -(-n_src // n_dst) + 1
    d = np.arange(n_dst, dtype=np.int64)[:, None]
    s = (d * n_src) // n_dst + np.arange(k_max, dtype=np.int64)[None, :]
    lo = np.maximum(d * n_src, s * n_dst)
    hi = np.minimum((d + 1) * n_src, (s + 1) * n_dst)
    wts = np.maximum(hi - lo, 0)
    s_clipped = np.clip(s, 0, n_src - 1)
    gathered = src[s_clipped]          # (n_dst, k_max, ...)
    extra = (1,) * (src.ndim - 1)
    return (gathered * wts.reshape(wts.shape + extra)).sum(axis=1)


def resize_area(image: np.ndarray, new_w: int, new_h: int) -> np.ndarray:
    """Box-filter resize in exact integer arithmetic (round half up)."""
    if new_w <= 0 or new_h <= 0:
        raise ParameterError("target dimensions must be > 0")
    h, w = image.shape[:2]
    if (new_w, new_h) == (w, h):
        return image.copy()
    acc = _axis_area_acc(image.astype(np.int64), new_h)
    acc = _axis_area_acc(acc.swapaxes(0, 1), new_w).swapaxes(0, 1)
    total = h * w  # combined weight of every destination footprint
    out = (2 * acc + total) // (2 * total)
    return out.astype(np.uint8)
