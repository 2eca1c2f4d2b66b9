"""Color conversion and in-range thresholding."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError


def rgb_to_hsv(image: np.ndarray) -> np.ndarray:
    """8-bit hexcone HSV with H halved into [0, 179].

    Accepts RGB or RGBA (alpha ignored).  Computed entirely in integer
    arithmetic: S = floor(255*delta/V + 1/2) and H = floor((n + delta) /
    (2*delta)) mod 180 where n is the hue numerator in [0, 360*delta).
    Pure red maps to (0, 255, 255); achromatic pixels get H = 0, S = 0.
    """
    rgb = image[..., :3].astype(np.int32)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = v - mn

    v_safe = np.maximum(v, 1)
    s = (2 * 255 * delta + v_safe) // (2 * v_safe)
    s[v == 0] = 0

    n = np.where(v == g, 120 * delta + 60 * (b - r), 240 * delta + 60 * (r - g))
    n = np.where(v == r, (60 * (g - b)) % np.maximum(360 * delta, 1), n)
    d_safe = np.maximum(delta, 1)
    h = ((n + d_safe) // (2 * d_safe)) % 180
    h[delta == 0] = 0

    out = np.stack([h, s, v], axis=-1)
    return out.astype(np.uint8)


def threshold_in_range(hsv: np.ndarray, lower: tuple[int, int, int],
                       upper: tuple[int, int, int]) -> np.ndarray:
    """Mask true iff every channel lies within the closed [lower, upper] bounds."""
    lo = np.asarray(lower, dtype=np.int32)
    hi = np.asarray(upper, dtype=np.int32)
    if (lo > hi).any():
        raise ParameterError(f"lower bound {lower} exceeds upper bound {upper}")
    return ((hsv >= lo) & (hsv <= hi)).all(axis=-1)


def rgb_to_gray(image: np.ndarray) -> np.ndarray:
    """BT.601 luma, computed in integer arithmetic (round half up)."""
    rgb = image[..., :3].astype(np.int64)
    acc = 299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]
    return ((acc + 500) // 1000).astype(np.uint8)
