"""Binary set-morphology with square structuring elements.

Pixels outside the image are background: erosion eats into borders,
dilation never wraps.  Close is dilate-then-erode once per iteration.
"""

from __future__ import annotations

import enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ParameterError


class MorphOp(str, enum.Enum):
    ERODE = "erode"
    DILATE = "dilate"
    CLOSE = "close"


def _axis_window(mask: np.ndarray, k: int, axis: int, combine_all: bool) -> np.ndarray:
    pad = [(0, 0), (0, 0)]
    pad[axis] = (k // 2, k // 2)
    padded = np.pad(mask, pad, constant_values=False)
    win = sliding_window_view(padded, k, axis=axis)
    return win.all(axis=-1) if combine_all else win.any(axis=-1)


def _erode(mask: np.ndarray, k: int) -> np.ndarray:
    # A square kernel separates into per-axis window minima.
    return _axis_window(_axis_window(mask, k, 1, True), k, 0, True)


def _dilate(mask: np.ndarray, k: int) -> np.ndarray:
    return _axis_window(_axis_window(mask, k, 1, False), k, 0, False)


def morphology(mask: np.ndarray, op: MorphOp, kernel: int = 3,
               iterations: int = 1) -> np.ndarray:
    if kernel < 1 or kernel % 2 == 0:
        raise ParameterError(f"kernel size must be odd and >= 1, got {kernel}")
    if iterations < 0:
        raise ParameterError("iterations must be >= 0")
    op = MorphOp(op)
    out = mask.astype(bool)
    for _ in range(iterations):
        if op == MorphOp.ERODE:
            out = _erode(out, kernel)
        elif op == MorphOp.DILATE:
            out = _dilate(out, kernel)
        else:
            out = _erode(_dilate(out, kernel), kernel)
    return out
