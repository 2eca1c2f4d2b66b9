"""Frame detectors mapping images back to physical observables.

Three detectors: red-region centroid (2D ball domains), water-level rows
(fluids), and a two-stage ball finder (bouncing).  A miss is reported as
``found=False`` rather than raised, so batch analyses can skip bad
frames and keep going.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError
from .physics import Domain, StimulusSpec
from .render import Frame, fluid_geometry
from .vision import (
    MorphOp,
    canny,
    clahe,
    external_contours,
    gaussian_blur,
    hough_circles,
    morphology,
    resize_area,
    rgb_to_gray,
    rgb_to_hsv,
    threshold_in_range,
)

# Red wraps the hue wheel: threshold both bands and OR the masks.
RED_LOWER_1, RED_UPPER_1 = (0, 70, 50), (10, 255, 255)
RED_LOWER_2, RED_UPPER_2 = (170, 70, 50), (180, 255, 255)


class DetectionKind(str, enum.Enum):
    RED_CENTROID = "RedCentroid"
    WATER_LEVEL = "WaterLevel"
    BALL_CENTER = "BallCenter"


@dataclass
class Detection:
    kind: DetectionKind
    found: bool
    center: tuple[int, int] | None = None
    top_y: int | None = None
    bottom_y: int | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.found and (self.center is not None or self.top_y is not None
                               or self.bottom_y is not None):
            raise ContractViolationError("a missed detection carries no positions")
        if self.top_y is not None and self.bottom_y is not None:
            if self.top_y > self.bottom_y:
                raise ContractViolationError("water top row must not exceed bottom row")


@dataclass(frozen=True)
class WaterDetectorParams:
    y_cut: int = 210                    # pipe bottom + 10 on the 1024 canvas
    alpha_thresh: int = 10
    hsv_lower: tuple[int, int, int] = (90, 40, 120)
    hsv_upper: tuple[int, int, int] = (130, 255, 255)
    erode_iters: int = 2
    close_kernel: int = 5
    coverage_main: float = 0.5
    coverage_fallback: float = 0.25
    ignore_top_rows: int = 2

    def __post_init__(self):
        if not 0 < self.coverage_fallback <= self.coverage_main <= 1:
            raise ContractViolationError(
                "need 0 < coverage_fallback <= coverage_main <= 1")


@dataclass(frozen=True)
class BallDetectorParams:
    dp: float = 1.2
    min_dist: float = 50.0
    canny_high: float = 100.0
    accum_thresh: int = 18
    r_min: int = 15
    r_max: int = 200
    ring_thickness: float = 3.0
    min_area: float = 300.0
    min_circularity: float = 0.7


def water_params_for(spec: StimulusSpec) -> WaterDetectorParams:
    """Default water-detector params with y_cut derived from the pipe."""
    _, pipe = fluid_geometry(spec)
    return WaterDetectorParams(y_cut=pipe.y1 + 10)


def _round_int(x: float) -> int:
    return int(np.floor(x + 0.5))


def detect_red_centroid(frame: Frame) -> Detection:
    """Centroid of the largest red region, in integer pixels."""
    hsv = rgb_to_hsv(frame.pixels)
    mask = threshold_in_range(hsv, RED_LOWER_1, RED_UPPER_1) | \
        threshold_in_range(hsv, RED_LOWER_2, RED_UPPER_2)
    contours = external_contours(mask)
    if not contours:
        return Detection(DetectionKind.RED_CENTROID, found=False)
    largest = max(contours, key=lambda c: c.area)
    if largest.m00 == 0:
        return Detection(DetectionKind.RED_CENTROID, found=False)
    cx, cy = largest.centroid
    return Detection(DetectionKind.RED_CENTROID, found=True,
                     center=(_round_int(cx), _round_int(cy)),
                     diagnostics={"area": largest.area})


def detect_water_level(frame: Frame,
                       params: WaterDetectorParams | None = None) -> Detection:
    """Top/bottom rows of the water blob inside the mug."""
    if params is None:
        params = WaterDetectorParams()
    if frame.height_px <= params.y_cut:
        raise ContractViolationError("frame is not taller than y_cut")
    px = frame.pixels
    if frame.channels == 4:
        alpha_mask = px[..., 3] > params.alpha_thresh
    else:
        alpha_mask = np.ones((frame.height_px, frame.width_px), dtype=bool)
    roi = px[params.y_cut:, :, :3]
    alpha_roi = alpha_mask[params.y_cut:]
    mask = threshold_in_range(rgb_to_hsv(roi), params.hsv_lower, params.hsv_upper)
    mask &= alpha_roi
    mask = morphology(mask, MorphOp.ERODE, 3, params.erode_iters)
    mask = morphology(mask, MorphOp.CLOSE, params.close_kernel, 1)
    contours = external_contours(mask)
    if not contours:
        return Detection(DetectionKind.WATER_LEVEL, found=False)
    blob = max(contours, key=lambda c: c.area)
    x, y, w, h = blob.bbox
    box = mask[y:y + h, x:x + w]
    row_counts = box.sum(axis=1)
    valid = np.nonzero(row_counts >= params.coverage_main * w)[0]
    path = "row-coverage"
    if valid.size == 0:
        valid = np.nonzero(row_counts >= params.coverage_fallback * w)[0]
        path = "row-coverage-fallback"
    # ignore_top_rows indexes from the ROI top: it rejects the crop
    # boundary, not the top of the blob itself.
    valid = valid[(y + valid) >= params.ignore_top_rows]
    if valid.size:
        top = params.y_cut + y + int(valid.min())
        bottom = params.y_cut + y + int(valid.max())
    else:
        top = params.y_cut + y
        bottom = params.y_cut + y + h - 1
        path = "contour-extrema"
    return Detection(DetectionKind.WATER_LEVEL, found=True, top_y=top,
                     bottom_y=bottom,
                     diagnostics={"path": path, "bbox": blob.bbox})


def detect_ball(frame: Frame,
                params: BallDetectorParams | None = None) -> Detection:
    """Two-stage ball finder: circle transform, then contour circularity."""
    if params is None:
        params = BallDetectorParams()
    rgb = frame.pixels[..., :3]
    h, w = frame.height_px, frame.width_px

    # Stage 1 on a contrast-enhanced, 2x-downscaled grayscale image.
    half = resize_area(rgb, w // 2, h // 2)
    gray = clahe(rgb_to_gray(half), 2.0, (8, 8))
    gray = gaussian_blur(gray, 7, 1.5)
    cands = hough_circles(gray, dp=params.dp, min_dist=params.min_dist,
                          canny_high=params.canny_high,
                          accum_thresh=params.accum_thresh,
                          r_min=params.r_min, r_max=params.r_max,
                          ring_thickness=params.ring_thickness)
    if cands:
        best = max(cands, key=lambda c: c.edge_strength)
        cx, cy = 2.0 * best.center[0], 2.0 * best.center[1]
        r = 2.0 * best.radius
        bx, by, bw, bh = _clamp_box(cx - r, cy - r, 2 * r, 2 * r, w, h)
        return Detection(
            DetectionKind.BALL_CENTER, found=True,
            center=(_round_int(cx), _round_int(cy)),
            diagnostics={"stage": "hough", "radius": r, "bbox": (bx, by, bw, bh),
                         "scores": [(c.score, round(c.edge_strength, 2)) for c in cands]})

    # Stage 2: contour circularity on the full-resolution image.
    gray = gaussian_blur(rgb_to_gray(rgb), 7, 1.5)
    edges = canny(gray, params.canny_high / 2.0, params.canny_high)
    closed = morphology(edges, MorphOp.CLOSE, 5, 1)
    best_stats = None
    best_score = 0.0
    for c in external_contours(closed):
        if c.area < params.min_area or c.circularity < params.min_circularity:
            continue
        score = c.circularity * c.area
        if score > best_score:
            best_score = score
            best_stats = c
    if best_stats is None:
        return Detection(DetectionKind.BALL_CENTER, found=False,
                         diagnostics={"stage": "none"})
    x, y, bw, bh = best_stats.bbox
    x, y, bw, bh = _clamp_box(x, y, bw, bh, w, h)
    return Detection(
        DetectionKind.BALL_CENTER, found=True,
        center=(x + bw // 2, y + bh // 2),
        diagnostics={"stage": "contour-fallback", "radius": max(bw, bh) / 2,
                     "circularity": best_stats.circularity})


def _clamp_box(x: float, y: float, w: float, h: float,
               img_w: int, img_h: int) -> tuple[int, int, int, int]:
    x = max(0, _round_int(x))
    y = max(0, _round_int(y))
    return x, y, min(_round_int(w), img_w - x), min(_round_int(h), img_h - y)


def detect_for_domain(frame: Frame, spec: StimulusSpec,
                      water_params: WaterDetectorParams | None = None,
                      ball_params: BallDetectorParams | None = None) -> Detection:
    """Run the detector matching the spec's domain."""
    if spec.domain in (Domain.MOTION_2D, Domain.GRAVITY_2D):
        return detect_red_centroid(frame)
    if spec.domain == Domain.FLUIDS:
        return detect_water_level(frame, water_params or water_params_for(spec))
    return detect_ball(frame, ball_params)
