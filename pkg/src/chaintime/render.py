"""Deterministic rasterization of world states into stimulus frames.

Discs and squash ellipses are anti-aliased with a 4x4 supersampled
coverage grid evaluated in integer arithmetic (coordinates quantized to
1/8 px), so output is bit-identical across runs and platforms.  Water,
mug, pipe, and ground geometry are hard-edged axis-aligned rectangles,
which keeps every non-ball pixel outside the detector color windows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ContractViolationError, OutOfFrameError
from .physics import Domain, StimulusSpec, WorldState

WHITE = (255, 255, 255)
RED = (255, 0, 0)
SKY_BG = (230, 240, 255)      # light sky-blue, saturation below the water window
WATER_BLUE = (60, 150, 230)   # hue 104 in the [90,130] water window
PIPE_GREY = (90, 90, 90)
MUG_GREY = (180, 180, 180)
BOUNCE_BG = (235, 235, 235)
BOUNCE_BALL = (40, 110, 60)   # dark green: outside both red and water windows
GROUND_GREY = (60, 60, 60)

SQUASH_HEIGHT_SCALE = 0.7     # During-phase ellipse height factor


class Provenance(str, enum.Enum):
    INPUT = "input"
    GENERATED = "generated"
    ORACLE_RENDERED = "rendered-oracle"


@dataclass
class Frame:
    width_px: int
    height_px: int
    channels: int
    pixels: np.ndarray  # (H, W, C) uint8, row-major
    time_sec: float
    provenance: Provenance

    def __post_init__(self):
        if self.pixels.shape != (self.height_px, self.width_px, self.channels):
            raise ContractViolationError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height_px}x{self.width_px}x{self.channels}")
        if self.pixels.dtype != np.uint8:
            raise ContractViolationError("pixel buffer must be uint8")
        if self.channels not in (3, 4):
            raise ContractViolationError("frames are RGB or RGBA")
        if self.time_sec < 0:
            raise ContractViolationError("frame time must be >= 0")

    @classmethod
    def from_array(cls, pixels: np.ndarray, time_sec: float,
                   provenance: Provenance) -> "Frame":
        h, w, c = pixels.shape
        return cls(w, h, c, np.ascontiguousarray(pixels, dtype=np.uint8),
                   time_sec, provenance)


@dataclass(frozen=True)
class Rect:
    """Half-open pixel rectangle [x0, x1) x [y0, y1)."""
    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0


@dataclass(frozen=True)
class CanvasStyle:
    background_color: tuple[int, int, int] = WHITE
    ball_color: tuple[int, int, int] = RED
    ball_radius_px: float = 40.0
    water_color: tuple[int, int, int] = WATER_BLUE
    mug_geometry: Rect | None = None   # inner wall bounds
    pipe_geometry: Rect | None = None
    wall_color: tuple[int, int, int] = MUG_GREY
    pipe_color: tuple[int, int, int] = PIPE_GREY
    wall_thickness_px: int = 6
    stream_width_px: int = 3
    ground_line_y: int | None = None
    ground_line_color: tuple[int, int, int] = GROUND_GREY
    ground_line_thickness_px: int = 5


MUG_INNER_WIDTHS = {"small": 240, "medium": 320, "large": 400}
MUG_INNER_HEIGHT = 600
MUG_INNER_BOTTOM = 900
PIPE_BOTTOM = 200
PIPE_WIDTH = 40


def fluid_geometry(spec: StimulusSpec) -> tuple[Rect, Rect]:
    """Mug inner bounds and pipe rect, scaled off the 1024px reference canvas."""
    w, h = spec.canvas_width, spec.canvas_height
    sx, sy = w / 1024.0, h / 1024.0
    inner_w = round(MUG_INNER_WIDTHS[spec.params.mug_size.value] * sx)
    inner_h = round(MUG_INNER_HEIGHT * sy)
    bottom = round(MUG_INNER_BOTTOM * sy)
    left = (w - inner_w) // 2
    mug = Rect(left, bottom - inner_h, left + inner_w, bottom)
    pipe_w = round(PIPE_WIDTH * sx)
    pipe_left = (w - pipe_w) // 2
    pipe = Rect(pipe_left, 0, pipe_left + pipe_w, round(PIPE_BOTTOM * sy))
    return mug, pipe


def default_style(spec: StimulusSpec) -> CanvasStyle:
    if spec.domain in (Domain.MOTION_2D, Domain.GRAVITY_2D):
        return CanvasStyle()
    if spec.domain == Domain.FLUIDS:
        mug, pipe = fluid_geometry(spec)
        return CanvasStyle(background_color=SKY_BG, mug_geometry=mug,
                           pipe_geometry=pipe)
    return CanvasStyle(background_color=BOUNCE_BG, ball_color=BOUNCE_BALL,
                       ball_radius_px=spec.params.ball_radius_px,
                       ground_line_y=round(spec.params.ground_y))


def water_top_row(fill_fraction: float, mug: Rect) -> int:
    """Topmost water row for a fill fraction (rounded half up)."""
    return int(np.floor(mug.y1 - fill_fraction * mug.height + 0.5))


def _fill_rect(px: np.ndarray, rect: Rect, color: tuple[int, int, int]) -> None:
    y0, y1 = max(0, rect.y0), min(px.shape[0], rect.y1)
    x0, x1 = max(0, rect.x0), min(px.shape[1], rect.x1)
    if y0 < y1 and x0 < x1:
        px[y0:y1, x0:x1] = color


def _blend_ellipse(px: np.ndarray, cx: float, cy: float, rx: float, ry: float,
                   color: tuple[int, int, int]) -> None:
    """Composite an anti-aliased ellipse via 16-sample integer coverage.

    Raises OutOfFrameError when the shape lies fully outside the canvas.
    """
    h, w = px.shape[:2]
    if cx + rx < 0 or cx - rx > w - 1 or cy + ry < 0 or cy - ry > h - 1:
        raise OutOfFrameError(
            f"shape at ({cx:.1f}, {cy:.1f}) r=({rx:.1f}, {ry:.1f}) "
            f"is outside the {w}x{h} canvas")
    # Work in 1/8-pixel integer units; pixel index i is centered on
    # continuous coordinate i, with subsamples at i +- 1/8 and i +- 3/8.
    cx8, cy8 = round(cx * 8), round(cy * 8)
    rx8, ry8 = round(rx * 8), round(ry * 8)
    x0 = max(0, (cx8 - rx8) // 8 - 1)
    x1 = min(w - 1, (cx8 + rx8) // 8 + 2)
    y0 = max(0, (cy8 - ry8) // 8 - 1)
    y1 = min(h - 1, (cy8 + ry8) // 8 + 2)
    xs = np.arange(x0, x1 + 1, dtype=np.int64)
    ys = np.arange(y0, y1 + 1, dtype=np.int64)
    sub = np.array([-3, -1, 1, 3], dtype=np.int64)
    dx = xs[:, None] * 8 + sub[None, :] - cx8          # (nx, 4)
    dy = ys[:, None] * 8 + sub[None, :] - cy8          # (ny, 4)
    # Inside test (dx*ry)^2 + (dy*rx)^2 <= (rx*ry)^2, exact in int64.
    tx = (dx * ry8) ** 2
    ty = (dy * rx8) ** 2
    rr = (rx8 * ry8) ** 2
    inside = tx[None, :, None, :] + ty[:, None, :, None] <= rr
    cov = inside.sum(axis=(2, 3)).astype(np.uint16)    # (ny, nx) in 0..16
    region = px[y0:y1 + 1, x0:x1 + 1].astype(np.uint16)
    col = np.array(color, dtype=np.uint16)
    blended = (region * (16 - cov[..., None]) + col * cov[..., None] + 8) // 16
    px[y0:y1 + 1, x0:x1 + 1] = blended.astype(np.uint8)


def render_scene(state: WorldState, spec: StimulusSpec,
                 style: CanvasStyle | None = None,
                 provenance: Provenance = Provenance.INPUT) -> Frame:
    """Rasterize one state; same inputs produce a bit-identical frame."""
    if state.domain != spec.domain:
        raise ContractViolationError("state domain does not match spec")
    if style is None:
        style = default_style(spec)
    w, h = spec.canvas_width, spec.canvas_height
    px = np.empty((h, w, 3), dtype=np.uint8)
    px[:] = style.background_color

    if spec.domain in (Domain.MOTION_2D, Domain.GRAVITY_2D):
        x, y = state.ball_pos
        r = style.ball_radius_px
        _blend_ellipse(px, x, y, r, r, style.ball_color)
    elif spec.domain == Domain.FLUIDS:
        mug = style.mug_geometry
        pipe = style.pipe_geometry
        t = style.wall_thickness_px
        _fill_rect(px, pipe, style.pipe_color)
        _fill_rect(px, Rect(mug.x0 - t, mug.y0, mug.x0, mug.y1 + t), style.wall_color)
        _fill_rect(px, Rect(mug.x1, mug.y0, mug.x1 + t, mug.y1 + t), style.wall_color)
        _fill_rect(px, Rect(mug.x0 - t, mug.y1, mug.x1 + t, mug.y1 + t), style.wall_color)
        top = water_top_row(state.fill_fraction, mug)
        _fill_rect(px, Rect(mug.x0, top, mug.x1, mug.y1), style.water_color)
        if top > pipe.y1:
            sw = style.stream_width_px
            sx0 = (mug.x0 + mug.x1 - sw) // 2
            _fill_rect(px, Rect(sx0, pipe.y1, sx0 + sw, top), style.water_color)
    else:
        gy = style.ground_line_y
        _fill_rect(px, Rect(0, gy, w, gy + style.ground_line_thickness_px),
                   style.ground_line_color)
        x, y = state.ball_pos
        r = style.ball_radius_px
        if state.contact_elapsed_sec is not None:
            # Deformation: squashed ellipse with its bottom kept on the ground.
            ry = SQUASH_HEIGHT_SCALE * r
            _blend_ellipse(px, x, gy - ry, r, ry, style.ball_color)
        else:
            _blend_ellipse(px, x, y, r, r, style.ball_color)

    return Frame.from_array(px, max(0.0, state.time_sec), provenance)


def with_alpha(frame: Frame, alpha: int = 255) -> Frame:
    """RGBA copy of an RGB frame with constant alpha."""
    rgba = np.dstack([frame.pixels[..., :3],
                      np.full((frame.height_px, frame.width_px), alpha, np.uint8)])
    return Frame.from_array(rgba, frame.time_sec, frame.provenance)


def frame_filename(time_sec: float) -> str:
    return f"frame_{round(time_sec * 1000):06d}ms.png"


def save_frame(frame: Frame, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "RGBA" if frame.channels == 4 else "RGB"
    tmp = path.with_name(path.name + ".tmp")
    Image.fromarray(frame.pixels, mode=mode).save(tmp, format="PNG")
    tmp.replace(path)


def load_frame(path: str | Path, time_sec: float = 0.0,
               provenance: Provenance = Provenance.GENERATED) -> Frame:
    img = Image.open(path)
    if img.mode not in ("RGB", "RGBA"):
        img = img.convert("RGB")
    return Frame.from_array(np.asarray(img), time_sec, provenance)


def render_input_frames(spec: StimulusSpec, style: CanvasStyle | None = None) -> list[Frame]:
    """The stimulus input frames at the spec's frame times."""
    from .physics import ground_truth_trajectory

    states = ground_truth_trajectory(spec, list(spec.input_frame_times))
    return [render_scene(s, spec, style, Provenance.INPUT) for s in states]
