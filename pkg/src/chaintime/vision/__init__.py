"""From-scratch image-processing primitives used by the frame detectors.

Conventions shared by every function here:

- gray images are ``(H, W)`` uint8 arrays,
- color images are ``(H, W, 3|4)`` uint8 arrays (RGB byte order),
- binary masks are ``(H, W)`` bool arrays,
- HSV uses the 8-bit hexcone scale: H in [0, 179], S and V in [0, 255].

All primitives are pure, deterministic, and operate on owned copies;
each one matches a slow brute-force reference implementation (see the
test suite) on arbitrary inputs.
"""

from .color import rgb_to_gray, rgb_to_hsv, threshold_in_range
from .contours import ContourStats, external_contours
from .filters import canny, clahe, gaussian_blur, resize_area
from .hough import CircleCandidate, hough_circles
from .morph import MorphOp, morphology

__all__ = [
    "CircleCandidate",
    "ContourStats",
    "MorphOp",
    "canny",
    "clahe",
    "external_contours",
    "gaussian_blur",
    "hough_circles",
    "morphology",
    "resize_area",
    "rgb_to_gray",
    "rgb_to_hsv",
    "threshold_in_range",
]
