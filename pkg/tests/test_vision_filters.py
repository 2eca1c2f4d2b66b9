"""Blur, CLAHE, Canny, and area resize vs scalar references."""

import math

import numpy as np
import pytest

from chaintime.errors import ParameterError
from chaintime.vision import canny, clahe, gaussian_blur, resize_area

from reference_impl import ref_canny, ref_clahe, ref_gaussian_blur, ref_resize_area


def disc_image(h, w, cx, cy, r, fg=200, bg=30):
    yy, xx = np.mgrid[0:h, 0:w]
    img = np.full((h, w), bg, dtype=np.uint8)
    img[(xx - cx) ** 2 + (yy - cy) ** 2 <= r * r] = fg
    return img


class TestGaussianBlur:
    def test_constant_unchanged(self):
        img = np.full((16, 16), 93, dtype=np.uint8)
        assert np.array_equal(gaussian_blur(img), img)

    def test_impulse_gives_sampled_kernel(self):
        img = np.zeros((15, 15), dtype=np.uint8)
        img[7, 7] = 255
        out = gaussian_blur(img, 7, 1.5)
        # direct kernel evaluation
        w = [math.exp(-((i - 3) ** 2) / (2 * 1.5 ** 2)) for i in range(7)]
        total = sum(w)
        for dy in range(-3, 4):
            for dx in range(-3, 4):
                want = 255.0 * (w[dy + 3] / total) * (w[dx + 3] / total)
                assert abs(int(out[7 + dy, 7 + dx]) - want) <= 1.0

    def test_sum_preserved(self):
        rng = np.random.default_rng(2)
        img = rng.integers(0, 256, size=(128, 128), dtype=np.uint8)
        out = gaussian_blur(img)
        assert abs(int(out.sum()) - int(img.sum())) <= 0.001 * img.sum()

    def test_even_kernel_rejected(self):
        with pytest.raises(ParameterError):
            gaussian_blur(np.zeros((8, 8), dtype=np.uint8), kernel=6)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            h, w = rng.integers(3, 17, size=2)
            img = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
            k = int(rng.choice([3, 5, 7]))
            sigma = float(rng.uniform(0.6, 2.5))
            assert np.array_equal(gaussian_blur(img, k, sigma),
                                  ref_gaussian_blur(img, k, sigma))


class TestClahe:
    def test_constant_gives_constant(self):
        img = np.full((32, 32), 77, dtype=np.uint8)
        out = clahe(img)
        assert (out == out[0, 0]).all()

    def test_two_level_order_preserved(self):
        rng = np.random.default_rng(6)
        img = np.where(rng.random((32, 32)) < 0.4, 50, 200).astype(np.uint8)
        out = clahe(img)
        lo = out[img == 50]
        hi = out[img == 200]
        assert lo.max() <= hi.min()

    def test_ramp_range_expands(self):
        ramp = np.tile(np.linspace(100, 140, 32).astype(np.uint8), (32, 1))
        out = clahe(ramp)
        assert (int(out.max()) - int(out.min())) >= (int(ramp.max()) - int(ramp.min()))

    def test_too_small_rejected(self):
        with pytest.raises(ParameterError):
            clahe(np.zeros((4, 4), dtype=np.uint8))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            h, w = rng.integers(8, 33, size=2)
            img = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
            clip = float(rng.uniform(1.0, 4.0))
            assert np.array_equal(clahe(img, clip, (8, 8)),
                                  ref_clahe(img, clip, (8, 8)))


class TestCanny:
    def test_constant_no_edges(self):
        assert not canny(np.full((16, 16), 120, dtype=np.uint8), 50, 100).any()

    def test_vertical_step_single_line(self):
        img = np.zeros((16, 16), dtype=np.uint8)
        img[:, 8:] = 255
        edges = canny(img, 100, 200)
        cols = np.nonzero(edges.any(axis=0))[0]
        assert len(cols) == 1
        assert edges[:, cols[0]].all()

    def test_disc_edges_near_true_circle(self):
        img = disc_image(96, 96, 48, 48, 30)
        edges = canny(img, 60, 120)
        ys, xs = np.nonzero(edges)
        assert len(ys) > 0
        d = np.abs(np.hypot(xs - 48.0, ys - 48.0) - 30.0)
        assert d.max() <= 1.5

    def test_bad_thresholds_rejected(self):
        with pytest.raises(ParameterError):
            canny(np.zeros((8, 8), dtype=np.uint8), 100, 50)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            h, w = rng.integers(4, 21, size=2)
            img = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
            low = float(rng.uniform(20, 120))
            high = low + float(rng.uniform(0, 200))
            assert np.array_equal(canny(img, low, high), ref_canny(img, low, high))


class TestResizeArea:
    def test_two_by_two_block(self):
        img = np.array([[0, 0], [255, 255]], dtype=np.uint8)
        assert resize_area(img, 1, 1)[0, 0] == 128  # 127.5 rounds half up

    def test_identity(self):
        rng = np.random.default_rng(12)
        img = rng.integers(0, 256, size=(9, 7), dtype=np.uint8)
        assert np.array_equal(resize_area(img, 7, 9), img)

    def test_integer_downscale_preserves_mean(self):
        rng = np.random.default_rng(14)
        img = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
        out = resize_area(img, 32, 32)
        assert abs(out.mean() - img.mean()) <= 0.5

    def test_zero_target_rejected(self):
        with pytest.raises(ParameterError):
            resize_area(np.zeros((4, 4), dtype=np.uint8), 0, 2)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(16)
        for i in range(200):
            h, w = rng.integers(2, 15, size=2)
            nh, nw = rng.integers(1, 13, size=2)
            if i % 4 == 0:  # multi-channel path
                img = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
            else:
                img = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
            assert np.array_equal(resize_area(img, int(nw), int(nh)),
                                  ref_resize_area(img, int(nw), int(nh)))
