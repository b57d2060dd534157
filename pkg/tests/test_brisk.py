import math

import numpy as np

from roi_ellipse.detect import DetectorConfig
from roi_ellipse.detect.brisk import (
    _PATTERN_POS,
    _PATTERN_SIGMA,
    _SHORT_PAIRS,
    detect_brisk,
)
from roi_ellipse.imgcore import GrayImage

from conftest import constant_image, random_image


def shapes_image(size=96):
    """High-contrast test pattern: anti-aliased solid shapes.

    Rendered at 4x and smoothed before downsampling so edges are band-
    limited like real imagery; razor-sharp synthetic edges make keypoint
    orientation ill-conditioned at perfectly symmetric corners.
    """
    from numpy.lib.stride_tricks import sliding_window_view

    from roi_ellipse.imgcore import resize_bilinear

    big = np.full((size * 4, size * 4), 30.0)
    big[48:136, 56:160] = 220
    big[200:320, 40:120] = 140
    big[80:176, 232:344] = 90
    big[240:352, 192:312] = 250
    for i in range(72):
        big[152 + i, 160 : 164 + i] = 180
    for _ in range(2):
        padded = np.pad(big, 2, mode="edge")
        big = sliding_window_view(padded, (5, 5)).mean(axis=(2, 3))
    small = resize_bilinear(big, size, size)
    return GrayImage(np.clip(np.rint(small), 0, 255).astype(np.uint8))


class TestPattern:
    def test_sixty_points_concentric(self):
        assert _PATTERN_POS.shape == (60, 2)
        radii = np.hypot(_PATTERN_POS[:, 0], _PATTERN_POS[:, 1])
        assert sorted(set(np.round(radii, 6))) == [0.0, 2.9, 4.9, 7.4, 10.8]

    def test_exactly_512_short_pairs(self):
        assert _SHORT_PAIRS.shape == (512, 2)

    def test_smoothing_grows_with_ring(self):
        radii = np.hypot(_PATTERN_POS[:, 0], _PATTERN_POS[:, 1])
        outer = _PATTERN_SIGMA[radii > 10.0]
        inner = _PATTERN_SIGMA[(radii > 1.0) & (radii < 3.0)]
        assert outer.min() > inner.max()


class TestDetectBrisk:
    def test_constant_image_empty(self):
        assert detect_brisk(constant_image(90)) == []

    def test_descriptor_is_512_bits(self, rng):
        img = random_image(rng, 64, 64)
        pairs = detect_brisk(img)
        assert pairs
        for _, desc in pairs[:30]:
            assert desc.kind == "brisk512"
            assert desc.values.shape == (512,)
            assert set(np.unique(desc.values)).issubset({0, 1})

    def test_keypoints_in_bounds_with_positive_scale(self, rng):
        img = random_image(rng, 64, 64)
        for kp, _ in detect_brisk(img):
            assert 0 <= kp.x < 64 and 0 <= kp.y < 64
            assert kp.scale > 0

    def test_deterministic(self, rng):
        img = random_image(rng, 64, 64)
        a = detect_brisk(img)
        b = detect_brisk(img)
        assert len(a) == len(b)
        for (ka, da), (kb, db) in zip(a, b):
            assert ka == kb
            assert np.array_equal(da.values, db.values)

    def test_rotation_90_hamming_within_bound(self):
        img = shapes_image()
        w = img.width
        cfg = DetectorConfig(brisk_threshold=40)
        orig = detect_brisk(img, cfg)
        rot = detect_brisk(GrayImage(np.rot90(img.pixels).copy()), cfg)
        assert orig and rot
        rot_xy = np.array([[kp.x, kp.y] for kp, _ in rot])
        rot_scale = np.array([kp.scale for kp, _ in rot])
        matched = 0
        for kp, desc in orig:
            # CCW rotation maps (x, y) -> (y, w - 1 - x) and preserves scale;
            # coincident keypoints at different scales disambiguate by scale
            expected = np.array([kp.y, w - 1 - kp.x])
            d = np.hypot(rot_xy[:, 0] - expected[0], rot_xy[:, 1] - expected[1])
            d = d + np.where(np.abs(rot_scale - kp.scale) < 1e-9, 0.0, 1e6)
            j = int(np.argmin(d))
            if d[j] > 0.5:
                continue
            matched += 1
            hamming = int((desc.values != rot[j][1].values).sum())
            assert hamming <= 96, f"keypoint at ({kp.x},{kp.y}) drifted {hamming} bits"
        assert matched >= max(3, len(orig) // 2)

    def test_max_keypoints(self, rng):
        img = random_image(rng, 96, 96)
        cfg = DetectorConfig(max_keypoints=12)
        assert len(detect_brisk(img, cfg)) <= 12

    def test_orientation_range(self, rng):
        img = random_image(rng, 64, 64)
        for kp, _ in detect_brisk(img):
            assert 0.0 <= kp.orientation < 2.0 * math.pi
