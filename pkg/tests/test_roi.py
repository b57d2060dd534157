import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roi_ellipse.roi import (
    EllipseFitError,
    EllipseROI,
    clamp_to_image,
    dice,
    filter_distance_outliers,
    fit_ellipse,
    rasterize,
)

from oracles import dice_pixel_count_oracle


class TestFitEllipse:
    def test_symmetric_cross(self):
        e = fit_ellipse([(10, 20), (30, 20), (20, 10), (20, 30)])
        assert (e.center_x, e.center_y) == (20, 20)
        assert (e.semi_axis_x, e.semi_axis_y) == (10, 10)

    def test_collinear_is_degenerate(self):
        e = fit_ellipse([(5, 1), (5, 9), (5, 4)])
        assert e.semi_axis_x == 0 and e.degenerate

    def test_bbox_corners_equal_full_cloud(self, rng):
        pts = rng.uniform(0, 100, size=(40, 2))
        full = fit_ellipse(pts)
        corners = [
            (pts[:, 0].min(), pts[:, 1].min()),
            (pts[:, 0].min(), pts[:, 1].max()),
            (pts[:, 0].max(), pts[:, 1].min()),
            (pts[:, 0].max(), pts[:, 1].max()),
        ]
        reduced = fit_ellipse(corners)
        assert reduced == full

    def test_too_few_points(self):
        with pytest.raises(EllipseFitError, match="insufficient tumour evidence"):
            fit_ellipse([(1, 2), (3, 4)])

    def test_order_and_duplication_invariance(self, rng):
        pts = rng.uniform(0, 50, size=(20, 2))
        shuffled = pts[rng.permutation(20)]
        with_dupes = np.vstack([pts, pts[5:15]])
        assert fit_ellipse(pts) == fit_ellipse(shuffled) == fit_ellipse(with_dupes)

    def test_bounding_box_equals_point_bbox(self, rng):
        pts = rng.uniform(0, 200, size=(25, 2))
        e = fit_ellipse(pts)
        assert e.center_x - e.semi_axis_x == pytest.approx(pts[:, 0].min())
        assert e.center_x + e.semi_axis_x == pytest.approx(pts[:, 0].max())
        assert e.center_y - e.semi_axis_y == pytest.approx(pts[:, 1].min())
        assert e.center_y + e.semi_axis_y == pytest.approx(pts[:, 1].max())


class TestClamp:
    def test_inside_untouched(self):
        e = EllipseROI(20, 20, 5, 5)
        assert clamp_to_image(e, 64, 64) is e

    def test_clamps_and_records(self):
        e = EllipseROI(2, 2, 5, 5)
        c = clamp_to_image(e, 64, 64)
        assert c.clamped
        assert c.center_x - c.semi_axis_x == 0


class TestRasterize:
    def test_tiny_ellipse_single_pixel(self):
        # centred on the pixel centre of (5, 5)
        mask = rasterize(EllipseROI(5.5, 5.5, 0.4, 0.4), 12, 12)
        assert mask.sum() == 1 and mask[5, 5]

    def test_zero_area_empty(self):
        assert rasterize(EllipseROI(5, 5, 0, 3), 10, 10).sum() == 0

    @pytest.mark.parametrize("r", [10, 20])
    def test_circle_pixel_count_near_area(self, r):
        mask = rasterize(EllipseROI(32.0, 32.0, r, r), 64, 64)
        # pixel-centre count oracle
        ys, xs = np.mgrid[0:64, 0:64]
        inside = ((xs + 0.5 - 32.0) ** 2 + (ys + 0.5 - 32.0) ** 2) <= r * r
        assert mask.sum() == inside.sum()
        assert abs(int(mask.sum()) - math.pi * r * r) < 4 * r

    def test_monotone_in_axes(self, rng):
        base = rasterize(EllipseROI(20, 15, 6, 9), 40, 40)
        grown = rasterize(EllipseROI(20, 15, 8, 9), 40, 40)
        assert (base <= grown).all()


class TestDice:
    def test_identical(self):
        m = np.zeros((8, 8), bool)
        m[2:5, 2:5] = True
        assert dice(m, m).value == 1.0

    def test_disjoint(self):
        a = np.zeros((8, 8), bool)
        b = np.zeros((8, 8), bool)
        a[0:2, 0:2] = True
        b[5:7, 5:7] = True
        assert dice(a, b).value == 0.0

    def test_direct_formula(self):
        a = np.zeros((20, 20), bool)
        b = np.zeros((20, 20), bool)
        a[:10, :10] = True  # 100 px
        b[5:15, :10] = True  # 100 px, overlap = 50
        score = dice(a, b)
        assert score.value == 0.5
        assert (score.area_e, score.area_g, score.area_overlap) == (100, 100, 50)

    def test_both_empty_is_vacuous_one(self):
        z = np.zeros((4, 4), bool)
        assert dice(z, z).value == 1.0

    def test_empty_vs_nonempty(self):
        a = np.zeros((4, 4), bool)
        b = np.zeros((4, 4), bool)
        b[1, 1] = True
        assert dice(a, b).value == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimensions differ"):
            dice(np.zeros((3, 3), bool), np.zeros((4, 4), bool))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_symmetry_property(self, seed):
        r = np.random.default_rng(seed)
        a = r.random((12, 12)) < 0.4
        b = r.random((12, 12)) < 0.4
        ab, ba = dice(a, b), dice(b, a)
        assert ab.value == ba.value
        assert ab.area_overlap == ba.area_overlap
        assert (ab.area_e, ab.area_g) == (ba.area_g, ba.area_e)

    def test_random_pairs_match_pixel_count_oracle(self, rng):
        for _ in range(50):
            a = rng.random((16, 16)) < rng.uniform(0.0, 0.6)
            b = rng.random((16, 16)) < rng.uniform(0.0, 0.6)
            got = dice(a, b).value
            expected = dice_pixel_count_oracle(a, b)
            assert abs(got - float(expected)) <= 1e-12


class TestOutlierFilter:
    def test_percentile_filtering(self):
        pts = np.array([[0, 0], [1, 1], [2, 2], [100, 100]], float)
        d = np.array([1.0, 1.5, 2.0, 99.0])
        kept = filter_distance_outliers(pts, d, percentile=75.0)
        assert len(kept) == 3

    def test_empty_passthrough(self):
        out = filter_distance_outliers(np.empty((0, 2)), np.empty(0))
        assert out.shape == (0, 2)
