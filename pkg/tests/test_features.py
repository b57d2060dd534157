import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roi_ellipse.detect import Descriptor, Keypoint
from roi_ellipse.features import (
    AspectStats,
    FeatureMatrix,
    GroundTruth,
    SeedPoint,
    apply_scaler,
    aspect_stats,
    build_matrix,
    export_csv,
    label_keypoints,
    simulate_seed,
    standardize,
    weighted_distance,
)
from roi_ellipse.roi import EllipseROI, rasterize


def gt_from_bbox(x0, y0, w, h, shape=(64, 64)):
    mask = np.zeros(shape, bool)
    mask[y0 : y0 + h, x0 : x0 + w] = True
    return GroundTruth(mask)


def unit_desc(kind="surf64", n=64):
    v = np.zeros(n)
    v[0] = 1.0
    return Descriptor(kind=kind, values=v)


class TestGroundTruth:
    def test_requires_positive_pixel(self):
        with pytest.raises(ValueError, match="at least one positive pixel"):
            GroundTruth(np.zeros((8, 8), bool))

    def test_bbox_and_centroid(self):
        gt = gt_from_bbox(10, 20, 5, 3)
        assert (gt.bbox_x, gt.bbox_y) == (10, 20)
        assert (gt.bbox_width, gt.bbox_height) == (5, 3)
        assert gt.centroid_x == pytest.approx(12.0)
        assert gt.centroid_y == pytest.approx(21.0)

    def test_largest_component_kept(self):
        mask = np.zeros((32, 32), bool)
        mask[2:5, 2:5] = True  # 9 px
        mask[10:20, 10:20] = True  # 100 px
        gt = GroundTruth(mask)
        assert gt.mask.sum() == 100
        assert not gt.mask[3, 3]


class TestAspectStats:
    def test_single_mask(self):
        s = aspect_stats([gt_from_bbox(0, 0, 40, 20)])
        assert (s.mean_width, s.mean_height) == (40, 20)

    def test_two_masks_mean(self):
        s = aspect_stats([gt_from_bbox(0, 0, 40, 20), gt_from_bbox(1, 1, 60, 40)])
        assert (s.mean_width, s.mean_height) == (50, 30)

    def test_square_masks_unit_ratio(self):
        s = aspect_stats([gt_from_bbox(0, 0, 9, 9), gt_from_bbox(4, 4, 31, 31)])
        assert s.ratio == 1.0

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            aspect_stats([])


class TestWeightedDistance:
    def test_zero_at_seed(self):
        kp = Keypoint(x=10, y=12)
        seed = SeedPoint(x=10, y=12)
        assert weighted_distance(kp, seed, AspectStats(3, 4)) == 0.0

    def test_unit_ratio_is_euclidean(self):
        kp = Keypoint(x=3, y=4)
        seed = SeedPoint(x=0, y=0)
        assert weighted_distance(kp, seed, AspectStats(5, 5)) == pytest.approx(5.0)

    def test_paper_formula_double_width(self):
        # wbar = 2*hbar, offset (0, 7): y-term scaled by 2 -> distance 14
        kp = Keypoint(x=0, y=7)
        seed = SeedPoint(x=0, y=0)
        assert weighted_distance(kp, seed, AspectStats(2, 1)) == pytest.approx(14.0)

    def test_x_reflection_symmetry(self, rng):
        stats = AspectStats(13, 7)
        for _ in range(20):
            kx, ky, sx, sy = rng.uniform(0, 60, 4)
            mirror = 31.5
            d1 = weighted_distance(Keypoint(x=kx, y=ky), SeedPoint(x=sx, y=sy), stats)
            d2 = weighted_distance(
                Keypoint(x=2 * mirror - kx, y=ky), SeedPoint(x=2 * mirror - sx, y=sy), stats
            )
            assert d1 == pytest.approx(d2, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(
        kx=st.floats(0, 100),
        ky=st.floats(0, 100),
        sx=st.floats(0, 100),
        sy=st.floats(0, 100),
        w=st.floats(0.5, 50),
    )
    def test_unit_aspect_equals_euclidean(self, kx, ky, sx, sy, w):
        d = weighted_distance(Keypoint(x=kx, y=ky), SeedPoint(x=sx, y=sy), AspectStats(w, w))
        assert abs(d - math.hypot(kx - sx, ky - sy)) <= 1e-12

    def test_doubling_width_doubles_y_term(self):
        kp = Keypoint(x=0, y=5)
        seed = SeedPoint(x=0, y=0)
        d1 = weighted_distance(kp, seed, AspectStats(3, 3))
        d2 = weighted_distance(kp, seed, AspectStats(6, 3))
        assert d2 == pytest.approx(2 * d1)


class TestBuildMatrix:
    def test_empty_keypoints(self):
        fm = build_matrix([], [], SeedPoint(x=0, y=0), AspectStats(1, 1))
        assert fm.n_rows == 0 and fm.n_cols == 65

    def test_keypoint_at_seed_appends_zero(self):
        kp = Keypoint(x=5, y=5)
        fm = build_matrix([kp], [unit_desc()], SeedPoint(x=5, y=5), AspectStats(1, 1))
        assert fm.features[0, :64].tolist() == unit_desc().values.tolist()
        assert fm.features[0, 64] == 0.0

    def test_surf_column_count(self):
        kps = [Keypoint(x=1, y=2), Keypoint(x=3, y=4)]
        fm = build_matrix(kps, [unit_desc(), unit_desc()], SeedPoint(x=0, y=0), AspectStats(1, 1))
        assert fm.n_cols == 65
        assert fm.kind == "surf64"

    def test_row_order_matches_keypoints(self, rng):
        kps = [Keypoint(x=float(i * 2), y=float(i)) for i in range(5)]
        descs = [unit_desc() for _ in kps]
        fm = build_matrix(kps, descs, SeedPoint(x=0, y=0), AspectStats(1, 1))
        for i, kp in enumerate(kps):
            assert (fm.xy[i, 0], fm.xy[i, 1]) == (kp.x, kp.y)

    def test_mixed_kinds_rejected(self):
        kps = [Keypoint(x=1, y=1), Keypoint(x=2, y=2)]
        descs = [unit_desc("surf64"), unit_desc("surf64-at-fast")]
        with pytest.raises(ValueError, match="mixed descriptor kinds"):
            build_matrix(kps, descs, SeedPoint(x=0, y=0), AspectStats(1, 1))

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="align"):
            build_matrix([Keypoint(x=1, y=1)], [], SeedPoint(x=0, y=0), AspectStats(1, 1))

    def test_distance_column_nonnegative(self, rng):
        kps = [Keypoint(x=float(x), y=float(y)) for x, y in rng.uniform(0, 60, (30, 2))]
        descs = [unit_desc() for _ in kps]
        fm = build_matrix(kps, descs, SeedPoint(x=30, y=30), AspectStats(4, 3))
        assert (fm.distances >= 0).all()


class TestLabels:
    def test_centroid_of_filled_ellipse_is_tumour(self):
        mask = rasterize(EllipseROI(30, 30, 10, 8), 64, 64)
        gt = GroundTruth(mask)
        labels = label_keypoints([Keypoint(x=gt.centroid_x, y=gt.centroid_y)], gt)
        assert labels[0]

    def test_corner_not_tumour(self):
        gt = gt_from_bbox(20, 20, 10, 10)
        assert not label_keypoints([Keypoint(x=0, y=0)], gt)[0]

    def test_all_positive_mask(self):
        gt = GroundTruth(np.ones((16, 16), bool))
        kps = [Keypoint(x=float(i), y=float(i)) for i in range(10)]
        assert label_keypoints(kps, gt).all()

    def test_matches_direct_mask_lookup(self, rng):
        mask = rng.random((32, 32)) < 0.5
        mask[0, 0] = True  # ensure nonempty
        gt = GroundTruth(mask)
        kps = [
            Keypoint(x=float(x), y=float(y))
            for x, y in rng.uniform(0, 31.4, (50, 2))
        ]
        labels = label_keypoints(kps, gt)
        for kp, lab in zip(kps, labels):
            assert lab == gt.mask[round(kp.y), round(kp.x)]


class TestStandardize:
    def _fm(self, X):
        X = np.asarray(X, float)
        return FeatureMatrix(X, np.zeros((X.shape[0], 2)), "surf64")

    def test_constant_column_passthrough(self):
        train = self._fm([[5.0, 1.0], [5.0, 3.0]])
        test = self._fm([[5.0, 2.0]])
        tr, te, _ = standardize(train, test)
        assert (tr.features[:, 0] == 5.0).all()
        assert (te.features[:, 0] == 5.0).all()

    def test_plus_minus_one_already_standard(self):
        train = self._fm([[-1.0], [1.0]])
        tr, _, _ = standardize(train)
        assert tr.features[:, 0].tolist() == [-1.0, 1.0]

    def test_transformed_moments(self, rng):
        train = self._fm(rng.normal(3.0, 7.0, size=(200, 6)))
        tr, _, stats = standardize(train)
        assert np.abs(tr.features.mean(axis=0)).max() < 1e-9
        assert np.abs(tr.features.std(axis=0) - 1.0).max() < 1e-9

    def test_scaler_applies_train_stats_to_test(self, rng):
        train = self._fm(rng.normal(0, 2, size=(50, 3)))
        test = self._fm(rng.normal(0, 2, size=(20, 3)))
        _, te, stats = standardize(train, test)
        want = (test.features - stats.mean) / stats.std
        assert np.allclose(te.features, want)

    def test_empty_train_rejected(self):
        with pytest.raises(ValueError):
            standardize(self._fm(np.empty((0, 3))))


class TestSimulatedSeed:
    def test_within_jitter_radius(self, rng):
        gt = gt_from_bbox(20, 20, 20, 10)
        diag = math.hypot(20, 10)
        for _ in range(50):
            s = simulate_seed(gt, rng, jitter_frac=0.1)
            assert math.hypot(s.x - gt.centroid_x, s.y - gt.centroid_y) <= 0.1 * diag + 1e-9
            assert s.source == "simulated-from-gt"

    def test_deterministic_given_seed(self):
        gt = gt_from_bbox(10, 10, 12, 12)
        a = simulate_seed(gt, np.random.default_rng(9), 0.1)
        b = simulate_seed(gt, np.random.default_rng(9), 0.1)
        assert a == b


class TestCsvExport:
    def test_round_trip_header_and_values(self, tmp_path, rng):
        kps = [Keypoint(x=1.0, y=2.0), Keypoint(x=3.0, y=4.0)]
        descs = [unit_desc() for _ in kps]
        fm = build_matrix(kps, descs, SeedPoint(x=0, y=0), AspectStats(1, 1))
        fm = fm.with_labels(np.array([True, False]))
        path = tmp_path / "features.csv"
        export_csv(fm, path)
        lines = path.read_text().strip().splitlines()
        header = lines[0].split(",")
        assert header[:2] == ["f0", "f1"]
        assert header[64:] == ["dist", "label", "x", "y"]
        assert len(lines) == 3
        first = lines[1].split(",")
        assert float(first[-2]) == 1.0 and float(first[-1]) == 2.0
        assert first[-3] == "1"
