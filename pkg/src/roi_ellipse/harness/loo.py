"""Leave-one-out evaluation and the shared click-to-ellipse pipeline.

For each held-out image the harness trains on the remaining images only:
mean segment dimensions, feature scaling, and the SVM itself all come from
the training fold, so no test ground truth leaks into any training
artifact. Per-image randomness (simulated clicks, clustering seeds) is
derived by hashing the master seed with the image id, making full runs
reproducible bit-for-bit and insensitive to dataset reordering.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..classify import svm_predict, svm_train
from ..classify.clustering import fcm_fit, kmeans_assign, kmeans_fit
from ..classify.svm import grid_search_train
from ..detect import FEATURE_KINDS, DetectorConfig, detect_keypoints
from ..features import (
    AspectStats,
    FeatureMatrix,
    GroundTruth,
    ScalerStats,
    SeedPoint,
    apply_scaler,
    aspect_stats,
    build_matrix,
    label_keypoints,
    load_ground_truth,
    simulate_seed,
    weighted_distances,
)
from ..imgcore import GrayImage, load_image
from ..preprocess import PreprocessParams, preprocess
from ..roi import (
    DiceScore,
    EllipseFitError,
    EllipseROI,
    clamp_to_image,
    dice,
    filter_distance_outliers,
    fit_ellipse,
    rasterize,
)
from .dataset import Dataset, DatasetError
from .report import EvalReport, ReportRow
from .seeds import derive_seed

CLASSIFIER_KINDS = ("svm", "kmeans", "fcm")


@dataclass(frozen=True)
class PipelineConfig:
    preprocess: PreprocessParams = field(default_factory=PreprocessParams)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    svm_c: float = 10.0
    svm_gamma: float | None = None  # None -> 1 / feature count
    svm_balanced: bool = True
    svm_grid: bool = False
    svm_tol: float = 1e-3
    fcm_fuzzifier: float = 2.0
    jitter: float = 0.1
    augment_distance: bool = True
    outlier_filter: bool = False
    outlier_percentile: float = 95.0
    # folds pool keypoints from every training image; capping the pooled row
    # count keeps the kernel matrix at desk scale
    max_train_rows: int = 3000
    master_seed: int = 42
    workers: int = 1


@dataclass
class ImageContext:
    """Fold-independent per-image artifacts (detection is shared by folds)."""

    image_id: str
    width: int
    height: int
    gt: GroundTruth
    keypoints: list
    desc_matrix: np.ndarray  # (n, m)
    xy: np.ndarray  # (n, 2)
    labels: np.ndarray  # (n,) bool
    seed_point: SeedPoint
    detect_ms: float


def _image_context(record, feature_kind: str, cfg: PipelineConfig) -> ImageContext:
    img = load_image(record.image_path)
    gt = load_ground_truth(record.mask_path)
    if (gt.height, gt.width) != (img.height, img.width):
        raise DatasetError(
            f"{record.image_id}: mask dimensions {gt.width}x{gt.height} != "
            f"image {img.width}x{img.height}"
        )
    pre = preprocess(img, cfg.preprocess)
    t0 = time.perf_counter()
    kps, descs = detect_keypoints(pre, feature_kind, cfg.detector)
    detect_ms = (time.perf_counter() - t0) * 1000.0
    if record.seed is not None:
        seed_point = record.seed
    else:
        rng = np.random.default_rng(derive_seed(cfg.master_seed, "click", record.image_id))
        seed_point = simulate_seed(gt, rng, cfg.jitter)
    xy = np.array([[kp.x, kp.y] for kp in kps], dtype=np.float64).reshape(-1, 2)
    desc_matrix = (
        np.stack([d.values.astype(np.float64) for d in descs])
        if descs
        else np.empty((0, 64))
    )
    return ImageContext(
        image_id=record.image_id,
        width=img.width,
        height=img.height,
        gt=gt,
        keypoints=kps,
        desc_matrix=desc_matrix,
        xy=xy,
        labels=label_keypoints(kps, gt),
        seed_point=seed_point,
        detect_ms=detect_ms,
    )


def _feature_rows(ctx: ImageContext, aspect: AspectStats, augment: bool) -> np.ndarray:
    if not augment:
        return ctx.desc_matrix
    dist = weighted_distances(ctx.xy, ctx.seed_point, aspect)
    return np.hstack([ctx.desc_matrix, dist[:, None]])


def _subsample_rows(X: np.ndarray, y: np.ndarray, cap: int, seed: int):
    """Deterministic per-class proportional subsample preserving row order."""
    n = X.shape[0]
    if n <= cap:
        return X, y
    rng = np.random.default_rng(seed)
    pos_idx = np.nonzero(y)[0]
    neg_idx = np.nonzero(~y)[0]
    n_pos_keep = min(len(pos_idx), max(1, round(cap * len(pos_idx) / n)))
    n_neg_keep = min(len(neg_idx), cap - n_pos_keep)
    keep = np.concatenate(
        [
            rng.choice(pos_idx, size=n_pos_keep, replace=False),
            rng.choice(neg_idx, size=n_neg_keep, replace=False),
        ]
    )
    keep.sort()
    return X[keep], y[keep]


def _ellipsify(
    pts: np.ndarray,
    distances: np.ndarray,
    width: int,
    height: int,
    cfg: PipelineConfig,
) -> EllipseROI:
    if cfg.outlier_filter and pts.shape[0] >= 3:
        pts = filter_distance_outliers(pts, distances, cfg.outlier_percentile)
    e = fit_ellipse(pts)
    return clamp_to_image(e, width, height)


def _score_fold(
    ctx: ImageContext, tumour: np.ndarray, aspect: AspectStats, cfg: PipelineConfig
):
    pts = ctx.xy[tumour]
    distances = weighted_distances(pts.reshape(-1, 2), ctx.seed_point, aspect)
    t0 = time.perf_counter()
    e = _ellipsify(pts, distances, ctx.width, ctx.height, cfg)
    mask = rasterize(e, ctx.width, ctx.height)
    score = dice(mask, ctx.gt.mask)
    ms = (time.perf_counter() - t0) * 1000.0
    return score, e, ms


def _eval_one_svm(contexts, test_idx: int, cfg: PipelineConfig):
    test = contexts[test_idx]
    train = [c for i, c in enumerate(contexts) if i != test_idx]
    aspect = aspect_stats([c.gt for c in train])
    t0 = time.perf_counter()
    X_train = np.vstack([_feature_rows(c, aspect, cfg.augment_distance) for c in train])
    y_train = np.concatenate([c.labels for c in train])
    X_train, y_train = _subsample_rows(
        X_train,
        y_train,
        cfg.max_train_rows,
        derive_seed(cfg.master_seed, "subsample", test.image_id),
    )
    scaler = ScalerStats(mean=X_train.mean(axis=0), std=X_train.std(axis=0))
    X_train = apply_scaler(scaler, X_train)
    if cfg.svm_grid:
        model = grid_search_train(
            X_train,
            y_train,
            seed=derive_seed(cfg.master_seed, "grid", test.image_id),
            balanced=cfg.svm_balanced,
            tol=cfg.svm_tol,
        )
    else:
        model = svm_train(
            X_train,
            y_train,
            C=cfg.svm_c,
            gamma=cfg.svm_gamma,
            tol=cfg.svm_tol,
            balanced=cfg.svm_balanced,
        )
    train_ms = (time.perf_counter() - t0) * 1000.0
    t0 = time.perf_counter()
    X_test = apply_scaler(scaler, _feature_rows(test, aspect, cfg.augment_distance))
    tumour = svm_predict(model, X_test)
    predict_ms = (time.perf_counter() - t0) * 1000.0
    score, _, ellipsify_ms = _score_fold(test, tumour, aspect, cfg)
    timing = {"train": train_ms, "predict": predict_ms, "ellipsify": ellipsify_ms}
    return score, timing, [c.image_id for c in train]


def _eval_one_cluster(contexts, test_idx: int, classifier: str, cfg: PipelineConfig):
    test = contexts[test_idx]
    train = [c for i, c in enumerate(contexts) if i != test_idx]
    aspect = aspect_stats([c.gt for c in train])
    t0 = time.perf_counter()
    X_full = _feature_rows(test, aspect, True)  # distance needed for cluster labeling
    X_feat = X_full if cfg.augment_distance else X_full[:, :-1]
    # clustering needs no labels, so it standardizes on the image's own matrix
    scaler = ScalerStats(mean=X_feat.mean(axis=0), std=X_feat.std(axis=0))
    X_std = apply_scaler(scaler, X_feat)
    seed = derive_seed(cfg.master_seed, classifier, test.image_id)
    if classifier == "kmeans":
        model = kmeans_fit(X_std, k=2, seed=seed)
        assign = kmeans_assign(model, X_std)
    else:
        model, u = fcm_fit(X_std, c=2, fuzzifier=cfg.fcm_fuzzifier, seed=seed)
        assign = u.argmax(axis=1)
    tumour = _tumour_cluster_labels(assign, X_full[:, -1], model.k)
    cluster_ms = (time.perf_counter() - t0) * 1000.0
    score, _, ellipsify_ms = _score_fold(test, tumour, aspect, cfg)
    timing = {"train": 0.0, "predict": cluster_ms, "ellipsify": ellipsify_ms}
    return score, timing, [c.image_id for c in train]


def _tumour_cluster_labels(assign: np.ndarray, dist: np.ndarray, k: int) -> np.ndarray:
    """Tumour cluster = smaller mean distance; tie -> fewer members."""
    means = np.full(k, np.inf)
    counts = np.zeros(k, dtype=np.int64)
    for c in range(k):
        members = assign == c
        counts[c] = members.sum()
        if counts[c]:
            means[c] = dist[members].mean()
    best = means.min()
    tied = np.nonzero(means == best)[0]
    tumour_cluster = tied[np.argmin(counts[tied])] if tied.size > 1 else tied[0]
    return assign == tumour_cluster


def run_matrix(
    dataset: Dataset, feature_kinds, classifiers, cfg: PipelineConfig | None = None
) -> EvalReport:
    """Evaluate every (feature, classifier) combination with leave-one-out."""
    cfg = cfg or PipelineConfig()
    for f in feature_kinds:
        if f not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {f!r}")
    for c in classifiers:
        if c not in CLASSIFIER_KINDS:
            raise ValueError(f"unknown classifier {c!r}")
    if dataset.n_images < 2:
        raise DatasetError("leave-one-out requires at least 2 images")
    report = EvalReport(dataset_name=dataset.name, master_seed=cfg.master_seed)
    for feature in feature_kinds:
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                contexts = list(
                    pool.map(lambda r: _image_context(r, feature, cfg), dataset.records)
                )
        else:
            contexts = [_image_context(r, feature, cfg) for r in dataset.records]
        for classifier in classifiers:
            _eval_combo(contexts, feature, classifier, cfg, report)
    report.rows.sort(key=lambda r: (r.feature, r.classifier, r.image_id))
    return report


def _eval_combo(contexts, feature, classifier, cfg, report):
    def eval_fold(idx):
        ctx = contexts[idx]
        try:
            if classifier == "svm":
                score, timing, train_ids = _eval_one_svm(contexts, idx, cfg)
            else:
                score, timing, train_ids = _eval_one_cluster(contexts, idx, classifier, cfg)
            dice_val, note = score.value, ""
        except (EllipseFitError, ValueError) as exc:
            dice_val, note = 0.0, str(exc)
            timing = {}
            train_ids = [c.image_id for i, c in enumerate(contexts) if i != idx]
        timing["detect"] = ctx.detect_ms
        return ReportRow(
            image_id=ctx.image_id,
            feature=feature,
            classifier=classifier,
            dice=dice_val,
            n_keypoints=len(ctx.keypoints),
            runtime_ms=timing,
            note=note,
        ), sorted(train_ids)

    indices = range(len(contexts))
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(eval_fold, indices))
    else:
        results = [eval_fold(i) for i in indices]
    for row, train_ids in results:
        report.rows.append(row)
        report.fold_provenance[(feature, classifier, row.image_id)] = train_ids


def run_loo(
    dataset: Dataset,
    feature_kind: str,
    classifier: str,
    cfg: PipelineConfig | None = None,
) -> EvalReport:
    """Leave-one-out evaluation of a single (feature, classifier) pair."""
    return run_matrix(dataset, [feature_kind], [classifier], cfg)


# ---------------------------------------------------------------------------
# Interactive single-image segmentation (CLI `segment` and the HTTP service)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SegmentResult:
    ellipse: EllipseROI | None
    keypoints: list
    tumour: np.ndarray  # bool per keypoint
    note: str = ""

    def tumour_keypoints(self) -> list:
        return [kp for kp, t in zip(self.keypoints, self.tumour) if t]


def segment_image(
    img: GrayImage,
    cx: float,
    cy: float,
    feature_kind: str,
    classifier: str,
    cfg: PipelineConfig | None = None,
    model_doc: dict | None = None,
    cluster_seed: int = 0,
) -> SegmentResult:
    """Click-to-ellipse on one image; the exact path the LOO harness scores.

    For ``classifier='svm'`` a trained model document is required and
    supplies the detector/preprocess settings, aspect statistics, feature
    scaler, and the SVM itself. Clustering runs model-free on the image's
    own (self-standardized) feature matrix with the given seed.
    """
    from .model_io import config_from_model_doc, svm_from_model_doc

    cfg = cfg or PipelineConfig()
    if not (0 <= cx < img.width and 0 <= cy < img.height):
        raise ValueError(f"click ({cx}, {cy}) outside image bounds")
    if feature_kind not in FEATURE_KINDS:
        raise ValueError(f"unknown feature kind {feature_kind!r}")
    if classifier not in CLASSIFIER_KINDS:
        raise ValueError(f"unknown classifier {classifier!r}")
    if classifier == "svm" and model_doc is None:
        raise ValueError("svm classification requires a trained model document")

    aspect = AspectStats(1.0, 1.0)
    augment = cfg.augment_distance
    if model_doc is not None:
        cfg = config_from_model_doc(model_doc, cfg)
        aspect = AspectStats(
            float(model_doc["aspect"]["mean_width"]),
            float(model_doc["aspect"]["mean_height"]),
        )
        augment = bool(model_doc.get("augment_distance", True))

    pre = preprocess(img, cfg.preprocess)
    kps, descs = detect_keypoints(pre, feature_kind, cfg.detector)
    seed = SeedPoint(x=float(cx), y=float(cy), source="user-click")
    fm = build_matrix(kps, descs, seed, aspect)
    if fm.n_rows == 0:
        return SegmentResult(
            ellipse=None,
            keypoints=[],
            tumour=np.zeros(0, dtype=bool),
            note="no keypoints detected",
        )
    X_full = fm.features
    X_feat = X_full if augment else X_full[:, :-1]
    if classifier == "svm":
        scaler = ScalerStats(
            mean=np.array(model_doc["scaler"]["mean"], dtype=np.float64),
            std=np.array(model_doc["scaler"]["std"], dtype=np.float64),
        )
        model = svm_from_model_doc(model_doc)
        tumour = svm_predict(model, apply_scaler(scaler, X_feat))
    else:
        scaler = ScalerStats(mean=X_feat.mean(axis=0), std=X_feat.std(axis=0))
        X_std = apply_scaler(scaler, X_feat)
        try:
            if classifier == "kmeans":
                model = kmeans_fit(X_std, k=2, seed=cluster_seed)
                assign = kmeans_assign(model, X_std)
            else:
                model, u = fcm_fit(
                    X_std, c=2, fuzzifier=cfg.fcm_fuzzifier, seed=cluster_seed
                )
                assign = u.argmax(axis=1)
        except ValueError as exc:
            return SegmentResult(
                ellipse=None,
                keypoints=kps,
                tumour=np.zeros(len(kps), dtype=bool),
                note=str(exc),
            )
        tumour = _tumour_cluster_labels(assign, X_full[:, -1], 2)
    pts = fm.xy[tumour]
    try:
        e = _ellipsify(pts, X_full[:, -1][tumour], img.width, img.height, cfg)
    except EllipseFitError as exc:
        return SegmentResult(ellipse=None, keypoints=kps, tumour=tumour, note=str(exc))
    return SegmentResult(ellipse=e, keypoints=kps, tumour=tumour)


def score_against_mask(result: SegmentResult, gt: GroundTruth) -> DiceScore:
    """Dice of a segmentation result's ellipse against a ground-truth mask."""
    if result.ellipse is None:
        return dice(np.zeros_like(gt.mask), gt.mask)
    return dice(rasterize(result.ellipse, gt.width, gt.height), gt.mask)
