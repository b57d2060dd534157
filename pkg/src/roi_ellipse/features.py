"""Extended feature matrices: descriptors augmented with the aspect-weighted
distance of each keypoint to the user-supplied tumour-centre point, plus
supervised labels from ground-truth masks.

The distance for a keypoint at (x, y) given a centre (xc, yc) is
    d = sqrt((x - xc)^2 + (wbar/hbar * (y - yc))^2)
where wbar/hbar is the ratio of mean tumour bounding-box width to height
over the training images, so the distance metric matches the population's
typical lesion aspect.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .detect import Descriptor, Keypoint
from .imgcore import load_image


@dataclass(frozen=True)
class SeedPoint:
    x: float
    y: float
    source: str = "user-click"  # or "simulated-from-gt"


@dataclass(frozen=True)
class AspectStats:
    mean_width: float
    mean_height: float

    def __post_init__(self):
        if self.mean_width <= 0 or self.mean_height <= 0:
            raise ValueError("aspect statistics must be > 0")

    @property
    def ratio(self) -> float:
        return self.mean_width / self.mean_height


@dataclass(frozen=True)
class ScalerStats:
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mean, dtype=np.float64)
        s = np.asarray(self.std, dtype=np.float64)
        m.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "std", s)


class GroundTruth:
    """Binary tumour mask with its derived bounding box and centroid.

    Multi-component masks are reduced to the largest 4-connected component,
    so a single tumour region is guaranteed.
    """

    def __init__(self, mask: np.ndarray):
        m = np.asarray(mask, dtype=bool)
        if m.ndim != 2:
            raise ValueError("mask must be 2-D")
        if not m.any():
            raise ValueError("ground truth must contain at least one positive pixel")
        m = _largest_component(m)
        m.setflags(write=False)
        self.mask = m
        ys, xs = np.nonzero(m)
        self.bbox_x = int(xs.min())
        self.bbox_y = int(ys.min())
        self.bbox_width = int(xs.max() - xs.min() + 1)
        self.bbox_height = int(ys.max() - ys.min() + 1)
        self.centroid_x = float(xs.mean())
        self.centroid_y = float(ys.mean())

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]


def _largest_component(mask: np.ndarray) -> np.ndarray:
    """Largest 4-connected component of a boolean mask."""
    h, w = mask.shape
    visited = np.zeros_like(mask)
    best: list = []
    ys, xs = np.nonzero(mask)
    for sy, sx in zip(ys, xs):
        if visited[sy, sx]:
            continue
        stack = [(sy, sx)]
        visited[sy, sx] = True
        comp = []
        while stack:
            cy, cx = stack.pop()
            comp.append((cy, cx))
            for ny, nx in ((cy - 1, cx), (cy + 1, cx), (cy, cx - 1), (cy, cx + 1)):
                if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not visited[ny, nx]:
                    visited[ny, nx] = True
                    stack.append((ny, nx))
        if len(comp) > len(best):
            best = comp
    out = np.zeros_like(mask)
    rows, cols = zip(*best)
    out[list(rows), list(cols)] = True
    return out


def load_ground_truth(path) -> GroundTruth:
    """Read a mask image; values > 127 count as tumour."""
    img = load_image(path)
    return GroundTruth(img.pixels > 127)


@dataclass(frozen=True)
class FeatureMatrix:
    """n x m' feature rows (descriptor values then distance), with the
    keypoint coordinates and optional labels carried alongside."""

    features: np.ndarray  # (n, m+1) float64
    xy: np.ndarray  # (n, 2) float64
    kind: str
    labels: np.ndarray | None = None  # bool, tumour = True

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        xy = np.asarray(self.xy, dtype=np.float64).reshape(-1, 2)
        if f.shape[0] != xy.shape[0]:
            raise ValueError("features and coordinates must align")
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=bool)
            if lab.shape[0] != f.shape[0]:
                raise ValueError("label array length must equal row count")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)
        f.setflags(write=False)
        xy.setflags(write=False)
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "xy", xy)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_cols(self) -> int:
        return self.features.shape[1]

    @property
    def distances(self) -> np.ndarray:
        """The distance column (last)."""
        return self.features[:, -1]

    def with_labels(self, labels) -> "FeatureMatrix":
        return FeatureMatrix(self.features, self.xy, self.kind, labels)


def aspect_stats(gts) -> AspectStats:
    """Mean tumour bounding-box width and height over a set of masks."""
    gts = list(gts)
    if not gts:
        raise ValueError("aspect_stats requires at least one ground truth")
    return AspectStats(
        mean_width=float(np.mean([g.bbox_width for g in gts])),
        mean_height=float(np.mean([g.bbox_height for g in gts])),
    )


def weighted_distance(kp: Keypoint, seed: SeedPoint, stats: AspectStats) -> float:
    """Aspect-weighted distance from a keypoint to the centre point."""
    dx = kp.x - seed.x
    dy = stats.ratio * (kp.y - seed.y)
    return math.hypot(dx, dy)


def weighted_distances(xy: np.ndarray, seed: SeedPoint, stats: AspectStats) -> np.ndarray:
    dx = xy[:, 0] - seed.x
    dy = stats.ratio * (xy[:, 1] - seed.y)
    return np.hypot(dx, dy)


def build_matrix(
    kps: list[Keypoint],
    descs: list[Descriptor],
    seed: SeedPoint,
    stats: AspectStats,
) -> FeatureMatrix:
    """Stack descriptors row-wise and append the distance column.

    Row order matches keypoint order. All descriptors must share one kind.
    """
    if len(kps) != len(descs):
        raise ValueError("keypoints and descriptors must align")
    kinds = {d.kind for d in descs}
    if len(kinds) > 1:
        raise ValueError(f"mixed descriptor kinds: {sorted(kinds)}")
    kind = kinds.pop() if kinds else "empty"
    width = descs[0].values.shape[0] if descs else 64
    xy = np.array([[kp.x, kp.y] for kp in kps], dtype=np.float64).reshape(-1, 2)
    feats = np.empty((len(kps), width + 1), dtype=np.float64)
    if kps:
        feats[:, :width] = np.stack([d.values.astype(np.float64) for d in descs])
        feats[:, width] = weighted_distances(xy, seed, stats)
    return FeatureMatrix(features=feats, xy=xy, kind=kind)


def label_keypoints(kps: list[Keypoint], gt: GroundTruth) -> np.ndarray:
    """True where the keypoint's rounded position lies on a tumour pixel."""
    labels = np.zeros(len(kps), dtype=bool)
    for i, kp in enumerate(kps):
        xi = min(int(round(kp.x)), gt.width - 1)
        yi = min(int(round(kp.y)), gt.height - 1)
        labels[i] = gt.mask[yi, xi]
    return labels


def standardize(
    train: FeatureMatrix, test: FeatureMatrix | None = None
) -> tuple[FeatureMatrix, FeatureMatrix | None, ScalerStats]:
    """Per-column z-score fitted on the training matrix only.

    Zero-variance columns pass through unscaled; the same transform is
    applied to the test matrix.
    """
    if train.n_rows == 0:
        raise ValueError("cannot standardize an empty training matrix")
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    stats = ScalerStats(mean=mean, std=std)
    train_out = FeatureMatrix(
        apply_scaler(stats, train.features), train.xy, train.kind, train.labels
    )
    test_out = None
    if test is not None:
        if test.n_cols != train.n_cols:
            raise ValueError("train/test column counts differ")
        test_out = FeatureMatrix(
            apply_scaler(stats, test.features), test.xy, test.kind, test.labels
        )
    return train_out, test_out, stats


def apply_scaler(stats: ScalerStats, features: np.ndarray) -> np.ndarray:
    divisor = np.where(stats.std == 0.0, 1.0, stats.std)
    shift = np.where(stats.std == 0.0, 0.0, stats.mean)
    return (np.asarray(features, dtype=np.float64) - shift) / divisor


def simulate_seed(
    gt: GroundTruth, rng: np.random.Generator, jitter_frac: float = 0.1
) -> SeedPoint:
    """Centroid click with uniform polar jitter up to a fraction of the
    bounding-box diagonal; models an imprecise but near-centre user click."""
    diag = math.hypot(gt.bbox_width, gt.bbox_height)
    radius = rng.uniform(0.0, jitter_frac * diag)
    angle = rng.uniform(0.0, 2.0 * math.pi)
    x = min(max(gt.centroid_x + radius * math.cos(angle), 0.0), gt.width - 1.0)
    y = min(max(gt.centroid_y + radius * math.sin(angle), 0.0), gt.height - 1.0)
    return SeedPoint(x=x, y=y, source="simulated-from-gt")


def export_csv(fm: FeatureMatrix, path) -> None:
    """Write rows as f0..fk, dist, label, x, y for offline inspection."""
    n_desc = fm.n_cols - 1
    header = [f"f{i}" for i in range(n_desc)] + ["dist", "label", "x", "y"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(fm.n_rows):
            label = ""
            if fm.labels is not None:
                label = 1 if fm.labels[i] else 0
            writer.writerow(
                [repr(float(v)) for v in fm.features[i]]
                + [label, repr(float(fm.xy[i, 0])), repr(float(fm.xy[i, 1]))]
            )
