"""FAST corner detection via the 16-pixel circle segment test.

A pixel p is a corner iff some contiguous arc of at least ``fast_arc``
pixels on the Bresenham circle of radius 3 is entirely brighter than
I(p) + t or entirely darker than I(p) - t. Non-maximum suppression runs
on the score V = sum of |I(circle) - I(p)| over the qualifying arc.
"""

from __future__ import annotations

import numpy as np

from ..imgcore import GrayImage, require_pipeline_size
from . import DetectorConfig, Keypoint, order_keypoints

# (dx, dy) offsets of the 16-pixel circle, radius 3, clockwise from 12 o'clock
CIRCLE_OFFSETS = np.array(
    [
        (0, -3), (1, -3), (2, -2), (3, -1),
        (3, 0), (3, 1), (2, 2), (1, 3),
        (0, 3), (-1, 3), (-2, 2), (-3, 1),
        (-3, 0), (-3, -1), (-2, -2), (-1, -3),
    ],
    dtype=np.int64,
)

BORDER = 3  # margin excluded from detection


def _circle_values(px: np.ndarray):
    """Gather circle intensities for every interior pixel.

    Returns (ys, xs, center, circ) where circ is (n_pixels, 16).
    """
    h, w = px.shape
    grid_y, grid_x = np.mgrid[BORDER : h - BORDER, BORDER : w - BORDER]
    ys = grid_y.ravel()
    xs = grid_x.ravel()
    circ = np.empty((ys.size, 16), dtype=np.int32)
    for k, (dx, dy) in enumerate(CIRCLE_OFFSETS):
        circ[:, k] = px[ys + dy, xs + dx]
    return ys, xs, px[ys, xs].astype(np.int32), circ


def _has_circular_run(mask: np.ndarray, arc: int) -> np.ndarray:
    """Row-wise: does a circular run of >= arc consecutive True exist?"""
    ext = np.concatenate([mask, mask[:, : arc - 1]], axis=1)
    run = np.zeros(ext.shape[0], dtype=np.int32)
    hit = np.zeros(ext.shape[0], dtype=bool)
    for k in range(ext.shape[1]):
        run = np.where(ext[:, k], run + 1, 0)
        hit |= run >= arc
    return hit


def segment_test_candidates(img: GrayImage, threshold: int, arc: int):
    """Pre-suppression corner candidates with their arc scores.

    Returns (xs, ys, scores) as parallel int/float arrays, scan order.
    """
    if img.height < 2 * BORDER + 1 or img.width < 2 * BORDER + 1:
        return (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))
    px = img.pixels
    ys, xs, center, circ = _circle_values(px)
    bright = circ > (center + threshold)[:, None]
    dark = circ < (center - threshold)[:, None]
    is_corner = _has_circular_run(bright, arc) | _has_circular_run(dark, arc)
    idx = np.nonzero(is_corner)[0]
    scores = np.empty(idx.size, dtype=np.float64)
    for out_i, i in enumerate(idx):
        b = bright[i]
        mask = b if _max_circular_run(b) >= arc else dark[i]
        scores[out_i] = _arc_score(circ[i], int(center[i]), mask, arc)
    return xs[idx], ys[idx], scores


def _max_circular_run(mask: np.ndarray) -> int:
    if mask.all():
        return mask.size
    ext = np.concatenate([mask, mask])
    best = cur = 0
    for v in ext:
        cur = cur + 1 if v else 0
        if cur > best:
            best = cur
    return min(best, mask.size)


def _arc_score(vals: np.ndarray, center: int, mask: np.ndarray, arc: int) -> float:
    """|I - I(p)| summed over the qualifying arc.

    With arc >= 9 at most one circular run of that polarity can reach the
    required length, so the maximal run is the qualifying arc.
    """
    n = mask.size
    if mask.all():
        sel = np.ones(n, dtype=bool)
    else:
        ext = np.concatenate([mask, mask])
        best_len = 0
        best_start = 0
        cur_len = 0
        for k in range(2 * n):
            if ext[k]:
                cur_len += 1
                if cur_len > best_len and k < n + cur_len - 1:
                    best_len = cur_len
                    best_start = k - cur_len + 1
            else:
                cur_len = 0
        best_len = min(best_len, n)
        sel = np.zeros(n, dtype=bool)
        sel[(best_start + np.arange(best_len)) % n] = True
    return float(np.abs(vals[sel] - center).sum())


def _suppress_nonmax(xs, ys, scores, height, width):
    """Keep candidates whose score is >= all scores in the 3x3 neighborhood."""
    score_map = np.full((height, width), -1.0)
    score_map[ys, xs] = scores
    neigh = np.full((height, width), -np.inf)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            shifted = np.full((height, width), -np.inf)
            ys0, ys1 = max(0, dy), height + min(0, dy)
            xs0, xs1 = max(0, dx), width + min(0, dx)
            shifted[ys0:ys1, xs0:xs1] = score_map[
                ys0 - dy : ys1 - dy, xs0 - dx : xs1 - dx
            ]
            np.maximum(neigh, shifted, out=neigh)
    keep = scores >= neigh[ys, xs]
    return xs[keep], ys[keep], scores[keep]


def detect_fast(img: GrayImage, cfg: DetectorConfig | None = None) -> list[Keypoint]:
    """FAST corners, non-max suppressed, capped at cfg.max_keypoints."""
    if cfg is None:
        cfg = DetectorConfig()
    require_pipeline_size(img)
    xs, ys, scores = segment_test_candidates(img, cfg.fast_threshold, cfg.fast_arc)
    if xs.size == 0:
        return []
    xs, ys, scores = _suppress_nonmax(xs, ys, scores, img.height, img.width)
    kps = [
        Keypoint(x=float(x), y=float(y), scale=1.0, response=float(s))
        for x, y, s in zip(xs, ys, scores)
    ]
    return order_keypoints(kps)[: cfg.max_keypoints]
