"""BRISK-style scale-space corners with 512-bit binary descriptors.

Corners are scored with the FAST segment test across an octave/intra-octave
pyramid (layer scales 2^i and 1.5*2^i); each keypoint's continuous scale
comes from a 1-D parabola fit over the scale axis. The descriptor samples a
concentric 60-point pattern (four rings plus the centre, each point mean-
smoothed over a box whose width tracks the ring's point spacing): pairs
with large separation estimate the gradient direction used to rotate the
pattern, and the 512 shortest pairs produce the bit string via brightness
comparisons.
"""

from __future__ import annotations

import math

import numpy as np

from ..imgcore import GrayImage, require_pipeline_size, resize_bilinear
from . import Descriptor, DetectorConfig, Keypoint, order_keypoints
from .fast import segment_test_candidates
from .surf import padded_integral

# ring radius, point count, smoothing sigma per ring (pattern units)
_RINGS = ((0.0, 1), (2.9, 10), (4.9, 14), (7.4, 15), (10.8, 20))
_LONG_PAIR_MIN_DIST = 13.67
_NUM_SHORT_PAIRS = 512


def _build_pattern():
    pts = []
    sigmas = []
    for radius, count in _RINGS:
        if count == 1:
            pts.append((0.0, 0.0))
            sigmas.append(0.5)
            continue
        spacing = 2.0 * math.pi * radius / count
        for k in range(count):
            ang = 2.0 * math.pi * k / count
            pts.append((radius * math.cos(ang), radius * math.sin(ang)))
            sigmas.append(0.5 * spacing)
    pos = np.array(pts)
    sig = np.array(sigmas)
    n = pos.shape[0]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    dists = np.array([math.hypot(*(pos[j] - pos[i])) for i, j in pairs])
    order = sorted(range(len(pairs)), key=lambda k: (dists[k],) + pairs[k])
    short = [pairs[k] for k in order[:_NUM_SHORT_PAIRS]]
    long_ = [pairs[k] for k in order if dists[k] > _LONG_PAIR_MIN_DIST]
    return pos, sig, np.array(short), np.array(long_)


_PATTERN_POS, _PATTERN_SIGMA, _SHORT_PAIRS, _LONG_PAIRS = _build_pattern()
_LONG_DELTA = _PATTERN_POS[_LONG_PAIRS[:, 1]] - _PATTERN_POS[_LONG_PAIRS[:, 0]]
_LONG_INV_D2 = 1.0 / (_LONG_DELTA**2).sum(axis=1)


def _layer_scales(octaves: int):
    scales = []
    for o in range(octaves):
        scales.append(2.0**o)
        scales.append(2.0**o * 1.5)
    return sorted(scales)


def _score_map(img: GrayImage, threshold: int):
    """FAST segment-test scores on one pyramid layer; 0 = not a corner."""
    xs, ys, scores = segment_test_candidates(img, threshold, 9)
    m = np.zeros((img.height, img.width))
    m[ys, xs] = scores
    return m, xs, ys, scores


def _neighborhood_max(score_map: np.ndarray, x: int, y: int) -> float:
    h, w = score_map.shape
    y0, y1 = max(0, y - 1), min(h, y + 2)
    x0, x1 = max(0, x - 1), min(w, x + 2)
    if y0 >= y1 or x0 >= x1:
        return 0.0
    return float(score_map[y0:y1, x0:x1].max())


def _box_mean(table, cx, cy, hw):
    x0 = cx - hw
    x1 = cx + hw
    y0 = cy - hw
    y1 = cy + hw
    sums = table[y1, x1] - table[y0, x1] - table[y1, x0] + table[y0, x0]
    return sums / ((2.0 * hw) ** 2)


def _sample_pattern(table, pad, x, y, t, theta):
    """Box-smoothed intensities at the rotated, scaled pattern points.

    Sample positions are continuous; the smoothed value is interpolated
    bilinearly between the box means at the four surrounding integer
    centres, which keeps sampling exactly equivariant under 90-degree
    image rotations.
    """
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    px = _PATTERN_POS[:, 0]
    py = _PATTERN_POS[:, 1]
    fx = x + t * (px * cos_t - py * sin_t) + pad
    fy = y + t * (px * sin_t + py * cos_t) + pad
    hw = np.maximum(1, np.rint(_PATTERN_SIGMA * t)).astype(np.int64)
    x0 = np.floor(fx).astype(np.int64)
    y0 = np.floor(fy).astype(np.int64)
    wx = fx - x0
    wy = fy - y0
    v00 = _box_mean(table, x0, y0, hw)
    v10 = _box_mean(table, x0 + 1, y0, hw)
    v01 = _box_mean(table, x0, y0 + 1, hw)
    v11 = _box_mean(table, x0 + 1, y0 + 1, hw)
    top = v00 * (1.0 - wx) + v10 * wx
    bot = v01 * (1.0 - wx) + v11 * wx
    return top * (1.0 - wy) + bot * wy


def pattern_orientation(vals: np.ndarray) -> float:
    """Gradient direction from long-distance pattern pairs."""
    diff = vals[_LONG_PAIRS[:, 1]] - vals[_LONG_PAIRS[:, 0]]
    g = (diff * _LONG_INV_D2) @ _LONG_DELTA
    if g[0] == 0.0 and g[1] == 0.0:
        return 0.0
    return math.atan2(g[1], g[0]) % (2.0 * math.pi)


def descriptor_bits(vals: np.ndarray) -> np.ndarray:
    return (vals[_SHORT_PAIRS[:, 1]] > vals[_SHORT_PAIRS[:, 0]]).astype(np.uint8)


def _pattern_pad(max_scale: float) -> int:
    reach = _PATTERN_POS[:, 0].max() + _PATTERN_SIGMA.max() + 1.0
    return int(math.ceil(reach * max_scale)) + 2


def detect_brisk(
    img: GrayImage, cfg: DetectorConfig | None = None
) -> list[tuple[Keypoint, Descriptor]]:
    """Scale-space FAST keypoints with 512-bit pattern descriptors."""
    if cfg is None:
        cfg = DetectorConfig()
    require_pipeline_size(img)
    scales = _layer_scales(cfg.brisk_octaves)
    layers = []
    for t in scales:
        lh = max(int(round(img.height / t)), 7)
        lw = max(int(round(img.width / t)), 7)
        if t == 1.0:
            layer_img = img
        else:
            layer_img = GrayImage(
                np.rint(resize_bilinear(img.pixels, lh, lw)).astype(np.uint8)
            )
        score_map, xs, ys, scores = _score_map(layer_img, cfg.brisk_threshold)
        layers.append((t, layer_img, score_map, xs, ys, scores))

    raw = []
    for li, (t, layer_img, score_map, xs, ys, scores) in enumerate(layers):
        if xs.size == 0:
            continue
        for x, y, s0 in zip(xs, ys, scores):
            # spatial 3x3 non-max within the layer
            if s0 < _neighborhood_max(score_map, x, y):
                continue
            s_below = s_above = None
            if li > 0:
                tb, _, mb, *_ = layers[li - 1]
                xb = int(round((x + 0.5) * t / tb - 0.5))
                yb = int(round((y + 0.5) * t / tb - 0.5))
                s_below = _neighborhood_max(mb, xb, yb)
                if s0 < s_below:
                    continue
            if li < len(layers) - 1:
                ta, _, ma, *_ = layers[li + 1]
                xa = int(round((x + 0.5) * t / ta - 0.5))
                ya = int(round((y + 0.5) * t / ta - 0.5))
                s_above = _neighborhood_max(ma, xa, ya)
                if s0 < s_above:
                    continue
            scale = t
            if s_below is not None and s_above is not None:
                denom = s_below - 2.0 * s0 + s_above
                if denom < 0.0:
                    delta = float(np.clip(0.5 * (s_below - s_above) / denom, -0.5, 0.5))
                    if delta >= 0.0:
                        scale = t * (layers[li + 1][0] / t) ** delta
                    else:
                        scale = t * (t / layers[li - 1][0]) ** delta
            raw.append(
                Keypoint(
                    x=(x + 0.5) * t - 0.5,
                    y=(y + 0.5) * t - 0.5,
                    scale=scale,
                    response=float(s0),
                )
            )
    if not raw:
        return []
    kps = order_keypoints(raw)[: cfg.max_keypoints]
    pad = _pattern_pad(max(kp.scale for kp in kps))
    table = padded_integral(img, pad)
    out = []
    for kp in kps:
        vals0 = _sample_pattern(table, pad, kp.x, kp.y, kp.scale, 0.0)
        theta = pattern_orientation(vals0)
        vals = _sample_pattern(table, pad, kp.x, kp.y, kp.scale, theta)
        bits = descriptor_bits(vals)
        oriented = Keypoint(
            x=kp.x, y=kp.y, scale=kp.scale, response=kp.response, orientation=theta
        )
        out.append((oriented, Descriptor(kind="brisk512", values=bits)))
    return out
