"""SURF-style blob detection and 64-entry gradient-sum description.

Detection approximates the Hessian determinant with integral-image box
filters: response = Dxx*Dyy - (0.9*Dxy)^2, normalized by filter area, with
keypoints taken as 3x3x3 scale-space maxima above a threshold. Description
sums Haar wavelet responses over a 4x4 grid of subregions (sum dx, sum dy,
sum |dx|, sum |dy| each), L2-normalized to 64 values.

Sampling conventions (shared by the descriptor and its direct-summation
test oracle):
  - descriptor window: 20x20 samples at pattern offsets (q - 9.5)*s for
    q in 0..19, rotated by the keypoint orientation, rounded to integers;
  - Haar half-width: max(1, round(s)) for the descriptor, max(1, round(2s))
    for orientation; dx = right box - left box, dy = bottom - top, each box
    half-width x full-height of the 2hw x 2hw support;
  - Gaussian weights sigma = 3.3s (descriptor) and 2.5s (orientation) on
    pattern offsets;
  - out-of-image support comes from edge replication.
"""

from __future__ import annotations

import math

import numpy as np

from ..imgcore import GrayImage, integral_of_array, require_pipeline_size
from . import Descriptor, DetectorConfig, Keypoint, order_keypoints

_DXY_WEIGHT = 0.9

# descriptor pattern: 20 offsets per axis, 4x4 subregions of 5x5 samples
_DESC_OFF = np.arange(20, dtype=np.float64) - 9.5
_DESC_W = np.exp(
    -(_DESC_OFF[:, None] ** 2 + _DESC_OFF[None, :] ** 2) / (2.0 * 3.3**2)
)

# orientation pattern: integer grid within radius 6
_ORI_IJ = np.array(
    [(i, j) for i in range(-6, 7) for j in range(-6, 7) if i * i + j * j <= 36],
    dtype=np.float64,
)
_ORI_W = np.exp(-(_ORI_IJ[:, 0] ** 2 + _ORI_IJ[:, 1] ** 2) / (2.0 * 2.5**2))
_ORI_WINDOW = math.pi / 3.0
_ORI_STEPS = np.arange(0.0, 2.0 * math.pi, 0.15)


def _filter_size(octave: int, level: int) -> int:
    return 3 * ((2 ** (octave + 1)) * (level + 1) + 1)


def _layer_scale(size: int) -> float:
    return 1.2 * size / 9.0


def _box_grid(t: np.ndarray, r0, c0, nr: int, nc: int) -> np.ndarray:
    """Vectorized box sums; r0/c0 are top-left row/col index grids."""
    return (
        t[r0 + nr, c0 + nc] - t[r0, c0 + nc] - t[r0 + nr, c0] + t[r0, c0]
    ).astype(np.float64)


def _hessian_response(t: np.ndarray, rows, cols, size: int) -> np.ndarray:
    """Normalized det-of-Hessian box-filter response on a grid of centers."""
    lobe = size // 3
    border = (size - 1) // 2
    r = rows[:, None]
    c = cols[None, :]
    dxx = _box_grid(t, r - lobe + 1, c - border, 2 * lobe - 1, size) - 3.0 * _box_grid(
        t, r - lobe + 1, c - lobe // 2, 2 * lobe - 1, lobe
    )
    dyy = _box_grid(t, r - border, c - lobe + 1, size, 2 * lobe - 1) - 3.0 * _box_grid(
        t, r - lobe // 2, c - lobe + 1, lobe, 2 * lobe - 1
    )
    dxy = (
        _box_grid(t, r - lobe, c + 1, lobe, lobe)
        + _box_grid(t, r + 1, c - lobe, lobe, lobe)
        - _box_grid(t, r - lobe, c - lobe, lobe, lobe)
        - _box_grid(t, r + 1, c + 1, lobe, lobe)
    )
    inv_area = 1.0 / (size * size)
    dxx *= inv_area
    dyy *= inv_area
    dxy *= inv_area
    return dxx * dyy - (_DXY_WEIGHT * dxy) ** 2


def _octave_candidates(t, h, w, octave, threshold):
    """Scale-space maxima for one octave's four filter sizes."""
    step = 2**octave
    sizes = [_filter_size(octave, l) for l in range(4)]
    max_border = (sizes[-1] - 1) // 2
    if 2 * max_border + 1 > min(h, w):
        # octave truncated: largest filter no longer fits anywhere useful
        sizes_fit = [s for s in sizes if 2 * ((s - 1) // 2) + 1 <= min(h, w)]
        if len(sizes_fit) < 3:
            return []
        sizes = sizes_fit
    rows = np.arange(0, h, step)
    cols = np.arange(0, w, step)
    resp = np.zeros((len(sizes), rows.size, cols.size))
    valid_lo = []
    for li, size in enumerate(sizes):
        b = (size - 1) // 2
        ri = np.nonzero((rows >= b) & (rows <= h - 1 - b))[0]
        ci = np.nonzero((cols >= b) & (cols <= w - 1 - b))[0]
        if ri.size == 0 or ci.size == 0:
            valid_lo.append(None)
            continue
        resp[li][np.ix_(ri, ci)] = _hessian_response(t, rows[ri], cols[ci], size)
        valid_lo.append((ri[0], ri[-1], ci[0], ci[-1]))
    out = []
    for l in range(1, len(sizes) - 1):
        if valid_lo[l + 1] is None:
            continue
        r0, r1, c0, c1 = valid_lo[l + 1]
        # full 3x3 spatial window must sit inside the largest layer's validity
        lo_r, hi_r = r0 + 1, r1 - 1
        lo_c, hi_c = c0 + 1, c1 - 1
        if hi_r < lo_r or hi_c < lo_c:
            continue
        mid = resp[l, lo_r : hi_r + 1, lo_c : hi_c + 1]
        cand = mid > threshold
        if not cand.any():
            continue
        for dl in (-1, 0, 1):
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if dl == 0 and di == 0 and dj == 0:
                        continue
                    neigh = resp[
                        l + dl,
                        lo_r + di : hi_r + 1 + di,
                        lo_c + dj : hi_c + 1 + dj,
                    ]
                    cand &= mid > neigh
                    if not cand.any():
                        break
        ii, jj = np.nonzero(cand)
        scale = _layer_scale(sizes[l])
        for i, j in zip(ii, jj):
            out.append(
                (
                    float(cols[lo_c + j]),
                    float(rows[lo_r + i]),
                    scale,
                    float(mid[i, j]),
                )
            )
    return out


def padded_integral(img: GrayImage, pad: int) -> np.ndarray:
    """Integral table of the edge-replicated image; offset coords by pad."""
    return integral_of_array(np.pad(img.pixels, pad, mode="edge"))


def _haar_grid(table, cx, cy, hw):
    """Haar x/y responses over 2hw x 2hw supports at padded-coord centers."""
    x0 = cx - hw
    x1 = cx + hw
    y0 = cy - hw
    y1 = cy + hw
    right = table[y1, x1] - table[y0, x1] - table[y1, cx] + table[y0, cx]
    left = table[y1, cx] - table[y0, cx] - table[y1, x0] + table[y0, x0]
    bottom = table[y1, x1] - table[cy, x1] - table[y1, x0] + table[cy, x0]
    top = table[cy, x1] - table[y0, x1] - table[cy, x0] + table[y0, x0]
    return (right - left).astype(np.float64), (bottom - top).astype(np.float64)


def assign_orientation(table, pad: int, x: float, y: float, s: float) -> float:
    """Dominant Haar response direction in a sliding 60-degree window."""
    hw = max(1, int(round(2.0 * s)))
    sx = np.rint(x + _ORI_IJ[:, 0] * s).astype(np.int64) + pad
    sy = np.rint(y + _ORI_IJ[:, 1] * s).astype(np.int64) + pad
    dx, dy = _haar_grid(table, sx, sy, hw)
    wdx = _ORI_W * dx
    wdy = _ORI_W * dy
    if not (np.any(wdx) or np.any(wdy)):
        return 0.0
    phi = np.arctan2(wdy, wdx) % (2.0 * math.pi)
    rel = (phi[None, :] - _ORI_STEPS[:, None]) % (2.0 * math.pi)
    member = rel < _ORI_WINDOW
    sums_x = member @ wdx
    sums_y = member @ wdy
    best = int(np.argmax(sums_x**2 + sums_y**2))
    return math.atan2(sums_y[best], sums_x[best]) % (2.0 * math.pi)


def compute_descriptor(table, pad: int, x: float, y: float, s: float, theta: float):
    """64-entry gradient-sum descriptor at (x, y), scale s, orientation theta."""
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    u = _DESC_OFF[:, None] * s
    v = _DESC_OFF[None, :] * s
    sx = np.rint(x + u * cos_t - v * sin_t).astype(np.int64) + pad
    sy = np.rint(y + u * sin_t + v * cos_t).astype(np.int64) + pad
    hw = max(1, int(round(s)))
    dx, dy = _haar_grid(table, sx, sy, hw)
    tdx = _DESC_W * (cos_t * dx + sin_t * dy)
    tdy = _DESC_W * (-sin_t * dx + cos_t * dy)
    tdx4 = tdx.reshape(4, 5, 4, 5)
    tdy4 = tdy.reshape(4, 5, 4, 5)
    feats = np.stack(
        [
            tdx4.sum(axis=(1, 3)),
            tdy4.sum(axis=(1, 3)),
            np.abs(tdx4).sum(axis=(1, 3)),
            np.abs(tdy4).sum(axis=(1, 3)),
        ],
        axis=-1,
    )
    vec = feats.reshape(64)
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec = vec / norm
    return vec


def descriptor_pad(max_scale: float) -> int:
    """Edge-replication margin covering descriptor + orientation support."""
    return int(math.ceil(15.0 * max_scale)) + 2


def detect_surf(
    img: GrayImage, cfg: DetectorConfig | None = None
) -> list[tuple[Keypoint, Descriptor]]:
    """Hessian blob keypoints with oriented 64-entry descriptors."""
    if cfg is None:
        cfg = DetectorConfig()
    require_pipeline_size(img)
    h, w = img.pixels.shape
    t = integral_of_array(img.pixels)
    raw = []
    for octave in range(cfg.surf_octaves):
        raw.extend(_octave_candidates(t, h, w, octave, cfg.surf_hessian_threshold))
    if not raw:
        return []
    kps = [
        Keypoint(x=x, y=y, scale=s, response=r, orientation=0.0)
        for x, y, s, r in raw
    ]
    kps = order_keypoints(kps)[: cfg.max_keypoints]
    pad = descriptor_pad(max(kp.scale for kp in kps))
    table = padded_integral(img, pad)
    out = []
    for kp in kps:
        theta = assign_orientation(table, pad, kp.x, kp.y, kp.scale)
        vec = compute_descriptor(table, pad, kp.x, kp.y, kp.scale, theta)
        oriented = Keypoint(
            x=kp.x, y=kp.y, scale=kp.scale, response=kp.response, orientation=theta
        )
        out.append((oriented, Descriptor(kind="surf64", values=vec)))
    return out


def describe_at(img: GrayImage, pts: list[Keypoint]) -> list[Descriptor]:
    """Descriptors at fixed locations and unit scale (for FAST keypoints).

    Points near the border are described from edge-replicated support,
    never dropped. Orientation is taken from each keypoint (0 = upright).
    """
    for kp in pts:
        if not (0 <= kp.x < img.width and 0 <= kp.y < img.height):
            raise ValueError(f"keypoint ({kp.x}, {kp.y}) outside image bounds")
    if not pts:
        return []
    pad = descriptor_pad(1.0)
    table = padded_integral(img, pad)
    return [
        Descriptor(
            kind="surf64-at-fast",
            values=compute_descriptor(table, pad, kp.x, kp.y, 1.0, kp.orientation),
        )
        for kp in pts
    ]
