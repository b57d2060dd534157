"""Keypoint detection and description: FAST corners, SURF blobs, BRISK."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..imgcore import GrayImage

FEATURE_KINDS = ("fast", "surf", "brisk")


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    scale: float = 1.0
    response: float = 0.0
    orientation: float = 0.0  # radians in [0, 2pi); 0 for unoriented modes

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be > 0")

    def to_json_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "scale": self.scale,
            "response": self.response,
            "orientation": self.orientation,
        }


@dataclass(frozen=True)
class Descriptor:
    kind: str  # surf64 | brisk512 | surf64-at-fast
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if self.kind in ("surf64", "surf64-at-fast") and v.shape != (64,):
            raise ValueError(f"{self.kind} descriptor must have 64 entries")
        if self.kind == "brisk512" and v.shape != (512,):
            raise ValueError("brisk512 descriptor must carry exactly 512 bits")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DetectorConfig:
    fast_threshold: int = 20
    fast_arc: int = 9
    surf_hessian_threshold: float = 12.0
    surf_octaves: int = 4
    brisk_threshold: int = 30
    brisk_octaves: int = 3
    max_keypoints: int = 2000

    def __post_init__(self):
        if self.fast_threshold <= 0 or self.surf_hessian_threshold <= 0:
            raise ValueError("detector thresholds must be > 0")
        if self.brisk_threshold <= 0:
            raise ValueError("detector thresholds must be > 0")
        if not 9 <= self.fast_arc <= 12:
            raise ValueError("fast_arc must lie in [9, 12]")
        if self.surf_octaves < 1 or self.brisk_octaves < 1:
            raise ValueError("octave counts must be >= 1")
        if self.max_keypoints < 1:
            raise ValueError("max_keypoints must be >= 1")


def order_keypoints(kps, extras=None):
    """Canonical deterministic order: response desc, ties by (y, x) asc.

    ``extras`` are parallel sequences reordered alongside the keypoints.
    """
    idx = sorted(range(len(kps)), key=lambda i: (-kps[i].response, kps[i].y, kps[i].x))
    ordered = [kps[i] for i in idx]
    if extras is None:
        return ordered
    return ordered, tuple([ex[i] for i in idx] for ex in extras)


def detect_keypoints(img: GrayImage, kind: str, cfg: DetectorConfig | None = None):
    """Dispatch to a detector; returns aligned (keypoints, descriptors) lists.

    FAST keypoints are described with the 64-entry gradient-sum descriptor
    computed at their fixed location and unit scale, so all three feature
    families feed the same real-valued classifier pipeline.
    """
    from . import brisk, fast, surf

    if cfg is None:
        cfg = DetectorConfig()
    if kind == "fast":
        kps = fast.detect_fast(img, cfg)
        descs = surf.describe_at(img, kps)
        return kps, descs
    if kind == "surf":
        pairs = surf.detect_surf(img, cfg)
        return [p[0] for p in pairs], [p[1] for p in pairs]
    if kind == "brisk":
        pairs = brisk.detect_brisk(img, cfg)
        return [p[0] for p in pairs], [p[1] for p in pairs]
    raise ValueError(f"unknown feature kind: {kind!r} (expected one of {FEATURE_KINDS})")
