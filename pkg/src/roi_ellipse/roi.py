"""Elliptical ROI construction from tumour-labeled points, plus Dice scoring.

The ROI is the axis-aligned ellipse whose four vertices are the extremal
tumour points: leftmost/rightmost x and topmost/bottommost y. Its bounding
box therefore equals the tumour points' bounding box exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EllipseFitError(ValueError):
    """Too few tumour points to place an ellipse."""


@dataclass(frozen=True)
class EllipseROI:
    center_x: float
    center_y: float
    semi_axis_x: float
    semi_axis_y: float
    clamped: bool = False

    def __post_init__(self):
        if self.semi_axis_x < 0 or self.semi_axis_y < 0:
            raise ValueError("semi-axes must be >= 0")

    @property
    def degenerate(self) -> bool:
        return self.semi_axis_x == 0.0 or self.semi_axis_y == 0.0

    def to_json_dict(self) -> dict:
        return {
            "cx": self.center_x,
            "cy": self.center_y,
            "rx": self.semi_axis_x,
            "ry": self.semi_axis_y,
        }

    @staticmethod
    def from_json_dict(d: dict) -> "EllipseROI":
        return EllipseROI(
            center_x=float(d["cx"]),
            center_y=float(d["cy"]),
            semi_axis_x=float(d["rx"]),
            semi_axis_y=float(d["ry"]),
        )


@dataclass(frozen=True)
class DiceScore:
    value: float
    area_e: int
    area_g: int
    area_overlap: int

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "area_e": self.area_e,
            "area_g": self.area_g,
            "area_overlap": self.area_overlap,
        }


def fit_ellipse(points) -> EllipseROI:
    """Axis-aligned ellipse through the extremal points of a tumour cloud.

    center = midpoint of the x/y extents, semi-axes = half the extents.
    Requires at least 3 points; with fewer there is no tumour evidence
    worth an ROI and the caller records a zero score instead.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < 3:
        raise EllipseFitError("insufficient tumour evidence")
    x_l = float(pts[:, 0].min())
    x_r = float(pts[:, 0].max())
    # y_l: minimum row index (visually top), y_h: maximum (visually bottom)
    y_l = float(pts[:, 1].min())
    y_h = float(pts[:, 1].max())
    return EllipseROI(
        center_x=(x_l + x_r) / 2.0,
        center_y=(y_l + y_h) / 2.0,
        semi_axis_x=(x_r - x_l) / 2.0,
        semi_axis_y=(y_h - y_l) / 2.0,
    )


def filter_distance_outliers(points, distances, percentile: float = 95.0):
    """Drop points whose seed distance exceeds the given percentile.

    Optional pre-ellipsification guard against a lone far false positive;
    off by default in the pipeline, which uses the raw extremes.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    d = np.asarray(distances, dtype=np.float64)
    if len(d) != len(pts):
        raise ValueError("points and distances must align")
    if len(d) == 0:
        return pts
    cutoff = np.percentile(d, percentile)
    return pts[d <= cutoff]


def clamp_to_image(e: EllipseROI, width: int, height: int) -> EllipseROI:
    """Clamp the ellipse's vertices into image bounds; records whether it acted."""
    x0 = max(e.center_x - e.semi_axis_x, 0.0)
    x1 = min(e.center_x + e.semi_axis_x, float(width - 1))
    y0 = max(e.center_y - e.semi_axis_y, 0.0)
    y1 = min(e.center_y + e.semi_axis_y, float(height - 1))
    if x1 < x0 or y1 < y0:
        # entire ellipse outside: collapse to a degenerate point at the edge
        x0 = x1 = min(max(e.center_x, 0.0), float(width - 1))
        y0 = y1 = min(max(e.center_y, 0.0), float(height - 1))
    clamped = EllipseROI(
        center_x=(x0 + x1) / 2.0,
        center_y=(y0 + y1) / 2.0,
        semi_axis_x=(x1 - x0) / 2.0,
        semi_axis_y=(y1 - y0) / 2.0,
        clamped=True,
    )
    untouched = (
        clamped.center_x == e.center_x
        and clamped.center_y == e.center_y
        and clamped.semi_axis_x == e.semi_axis_x
        and clamped.semi_axis_y == e.semi_axis_y
    )
    return e if untouched else clamped


def rasterize(e: EllipseROI, width: int, height: int) -> np.ndarray:
    """Pixel-centre sampling of the ellipse interior as a boolean mask.

    Pixel (x, y) is set iff ((x+0.5-cx)/a)^2 + ((y+0.5-cy)/b)^2 <= 1.
    Degenerate (zero-area) ellipses rasterize to an empty mask.
    """
    if width < 0 or height < 0:
        raise ValueError("mask dimensions must be nonnegative")
    mask = np.zeros((height, width), dtype=bool)
    if e.degenerate or width == 0 or height == 0:
        return mask
    xs = (np.arange(width) + 0.5 - e.center_x) / e.semi_axis_x
    ys = (np.arange(height) + 0.5 - e.center_y) / e.semi_axis_y
    mask = (ys[:, None] ** 2 + xs[None, :] ** 2) <= 1.0
    return mask


def dice(e_mask: np.ndarray, g_mask: np.ndarray) -> DiceScore:
    """Dice overlap 2|E n G| / (|E| + |G|) between two binary masks.

    Both masks empty is defined as perfect vacuous agreement (1.0); only
    reachable in synthetic tests.
    """
    e = np.asarray(e_mask, dtype=bool)
    g = np.asarray(g_mask, dtype=bool)
    if e.shape != g.shape:
        raise ValueError(f"mask dimensions differ: {e.shape} vs {g.shape}")
    area_e = int(e.sum())
    area_g = int(g.sum())
    overlap = int((e & g).sum())
    if area_e + area_g == 0:
        return DiceScore(value=1.0, area_e=0, area_g=0, area_overlap=0)
    return DiceScore(
        value=2.0 * overlap / (area_e + area_g),
        area_e=area_e,
        area_g=area_g,
        area_overlap=overlap,
    )
