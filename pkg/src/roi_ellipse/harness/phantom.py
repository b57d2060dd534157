"""Synthetic speckle phantoms standing in for the (private) clinical scans.

Each phantom is a mid-gray background with one darker (hypoechoic) filled
ellipse, multiplied by a Rayleigh speckle field generated at a coarse grain
and upsampled, which mimics the granular multiplicative texture of B-mode
imaging. The ground truth is the exact lesion ellipse mask.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..features import GroundTruth
from ..imgcore import GrayImage, resize_bilinear, save_image
from ..roi import EllipseROI, rasterize
from .dataset import Dataset, DatasetRecord
from .seeds import derive_seed


@dataclass(frozen=True)
class PhantomParams:
    width: int = 256
    height: int = 256
    min_semi_axis: float = 24.0
    max_semi_axis: float = 42.0
    contrast: int = 60
    background: int = 130
    speckle_grain: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.min_semi_axis <= 0 or self.max_semi_axis < self.min_semi_axis:
            raise ValueError("invalid lesion semi-axis range")
        if not 0 <= self.contrast <= self.background:
            raise ValueError("contrast must lie in [0, background]")
        if self.speckle_grain < 1:
            raise ValueError("speckle grain must be >= 1")
        margin = 0.1 * min(self.width, self.height)
        if margin + self.max_semi_axis >= min(self.width, self.height) / 2.0:
            raise ValueError(
                "lesion cannot fit inside the image with a 10% margin"
            )


def generate_phantom(p: PhantomParams) -> tuple[GrayImage, GroundTruth]:
    """Deterministic phantom + exact lesion mask for the given seed."""
    rng = np.random.default_rng(p.seed)
    a = rng.uniform(p.min_semi_axis, p.max_semi_axis)
    b = rng.uniform(p.min_semi_axis, p.max_semi_axis)
    margin = 0.1 * min(p.width, p.height)
    cx = rng.uniform(margin + a, p.width - 1 - margin - a)
    cy = rng.uniform(margin + b, p.height - 1 - margin - b)
    lesion = EllipseROI(center_x=cx, center_y=cy, semi_axis_x=a, semi_axis_y=b)
    mask = rasterize(lesion, p.width, p.height)

    base = np.full((p.height, p.width), float(p.background))
    base[mask] = float(p.background - p.contrast)
    gh = max(2, math.ceil(p.height / p.speckle_grain))
    gw = max(2, math.ceil(p.width / p.speckle_grain))
    # Rayleigh with unit mean keeps region means at their base levels
    field = rng.rayleigh(scale=math.sqrt(2.0 / math.pi), size=(gh, gw))
    field = resize_bilinear(field, p.height, p.width)
    img = GrayImage(np.clip(np.rint(base * field), 0, 255).astype(np.uint8))
    return img, GroundTruth(mask)


def write_phantom_suite(
    out_dir,
    count: int = 33,
    master_seed: int = 7,
    params: PhantomParams | None = None,
) -> Dataset:
    """Generate a dataset directory: images/, masks/, manifest.json."""
    if count < 2:
        raise ValueError("a dataset needs at least 2 images for leave-one-out")
    base = params or PhantomParams()
    root = Path(out_dir)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "masks").mkdir(parents=True, exist_ok=True)
    records = []
    for i in range(count):
        image_id = f"phantom_{i:03d}"
        p = PhantomParams(
            width=base.width,
            height=base.height,
            min_semi_axis=base.min_semi_axis,
            max_semi_axis=base.max_semi_axis,
            contrast=base.contrast,
            background=base.background,
            speckle_grain=base.speckle_grain,
            seed=derive_seed(master_seed, "phantom", image_id),
        )
        img, gt = generate_phantom(p)
        image_path = root / "images" / f"{image_id}.png"
        mask_path = root / "masks" / f"{image_id}.png"
        save_image(img, image_path)
        save_image(
            GrayImage(np.where(gt.mask, 255, 0).astype(np.uint8)), mask_path
        )
        records.append(
            DatasetRecord(image_id=image_id, image_path=image_path, mask_path=mask_path)
        )
    manifest = {
        "name": root.name,
        "count": count,
        "master_seed": master_seed,
        "params": {
            "width": base.width,
            "height": base.height,
            "min_semi_axis": base.min_semi_axis,
            "max_semi_axis": base.max_semi_axis,
            "contrast": base.contrast,
            "background": base.background,
            "speckle_grain": base.speckle_grain,
        },
    }
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return Dataset(name=root.name, records=tuple(records))
