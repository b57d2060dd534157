"""Dataset directory layout and discovery.

Layout: <root>/images/<id>.png|pgm + <root>/masks/<id>.png|pgm, with an
optional <root>/seeds.json mapping id -> {"x": ..., "y": ...} of recorded
clicks. Without a recorded click the harness simulates one near the
ground-truth centroid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..features import SeedPoint

_IMAGE_SUFFIXES = (".png", ".pgm")


@dataclass(frozen=True)
class DatasetRecord:
    image_id: str
    image_path: Path
    mask_path: Path
    seed: SeedPoint | None = None


@dataclass(frozen=True)
class Dataset:
    name: str
    records: tuple

    @property
    def n_images(self) -> int:
        return len(self.records)


class DatasetError(ValueError):
    """Dataset directory is missing, malformed, or inconsistent."""


def discover_dataset(root) -> Dataset:
    """Scan a dataset directory; every image must have exactly one mask."""
    root = Path(root)
    images_dir = root / "images"
    masks_dir = root / "masks"
    if not images_dir.is_dir() or not masks_dir.is_dir():
        raise DatasetError(f"{root} must contain images/ and masks/ directories")
    seeds = {}
    seeds_file = root / "seeds.json"
    if seeds_file.is_file():
        try:
            raw = json.loads(seeds_file.read_text())
        except json.JSONDecodeError as exc:
            raise DatasetError(f"seeds.json is not valid JSON: {exc}") from exc
        for image_id, pt in raw.items():
            seeds[image_id] = SeedPoint(
                x=float(pt["x"]), y=float(pt["y"]), source="user-click"
            )
    records = []
    for image_path in sorted(images_dir.iterdir()):
        if image_path.suffix.lower() not in _IMAGE_SUFFIXES:
            continue
        image_id = image_path.stem
        candidates = [
            masks_dir / f"{image_id}{suffix}" for suffix in _IMAGE_SUFFIXES
        ]
        mask_paths = [c for c in candidates if c.is_file()]
        if len(mask_paths) != 1:
            raise DatasetError(
                f"image {image_id!r} must have exactly one mask, found {len(mask_paths)}"
            )
        records.append(
            DatasetRecord(
                image_id=image_id,
                image_path=image_path,
                mask_path=mask_paths[0],
                seed=seeds.get(image_id),
            )
        )
    if len(records) < 2:
        raise DatasetError(
            f"dataset {root} has {len(records)} usable images; need >= 2 for leave-one-out"
        )
    return Dataset(name=root.name, records=tuple(records))
