"""Versioned JSON model documents for offline-trained SVM pipelines.

A document bundles everything the interactive paths need to reproduce the
training-time feature space: preprocess and detector settings, the aspect
statistics behind the distance feature, the fitted scaler, and the SVM.
"""

from __future__ import annotations

import json
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from ..classify.svm import SvmModel, svm_train
from ..detect import DetectorConfig
from ..features import ScalerStats, apply_scaler, aspect_stats
from ..preprocess import PreprocessParams
from .dataset import Dataset
from .loo import PipelineConfig, _feature_rows, _image_context, _subsample_rows
from .seeds import derive_seed

FORMAT_NAME = "roi-ellipse-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Model document is missing fields or has the wrong format marker."""


def train_model_document(
    dataset: Dataset, feature_kind: str, cfg: PipelineConfig | None = None
) -> dict:
    """Train an SVM on the whole dataset and package it as a document."""
    cfg = cfg or PipelineConfig()
    contexts = [_image_context(r, feature_kind, cfg) for r in dataset.records]
    aspect = aspect_stats([c.gt for c in contexts])
    X = np.vstack([_feature_rows(c, aspect, cfg.augment_distance) for c in contexts])
    y = np.concatenate([c.labels for c in contexts])
    X, y = _subsample_rows(
        X, y, cfg.max_train_rows, derive_seed(cfg.master_seed, "subsample", "final")
    )
    scaler = ScalerStats(mean=X.mean(axis=0), std=X.std(axis=0))
    model = svm_train(
        apply_scaler(scaler, X),
        y,
        C=cfg.svm_c,
        gamma=cfg.svm_gamma,
        tol=cfg.svm_tol,
        balanced=cfg.svm_balanced,
    )
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "feature": feature_kind,
        "classifier": "svm",
        "augment_distance": cfg.augment_distance,
        "preprocess": asdict(cfg.preprocess),
        "detector": asdict(cfg.detector),
        "aspect": {
            "mean_width": aspect.mean_width,
            "mean_height": aspect.mean_height,
        },
        "scaler": {"mean": scaler.mean.tolist(), "std": scaler.std.tolist()},
        "svm": model.to_json_dict(),
    }


def save_model_document(doc: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_model_document(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model document: {exc}") from exc
    validate_model_document(doc)
    return doc


def validate_model_document(doc: dict) -> None:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"not a {FORMAT_NAME} document")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')!r}")
    for key in ("feature", "preprocess", "detector", "aspect", "scaler", "svm"):
        if key not in doc:
            raise ModelFormatError(f"model document missing {key!r}")


def svm_from_model_doc(doc: dict) -> SvmModel:
    return SvmModel.from_json_dict(doc["svm"])


def config_from_model_doc(doc: dict, base: PipelineConfig) -> PipelineConfig:
    """Pipeline settings pinned by the model, keeping runtime knobs from base."""
    return replace(
        base,
        preprocess=PreprocessParams(**doc["preprocess"]),
        detector=DetectorConfig(**doc["detector"]),
        augment_distance=bool(doc.get("augment_distance", True)),
    )
