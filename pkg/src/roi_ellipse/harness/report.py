"""Evaluation report accumulation and Table-style formatting.

The JSON report is fully deterministic for a fixed master seed: rows are
ordered by (feature, classifier, image id) and per-stage runtimes are kept
out of it unless explicitly requested, since wall-clock times never
reproduce bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

_FEATURE_ORDER = ("brisk", "fast", "surf")
_CLASSIFIER_ORDER = ("svm", "kmeans", "fcm")
_CLASSIFIER_DISPLAY = {"svm": "SVM", "kmeans": "k-Means", "fcm": "FCM"}


@dataclass(frozen=True)
class ReportRow:
    image_id: str
    feature: str
    classifier: str
    dice: float
    n_keypoints: int
    runtime_ms: dict = field(default_factory=dict)
    note: str = ""


@dataclass
class EvalReport:
    dataset_name: str
    master_seed: int
    rows: list = field(default_factory=list)
    # per (feature, classifier, test image id): sorted training image ids
    fold_provenance: dict = field(default_factory=dict)

    def combos(self):
        seen = []
        for row in self.rows:
            key = (row.feature, row.classifier)
            if key not in seen:
                seen.append(key)
        return sorted(
            seen,
            key=lambda k: (_CLASSIFIER_ORDER.index(k[1]), _FEATURE_ORDER.index(k[0])),
        )

    def combo_rows(self, feature: str, classifier: str):
        return sorted(
            (r for r in self.rows if r.feature == feature and r.classifier == classifier),
            key=lambda r: r.image_id,
        )


def _mean_std(values) -> tuple[float, float]:
    vals = list(values)
    n = len(vals)
    if n == 0:
        return 0.0, 0.0
    mean = sum(vals) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in vals) / (n - 1)  # sample std
    return mean, math.sqrt(var)


def aggregate(report: EvalReport):
    """Per-(feature, classifier) mean/std of Dice and keypoint counts."""
    out = []
    for feature, classifier in report.combos():
        rows = report.combo_rows(feature, classifier)
        mean_d, std_d = _mean_std(r.dice for r in rows)
        mean_n, std_n = _mean_std(r.n_keypoints for r in rows)
        out.append(
            {
                "features": feature,
                "classifier": classifier,
                "n_images": len(rows),
                "mean_dice": mean_d,
                "std_dice": std_d,
                "mean_keypoints": mean_n,
                "std_keypoints": std_n,
            }
        )
    return out


def format_table(report: EvalReport) -> str:
    """Human-readable comparison table: Features / Classifier / D +- sigma."""
    lines = [f"{'Features':<10}{'Classifier':<12}D ± σ"]
    lines.append("-" * 34)
    last_classifier = None
    for agg in aggregate(report):
        if last_classifier is not None and agg["classifier"] != last_classifier:
            lines.append("-" * 34)
        last_classifier = agg["classifier"]
        lines.append(
            f"{agg['features'].upper():<10}"
            f"{_CLASSIFIER_DISPLAY[agg['classifier']]:<12}"
            f"{agg['mean_dice']:.4f} ± {agg['std_dice']:.4f}"
        )
    return "\n".join(lines)


def report_to_json_dict(report: EvalReport, include_timing: bool = False) -> dict:
    rows = sorted(
        report.rows, key=lambda r: (r.feature, r.classifier, r.image_id)
    )
    row_dicts = []
    for r in rows:
        d = {
            "image_id": r.image_id,
            "features": r.feature,
            "classifier": r.classifier,
            "dice": r.dice,
            "n_keypoints": r.n_keypoints,
            "note": r.note,
        }
        if include_timing:
            d["runtime_ms"] = r.runtime_ms
        row_dicts.append(d)
    return {
        "dataset": report.dataset_name,
        "master_seed": report.master_seed,
        "aggregates": aggregate(report),
        "rows": row_dicts,
    }


def write_report(report: EvalReport, path, include_timing: bool = False) -> None:
    from pathlib import Path

    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(report_to_json_dict(report, include_timing), fh, indent=2, sort_keys=True)
        fh.write("\n")
