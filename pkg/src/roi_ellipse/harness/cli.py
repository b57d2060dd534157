"""Command-line interface.

Subcommands:
  phantoms  generate a synthetic dataset directory
  eval      leave-one-out evaluation with a comparison-table report
  train     fit an SVM pipeline model document on a dataset
  segment   click-to-ellipse on a single image
  serve     run the HTTP service for the browser UI

Exit codes: 0 success, 2 configuration errors, 3 data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..imgcore import ImageLoadError, load_image
from ..preprocess import PreprocessParams
from ..roi import EllipseFitError
from .dataset import DatasetError, discover_dataset
from .loo import CLASSIFIER_KINDS, PipelineConfig, run_matrix, segment_image
from .model_io import (
    ModelFormatError,
    load_model_document,
    save_model_document,
    train_model_document,
)
from .phantom import PhantomParams, write_phantom_suite
from .report import format_table, write_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

_FEATURE_CHOICES = ("fast", "surf", "brisk", "all")
_CLASSIFIER_CHOICES = CLASSIFIER_KINDS + ("all",)


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fhh-beta", type=float, default=1.0, help="hyperbolization fuzzifier exponent")
    p.add_argument("--no-fhh", action="store_true", help="disable contrast enhancement")
    p.add_argument("--no-median", action="store_true", help="disable the 3x3 median filter")
    p.add_argument("--no-distance", action="store_true", help="drop the click-distance feature column")
    p.add_argument("--svm-c", type=float, default=10.0)
    p.add_argument("--svm-gamma", type=float, default=None)
    p.add_argument("--no-class-weights", action="store_true", help="disable balanced class weighting")
    p.add_argument("--grid", action="store_true", help="3-fold grid search over (C, gamma)")
    p.add_argument("--jitter", type=float, default=0.1, help="simulated click jitter fraction")
    p.add_argument("--outlier-filter", action="store_true", help="drop far tumour points before ellipse fitting")
    p.add_argument("--max-train-rows", type=int, default=3000)
    p.add_argument("--workers", type=int, default=1)


def _pipeline_config(args, master_seed: int) -> PipelineConfig:
    return PipelineConfig(
        preprocess=PreprocessParams(
            beta=args.fhh_beta,
            enable_fhh=not args.no_fhh,
            enable_median=not args.no_median,
        ),
        svm_c=args.svm_c,
        svm_gamma=args.svm_gamma,
        svm_balanced=not args.no_class_weights,
        svm_grid=args.grid,
        jitter=args.jitter,
        augment_distance=not args.no_distance,
        outlier_filter=args.outlier_filter,
        max_train_rows=args.max_train_rows,
        master_seed=master_seed,
        workers=args.workers,
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roi-ellipse",
        description="Click-seeded tumour localization with an elliptical ROI",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantoms", help="generate a synthetic phantom dataset")
    p.add_argument("--count", type=int, default=33)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--contrast", type=int, default=60)
    p.add_argument("--min-semi-axis", type=float, default=24.0)
    p.add_argument("--max-semi-axis", type=float, default=42.0)
    p.add_argument("--speckle-grain", type=int, default=3)

    p = sub.add_parser("eval", help="leave-one-out evaluation")
    p.add_argument("--data", required=True)
    p.add_argument("--features", choices=_FEATURE_CHOICES, default="surf")
    p.add_argument("--classifier", choices=_CLASSIFIER_CHOICES, default="svm")
    p.add_argument("--seed", type=int, default=42, help="master seed")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--timing-out", default=None, help="write a report with per-stage runtimes here")
    _add_pipeline_flags(p)

    p = sub.add_parser("train", help="train an SVM pipeline model document")
    p.add_argument("--data", required=True)
    p.add_argument("--features", choices=("fast", "surf", "brisk"), default="surf")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    _add_pipeline_flags(p)

    p = sub.add_parser("segment", help="click-to-ellipse on one image")
    p.add_argument("--image", required=True)
    p.add_argument("--cx", type=float, required=True)
    p.add_argument("--cy", type=float, required=True)
    p.add_argument("--model", default=None, help="model document (required for svm)")
    p.add_argument("--features", choices=("fast", "surf", "brisk"), default="surf")
    p.add_argument("--classifier", choices=CLASSIFIER_KINDS, default="svm")
    p.add_argument("--seed", type=int, default=0, help="clustering seed")
    p.add_argument("--out", required=True, help="write the ellipse JSON here")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--model-dir", default=None)
    p.add_argument("--session-ttl", type=float, default=1800.0)
    p.add_argument("--cors-origin", action="append", default=None)
    return parser


def _cmd_phantoms(args) -> int:
    params = PhantomParams(
        width=args.width,
        height=args.height,
        min_semi_axis=args.min_semi_axis,
        max_semi_axis=args.max_semi_axis,
        contrast=args.contrast,
        speckle_grain=args.speckle_grain,
    )
    ds = write_phantom_suite(args.out, count=args.count, master_seed=args.seed, params=params)
    print(f"wrote {ds.n_images} phantoms to {args.out}")
    return EXIT_OK


def _expand(choice, all_values):
    return list(all_values) if choice == "all" else [choice]


def _cmd_eval(args) -> int:
    dataset = discover_dataset(args.data)
    cfg = _pipeline_config(args, args.seed)
    features = _expand(args.features, ("brisk", "fast", "surf"))
    classifiers = _expand(args.classifier, CLASSIFIER_KINDS)
    report = run_matrix(dataset, features, classifiers, cfg)
    print(format_table(report))
    if args.out:
        write_report(report, args.out, include_timing=False)
        print(f"report written to {args.out}")
    if args.timing_out:
        write_report(report, args.timing_out, include_timing=True)
    return EXIT_OK


def _cmd_train(args) -> int:
    dataset = discover_dataset(args.data)
    cfg = _pipeline_config(args, args.seed)
    doc = train_model_document(dataset, args.features, cfg)
    save_model_document(doc, args.out)
    print(f"model written to {args.out}")
    return EXIT_OK


def _cmd_segment(args) -> int:
    img = load_image(args.image)
    model_doc = None
    if args.model is not None:
        model_doc = load_model_document(args.model)
    if args.classifier == "svm" and model_doc is None:
        print("segment: --model is required with --classifier svm", file=sys.stderr)
        return EXIT_CONFIG
    result = segment_image(
        img,
        args.cx,
        args.cy,
        feature_kind=model_doc["feature"] if model_doc else args.features,
        classifier=args.classifier,
        model_doc=model_doc,
        cluster_seed=args.seed,
    )
    if result.ellipse is None:
        payload = {"error": result.note or "no ROI"}
    else:
        payload = result.ellipse.to_json_dict()
    Path(args.out).write_text(json.dumps(payload, sort_keys=True) + "\n")
    print(f"ellipse written to {args.out}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from ..service import create_app

    app = create_app(
        model_dir=args.model_dir,
        session_ttl=args.session_ttl,
        cors_origins=args.cors_origin or ["*"],
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "phantoms": _cmd_phantoms,
        "eval": _cmd_eval,
        "train": _cmd_train,
        "segment": _cmd_segment,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except (DatasetError, ImageLoadError, ModelFormatError, FileNotFoundError, OSError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, EllipseFitError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
