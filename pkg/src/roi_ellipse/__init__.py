"""Semi-automated tumour localization in B-mode ultrasound images.

Given a grayscale image and one user-supplied centre click, the pipeline
detects keypoints, augments their descriptors with an aspect-weighted
distance to the click, classifies them as tumour/non-tumour, and fits an
axis-aligned ellipse through the extremal tumour points as the ROI.
Evaluation is leave-one-out, scored with the Dice coefficient.
"""

__version__ = "0.1.0"

from .imgcore import GrayImage, IntegralImage, box_sum, integral, load_image, save_image
from .preprocess import PreprocessParams, fuzzy_hyperbolize, median3, preprocess
from .detect import Descriptor, DetectorConfig, Keypoint, detect_keypoints
from .features import (
    AspectStats,
    FeatureMatrix,
    GroundTruth,
    SeedPoint,
    aspect_stats,
    build_matrix,
    label_keypoints,
    standardize,
    weighted_distance,
)
from .roi import DiceScore, EllipseROI, dice, fit_ellipse, rasterize

__all__ = [
    "AspectStats",
    "Descriptor",
    "DetectorConfig",
    "DiceScore",
    "EllipseROI",
    "FeatureMatrix",
    "GrayImage",
    "GroundTruth",
    "IntegralImage",
    "Keypoint",
    "PreprocessParams",
    "SeedPoint",
    "aspect_stats",
    "box_sum",
    "build_matrix",
    "detect_keypoints",
    "dice",
    "fit_ellipse",
    "fuzzy_hyperbolize",
    "integral",
    "label_keypoints",
    "load_image",
    "median3",
    "preprocess",
    "rasterize",
    "save_image",
    "standardize",
    "weighted_distance",
]
