"""Dermoscopy dataset preparation toolkit."""

from ._core import (
    ConfigError,
    Error,
    InvalidArgument,
    IoError,
    ParseError,
    ShapeError,
    close_disk,
    detect_occlusions,
    evaluate,
    fill_holes,
    infer_conv,
    infer_transconv,
    jaccard,
    luminance,
    mse,
    purify,
    rgb_to_hsv,
    roc_auc,
    stack_seven,
    verify_arch,
)

__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgument",
    "IoError",
    "ParseError",
    "ShapeError",
    "close_disk",
    "detect_occlusions",
    "evaluate",
    "fill_holes",
    "infer_conv",
    "infer_transconv",
    "jaccard",
    "luminance",
    "mse",
    "purify",
    "rgb_to_hsv",
    "roc_auc",
    "stack_seven",
    "verify_arch",
]
