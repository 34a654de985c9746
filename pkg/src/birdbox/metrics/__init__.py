"""Evaluation metrics for classification and detection result tables."""

from ..dataset.boxes import iou
from .classification import (
    EvalSample,
    average_precision,
    balanced_accuracy,
    class_mean_average_precision,
    top_k_accuracy,
)
from .detection import (
    COCO_THRESHOLD_GRID,
    DetectionEvalPair,
    DetectionMapResult,
    detection_map,
)
from .io import (
    evaluation_report,
    format_report_lines,
    parse_detection_lines,
    parse_eval_lines,
    read_detection_file,
    read_eval_file,
)

__all__ = [
    "COCO_THRESHOLD_GRID",
    "DetectionEvalPair",
    "DetectionMapResult",
    "EvalSample",
    "average_precision",
    "balanced_accuracy",
    "class_mean_average_precision",
    "detection_map",
    "evaluation_report",
    "format_report_lines",
    "iou",
    "parse_detection_lines",
    "parse_eval_lines",
    "read_detection_file",
    "read_eval_file",
    "top_k_accuracy",
]
