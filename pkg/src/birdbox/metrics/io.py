"""Evaluation file formats and report assembly.

Classification input: one line per sample, true class id followed by the
space-separated score vector. Detection input: one JSON object per line with
image id, class, box, and (for predictions) a confidence.
"""

from __future__ import annotations

import json

import numpy as np

from ..dataset.boxes import BoundingBox
from ..errors import IngestError
from .classification import (
    EvalSample,
    balanced_accuracy,
    class_mean_average_precision,
    top_k_accuracy,
)
from .detection import COCO_THRESHOLD_GRID, DetectionEvalPair, detection_map


def parse_eval_lines(lines) -> list[EvalSample]:
    samples = []
    for line_no, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts:
            continue
        try:
            true_class = int(parts[0])
            scores = np.array([float(p) for p in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise IngestError(f"eval line {line_no} unparseable: {exc}") from exc
        if scores.size == 0:
            raise IngestError(f"eval line {line_no} has no scores")
        samples.append(EvalSample(scores=scores, true_class=true_class))
    return samples


def read_eval_file(path) -> list[EvalSample]:
    with open(path, encoding="utf-8") as fh:
        return parse_eval_lines(fh)


def parse_detection_lines(lines) -> list[DetectionEvalPair]:
    """Objects with a confidence are predictions; without, ground truth."""
    by_image: dict[str, DetectionEvalPair] = {}
    order: list[str] = []
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            image = str(obj["image"])
            cls = int(obj["class"])
            x0, y0, w, h = (float(v) for v in obj["box"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise IngestError(f"detection line {line_no} unparseable: {exc}") from exc
        if image not in by_image:
            by_image[image] = DetectionEvalPair(predictions=[], ground_truth=[])
            order.append(image)
        box = BoundingBox(x0=x0, y0=y0, w=w, h=h)
        if "confidence" in obj:
            by_image[image].predictions.append((box, cls, float(obj["confidence"])))
        else:
            by_image[image].ground_truth.append((box, cls))
    return [by_image[name] for name in order]


def read_detection_file(path) -> list[DetectionEvalPair]:
    with open(path, encoding="utf-8") as fh:
        return parse_detection_lines(fh)


def evaluation_report(samples=None, pairs=None, top_k=(1, 5),
                      iou_thresholds=COCO_THRESHOLD_GRID) -> dict:
    """Machine-readable summary object covering whatever inputs are present."""
    report: dict = {}
    if samples:
        excluded: list[int] = []
        report["n_samples"] = len(samples)
        for k in top_k:
            report[f"top{k}_accuracy"] = top_k_accuracy(samples, k)
        report["balanced_accuracy"] = balanced_accuracy(samples, excluded_out=excluded)
        report["cmap"] = class_mean_average_precision(samples)
        if excluded:
            report["classes_excluded"] = excluded
    if pairs:
        result = detection_map(pairs, iou_thresholds)
        report["map_per_iou"] = {f"{t:.2f}": v for t, v in result.map_per_threshold.items()}
        if 0.5 in result.map_per_threshold:
            report["map@0.5"] = result.map_per_threshold[0.5]
        report["map@mean"] = result.map_mean
        if result.excluded_classes:
            report["detection_classes_excluded"] = result.excluded_classes
    return report


def format_report_lines(report: dict) -> list[str]:
    """Flat key/value lines for terminal output."""
    lines = []
    for key, value in report.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                lines.append(f"{key}[{sub}] {v:.6f}" if isinstance(v, float) else f"{key}[{sub}] {v}")
        elif isinstance(value, float):
            lines.append(f"{key} {value:.6f}")
        else:
            lines.append(f"{key} {value}")
    return lines
