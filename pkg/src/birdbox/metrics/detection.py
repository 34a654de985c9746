"""Detection mAP over IoU thresholds with greedy one-to-one matching."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dataset.boxes import BoundingBox, iou
from ..errors import PreconditionError
from .classification import average_precision

# the 0.5:0.95 preset: ten thresholds in 0.05 steps
COCO_THRESHOLD_GRID = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))


@dataclass
class DetectionEvalPair:
    """Predictions and ground truth for one image."""

    predictions: list[tuple[BoundingBox, int, float]]  # (box, class, confidence)
    ground_truth: list[tuple[BoundingBox, int]]        # (box, class)

    def __post_init__(self):
        for _, _, conf in self.predictions:
            if not 0.0 <= conf <= 1.0:
                raise PreconditionError(f"confidence {conf} outside [0, 1]")


@dataclass
class DetectionMapResult:
    map_per_threshold: dict[float, float]
    map_mean: float
    excluded_classes: list[int] = field(default_factory=list)


def _class_ap(pairs, cls: int, threshold: float) -> float | None:
    n_pos = sum(1 for pair in pairs for _, c in pair.ground_truth if c == cls)
    if n_pos == 0:
        return None
    preds = []
    for pair_idx, pair in enumerate(pairs):
        for pred_idx, (box, c, conf) in enumerate(pair.predictions):
            if c == cls:
                preds.append((-conf, pair_idx, pred_idx, box))
    preds.sort(key=lambda p: (p[0], p[1], p[2]))  # conf desc, ties by sample index
    if not preds:
        return 0.0

    matched: dict[int, set[int]] = {}
    relevance = []
    for _, pair_idx, _, box in preds:
        taken = matched.setdefault(pair_idx, set())
        best_iou, best_gt = 0.0, None
        for gt_idx, (gt_box, c) in enumerate(pairs[pair_idx].ground_truth):
            if c != cls or gt_idx in taken:
                continue
            overlap = iou(box, gt_box)
            if overlap > best_iou:
                best_iou, best_gt = overlap, gt_idx
        if best_gt is not None and best_iou >= threshold:
            taken.add(best_gt)
            relevance.append(1)
        else:
            relevance.append(0)
    return average_precision(relevance, n_positives=n_pos)


def detection_map(pairs, iou_thresholds=COCO_THRESHOLD_GRID) -> DetectionMapResult:
    """mAP per IoU threshold and their mean.

    Per class and threshold, predictions are sorted by confidence and matched
    greedily to the unmatched same-class ground-truth box of highest IoU at or
    above the threshold; each ground-truth box matches at most one prediction.
    Classes with no ground truth anywhere are excluded and reported.
    """
    thresholds = list(iou_thresholds)
    if any(not 0.0 < t <= 1.0 for t in thresholds):
        raise PreconditionError("IoU thresholds must lie in (0, 1]")
    pairs = list(pairs)
    gt_classes = sorted({c for pair in pairs for _, c in pair.ground_truth})
    pred_classes = sorted({c for pair in pairs for _, c, _ in pair.predictions})
    excluded = [c for c in pred_classes if c not in set(gt_classes)]

    per_threshold = {}
    for threshold in thresholds:
        aps = [_class_ap(pairs, cls, threshold) for cls in gt_classes]
        aps = [a for a in aps if a is not None]
        per_threshold[threshold] = sum(aps) / len(aps) if aps else 0.0
    mean = sum(per_threshold.values()) / len(per_threshold)
    return DetectionMapResult(map_per_threshold=per_threshold, map_mean=mean,
                              excluded_classes=excluded)
