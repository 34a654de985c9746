"""Bounding boxes, NMS, and the weak-label crop selection rules."""

from __future__ import annotations

import math
from dataclasses import dataclass

COCO_BIRD_CLASS = 14


@dataclass(frozen=True)
class BoundingBox:
    """Pixel box, top-left anchored."""

    x0: float
    y0: float
    w: float
    h: float
    confidence: float = 1.0
    class_id: int = 0

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box sides must be positive, got w={self.w}, h={self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def x1(self) -> float:
        return self.x0 + self.w

    @property
    def y1(self) -> float:
        return self.y0 + self.h


@dataclass(frozen=True)
class YoloLabel:
    """Normalized center/size representation, all values in [0, 1]."""

    class_index: int
    cx: float
    cy: float
    bw: float
    bh: float

    def to_line(self) -> str:
        return f"{self.class_index} {self.cx:.6f} {self.cy:.6f} {self.bw:.6f} {self.bh:.6f}"


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes with positive areas."""
    ix0 = max(a.x0, b.x0)
    iy0 = max(a.y0, b.y0)
    ix1 = min(a.x1, b.x1)
    iy1 = min(a.y1, b.y1)
    inter = max(0.0, ix1 - ix0) * max(0.0, iy1 - iy0)
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def nms(detections, iou_threshold: float = 0.5) -> list[BoundingBox]:
    """Greedy non-maximum suppression.

    Repeatedly keeps the most confident remaining box and removes boxes whose
    IoU with it exceeds the threshold. Ties in confidence keep input order.
    """
    remaining = sorted(range(len(detections)), key=lambda i: (-detections[i].confidence, i))
    kept: list[BoundingBox] = []
    suppressed = set()
    for i in remaining:
        if i in suppressed:
            continue
        kept.append(detections[i])
        for j in remaining:
            if j not in suppressed and j != i and iou(detections[i], detections[j]) > iou_threshold:
                suppressed.add(j)
    return kept


def select_bird_crop(detections, image_dims, conf_min: float = 0.1,
                     area_min_fraction: float = 0.005, bird_class: int = COCO_BIRD_CLASS,
                     iou_threshold: float = 0.5) -> BoundingBox | None:
    """Pick the single most confident usable bird detection, or nothing.

    Filters to the bird class, applies NMS, then drops detections below the
    confidence floor or covering less than area_min_fraction of the image.
    Absence is a value: None means the image yields no crop.
    """
    width, height = image_dims
    birds = [d for d in detections if d.class_id == bird_class]
    birds = nms(birds, iou_threshold)
    image_area = float(width) * float(height)
    survivors = [d for d in birds
                 if d.confidence >= conf_min and d.area >= area_min_fraction * image_area]
    if not survivors:
        return None
    return max(survivors, key=lambda d: d.confidence)


def pad_bbox(box: BoundingBox, pad_fraction: float = 0.15, image_dims=None) -> BoundingBox:
    """Grow width and height by pad_fraction (half per side), clamp, round outward."""
    dx = box.w * pad_fraction / 2.0
    dy = box.h * pad_fraction / 2.0
    x0 = box.x0 - dx
    y0 = box.y0 - dy
    x1 = box.x1 + dx
    y1 = box.y1 + dy
    if image_dims is not None:
        width, height = image_dims
        x0 = max(0.0, x0)
        y0 = max(0.0, y0)
        x1 = min(float(width), x1)
        y1 = min(float(height), y1)
    x0, y0 = math.floor(x0), math.floor(y0)
    x1, y1 = math.ceil(x1), math.ceil(y1)
    return BoundingBox(x0=x0, y0=y0, w=x1 - x0, h=y1 - y0,
                       confidence=box.confidence, class_id=box.class_id)


def emit_yolo_label(box: BoundingBox, class_index: int, image_dims) -> YoloLabel:
    """Normalized center/width-height label for a box inside the image."""
    width, height = image_dims
    cx = (box.x0 + box.w / 2.0) / width
    cy = (box.y0 + box.h / 2.0) / height
    bw = box.w / width
    bh = box.h / height
    # clamp so the denormalized box stays inside the unit square
    bw = min(bw, 1.0)
    bh = min(bh, 1.0)
    cx = min(max(cx, bw / 2.0), 1.0 - bw / 2.0)
    cy = min(max(cy, bh / 2.0), 1.0 - bh / 2.0)
    return YoloLabel(class_index=class_index, cx=cx, cy=cy, bw=bw, bh=bh)


def write_label_file(path, labels) -> None:
    """One label per line, matching the image filename stem."""
    with open(path, "w", encoding="utf-8") as fh:
        for label in labels:
            fh.write(label.to_line() + "\n")
