"""Two-stage visual pipeline: localize, crop, standardize, classify."""

from __future__ import annotations

import logging

import numpy as np
from PIL import Image

from ..dataset.boxes import pad_bbox, select_bird_crop
from ..dataset.crops import val_crop_geometry
from ..errors import PreconditionError
from ..records import DetectionRecord, now_ms
from .backends import DetectorBackend, ModelBackend, validate_probabilities
from .pipeline import PipelineConfig

log = logging.getLogger(__name__)


def standardize_crop(image: np.ndarray, out_side: int = 224, resize_short: int = 255) -> np.ndarray:
    """Resize the shorter side to resize_short and take the centered window."""
    height, width = image.shape[:2]
    plan = val_crop_geometry((width, height), resize_short=resize_short, out_side=out_side)
    resized = np.asarray(
        Image.fromarray(image).resize(plan.resized_dims, Image.Resampling.BILINEAR)
    )
    win = plan.window
    return resized[win.y0:win.y0 + win.h, win.x0:win.x0 + win.w]


def run_image_pipeline(image: np.ndarray, detector: DetectorBackend,
                       classifier: ModelBackend, catalog,
                       cfg: PipelineConfig | None = None,
                       media_ref: str | None = None) -> DetectionRecord | None:
    """Detector -> bird-crop selection -> padded crop -> classifier.

    No usable bird detection means no record; a record is emitted only when
    the classifier's argmax probability strictly exceeds the image report
    threshold.
    """
    cfg = cfg or PipelineConfig()
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise PreconditionError(f"expected an RGB image (H, W, 3), got shape {image.shape}")
    height, width = image.shape[:2]

    detections = detector.detect(image)
    selected = select_bird_crop(detections, (width, height))
    if selected is None:
        return None
    padded = pad_bbox(selected, pad_fraction=0.15, image_dims=(width, height))
    crop = image[int(padded.y0):int(padded.y1), int(padded.x0):int(padded.x1)]
    if crop.size == 0:
        return None
    standardized = standardize_crop(crop)

    probs = validate_probabilities(classifier.predict(standardized), len(catalog))
    best = int(np.argmax(probs))
    confidence = float(probs[best])
    if confidence <= cfg.image_report_threshold:
        return None
    return DetectionRecord(species=catalog[best], confidence=confidence,
                           timestamp_ms=now_ms(), modality="image", media_ref=media_ref)
