"""Crop geometry for classifier training and validation.

Pure geometry only: pixel resampling belongs to the inference engine's
image front-end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError
from .boxes import BoundingBox


@dataclass(frozen=True)
class CropSpec:
    source_image: str
    padded_box: BoundingBox
    max_side: int | None = None


@dataclass(frozen=True)
class SourceRect:
    x0: int
    y0: int
    w: int
    h: int


@dataclass(frozen=True)
class ValCropPlan:
    """Deterministic validation-time geometry: scale, then a centered window."""

    scale: float
    resized_dims: tuple[int, int]  # (width, height) after scaling
    window: SourceRect             # in resized coordinates


def train_crop_geometry(crop_dims, rng_seed: int, out_side: int = 224,
                        area_range=(0.4, 1.0), aspect_range=(3 / 4, 4 / 3)) -> SourceRect:
    """Random source rectangle: area fraction uniform in area_range, aspect
    log-uniform in aspect_range, fully inside the crop.

    Falls back to the centered square after 10 failed attempts. The caller
    resamples the rectangle to out_side x out_side.
    """
    width, height = crop_dims
    if width <= 0 or height <= 0:
        raise PreconditionError(f"crop dims must be positive, got {crop_dims}")
    area = width * height
    rng = np.random.default_rng(rng_seed)
    log_lo, log_hi = math.log(aspect_range[0]), math.log(aspect_range[1])

    for _ in range(10):
        target_area = area * rng.uniform(area_range[0], area_range[1])
        aspect = math.exp(rng.uniform(log_lo, log_hi))
        w = int(round(math.sqrt(target_area * aspect)))
        h = int(round(math.sqrt(target_area / aspect)))
        if not (1 <= w <= width and 1 <= h <= height):
            continue
        if not (area_range[0] <= (w * h) / area <= area_range[1]):
            continue  # integer rounding pushed the fraction out of range
        x0 = int(rng.integers(0, width - w + 1))
        y0 = int(rng.integers(0, height - h + 1))
        return SourceRect(x0=x0, y0=y0, w=w, h=h)

    side = min(width, height)
    return SourceRect(x0=(width - side) // 2, y0=(height - side) // 2, w=side, h=side)


def val_crop_geometry(crop_dims, resize_short: int = 255, out_side: int = 224) -> ValCropPlan:
    """Scale the shorter side to resize_short, then take the centered window."""
    width, height = crop_dims
    if width <= 0 or height <= 0:
        raise PreconditionError(f"crop dims must be positive, got {crop_dims}")
    short = min(width, height)
    scale = resize_short / short
    if width <= height:
        resized = (resize_short, int(round(height * scale)))
    else:
        resized = (int(round(width * scale)), resize_short)
    x0 = (resized[0] - out_side) // 2
    y0 = (resized[1] - out_side) // 2
    return ValCropPlan(scale=scale, resized_dims=resized,
                       window=SourceRect(x0=x0, y0=y0, w=out_side, h=out_side))
