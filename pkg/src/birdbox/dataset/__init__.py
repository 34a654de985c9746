"""Dataset curation for both modalities."""

from .boxes import (
    COCO_BIRD_CLASS,
    BoundingBox,
    YoloLabel,
    emit_yolo_label,
    iou,
    nms,
    pad_bbox,
    select_bird_crop,
    write_label_file,
)
from .crops import CropSpec, SourceRect, ValCropPlan, train_crop_geometry, val_crop_geometry
from .fetch import LocalDirectoryFetcher, ObservationFetcher
from .manifest import (
    DEFAULT_QUALITIES,
    SPLIT_NAMES,
    ClassWeights,
    DatasetManifest,
    SampleRecord,
    class_weights,
    ingest,
    largest_remainder_allocation,
    oversample,
    read_catalog_file,
    read_manifest_file,
    read_manifest_lines,
    select_top_classes,
    stratified_split,
    write_catalog_file,
    write_manifest_file,
    write_weights_file,
)

__all__ = [
    "BoundingBox",
    "COCO_BIRD_CLASS",
    "ClassWeights",
    "CropSpec",
    "DEFAULT_QUALITIES",
    "DatasetManifest",
    "LocalDirectoryFetcher",
    "ObservationFetcher",
    "SPLIT_NAMES",
    "SampleRecord",
    "SourceRect",
    "ValCropPlan",
    "YoloLabel",
    "class_weights",
    "emit_yolo_label",
    "ingest",
    "iou",
    "largest_remainder_allocation",
    "nms",
    "oversample",
    "pad_bbox",
    "read_catalog_file",
    "read_manifest_file",
    "read_manifest_lines",
    "select_bird_crop",
    "select_top_classes",
    "stratified_split",
    "train_crop_geometry",
    "val_crop_geometry",
    "write_catalog_file",
    "write_label_file",
    "write_manifest_file",
    "write_weights_file",
]
