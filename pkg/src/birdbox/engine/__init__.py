"""Runtime inference engine: backends, gated audio pipeline, image pipeline."""

from .backends import (
    BackendManifest,
    ConstantBackend,
    ConstantDetectorBackend,
    DetectorBackend,
    EnergyGateBackend,
    FailingBackend,
    ModelBackend,
    load_backend,
    validate_probabilities,
)
from .pipeline import (
    DutyCycleStats,
    GateDecision,
    PipelineConfig,
    Segment,
    classify_species,
    gate,
    run_audio_pipeline,
    segment_stream,
    validate_audio_backends,
)
from .vision import run_image_pipeline, standardize_crop

__all__ = [
    "BackendManifest",
    "ConstantBackend",
    "ConstantDetectorBackend",
    "DetectorBackend",
    "DutyCycleStats",
    "EnergyGateBackend",
    "FailingBackend",
    "GateDecision",
    "ModelBackend",
    "PipelineConfig",
    "Segment",
    "classify_species",
    "gate",
    "load_backend",
    "run_audio_pipeline",
    "run_image_pipeline",
    "segment_stream",
    "standardize_crop",
    "validate_audio_backends",
    "validate_probabilities",
]
