"""Gated audio inference: segmentation, activity gate, species classifier.

The two-stage design exists to keep the duty cycle down: the cheap gate
looks at every segment, the expensive classifier only at segments the gate
passes. Gating fails closed - a broken gate backend suppresses the segment
and the pipeline keeps running.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ..audio.clip import AudioClip
from ..audio.features import activity_features, species_features
from ..errors import ConfigurationError, PreconditionError
from ..records import DetectionRecord, now_ms
from .backends import ModelBackend, validate_probabilities

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    gate_threshold: float = 0.80            # inclusive: p_bird >= threshold passes
    species_report_threshold: float = 0.15  # strict: report iff p > threshold
    image_report_threshold: float = 0.2     # strict
    segment_seconds: float = 3.0
    segment_hop_seconds: float = 3.0

    def __post_init__(self):
        for name in ("gate_threshold", "species_report_threshold", "image_report_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")
        if self.segment_hop_seconds > self.segment_seconds:
            raise ConfigurationError("segment hop must not exceed the segment length")
        if self.segment_hop_seconds <= 0:
            raise ConfigurationError("segment hop must be positive")


@dataclass(frozen=True)
class Segment:
    clip: AudioClip
    index: int
    partial: bool = False


@dataclass(frozen=True)
class GateDecision:
    p_bird: float
    passed: bool
    segment_index: int
    wall_time: float
    error: str | None = None


@dataclass
class DutyCycleStats:
    segments_total: int = 0
    segments_gated_in: int = 0
    classifier_invocations: int = 0
    gate_inferences: int = 0
    backend_errors: int = 0
    records_emitted: int = 0

    @property
    def duty_cycle(self) -> float:
        return self.segments_gated_in / self.segments_total if self.segments_total else 0.0

    def as_dict(self) -> dict:
        return {
            "segments_total": self.segments_total,
            "segments_gated_in": self.segments_gated_in,
            "classifier_invocations": self.classifier_invocations,
            "gate_inferences": self.gate_inferences,
            "backend_errors": self.backend_errors,
            "records_emitted": self.records_emitted,
            "duty_cycle": self.duty_cycle,
        }


def segment_stream(source, cfg: PipelineConfig, sample_rate: int | None = None):
    """Yield fixed-length Segments from an AudioClip or an iterable of blocks.

    Windows of segment_seconds advance by segment_hop_seconds; the final
    partial window is zero-padded to full length and flagged. Nothing is ever
    fabricated silently: a partial segment is visible to the consumer.
    """
    if isinstance(source, AudioClip):
        rate = source.sample_rate
        blocks = iter((source.samples,))
    else:
        if sample_rate is None:
            raise PreconditionError("sample_rate required for block sources")
        rate = sample_rate
        blocks = iter(source)

    window = int(round(cfg.segment_seconds * rate))
    hop = int(round(cfg.segment_hop_seconds * rate))
    if window < 1 or hop < 1:
        raise ConfigurationError("segment window and hop must cover at least one sample")

    buffer = np.zeros(0, dtype=np.float64)
    index = 0
    exhausted = False
    while True:
        while len(buffer) < window and not exhausted:
            try:
                block = np.asarray(next(blocks), dtype=np.float64)
                buffer = np.concatenate([buffer, block])
            except StopIteration:
                exhausted = True
        if len(buffer) >= window:
            yield Segment(clip=AudioClip(buffer[:window].copy(), rate), index=index)
            buffer = buffer[hop:]
            index += 1
        elif exhausted:
            if len(buffer) > 0:
                padded = np.zeros(window, dtype=np.float64)
                padded[:len(buffer)] = buffer
                yield Segment(clip=AudioClip(padded, rate), index=index, partial=True)
            return


def gate(segment: Segment, detector: ModelBackend, cfg: PipelineConfig) -> GateDecision:
    """Score a segment for bird activity; passed iff p_bird >= gate_threshold.

    Backend failure yields a suppressed decision carrying the error text
    (fail-closed): a monitoring station keeps running.
    """
    try:
        if detector.input_kind == "waveform":
            features = segment.clip.samples
        else:
            features = activity_features(segment.clip)
        out = np.asarray(detector.predict(features), dtype=np.float64).reshape(-1)
        p_bird = float(out[0])
        if not 0.0 <= p_bird <= 1.0 or not np.isfinite(p_bird):
            raise ConfigurationError(f"gate produced p_bird={p_bird}")
    except Exception as exc:  # noqa: BLE001 - fail closed on any backend fault
        log.warning("gate backend failed on segment %d: %s", segment.index, exc)
        return GateDecision(p_bird=0.0, passed=False, segment_index=segment.index,
                            wall_time=time.time(), error=str(exc))
    return GateDecision(p_bird=p_bird, passed=p_bird >= cfg.gate_threshold,
                        segment_index=segment.index, wall_time=time.time())


def classify_species(segment: Segment, classifier: ModelBackend, catalog,
                     cfg: PipelineConfig) -> DetectionRecord | None:
    """Run the species front-end and classifier on a gated-in segment.

    Emits a record iff the argmax probability strictly exceeds the report
    threshold. Ties resolve to the lowest class id.
    """
    features = species_features(segment.clip)
    probs = validate_probabilities(classifier.predict(features.values), len(catalog))
    best = int(np.argmax(probs))  # first maximum = lowest class id
    confidence = float(probs[best])
    if confidence <= cfg.species_report_threshold:
        return None
    return DetectionRecord(species=catalog[best], confidence=confidence,
                           timestamp_ms=now_ms(), modality="audio")


def validate_audio_backends(gate_backend: ModelBackend, classifier: ModelBackend,
                            catalog) -> None:
    """Startup wiring check: catalog length must match the classifier head."""
    if not catalog:
        raise ConfigurationError("species catalog is empty")
    probe = getattr(classifier, "probabilities", None)
    if probe is not None and len(probe) != len(catalog):
        raise ConfigurationError(
            f"classifier emits {len(probe)} classes, catalog holds {len(catalog)}")
    if gate_backend.input_kind not in ("activity", "waveform"):
        raise ConfigurationError(
            f"gate backend declares input {gate_backend.input_kind!r}; "
            "expected 'activity' or 'waveform'")


def run_audio_pipeline(source, gate_backend: ModelBackend, classifier: ModelBackend,
                       catalog, cfg: PipelineConfig, sink,
                       sample_rate: int | None = None,
                       stop=None) -> DutyCycleStats:
    """Gate every segment; classify only what passes; deliver records in order."""
    validate_audio_backends(gate_backend, classifier, catalog)
    stats = DutyCycleStats()
    for segment in segment_stream(source, cfg, sample_rate=sample_rate):
        if stop is not None and stop.is_set():
            break
        decision = gate(segment, gate_backend, cfg)
        stats.segments_total += 1
        stats.gate_inferences += 1
        if decision.error is not None:
            stats.backend_errors += 1
        if not decision.passed:
            continue
        stats.segments_gated_in += 1
        stats.classifier_invocations += 1
        try:
            record = classify_species(segment, classifier, catalog, cfg)
        except ConfigurationError:
            raise
        except Exception as exc:  # noqa: BLE001 - keep the pipeline alive
            log.warning("species classifier failed on segment %d: %s", segment.index, exc)
            stats.backend_errors += 1
            continue
        if record is not None:
            stats.records_emitted += 1
            sink(record)
    return stats
