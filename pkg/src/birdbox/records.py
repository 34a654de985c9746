"""The detection record: the unit flowing from pipelines to store to dashboard."""

from __future__ import annotations

import time
from dataclasses import dataclass

MODALITIES = ("audio", "image")


@dataclass(frozen=True)
class DetectionRecord:
    """A reported sighting. ``seq`` is 0 until assigned by the store."""

    species: str
    confidence: float
    timestamp_ms: int
    modality: str
    seq: int = 0
    media_ref: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if self.modality not in MODALITIES:
            raise ValueError(f"modality must be one of {MODALITIES}, got {self.modality!r}")

    def to_wire(self) -> dict:
        wire = {
            "seq": self.seq,
            "species": self.species,
            "confidence": self.confidence,
            "timestamp_ms": self.timestamp_ms,
            "modality": self.modality,
        }
        if self.media_ref is not None:
            wire["media_ref"] = self.media_ref
        return wire

    @classmethod
    def from_wire(cls, obj: dict) -> "DetectionRecord":
        return cls(
            species=obj["species"],
            confidence=float(obj["confidence"]),
            timestamp_ms=int(obj["timestamp_ms"]),
            modality=obj["modality"],
            seq=int(obj.get("seq", 0)),
            media_ref=obj.get("media_ref"),
        )


def now_ms() -> int:
    return int(time.time() * 1000)
