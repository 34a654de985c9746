"""The pluggable model-backend contract and its built-in stubs.

A backend is an opaque tensor-in / probability-out component. Training and
the neural runtimes themselves live outside this package; anything that
satisfies the contract can be wired in through a backend manifest, and the
built-in stubs make the whole system testable with no model files.

Backends declare what they consume via ``input_kind``:
    "activity" - (64, 63, 1) activity features; output: (1,) p_bird
    "waveform" - raw mono samples of one segment; output: (1,) p_bird
    "species"  - (1, 128, 1000) normalized features; output: class probabilities
    "image"    - (H, W, 3) uint8 crop; output: class probabilities
"""

from __future__ import annotations

import importlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..dataset.boxes import BoundingBox
from ..errors import BackendError, ConfigurationError

INPUT_KINDS = ("activity", "waveform", "species", "image")


class ModelBackend:
    """Base contract: identity, declared input, deterministic predict()."""

    name: str = "backend"
    version: str = "0"
    input_kind: str = "species"
    input_shape: tuple = ()

    @property
    def identity(self) -> str:
        return f"{self.name}@{self.version}"

    def predict(self, features: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class DetectorBackend:
    """Object-detector contract: image in, localized candidates out."""

    name: str = "detector"
    version: str = "0"
    input_kind: str = "image"
    input_shape: tuple = (None, None, 3)

    @property
    def identity(self) -> str:
        return f"{self.name}@{self.version}"

    def detect(self, image: np.ndarray) -> list[BoundingBox]:
        raise NotImplementedError


def validate_probabilities(probs: np.ndarray, expect_classes: int | None = None) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64).reshape(-1)
    if expect_classes is not None and probs.size != expect_classes:
        raise ConfigurationError(
            f"backend emits {probs.size} classes, catalog holds {expect_classes}")
    if np.any(probs < 0):
        raise BackendError("backend produced negative probabilities")
    if expect_classes is not None and not 0.999 <= probs.sum() <= 1.001:
        raise BackendError(f"class probabilities sum to {probs.sum():.4f}, expected ~1")
    return probs


class ConstantBackend(ModelBackend):
    """Always returns the same vector. The simplest possible stub."""

    def __init__(self, probabilities, name="constant-stub", version="1",
                 input_kind="species", input_shape=()):
        self.probabilities = np.asarray(probabilities, dtype=np.float64)
        self.name = name
        self.version = version
        self.input_kind = input_kind
        self.input_shape = tuple(input_shape)

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self.probabilities.copy()


class EnergyGateBackend(ModelBackend):
    """Gate stub scoring segment loudness.

    Maps segment RMS monotonically onto [0, 1) anchored so that
    p == anchor exactly at rms == rms_level: with the default gate threshold
    of 0.8 a segment passes iff its RMS reaches the configured level.
    """

    name = "energy-gate-stub"
    version = "1"
    input_kind = "waveform"
    input_shape = (None,)

    def __init__(self, rms_level: float = 0.01, anchor: float = 0.8):
        if rms_level <= 0:
            raise ConfigurationError("rms_level must be positive")
        if not 0.0 < anchor < 1.0:
            raise ConfigurationError("anchor must lie strictly inside (0, 1)")
        self.rms_level = rms_level
        self.anchor = anchor

    def predict(self, samples: np.ndarray) -> np.ndarray:
        rms = float(np.sqrt(np.mean(np.square(samples)))) if len(samples) else 0.0
        if rms < self.rms_level:
            p = self.anchor * (rms / self.rms_level)
        else:
            p = self.anchor + (1.0 - self.anchor) * (1.0 - self.rms_level / rms)
        return np.array([p])


class FailingBackend(ModelBackend):
    """Always raises; exercises the fail-closed path."""

    name = "failing-stub"
    version = "1"

    def __init__(self, input_kind="activity"):
        self.input_kind = input_kind

    def predict(self, features: np.ndarray) -> np.ndarray:
        raise BackendError("stub backend configured to fail")


class ConstantDetectorBackend(DetectorBackend):
    """Returns a fixed list of detections for any image."""

    name = "constant-detector-stub"
    version = "1"

    def __init__(self, detections=()):
        self.detections = list(detections)

    def detect(self, image: np.ndarray) -> list[BoundingBox]:
        return list(self.detections)


@dataclass
class BackendManifest:
    """On-disk description of a backend: identity, modality, shapes, locator.

    The plugin locator is "module:callable"; the callable receives the
    manifest's options dict and returns a backend instance. The two built-in
    stub locators need no plugin import.
    """

    name: str
    version: str
    modality: str  # "audio-gate", "audio-species", "image-detector", "image-species"
    input_kind: str
    input_shape: list
    class_catalog: str | None = None
    plugin: str | None = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path) -> "BackendManifest":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        try:
            return cls(
                name=obj["name"],
                version=str(obj["version"]),
                modality=obj["modality"],
                input_kind=obj.get("input_kind", "species"),
                input_shape=list(obj.get("input_shape", [])),
                class_catalog=obj.get("class_catalog"),
                plugin=obj.get("plugin"),
                options=dict(obj.get("options", {})),
            )
        except KeyError as exc:
            raise ConfigurationError(f"backend manifest {path} missing key {exc}") from exc


def load_backend(manifest: BackendManifest):
    """Instantiate the backend a manifest describes."""
    if manifest.plugin in (None, "", "stub:constant"):
        probs = manifest.options.get("probabilities", [1.0])
        return ConstantBackend(probs, name=manifest.name, version=manifest.version,
                               input_kind=manifest.input_kind,
                               input_shape=manifest.input_shape)
    if manifest.plugin == "stub:energy":
        return EnergyGateBackend(
            rms_level=float(manifest.options.get("rms_level", 0.01)),
            anchor=float(manifest.options.get("anchor", 0.8)),
        )
    if ":" not in manifest.plugin:
        raise ConfigurationError(f"plugin locator {manifest.plugin!r} is not module:callable")
    module_name, _, attr = manifest.plugin.partition(":")
    try:
        module = importlib.import_module(module_name)
        factory = getattr(module, attr)
    except (ImportError, AttributeError) as exc:
        raise ConfigurationError(f"cannot load plugin {manifest.plugin!r}: {exc}") from exc
    return factory(manifest.options)
