"""8-bit quantization of dB mel features and the ZWSP file container.

ZWSP layout (little-endian, 24-byte header):

    magic "ZWSP" | version u16 | n_mels u16 | n_frames u32 | sample_rate u32
    | hop u16 | n_fft u16 | db_floor i16 | db_ceil i16

followed by n_mels * n_frames unsigned bytes in mel-band-major order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import DecodeError, PreconditionError
from .mel import MelConfig, MelFeatures

ZWSP_MAGIC = b"ZWSP"
ZWSP_VERSION = 1
_HEADER = struct.Struct("<4sHHIIHHhh")
assert _HEADER.size == 24


@dataclass
class QuantizedSpectrogram:
    values: np.ndarray  # uint8, (n_mels, n_frames)
    config: MelConfig

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


def quantize_u8(feat: MelFeatures) -> QuantizedSpectrogram:
    """Linear map of [db_floor, db_ceil] onto 0..255, rounding half away from zero."""
    cfg = feat.config
    span = cfg.db_ceil - cfg.db_floor
    scaled = (feat.values - cfg.db_floor) / span * 255.0
    # values are non-negative after the shift, so half-up == half-away-from-zero
    codes = np.clip(np.floor(scaled + 0.5), 0.0, 255.0).astype(np.uint8)
    return QuantizedSpectrogram(values=codes, config=cfg)


def dequantize(q: QuantizedSpectrogram) -> MelFeatures:
    cfg = q.config
    span = cfg.db_ceil - cfg.db_floor
    values = q.values.astype(np.float64) / 255.0 * span + cfg.db_floor
    return MelFeatures(values=values, config=cfg)


def write_zwsp(path, q: QuantizedSpectrogram) -> None:
    cfg = q.config
    if q.values.dtype != np.uint8 or q.values.ndim != 2:
        raise PreconditionError("ZWSP payload must be a 2-D uint8 matrix")
    n_mels, n_frames = q.values.shape
    header = _HEADER.pack(
        ZWSP_MAGIC, ZWSP_VERSION, n_mels, n_frames,
        cfg.sample_rate, cfg.hop, cfg.n_fft,
        int(cfg.db_floor), int(cfg.db_ceil),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(q.values).tobytes())


def read_zwsp(path) -> QuantizedSpectrogram:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise DecodeError("file shorter than the 24-byte ZWSP header", byte_offset=0)
    magic, version, n_mels, n_frames, rate, hop, n_fft, floor, ceil = _HEADER.unpack_from(raw, 0)
    if magic != ZWSP_MAGIC:
        raise DecodeError(f"bad magic {magic!r}", byte_offset=0)
    if version != ZWSP_VERSION:
        raise DecodeError(f"unsupported ZWSP version {version}", byte_offset=4)
    expected = n_mels * n_frames
    payload = raw[_HEADER.size:]
    if len(payload) != expected:
        raise DecodeError(
            f"payload holds {len(payload)} bytes, header promises {expected}",
            byte_offset=_HEADER.size,
        )
    cfg = MelConfig(
        sample_rate=rate, n_mels=n_mels, n_fft=n_fft, hop=hop,
        db_floor=float(floor), db_ceil=float(ceil),
    )
    values = np.frombuffer(payload, dtype=np.uint8).reshape(n_mels, n_frames).copy()
    return QuantizedSpectrogram(values=values, config=cfg)
