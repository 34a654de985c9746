"""Audio decoding and resampling.

Decoding accepts PCM WAV (16-bit int, 32-bit int, 32-bit float). The RIFF
walk is done by hand so decode failures can report a byte offset; sample
conversion is plain numpy.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import DecodeError, EmptyInputError, PreconditionError

WAV_FORMAT_PCM = 1
WAV_FORMAT_IEEE_FLOAT = 3
WAV_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass
class AudioClip:
    """Mono (or pre-downmix multichannel) PCM samples in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int
    channel_count: int = 1

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.sample_rate <= 0:
            raise PreconditionError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise PreconditionError("clip contains non-finite samples")

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


def decode_and_downmix(raw_bytes: bytes, format_hint: str = "wav") -> AudioClip:
    """Decode a PCM WAV container and average channels down to mono."""
    if format_hint.lower().lstrip(".") != "wav":
        raise DecodeError(f"unsupported container format {format_hint!r}; only PCM WAV is built in")
    frames, rate, channels = _parse_wav(raw_bytes)
    if frames.size == 0:
        raise EmptyInputError("WAV file contains zero audio frames")
    mono = frames.mean(axis=1) if channels > 1 else frames[:, 0]
    return AudioClip(samples=mono, sample_rate=rate, channel_count=1)


def _parse_wav(raw: bytes):
    """Walk the RIFF chunks; return (frames[n, channels] float64, rate, channels)."""
    if len(raw) < 12:
        raise DecodeError("file too short for a RIFF header", byte_offset=0)
    if raw[0:4] != b"RIFF":
        raise DecodeError("missing RIFF magic", byte_offset=0)
    if raw[8:12] != b"WAVE":
        raise DecodeError("missing WAVE form type", byte_offset=8)

    fmt = None
    data = None
    data_offset = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body_start = pos + 8
        if body_start + chunk_size > len(raw):
            raise DecodeError(f"chunk {chunk_id!r} overruns file end", byte_offset=pos)
        body = raw[body_start:body_start + chunk_size]
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise DecodeError("fmt chunk shorter than 16 bytes", byte_offset=pos)
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == WAV_FORMAT_EXTENSIBLE and chunk_size >= 40:
                # sub-format GUID starts with the real format code
                (sub_code,) = struct.unpack_from("<H", body, 24)
                fmt = (sub_code,) + fmt[1:]
        elif chunk_id == b"data":
            data = body
            data_offset = body_start
        pos = body_start + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise DecodeError("no fmt chunk found", byte_offset=len(raw))
    if data is None:
        raise DecodeError("no data chunk found", byte_offset=len(raw))

    audio_format, channels, rate, _byte_rate, block_align, bits = fmt
    if channels < 1:
        raise DecodeError("fmt declares zero channels", byte_offset=data_offset)
    if audio_format == WAV_FORMAT_PCM and bits == 16:
        samples = np.frombuffer(data[: len(data) - len(data) % 2], dtype="<i2").astype(np.float64)
        samples /= 32768.0
    elif audio_format == WAV_FORMAT_PCM and bits == 32:
        samples = np.frombuffer(data[: len(data) - len(data) % 4], dtype="<i4").astype(np.float64)
        samples /= 2147483648.0
    elif audio_format == WAV_FORMAT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(data[: len(data) - len(data) % 4], dtype="<f4").astype(np.float64)
    else:
        raise DecodeError(
            f"unsupported WAV encoding (format {audio_format}, {bits}-bit)",
            byte_offset=data_offset,
        )
    n_frames = len(samples) // channels
    return samples[: n_frames * channels].reshape(n_frames, channels), rate, channels


def encode_wav(clip: AudioClip, bits: int = 16) -> bytes:
    """Write a mono 16-bit PCM WAV (test and replay plumbing)."""
    if bits != 16:
        raise PreconditionError("only 16-bit PCM encoding is supported")
    pcm = np.clip(np.round(clip.samples * 32767.0), -32768, 32767).astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, WAV_FORMAT_PCM, 1, clip.sample_rate,
        clip.sample_rate * 2, 2, 16,
        b"data", len(pcm),
    )
    return header + pcm


# Windowed-sinc polyphase resampler: 64 taps per phase under a Kaiser
# window (beta 14.77, ~140 dB stopband). Deterministic and cheap on CPU.
_TAPS_PER_PHASE = 64
_KAISER_BETA = 14.77


def _design_kernel(up: int, down: int) -> np.ndarray:
    half = _TAPS_PER_PHASE * up // 2
    n = np.arange(-half, half + 1, dtype=np.float64)
    cutoff = 1.0 / max(up, down)
    kernel = cutoff * np.sinc(cutoff * n) * np.kaiser(2 * half + 1, _KAISER_BETA)
    return kernel * up  # gain compensates the zero-stuffing


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Band-limited resample of a mono clip. Output length = round(n * target / source)."""
    if clip.channel_count != 1:
        raise PreconditionError("resample requires a mono clip; downmix first")
    if target_rate <= 0:
        raise PreconditionError(f"target_rate must be positive, got {target_rate}")
    if target_rate == clip.sample_rate:
        return AudioClip(clip.samples.copy(), target_rate)

    x = clip.samples
    g = math.gcd(clip.sample_rate, target_rate)
    up, down = target_rate // g, clip.sample_rate // g
    out_len = (2 * len(x) * up + down) // (2 * down)  # round half up
    if len(x) == 0 or out_len == 0:
        return AudioClip(np.zeros(0), target_rate)

    kernel = _design_kernel(up, down)
    delay = (len(kernel) - 1) // 2  # group delay at the upsampled rate

    # Output t sits at upsampled index a = t*down + delay. Splitting the
    # kernel into its `up` phases turns each residue class of a into an
    # ordinary convolution against one phase filter.
    out = np.empty(out_len, dtype=np.float64)
    a = np.arange(out_len) * down + delay
    residue = a % up
    center = a // up
    for r in range(up):
        sel = residue == r
        if not np.any(sel):
            continue
        phase = kernel[r::up]
        conv = np.convolve(x, phase)  # conv[m] = sum_j phase[j] * x[m - j]
        out[sel] = conv[center[sel]]
    return AudioClip(out, target_rate)
