"""Mel spectrogram extraction.

Conventions pinned here (and relied on by the file format and tests):
periodic Hann window, centered frames with reflect padding, Slaney mel
scale with area-normalized triangular filters spanning 0 Hz to Nyquist,
dB referenced to the per-spectrogram power maximum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import PreconditionError
from .clip import AudioClip

_AMIN = 1e-10


@dataclass(frozen=True)
class MelConfig:
    sample_rate: int
    n_mels: int
    n_fft: int
    hop: int
    db_floor: float = -80.0
    db_ceil: float = 0.0

    def __post_init__(self):
        if min(self.sample_rate, self.n_mels, self.n_fft, self.hop) <= 0:
            raise PreconditionError("MelConfig fields must be positive")
        if self.db_floor >= self.db_ceil:
            raise PreconditionError("db_floor must lie below db_ceil")


# Species-classifier front-end: 32 kHz, 128 bands, 512-point FFT, hop 512.
SPECIES_MEL = MelConfig(sample_rate=32_000, n_mels=128, n_fft=512, hop=512)
# Activity-detector front-end: 48 kHz, 64 bands, 2048-point FFT, hop 512.
ACTIVITY_MEL = MelConfig(sample_rate=48_000, n_mels=64, n_fft=2048, hop=512)


@dataclass
class MelFeatures:
    """dB-scaled mel matrix, n_mels x n_frames, clipped to [db_floor, db_ceil]."""

    values: np.ndarray
    config: MelConfig

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


def hz_to_mel(freq):
    """Slaney scale: linear below 1 kHz, logarithmic above."""
    freq = np.asarray(freq, dtype=np.float64)
    f_sp = 200.0 / 3.0
    mel = freq / f_sp
    log_step = np.log(6.4) / 27.0
    above = freq >= 1000.0
    mel = np.where(above, 15.0 + np.log(np.maximum(freq, 1e-30) / 1000.0) / log_step, mel)
    return mel


def mel_to_hz(mel):
    mel = np.asarray(mel, dtype=np.float64)
    f_sp = 200.0 / 3.0
    freq = mel * f_sp
    log_step = np.log(6.4) / 27.0
    above = mel >= 15.0
    return np.where(above, 1000.0 * np.exp(log_step * (mel - 15.0)), freq)


def mel_filterbank(cfg: MelConfig) -> np.ndarray:
    """Area-normalized triangular filterbank, shape (n_mels, n_fft // 2 + 1).

    With a dense band layout (128 bands over a 512-point FFT) some triangles
    fall entirely between FFT bins; those rows get a single tap at the bin
    nearest their center so that every band responds to input energy.
    """
    return _filterbank_cached(cfg).copy()


@lru_cache(maxsize=8)
def _filterbank_cached(cfg: MelConfig) -> np.ndarray:
    fft_freqs = np.linspace(0.0, cfg.sample_rate / 2.0, cfg.n_fft // 2 + 1)
    mel_pts = np.linspace(hz_to_mel(0.0), hz_to_mel(cfg.sample_rate / 2.0), cfg.n_mels + 2)
    hz_pts = mel_to_hz(mel_pts)

    fdiff = np.diff(hz_pts)
    ramps = hz_pts[:, None] - fft_freqs[None, :]
    lower = -ramps[:-2] / fdiff[:-1, None]
    upper = ramps[2:] / fdiff[1:, None]
    weights = np.maximum(0.0, np.minimum(lower, upper))

    enorm = 2.0 / (hz_pts[2:] - hz_pts[:-2])
    weights *= enorm[:, None]

    empty = ~np.any(weights > 0.0, axis=1)
    for m in np.nonzero(empty)[0]:
        nearest = int(np.argmin(np.abs(fft_freqs - hz_pts[m + 1])))
        weights[m, nearest] = enorm[m]
    weights.flags.writeable = False
    return weights


def filter_center_frequencies(cfg: MelConfig) -> np.ndarray:
    mel_pts = np.linspace(hz_to_mel(0.0), hz_to_mel(cfg.sample_rate / 2.0), cfg.n_mels + 2)
    return mel_to_hz(mel_pts)[1:-1]


def _periodic_hann(n: int) -> np.ndarray:
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(n) / n))


def stft_power(samples: np.ndarray, n_fft: int, hop: int) -> np.ndarray:
    """Power spectrogram of the centered, Hann-windowed STFT.

    Frame count is 1 + floor(len / hop); frames are centered via reflect
    padding (edge padding if the signal is too short to reflect).
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 1:
        raise PreconditionError("stft_power requires at least one sample")
    pad = n_fft // 2
    mode = "reflect" if samples.size >= 2 else "edge"
    padded = np.pad(samples, pad, mode=mode)
    n_frames = 1 + samples.size // hop
    frames = sliding_window_view(padded, n_fft)[::hop][:n_frames]
    spectrum = np.fft.rfft(frames * _periodic_hann(n_fft), axis=1)
    return (spectrum.real**2 + spectrum.imag**2).T  # (n_fft//2+1, n_frames)


def power_to_db(power: np.ndarray, db_floor: float, db_ceil: float) -> np.ndarray:
    """dB relative to the spectrogram maximum, clipped to [db_floor, db_ceil].

    Exact digital silence has no peak to reference and maps to the floor.
    """
    ref = float(power.max(initial=0.0))
    if ref <= 0.0:
        return np.full(power.shape, db_floor, dtype=np.float64)
    db = 10.0 * np.log10(np.maximum(power, _AMIN)) - 10.0 * np.log10(max(ref, _AMIN))
    return np.clip(db, db_floor, db_ceil)


def mel_spectrogram(clip: AudioClip, cfg: MelConfig) -> MelFeatures:
    """Peak-referenced dB mel spectrogram of a mono clip."""
    if clip.sample_rate != cfg.sample_rate:
        raise PreconditionError(
            f"clip rate {clip.sample_rate} Hz does not match config rate {cfg.sample_rate} Hz"
        )
    if len(clip.samples) < 1:
        raise PreconditionError("mel_spectrogram requires a non-empty clip")
    power = stft_power(clip.samples, cfg.n_fft, cfg.hop)
    mel_power = _filterbank_cached(cfg) @ power
    return MelFeatures(values=power_to_db(mel_power, cfg.db_floor, cfg.db_ceil), config=cfg)
