"""Feature shaping on top of the mel front-end.

Two consumers with different contracts share this module: the species
classifier wants 1 x 128 x 1000 normalized features, the activity detector
wants a 64 x 63 x 1 dB tensor pooled down from the raw frame count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, PreconditionError
from .clip import AudioClip, resample
from .mel import ACTIVITY_MEL, SPECIES_MEL, MelFeatures, mel_spectrogram
from .quant import dequantize, quantize_u8

# AudioSet mean/stdev used by the pretrained audio backbone, with the
# extra factor of two in the denominator.
AUDIOSET_MU = -4.2677393
AUDIOSET_SIGMA = 4.5689974

SPECIES_TARGET_FRAMES = 1000
ACTIVITY_TIME_FRAMES = 63


@dataclass
class NormalizedFeatures:
    """(1, n_mels, n_frames) tensor of (x - mu) / (2 sigma)."""

    values: np.ndarray
    mu: float
    sigma: float


@dataclass(frozen=True)
class SpecAugmentConfig:
    max_freq_bands: int = 15
    max_time_frames: int = 35
    rng_seed: int = 0


def standardize_length(feat: MelFeatures, target_frames: int = SPECIES_TARGET_FRAMES) -> MelFeatures:
    """Truncate to target_frames, or wrap the frame sequence cyclically up to it."""
    if target_frames < 1:
        raise ConfigurationError(f"target_frames must be >= 1, got {target_frames}")
    n = feat.n_frames
    if n < 1:
        raise PreconditionError("cannot standardize an empty spectrogram")
    if n == target_frames:
        return MelFeatures(values=feat.values.copy(), config=feat.config)
    if n > target_frames:
        return MelFeatures(values=feat.values[:, :target_frames].copy(), config=feat.config)
    idx = np.arange(target_frames) % n
    return MelFeatures(values=feat.values[:, idx], config=feat.config)


def normalize_passt(feat: MelFeatures, mu: float = AUDIOSET_MU,
                    sigma: float = AUDIOSET_SIGMA) -> NormalizedFeatures:
    """Affine normalization (x - mu) / (2 sigma), adding the leading channel axis."""
    if sigma <= 0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    values = (feat.values - mu) / (2.0 * sigma)
    return NormalizedFeatures(values=values[np.newaxis, :, :], mu=mu, sigma=sigma)


def spec_augment(feat: NormalizedFeatures, cfg: SpecAugmentConfig,
                 db_floor: float = -80.0) -> NormalizedFeatures:
    """Mask one contiguous frequency band and one contiguous time span.

    Widths are uniform in [0, max]; positions uniform over the valid range;
    the mask value is the post-normalization image of the dB floor, so masked
    cells look like silence. Training-time only.
    """
    _, n_mels, n_frames = feat.values.shape
    rng = np.random.default_rng(cfg.rng_seed)
    masked = feat.values.copy()
    mask_value = (db_floor - feat.mu) / (2.0 * feat.sigma)

    f_width = int(rng.integers(0, min(cfg.max_freq_bands, n_mels) + 1))
    f_start = int(rng.integers(0, n_mels - f_width + 1))
    t_width = int(rng.integers(0, min(cfg.max_time_frames, n_frames) + 1))
    t_start = int(rng.integers(0, n_frames - t_width + 1))

    masked[:, f_start:f_start + f_width, :] = mask_value
    masked[:, :, t_start:t_start + t_width] = mask_value
    return NormalizedFeatures(values=masked, mu=feat.mu, sigma=feat.sigma)


def species_features(clip: AudioClip, target_frames: int = SPECIES_TARGET_FRAMES,
                     mu: float = AUDIOSET_MU, sigma: float = AUDIOSET_SIGMA) -> NormalizedFeatures:
    """Full species-classifier front-end.

    resample -> mel -> dB -> quantize -> dequantize -> wrap/truncate to
    target_frames -> normalize. Output shape (1, 128, target_frames).
    """
    clip = resample(clip, SPECIES_MEL.sample_rate)
    feat = mel_spectrogram(clip, SPECIES_MEL)
    feat = dequantize(quantize_u8(feat))
    feat = standardize_length(feat, target_frames)
    return normalize_passt(feat, mu, sigma)


def activity_features(clip: AudioClip) -> np.ndarray:
    """Activity-detector front-end for a 3 s, 48 kHz mono chunk.

    Log-mel with the activity preset, then the time axis mean-pooled down to
    63 frames. Output shape (64, 63, 1).
    """
    if clip.channel_count != 1:
        raise PreconditionError("activity_features requires a mono clip")
    if clip.sample_rate != ACTIVITY_MEL.sample_rate:
        raise PreconditionError(
            f"expected {ACTIVITY_MEL.sample_rate} Hz input, got {clip.sample_rate} Hz"
        )
    expected = 3 * ACTIVITY_MEL.sample_rate
    if abs(len(clip.samples) - expected) > ACTIVITY_MEL.hop:
        raise PreconditionError(
            f"expected a 3 s chunk ({expected} samples +/- one hop), got {len(clip.samples)}"
        )
    feat = mel_spectrogram(clip, ACTIVITY_MEL)
    pooled = mean_pool_time(feat.values, ACTIVITY_TIME_FRAMES)
    return pooled[:, :, np.newaxis]


def mean_pool_time(values: np.ndarray, target_frames: int) -> np.ndarray:
    """Uniformly partition the time axis into target_frames buckets and average each."""
    n = values.shape[1]
    if n < target_frames:
        raise PreconditionError(f"cannot pool {n} frames down to {target_frames}")
    edges = (np.arange(target_frames + 1) * n) // target_frames
    out = np.empty((values.shape[0], target_frames), dtype=np.float64)
    for i in range(target_frames):
        out[:, i] = values[:, edges[i]:edges[i + 1]].mean(axis=1)
    return out
