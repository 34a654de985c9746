"""Audio front-ends: decoding, resampling, mel features, quantized storage."""

from .clip import AudioClip, decode_and_downmix, encode_wav, resample
from .features import (
    ACTIVITY_TIME_FRAMES,
    AUDIOSET_MU,
    AUDIOSET_SIGMA,
    SPECIES_TARGET_FRAMES,
    NormalizedFeatures,
    SpecAugmentConfig,
    activity_features,
    normalize_passt,
    spec_augment,
    species_features,
    standardize_length,
)
from .mel import (
    ACTIVITY_MEL,
    SPECIES_MEL,
    MelConfig,
    MelFeatures,
    filter_center_frequencies,
    hz_to_mel,
    mel_filterbank,
    mel_spectrogram,
    mel_to_hz,
    power_to_db,
    stft_power,
)
from .quant import QuantizedSpectrogram, dequantize, quantize_u8, read_zwsp, write_zwsp

__all__ = [
    "ACTIVITY_MEL",
    "ACTIVITY_TIME_FRAMES",
    "AUDIOSET_MU",
    "AUDIOSET_SIGMA",
    "AudioClip",
    "MelConfig",
    "MelFeatures",
    "NormalizedFeatures",
    "QuantizedSpectrogram",
    "SPECIES_MEL",
    "SPECIES_TARGET_FRAMES",
    "SpecAugmentConfig",
    "activity_features",
    "decode_and_downmix",
    "dequantize",
    "encode_wav",
    "filter_center_frequencies",
    "hz_to_mel",
    "mel_filterbank",
    "mel_spectrogram",
    "mel_to_hz",
    "normalize_passt",
    "power_to_db",
    "quantize_u8",
    "read_zwsp",
    "resample",
    "spec_augment",
    "species_features",
    "standardize_length",
    "stft_power",
    "write_zwsp",
]
