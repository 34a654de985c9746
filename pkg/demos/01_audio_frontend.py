"""Audio front-end walkthrough: chirp -> mel -> quantized file -> model tensor.

Run:  python demos/01_audio_frontend.py
"""

import tempfile
from pathlib import Path

import numpy as np

from birdbox import audio

# ---------------------------------------------------------------------------
# 1. Synthesize a 10 s chirp at 48 kHz (stands in for a field recording).
# ---------------------------------------------------------------------------
rate = 48_000
seconds = 10.0
t = np.arange(int(seconds * rate)) / rate
sweep = 500.0 * t + (8000.0 - 500.0) / (2 * seconds) * t**2
clip = audio.AudioClip(0.5 * np.sin(2 * np.pi * sweep), rate)
print(f"source: {clip.duration_seconds:.1f}s at {clip.sample_rate} Hz")

# ---------------------------------------------------------------------------
# 2. Resample to the species-classifier rate and extract the mel spectrogram.
# ---------------------------------------------------------------------------
clip32 = audio.resample(clip, audio.SPECIES_MEL.sample_rate)
feat = audio.mel_spectrogram(clip32, audio.SPECIES_MEL)
print(f"mel features: {feat.values.shape} in [{feat.values.min():.1f}, "
      f"{feat.values.max():.1f}] dB")

# ---------------------------------------------------------------------------
# 3. Quantize to 8 bits and write the ZWSP container (compact edge storage).
# ---------------------------------------------------------------------------
q = audio.quantize_u8(feat)
zwsp_path = Path(tempfile.gettempdir()) / "demo_chirp.zwsp"
audio.write_zwsp(zwsp_path, q)
print(f"wrote {zwsp_path} ({zwsp_path.stat().st_size} bytes, "
      f"24-byte header + {q.values.size} codes)")

loaded = audio.read_zwsp(zwsp_path)
assert np.array_equal(loaded.values, q.values)
roundtrip = audio.dequantize(loaded)
print(f"round-trip dB error <= {np.max(np.abs(roundtrip.values - feat.values)):.4f} "
      f"(half a quantization step is {80 / 255 / 2:.4f})")

# ---------------------------------------------------------------------------
# 4. Standardize to 1000 frames and normalize for the classifier backbone.
# ---------------------------------------------------------------------------
padded = audio.standardize_length(roundtrip, 1000)
normalized = audio.normalize_passt(padded)
print(f"model input: {normalized.values.shape} "
      f"(mu={normalized.mu}, sigma={normalized.sigma})")

# The one-call equivalent of steps 2-4:
direct = audio.species_features(clip)
assert direct.values.shape == (1, 128, 1000)

# ---------------------------------------------------------------------------
# 5. Training-time SpecAugment is seeded and bounded.
# ---------------------------------------------------------------------------
aug = audio.spec_augment(normalized, audio.SpecAugmentConfig(rng_seed=7))
changed = (aug.values != normalized.values).sum()
print(f"spec_augment masked {changed} cells "
      f"({changed / normalized.values.size:.1%} of the tensor)")

# ---------------------------------------------------------------------------
# 6. The activity detector uses its own cheaper front-end: 64 x 63 x 1.
# ---------------------------------------------------------------------------
chunk = audio.AudioClip(clip.samples[: 3 * rate], rate)
act = audio.activity_features(chunk)
print(f"activity features: {act.shape}, mean {act.mean():.1f} dB")
