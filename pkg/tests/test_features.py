"""Feature shaping: wrap padding, normalization, SpecAugment, activity tensor."""

import numpy as np
import pytest

from birdbox.audio import (
    AUDIOSET_MU,
    AUDIOSET_SIGMA,
    SPECIES_MEL,
    AudioClip,
    MelFeatures,
    NormalizedFeatures,
    SpecAugmentConfig,
    activity_features,
    normalize_passt,
    spec_augment,
    species_features,
    standardize_length,
)
from birdbox.errors import ConfigurationError, PreconditionError

from oracles import oracle_wrap_pad


def feat(values):
    return MelFeatures(values=np.asarray(values, dtype=float), config=SPECIES_MEL)


class TestStandardizeLength:
    def test_wrap_pattern(self):
        out = standardize_length(feat([[1.0, 2.0, 3.0]]), target_frames=7)
        assert out.values.tolist() == [[1, 2, 3, 1, 2, 3, 1]]

    def test_identity_at_target(self):
        values = np.random.default_rng(0).normal(size=(4, 10))
        out = standardize_length(feat(values), target_frames=10)
        np.testing.assert_array_equal(out.values, values)

    def test_truncates_long_input(self):
        values = np.arange(20, dtype=float).reshape(1, 20)
        out = standardize_length(feat(values), target_frames=5)
        assert out.values.tolist() == [[0, 1, 2, 3, 4]]

    def test_frame_999_wraps_to_373(self):
        values = np.arange(626, dtype=float).reshape(1, 626)
        out = standardize_length(feat(values), target_frames=1000)
        assert out.values[0, 999] == 373.0  # 999 mod 626

    def test_matches_reference(self):
        values = np.random.default_rng(4).normal(size=(8, 37))
        out = standardize_length(feat(values), target_frames=100)
        np.testing.assert_array_equal(out.values, oracle_wrap_pad(values, 100))

    def test_wrap_introduces_no_new_values(self):
        values = np.random.default_rng(9).normal(size=(3, 11))
        out = standardize_length(feat(values), target_frames=50)
        assert set(np.round(out.values.ravel(), 12)) <= set(np.round(values.ravel(), 12))

    def test_rejects_bad_target(self):
        with pytest.raises(ConfigurationError):
            standardize_length(feat([[1.0]]), target_frames=0)


class TestNormalize:
    def test_mu_maps_to_zero(self):
        out = normalize_passt(feat([[AUDIOSET_MU]]))
        assert out.values[0, 0, 0] == 0.0

    def test_mu_plus_two_sigma_maps_to_one(self):
        out = normalize_passt(feat([[AUDIOSET_MU + 2 * AUDIOSET_SIGMA]]))
        assert out.values[0, 0, 0] == pytest.approx(1.0, abs=1e-12)
        assert AUDIOSET_MU + 2 * AUDIOSET_SIGMA == pytest.approx(4.8702555)

    def test_default_constants(self):
        assert AUDIOSET_MU == -4.2677393
        assert AUDIOSET_SIGMA == 4.5689974

    def test_affine_property(self):
        rng = np.random.default_rng(6)
        a, b = rng.uniform(-80, 0, size=2)
        na = normalize_passt(feat([[a]])).values[0, 0, 0]
        nb = normalize_passt(feat([[b]])).values[0, 0, 0]
        assert na - nb == pytest.approx((a - b) / (2 * AUDIOSET_SIGMA), abs=1e-12)

    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(ConfigurationError):
            normalize_passt(feat([[0.0]]), sigma=0.0)


def normalized(shape=(1, 128, 1000), seed=0):
    rng = np.random.default_rng(seed)
    return NormalizedFeatures(values=rng.normal(size=shape), mu=AUDIOSET_MU, sigma=AUDIOSET_SIGMA)


class TestSpecAugment:
    def test_deterministic_under_seed(self):
        base = normalized()
        cfg = SpecAugmentConfig(rng_seed=42)
        a = spec_augment(base, cfg)
        b = spec_augment(base, cfg)
        np.testing.assert_array_equal(a.values, b.values)

    def test_mask_widths_bounded(self):
        base = normalized(shape=(1, 64, 200))
        floor_value = (-80.0 - base.mu) / (2 * base.sigma)
        for seed in range(2000):
            out = spec_augment(base, SpecAugmentConfig(rng_seed=seed))
            diff = out.values[0] != base.values[0]
            freq_rows = np.nonzero(diff.all(axis=1))[0]
            time_cols = np.nonzero(diff.all(axis=0))[0]
            assert len(freq_rows) <= 15
            assert len(time_cols) <= 35
            # masked cells carry the normalized silence value
            assert np.all(out.values[0][diff] == floor_value)

    def test_unmasked_cells_untouched(self):
        base = normalized(shape=(1, 32, 60), seed=3)
        out = spec_augment(base, SpecAugmentConfig(rng_seed=5))
        diff = out.values[0] != base.values[0]
        freq_rows = diff.all(axis=1)
        time_cols = diff.all(axis=0)
        outside = ~freq_rows[:, None] & ~time_cols[None, :]
        np.testing.assert_array_equal(out.values[0][outside], base.values[0][outside])

    def test_zero_width_draw_leaves_input_identical(self):
        base = normalized(shape=(1, 16, 30), seed=8)
        hit = False
        for seed in range(500):
            out = spec_augment(base, SpecAugmentConfig(rng_seed=seed))
            if np.array_equal(out.values, base.values):
                hit = True
                break
        assert hit, "no seed in range produced two zero-width masks"


class TestSpeciesFrontend:
    def test_end_to_end_shape(self):
        rng = np.random.default_rng(10)
        clip = AudioClip(rng.normal(size=48000 * 2) * 0.1, 48000)
        out = species_features(clip)
        assert out.values.shape == (1, 128, 1000)

    def test_short_clip_still_full_shape(self):
        clip = AudioClip(np.random.default_rng(1).normal(size=600) * 0.1, 32000)
        out = species_features(clip)
        assert out.values.shape == (1, 128, 1000)


class TestActivityFeatures:
    def test_shape_64x63x1(self):
        clip = AudioClip(np.random.default_rng(0).normal(size=144000) * 0.1, 48000)
        assert activity_features(clip).shape == (64, 63, 1)

    def test_silence_sits_at_floor(self):
        out = activity_features(AudioClip(np.zeros(144000), 48000))
        assert np.all(out == -80.0)

    def test_constant_in_time_pools_to_constant(self):
        clip = AudioClip(np.random.default_rng(2).normal(size=144000) * 0.1, 48000)
        from birdbox.audio.features import mean_pool_time
        row = np.linspace(-70, -10, 64)
        values = np.tile(row[:, None], (1, 282))
        pooled = mean_pool_time(values, 63)
        np.testing.assert_allclose(pooled, np.tile(row[:, None], (1, 63)), atol=1e-12)

    def test_wrong_rate_rejected(self):
        with pytest.raises(PreconditionError) as err:
            activity_features(AudioClip(np.zeros(96000), 32000))
        assert "48000" in str(err.value) and "32000" in str(err.value)

    def test_wrong_duration_rejected(self):
        with pytest.raises(PreconditionError) as err:
            activity_features(AudioClip(np.zeros(100000), 48000))
        assert "144000" in str(err.value)

    def test_duration_tolerance_one_hop(self):
        clip = AudioClip(np.zeros(144000 - 512), 48000)
        assert activity_features(clip).shape == (64, 63, 1)
