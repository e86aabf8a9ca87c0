"""Span masking tests."""

import numpy as np
import pytest

from kidspeech.w2v.config import MaskConfig
from kidspeech.w2v.masking import MaskingError, apply_mask, draw_mask


class TestDrawMask:
    def test_coverage_lands_in_band(self):
        cfg = MaskConfig(span_len=10, target_coverage=0.5)
        rng = np.random.default_rng(0)
        for _ in range(200):
            idx = draw_mask(100, cfg, rng)
            frac = len(idx) / 100
            assert 0.45 <= frac <= 0.55

    def test_indices_sorted_and_unique(self):
        cfg = MaskConfig(span_len=4, target_coverage=0.3)
        idx = draw_mask(60, cfg, np.random.default_rng(1))
        assert np.all(np.diff(idx) > 0)
        assert idx.min() >= 0 and idx.max() < 60

    def test_masked_frames_form_spans(self):
        """Every masked run must be at least span_len long except where
        spans merge at the sequence edge is impossible: runs are unions
        of length-span_len windows, so each run spans >= span_len."""
        cfg = MaskConfig(span_len=5, target_coverage=0.2)
        rng = np.random.default_rng(2)
        for _ in range(50):
            idx = draw_mask(80, cfg, rng)
            mask = np.zeros(80, dtype=bool)
            mask[idx] = True
            padded = np.concatenate([[False], mask, [False]]).astype(int)
            starts = np.flatnonzero(np.diff(padded) == 1)
            ends = np.flatnonzero(np.diff(padded) == -1)
            assert np.all(ends - starts >= 5)

    def test_deterministic_for_seed(self):
        cfg = MaskConfig(span_len=3, target_coverage=0.4)
        a = draw_mask(50, cfg, np.random.default_rng(7))
        b = draw_mask(50, cfg, np.random.default_rng(7))
        np.testing.assert_array_equal(a, b)

    def test_too_short_sequence_rejected(self):
        cfg = MaskConfig(span_len=10, target_coverage=0.5)
        with pytest.raises(MaskingError, match="shorter than span_len"):
            draw_mask(9, cfg, np.random.default_rng(0))

    def test_unreachable_band_raises(self):
        """A span longer than the band ceiling can never land inside it."""
        cfg = MaskConfig(span_len=40, target_coverage=0.1)
        with pytest.raises(MaskingError, match="could not reach"):
            draw_mask(50, cfg, np.random.default_rng(0))


class TestApplyMask:
    def test_masked_rows_replaced_by_vector(self):
        cfg = MaskConfig(span_len=2, target_coverage=0.2)
        latents = np.random.default_rng(3).normal(size=(49, 8))
        vec = np.arange(8.0)
        masked, idx = apply_mask(latents, cfg, vec, np.random.default_rng(4))
        assert np.all(masked[idx] == vec)
        untouched = np.setdiff1d(np.arange(49), idx)
        np.testing.assert_array_equal(masked[untouched], latents[untouched])

    def test_input_not_modified(self):
        cfg = MaskConfig(span_len=2, target_coverage=0.2)
        latents = np.ones((30, 4))
        before = latents.copy()
        apply_mask(latents, cfg, np.zeros(4), np.random.default_rng(5))
        np.testing.assert_array_equal(latents, before)

    def test_matches_draw_mask_with_same_rng(self):
        cfg = MaskConfig(span_len=3, target_coverage=0.3)
        latents = np.zeros((40, 4))
        _, idx = apply_mask(latents, cfg, np.ones(4), np.random.default_rng(6))
        expected = draw_mask(40, cfg, np.random.default_rng(6))
        np.testing.assert_array_equal(idx, expected)

    def test_shape_validation(self):
        cfg = MaskConfig(span_len=2, target_coverage=0.2)
        with pytest.raises(MaskingError, match="latents must be"):
            apply_mask(np.zeros((30, 4)), cfg, np.zeros(5), np.random.default_rng(0))
        with pytest.raises(MaskingError, match="latents must be"):
            apply_mask(np.zeros(30), cfg, np.zeros(4), np.random.default_rng(0))
