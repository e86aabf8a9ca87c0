"""Span masking over latent frames.

Fixed-length spans are drawn at random until the masked fraction lands
in the coverage band (target +/- 0.05); overshooting restarts the draw.
Masked frames are replaced by a single learned vector.
"""

from __future__ import annotations

import numpy as np

from .config import MaskConfig

MAX_RESTARTS = 1000


class MaskingError(ValueError):
    pass


def draw_mask(n_frames: int, cfg: MaskConfig, rng: np.random.Generator) -> np.ndarray:
    """Return sorted masked frame indices with coverage in the band."""
    if n_frames < cfg.span_len:
        raise MaskingError(
            f"sequence of {n_frames} frames is shorter than span_len {cfg.span_len}")
    lo = cfg.target_coverage - 0.05
    hi = cfg.target_coverage + 0.05
    for _ in range(MAX_RESTARTS):
        masked = np.zeros(n_frames, dtype=bool)
        while True:
            frac = masked.sum() / n_frames
            if lo <= frac <= hi:
                return np.flatnonzero(masked)
            if frac > hi:
                break
            start = int(rng.integers(0, n_frames - cfg.span_len + 1))
            masked[start:start + cfg.span_len] = True
    raise MaskingError(
        f"could not reach coverage {lo:.2f}-{hi:.2f} on {n_frames} frames "
        f"with span_len {cfg.span_len}")


def apply_mask(latents: np.ndarray, cfg: MaskConfig, mask_vector: np.ndarray,
               rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Replace randomly chosen spans with the learned vector.

    Returns (masked copy of latents, sorted masked indices).
    """
    latents = np.asarray(latents, dtype=np.float64)
    mask_vector = np.asarray(mask_vector, dtype=np.float64)
    if latents.ndim != 2 or mask_vector.shape != (latents.shape[1],):
        raise MaskingError("latents must be (frames, dim) and mask_vector (dim,)")
    indices = draw_mask(latents.shape[0], cfg, rng)
    masked = latents.copy()
    masked[indices] = mask_vector
    return masked, indices
