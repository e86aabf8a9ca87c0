"""Configuration types for the toy self-supervised pretraining stack."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class W2vConfigError(ValueError):
    pass


DEFAULT_KERNELS = (10, 3, 3, 3, 3, 2, 2)
DEFAULT_STRIDES = (5, 2, 2, 2, 2, 2, 2)


@dataclass(frozen=True)
class EncoderConfig:
    """Geometry of the 7-layer convolutional feature encoder.

    The kernel/stride ladder is pinned: it must compose to a 400-sample
    receptive field and a 320-sample hop (20 ms at 16 kHz).  Channel width
    is free; 64 is the toy default.
    """

    channels: int = 64
    kernels: tuple = DEFAULT_KERNELS
    strides: tuple = DEFAULT_STRIDES

    def __post_init__(self):
        if len(self.kernels) != 7 or len(self.strides) != 7:
            raise W2vConfigError("encoder must have exactly 7 layers")
        if self.channels < 1:
            raise W2vConfigError("channels must be >= 1")
        if int(np.prod(self.strides)) != 320:
            raise W2vConfigError("composed stride must be 320 samples (20 ms at 16 kHz)")
        if self.receptive_field() != 400:
            raise W2vConfigError("receptive field must be 400 samples")

    def receptive_field(self) -> int:
        rf, jump = 1, 1
        for k, s in zip(self.kernels, self.strides):
            rf += (k - 1) * jump
            jump *= s
        return rf

    def output_length(self, n_samples: int) -> int:
        t = n_samples
        for k, s in zip(self.kernels, self.strides):
            if t < k:
                return 0
            t = (t - k) // s + 1
        return t


@dataclass(frozen=True)
class QuantizerConfig:
    """Gumbel-softmax codebook shape: G groups of V codewords each.

    ``init_logit_scale`` sets the spread of the initial projection
    weights.  The hard sample is argmax(logits + gumbel) regardless of
    the softmax temperature, so this spread alone decides how strongly
    the initial code assignments follow the latents rather than the
    noise (gumbel std is about 1.28).
    """

    groups: int = 2
    entries: int = 32
    codeword_dim: int = 16
    temperature: float = 2.0
    init_logit_scale: float = 8.0

    def __post_init__(self):
        if self.groups < 1:
            raise W2vConfigError("groups must be >= 1")
        if self.entries < 2:
            raise W2vConfigError("entries per group must be >= 2")
        if self.codeword_dim < 1:
            raise W2vConfigError("codeword_dim must be >= 1")
        if self.temperature <= 0:
            raise W2vConfigError("temperature must be > 0")
        if self.init_logit_scale <= 0:
            raise W2vConfigError("init_logit_scale must be > 0")

    @property
    def quantized_dim(self) -> int:
        return self.groups * self.codeword_dim


@dataclass(frozen=True)
class MaskConfig:
    span_len: int = 10
    target_coverage: float = 0.5

    def __post_init__(self):
        if self.span_len < 1:
            raise W2vConfigError("span_len must be >= 1")
        if not 0 < self.target_coverage < 1:
            raise W2vConfigError("target_coverage must be in (0, 1)")


@dataclass(frozen=True)
class LossConfig:
    similarity_temperature: float = 0.1
    n_negatives: int = 100
    diversity_weight: float = 0.1

    def __post_init__(self):
        if self.similarity_temperature <= 0:
            raise W2vConfigError("similarity temperature must be > 0")
        if self.n_negatives < 0:
            raise W2vConfigError("n_negatives must be >= 0")
        if self.diversity_weight < 0:
            raise W2vConfigError("diversity weight must be >= 0")


@dataclass(frozen=True)
class ContextConfig:
    """Transformer context network over the masked latent sequence."""

    dim: int = 96
    n_blocks: int = 2
    n_heads: int = 4
    ffn_mult: int = 4
    pos_kernel: int = 9
    pos_groups: int = 4

    def __post_init__(self):
        if self.dim < 1 or self.n_blocks < 1:
            raise W2vConfigError("dim and n_blocks must be >= 1")
        if self.dim % self.n_heads != 0:
            raise W2vConfigError("dim must be divisible by n_heads")
        if self.dim % self.pos_groups != 0:
            raise W2vConfigError("dim must be divisible by pos_groups")
        if self.pos_kernel % 2 != 1:
            raise W2vConfigError("pos_kernel must be odd (same-length padding)")


@dataclass(frozen=True)
class CodebookUsage:
    """Averaged codeword probabilities, one distribution per group."""

    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 2:
            raise W2vConfigError("usage must be a (groups, entries) matrix")
        if np.any(probs < 0):
            raise W2vConfigError("usage probabilities must be nonnegative")
        if np.any(np.abs(probs.sum(axis=1) - 1.0) > 1e-6):
            raise W2vConfigError("each group's distribution must sum to 1")
        object.__setattr__(self, "probs", probs)

    @property
    def groups(self) -> int:
        return self.probs.shape[0]

    @property
    def entries(self) -> int:
        return self.probs.shape[1]
