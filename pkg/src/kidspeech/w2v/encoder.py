"""Convolutional feature encoder: raw waveform to latent frames.

Seven blocks of temporal convolution, layer normalization, and GELU.
Input is a mono sample array at 16 kHz; output is (frames, channels)
with one frame per 20 ms.
"""

from __future__ import annotations

import numpy as np

from ..nnet import layers as L
from .config import EncoderConfig


class Encoder:
    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.blocks = []
        in_ch = 1
        for i, (k, s) in enumerate(zip(cfg.kernels, cfg.strides)):
            conv = L.Conv1d(in_ch, cfg.channels, k, stride=s, rng=rng)
            norm = L.LayerNorm(cfg.channels)
            for p in conv.params() + norm.params():
                p.name = f"enc{i}.{p.name}"
            self.blocks.append((conv, norm, L.Gelu()))
            in_ch = cfg.channels

    def params(self) -> list:
        out = []
        for conv, norm, _ in self.blocks:
            out.extend(conv.params())
            out.extend(norm.params())
        return out

    def forward(self, samples: np.ndarray, training: bool = False) -> np.ndarray:
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("encoder input must be a 1-D sample array")
        if samples.shape[0] < self.cfg.receptive_field():
            raise ValueError(
                f"clip of {samples.shape[0]} samples is shorter than the "
                f"{self.cfg.receptive_field()}-sample receptive field")
        x = samples[:, None]
        for conv, norm, act in self.blocks:
            x = act.forward(norm.forward(conv.forward(x, training=training),
                                         training=training), training=training)
        return x

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        for conv, norm, act in reversed(self.blocks):
            grad_out = conv.backward(norm.backward(act.backward(grad_out)))
        return grad_out[:, 0]
