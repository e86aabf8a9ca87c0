"""Context network: projection, convolutional positions, transformer blocks.

The latent sequence is projected up to the context width, a grouped
convolution adds relative positional information as a residual, then a
small stack of post-norm transformer blocks mixes the sequence.
"""

from __future__ import annotations

import numpy as np

from ..nnet import layers as L
from .config import ContextConfig


class MultiHeadSelfAttention(L.Layer):
    def __init__(self, dim: int, n_heads: int, rng: np.random.Generator):
        self.dim = dim
        self.n_heads = n_heads
        self.head_dim = dim // n_heads
        self.wq = L.Param("wq", L.glorot_uniform(rng, (dim, dim), dim, dim))
        self.wk = L.Param("wk", L.glorot_uniform(rng, (dim, dim), dim, dim))
        self.wv = L.Param("wv", L.glorot_uniform(rng, (dim, dim), dim, dim))
        self.wo = L.Param("wo", L.glorot_uniform(rng, (dim, dim), dim, dim))
        self.bq = L.Param("bq", np.zeros(dim))
        self.bk = L.Param("bk", np.zeros(dim))
        self.bv = L.Param("bv", np.zeros(dim))
        self.bo = L.Param("bo", np.zeros(dim))

    def params(self) -> list:
        return [self.wq, self.bq, self.wk, self.bk, self.wv, self.bv,
                self.wo, self.bo]

    def _split(self, x: np.ndarray) -> np.ndarray:
        return x.reshape(x.shape[0], self.n_heads, self.head_dim).transpose(1, 0, 2)

    def _merge(self, x: np.ndarray) -> np.ndarray:
        return x.transpose(1, 0, 2).reshape(x.shape[1], self.dim)

    def forward(self, x, training=False, rng=None):
        qh = self._split(x @ self.wq.value + self.bq.value)
        kh = self._split(x @ self.wk.value + self.bk.value)
        vh = self._split(x @ self.wv.value + self.bv.value)
        scores = qh @ kh.transpose(0, 2, 1) / np.sqrt(self.head_dim)
        attn = L.softmax(scores, axis=-1)
        merged = self._merge(attn @ vh)
        self._cache = (x, qh, kh, vh, attn, merged)
        return merged @ self.wo.value + self.bo.value

    def backward(self, grad_out):
        x, qh, kh, vh, attn, merged = self._take_cache()
        self.wo.grad += merged.T @ grad_out
        self.bo.grad += grad_out.sum(axis=0)
        d_merged = self._split(grad_out @ self.wo.value.T)
        d_attn = d_merged @ vh.transpose(0, 2, 1)
        d_vh = attn.transpose(0, 2, 1) @ d_merged
        d_scores = attn * (d_attn - (d_attn * attn).sum(axis=-1, keepdims=True))
        d_scores /= np.sqrt(self.head_dim)
        d_qh = d_scores @ kh
        d_kh = d_scores.transpose(0, 2, 1) @ qh
        dq, dk, dv = (self._merge(d) for d in (d_qh, d_kh, d_vh))
        self.wq.grad += x.T @ dq
        self.bq.grad += dq.sum(axis=0)
        self.wk.grad += x.T @ dk
        self.bk.grad += dk.sum(axis=0)
        self.wv.grad += x.T @ dv
        self.bv.grad += dv.sum(axis=0)
        return dq @ self.wq.value.T + dk @ self.wk.value.T + dv @ self.wv.value.T


class TransformerBlock(L.Layer):
    """Post-norm block: LN(x + attn(x)) then LN(h + ffn(h))."""

    def __init__(self, dim: int, n_heads: int, ffn_mult: int, rng: np.random.Generator):
        self.attn = MultiHeadSelfAttention(dim, n_heads, rng)
        self.norm1 = L.LayerNorm(dim)
        self.ff1 = L.Dense(dim, ffn_mult * dim, rng=rng)
        self.act = L.Gelu()
        self.ff2 = L.Dense(ffn_mult * dim, dim, rng=rng)
        self.norm2 = L.LayerNorm(dim)

    def params(self) -> list:
        out = []
        for sub in (self.attn, self.norm1, self.ff1, self.ff2, self.norm2):
            out.extend(sub.params())
        return out

    def forward(self, x, training=False, rng=None):
        h = self.norm1.forward(x + self.attn.forward(x, training=training),
                               training=training)
        f = self.ff2.forward(self.act.forward(self.ff1.forward(h, training=training),
                                              training=training), training=training)
        return self.norm2.forward(h + f, training=training)

    def backward(self, grad_out):
        g2 = self.norm2.backward(grad_out)
        dh = g2 + self.ff1.backward(self.act.backward(self.ff2.backward(g2)))
        g1 = self.norm1.backward(dh)
        return g1 + self.attn.backward(g1)


class ContextNetwork:
    def __init__(self, cfg: ContextConfig, in_dim: int, rng: np.random.Generator):
        self.cfg = cfg
        self.proj = L.Dense(in_dim, cfg.dim, rng=rng)
        self.pos_conv = L.Conv1d(cfg.dim, cfg.dim, cfg.pos_kernel, stride=1,
                                 padding=cfg.pos_kernel // 2, groups=cfg.pos_groups,
                                 rng=rng)
        self.pos_act = L.Gelu()
        self.blocks = [TransformerBlock(cfg.dim, cfg.n_heads, cfg.ffn_mult, rng)
                       for _ in range(cfg.n_blocks)]
        for i, p in enumerate(self.params()):
            p.name = f"ctx.{i}.{p.name}"

    def params(self) -> list:
        out = self.proj.params() + self.pos_conv.params()
        for block in self.blocks:
            out.extend(block.params())
        return out

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] == 0:
            raise ValueError("context input must be a nonempty (frames, dim) array")
        h = self.proj.forward(x, training=training)
        h = h + self.pos_act.forward(self.pos_conv.forward(h, training=training),
                                     training=training)
        for block in self.blocks:
            h = block.forward(h, training=training)
        return h

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        for block in reversed(self.blocks):
            grad_out = block.backward(grad_out)
        grad_out = grad_out + self.pos_conv.backward(self.pos_act.backward(grad_out))
        return self.proj.backward(grad_out)
