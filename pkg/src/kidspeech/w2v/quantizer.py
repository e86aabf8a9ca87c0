"""Gumbel-softmax vector quantizer with straight-through gradients.

Latents are sliced into G groups; each slice is multiplied by a
quantization matrix to produce logits over V codewords.  Training draws
a Gumbel-softmax sample and forwards the hard one-hot selection, with
gradients routed through the soft probabilities.  Inference takes the
argmax.  The output is the concatenation of the selected codewords.
"""

from __future__ import annotations

import numpy as np

from ..nnet.layers import Param
from .config import QuantizerConfig


class Quantizer:
    def __init__(self, cfg: QuantizerConfig, z_dim: int, rng: np.random.Generator):
        if z_dim % cfg.groups != 0:
            raise ValueError("latent dim must be divisible by the number of groups")
        self.cfg = cfg
        self.z_dim = z_dim
        self.group_dim = z_dim // cfg.groups
        # wide init so initial logits dominate the Gumbel noise and the
        # sampled targets reflect the latents from the first step
        scale = cfg.init_logit_scale / np.sqrt(self.group_dim)
        self.proj = Param("quant.proj", rng.uniform(
            -scale, scale, size=(cfg.groups, self.group_dim, cfg.entries)))
        self.codebook = Param("quant.codebook", rng.normal(
            0.0, 1.0, size=(cfg.groups, cfg.entries, cfg.codeword_dim)))
        self._cache = None

    def params(self) -> list:
        return [self.proj, self.codebook]

    def forward(self, z: np.ndarray, rng: np.random.Generator | None = None,
                training: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """Quantize (T, z_dim) latents -> (q (T, G*codeword_dim), probs (T, G, V))."""
        cfg = self.cfg
        z = np.asarray(z, dtype=np.float64)
        zg = z.reshape(z.shape[0], cfg.groups, self.group_dim)
        logits = np.einsum("tgd,gdv->tgv", zg, self.proj.value)
        if training:
            if rng is None:
                raise ValueError("training-mode quantization requires an rng")
            u = rng.uniform(1e-12, 1.0 - 1e-12, size=logits.shape)
            scores = (logits - np.log(-np.log(u))) / cfg.temperature
        else:
            scores = logits / cfg.temperature
        scores = scores - scores.max(axis=2, keepdims=True)
        exp = np.exp(scores)
        probs = exp / exp.sum(axis=2, keepdims=True)
        idx = np.argmax(scores, axis=2)
        onehot = np.zeros_like(probs)
        np.put_along_axis(onehot, idx[:, :, None], 1.0, axis=2)
        q = np.einsum("tgv,gvc->tgc", onehot, self.codebook.value)
        q = q.reshape(z.shape[0], cfg.quantized_dim)
        self._cache = (zg, probs, onehot) if training else None
        return q, probs

    def backward(self, grad_q: np.ndarray, grad_probs: np.ndarray | None = None) -> np.ndarray:
        """Accumulate parameter grads; return grad wrt the latent input."""
        if self._cache is None:
            raise RuntimeError("backward called without a training forward cache")
        zg, probs, onehot = self._cache
        self._cache = None
        cfg = self.cfg
        gq = np.asarray(grad_q, dtype=np.float64).reshape(
            zg.shape[0], cfg.groups, cfg.codeword_dim)
        # hard selection feeds the codebook grad; the soft path feeds logits
        self.codebook.grad += np.einsum("tgv,tgc->gvc", onehot, gq)
        grad_soft = np.einsum("tgc,gvc->tgv", gq, self.codebook.value)
        if grad_probs is not None:
            grad_soft = grad_soft + grad_probs
        inner = (grad_soft * probs).sum(axis=2, keepdims=True)
        grad_logits = probs * (grad_soft - inner) / cfg.temperature
        self.proj.grad += np.einsum("tgd,tgv->gdv", zg, grad_logits)
        grad_zg = np.einsum("tgv,gdv->tgd", grad_logits, self.proj.value)
        return grad_zg.reshape(zg.shape[0], self.z_dim)
