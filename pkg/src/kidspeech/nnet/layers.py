"""From-scratch neural layers with explicit forward and backward passes.

Every layer follows the same protocol: ``forward`` caches what backward
needs, ``backward`` consumes the cache, accumulates parameter gradients
and returns the input gradient.  Everything runs in double precision so
gradients can be validated against central finite differences.

Sequence inputs are (time, channels); vector inputs are plain 1-D arrays.
There is no batch axis: callers accumulate gradients across samples.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf


class Param:
    """A trainable tensor and its gradient accumulator."""

    __slots__ = ("name", "value", "grad")

    def __init__(self, name: str, value: np.ndarray):
        self.name = name
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)


class Layer:
    def params(self) -> list[Param]:
        return []

    def forward(self, x: np.ndarray, training: bool = False, rng=None) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _take_cache(self):
        cache = getattr(self, "_cache", None)
        if cache is None:
            raise RuntimeError(f"{type(self).__name__}.backward called without a forward cache")
        self._cache = None
        return cache


def glorot_uniform(rng, shape, fan_in, fan_out) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Conv1d(Layer):
    """Temporal convolution on (T, C) input, optionally strided/padded/grouped."""

    def __init__(self, in_channels: int, out_channels: int, kernel: int,
                 stride: int = 1, padding: int = 0, groups: int = 1, rng=None):
        if kernel < 1 or stride < 1:
            raise ValueError("kernel and stride must be >= 1")
        if in_channels % groups or out_channels % groups:
            raise ValueError("channels must divide evenly into groups")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        self.stride = stride
        self.padding = padding
        self.groups = groups
        rng = rng if rng is not None else np.random.default_rng(0)
        fan_in = (in_channels // groups) * kernel
        fan_out = (out_channels // groups) * kernel
        self.weight = Param("conv.weight", glorot_uniform(
            rng, (out_channels, in_channels // groups, kernel), fan_in, fan_out))
        self.bias = Param("conv.bias", np.zeros(out_channels))
        self._cache = None

    def params(self):
        return [self.weight, self.bias]

    def out_length(self, t_in: int) -> int:
        usable = t_in + 2 * self.padding - self.kernel
        if usable < 0:
            raise ValueError(f"input of {t_in} frames shorter than kernel {self.kernel}")
        return usable // self.stride + 1

    def forward(self, x, training=False, rng=None):
        if x.ndim != 2 or x.shape[1] != self.in_channels:
            raise ValueError(f"expected (T, {self.in_channels}) input, got {x.shape}")
        if self.padding:
            x = np.pad(x, ((self.padding, self.padding), (0, 0)))
        if x.shape[0] < self.kernel:
            raise ValueError(f"input of {x.shape[0]} frames shorter than kernel {self.kernel}")
        t_out = (x.shape[0] - self.kernel) // self.stride + 1
        # (T_out, C_in, K) windows
        windows = np.lib.stride_tricks.sliding_window_view(x, self.kernel, axis=0)[::self.stride]
        windows = windows[:t_out]
        out = np.empty((t_out, self.out_channels))
        cg = self.in_channels // self.groups
        og = self.out_channels // self.groups
        for g in range(self.groups):
            w = self.weight.value[g * og:(g + 1) * og]
            out[:, g * og:(g + 1) * og] = np.einsum(
                "tck,ock->to", windows[:, g * cg:(g + 1) * cg, :], w)
        out += self.bias.value
        self._cache = (windows, x.shape[0])
        return out

    def backward(self, grad_out):
        windows, t_padded = self._take_cache()
        cg = self.in_channels // self.groups
        og = self.out_channels // self.groups
        dx_padded = np.zeros((t_padded, self.in_channels))
        t_out = grad_out.shape[0]
        for g in range(self.groups):
            go = grad_out[:, g * og:(g + 1) * og]
            win_g = windows[:, g * cg:(g + 1) * cg, :]
            self.weight.grad[g * og:(g + 1) * og] += np.einsum("to,tck->ock", go, win_g)
            dwin = np.einsum("to,ock->tck", go, self.weight.value[g * og:(g + 1) * og])
            for j in range(self.kernel):
                dx_padded[j:j + (t_out - 1) * self.stride + 1:self.stride,
                          g * cg:(g + 1) * cg] += dwin[:, :, j]
        self.bias.grad += grad_out.sum(axis=0)
        if self.padding:
            return dx_padded[self.padding:-self.padding]
        return dx_padded


class Dense(Layer):
    """Affine map on the last axis."""

    def __init__(self, in_features: int, out_features: int, rng=None):
        rng = rng if rng is not None else np.random.default_rng(0)
        self.in_features = in_features
        self.out_features = out_features
        self.weight = Param("dense.weight", glorot_uniform(
            rng, (in_features, out_features), in_features, out_features))
        self.bias = Param("dense.bias", np.zeros(out_features))
        self._cache = None

    def params(self):
        return [self.weight, self.bias]

    def forward(self, x, training=False, rng=None):
        if x.shape[-1] != self.in_features:
            raise ValueError(f"expected last dim {self.in_features}, got {x.shape}")
        self._cache = x
        return x @ self.weight.value + self.bias.value

    def backward(self, grad_out):
        x = self._take_cache()
        x2 = x.reshape(-1, self.in_features)
        g2 = grad_out.reshape(-1, self.out_features)
        self.weight.grad += x2.T @ g2
        self.bias.grad += g2.sum(axis=0)
        return (g2 @ self.weight.value.T).reshape(x.shape)


class Relu(Layer):
    def __init__(self):
        self._cache = None

    def forward(self, x, training=False, rng=None):
        mask = x > 0
        self._cache = mask
        return np.where(mask, x, 0.0)

    def backward(self, grad_out):
        mask = self._take_cache()
        return np.where(mask, grad_out, 0.0)


class Gelu(Layer):
    """Exact Gaussian-error-linear unit: x * Phi(x)."""

    def __init__(self):
        self._cache = None

    def forward(self, x, training=False, rng=None):
        cdf = 0.5 * (1.0 + erf(x / np.sqrt(2.0)))
        self._cache = (x, cdf)
        return x * cdf

    def backward(self, grad_out):
        x, cdf = self._take_cache()
        pdf = np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
        return grad_out * (cdf + x * pdf)


class LayerNorm(Layer):
    """Normalize the last axis, with learnable gain and shift."""

    def __init__(self, dim: int, eps: float = 1e-5):
        self.dim = dim
        self.eps = eps
        self.gamma = Param("ln.gamma", np.ones(dim))
        self.beta = Param("ln.beta", np.zeros(dim))
        self._cache = None

    def params(self):
        return [self.gamma, self.beta]

    def forward(self, x, training=False, rng=None):
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected last dim {self.dim}, got {x.shape}")
        mean = x.mean(axis=-1, keepdims=True)
        var = x.var(axis=-1, keepdims=True)
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean) * inv_std
        self._cache = (xhat, inv_std)
        return self.gamma.value * xhat + self.beta.value

    def backward(self, grad_out):
        xhat, inv_std = self._take_cache()
        self.gamma.grad += (grad_out * xhat).reshape(-1, self.dim).sum(axis=0)
        self.beta.grad += grad_out.reshape(-1, self.dim).sum(axis=0)
        dxhat = grad_out * self.gamma.value
        m1 = dxhat.mean(axis=-1, keepdims=True)
        m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
        return inv_std * (dxhat - m1 - xhat * m2)


class Dropout(Layer):
    """Inverted dropout: scaled at train time, identity at inference."""

    def __init__(self, rate: float):
        if not (0.0 <= rate < 1.0):
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self._cache = None

    def forward(self, x, training=False, rng=None):
        if not training or self.rate == 0.0:
            self._cache = (None,)
            return x
        if rng is None:
            raise ValueError("dropout in training mode needs an rng")
        mask = (rng.random(x.shape) >= self.rate) / (1.0 - self.rate)
        self._cache = (mask,)
        return x * mask

    def backward(self, grad_out):
        (mask,) = self._take_cache()
        if mask is None:
            return grad_out
        return grad_out * mask


class GlobalAvgPool(Layer):
    """(T, C) -> (C,) by averaging over time."""

    def __init__(self):
        self._cache = None

    def forward(self, x, training=False, rng=None):
        if x.ndim != 2:
            raise ValueError(f"expected (T, C) input, got shape {x.shape}")
        self._cache = x.shape[0]
        return x.mean(axis=0)

    def backward(self, grad_out):
        t = self._take_cache()
        return np.tile(grad_out / t, (t, 1))


class Softmax(Layer):
    def __init__(self):
        self._cache = None

    def forward(self, x, training=False, rng=None):
        shifted = x - x.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        y = e / e.sum(axis=-1, keepdims=True)
        self._cache = y
        return y

    def backward(self, grad_out):
        y = self._take_cache()
        inner = (grad_out * y).sum(axis=-1, keepdims=True)
        return y * (grad_out - inner)


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)
