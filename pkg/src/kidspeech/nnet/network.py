"""Sequential network assembly, loss, and the word-classifier architecture.

Networks are built from declarative `LayerSpec` lists so the same
description drives construction, training and the checkpoint format.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import layers as L

LAYER_KINDS = {"conv1d", "dense", "relu", "gelu", "layer_norm", "dropout",
               "global_avg_pool", "softmax"}

# Fixed classifier input geometry: MFCC matrices padded or truncated to this.
CLASSIFIER_FRAMES = 98
CLASSIFIER_COEFFS = 13


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    in_channels: int | None = None
    channels: int | None = None
    kernel: int | None = None
    stride: int = 1
    padding: int = 0
    groups: int = 1
    in_features: int | None = None
    units: int | None = None
    dim: int | None = None
    dropout_rate: float | None = None

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.dropout_rate is not None and not (0.0 <= self.dropout_rate < 1.0):
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.kernel is not None and self.kernel < 1:
            raise ValueError("kernel must be >= 1")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items()
                if v is not None and not (k in ("stride", "groups") and v == 1)
                and not (k == "padding" and v == 0)}

    @classmethod
    def from_dict(cls, d: dict) -> "LayerSpec":
        return cls(**d)


def _build_layer(spec: LayerSpec, rng) -> L.Layer:
    if spec.kind == "conv1d":
        return L.Conv1d(spec.in_channels, spec.channels, spec.kernel,
                        stride=spec.stride, padding=spec.padding,
                        groups=spec.groups, rng=rng)
    if spec.kind == "dense":
        return L.Dense(spec.in_features, spec.units, rng=rng)
    if spec.kind == "relu":
        return L.Relu()
    if spec.kind == "gelu":
        return L.Gelu()
    if spec.kind == "layer_norm":
        return L.LayerNorm(spec.dim)
    if spec.kind == "dropout":
        return L.Dropout(spec.dropout_rate)
    if spec.kind == "global_avg_pool":
        return L.GlobalAvgPool()
    if spec.kind == "softmax":
        return L.Softmax()
    raise ValueError(f"unknown layer kind {spec.kind!r}")


class Network:
    """An ordered stack of layers sharing one forward/backward contract."""

    def __init__(self, specs: list[LayerSpec], rng=None):
        rng = rng if rng is not None else np.random.default_rng(0)
        self.specs = list(specs)
        self.layers = [_build_layer(s, rng) for s in self.specs]

    def parameters(self) -> list[L.Param]:
        return [p for layer in self.layers for p in layer.params()]

    def forward(self, x: np.ndarray, training: bool = False, rng=None) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, training=training, rng=rng)
        return x

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad_out = layer.backward(grad_out)
        return grad_out

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad[...] = 0.0

    def sgd_step(self, lr: float) -> None:
        for p in self.parameters():
            p.value -= lr * p.grad


def cross_entropy(probs: np.ndarray, target_class: int) -> float:
    """-log(probs[target]); requires probs to already sum to 1 within 1e-6."""
    probs = np.asarray(probs)
    if abs(probs.sum() - 1.0) > 1e-6:
        raise ValueError(f"probabilities sum to {probs.sum():.8f}, not 1")
    if not (0 <= target_class < len(probs)):
        raise IndexError(f"target class {target_class} out of range for {len(probs)} classes")
    return float(-np.log(max(probs[target_class], 1e-300)))


def cross_entropy_grad(probs: np.ndarray, target_class: int) -> np.ndarray:
    grad = np.zeros_like(probs)
    grad[target_class] = -1.0 / max(probs[target_class], 1e-300)
    return grad


def build_word_classifier(n_word_classes: int, rng=None) -> Network:
    """The word classifier: three 1-D conv blocks with 0.3 dropout, two
    dense layers with 0.3 dropout, and a softmax output.

    Input is a fixed-length MFCC matrix of CLASSIFIER_FRAMES x
    CLASSIFIER_COEFFS (pad or truncate upstream).
    """
    if n_word_classes < 2:
        raise ValueError("need at least 2 classes")
    drop = 0.3
    specs = [
        LayerSpec("conv1d", in_channels=CLASSIFIER_COEFFS, channels=32, kernel=3),
        LayerSpec("relu"),
        LayerSpec("dropout", dropout_rate=drop),
        LayerSpec("conv1d", in_channels=32, channels=64, kernel=3),
        LayerSpec("relu"),
        LayerSpec("dropout", dropout_rate=drop),
        LayerSpec("conv1d", in_channels=64, channels=64, kernel=3),
        LayerSpec("relu"),
        LayerSpec("dropout", dropout_rate=drop),
        LayerSpec("global_avg_pool"),
        LayerSpec("dense", in_features=64, units=64),
        LayerSpec("relu"),
        LayerSpec("dropout", dropout_rate=drop),
        LayerSpec("dense", in_features=64, units=n_word_classes),
        LayerSpec("softmax"),
    ]
    return Network(specs, rng=rng)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 50
    batch_size: int = 8
    rng_seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class TrainHistory:
    losses: list[float]       # mean training loss per epoch
    accuracies: list[float]   # inference-mode accuracy per epoch


def train(network: Network, dataset: list[tuple[np.ndarray, int]],
          cfg: TrainConfig) -> TrainHistory:
    """Plain SGD over per-sample gradients, fully reproducible from the seed.

    Raises:
        ValueError: empty dataset.
        DivergenceError: non-finite loss, with the epoch index.
    """
    if not dataset:
        raise ValueError("cannot train on an empty dataset")
    rng = np.random.default_rng(cfg.rng_seed)
    history = TrainHistory(losses=[], accuracies=[])
    n = len(dataset)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n) if cfg.shuffle else np.arange(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            network.zero_grad()
            for idx in batch:
                x, label = dataset[idx]
                probs = network.forward(x, training=True, rng=rng)
                loss = cross_entropy(probs, label)
                epoch_loss += loss
                network.backward(cross_entropy_grad(probs, label) / len(batch))
            network.sgd_step(cfg.learning_rate)
        mean_loss = epoch_loss / n
        if not np.isfinite(mean_loss):
            raise DivergenceError(epoch)
        correct = sum(int(np.argmax(network.forward(x)) == label) for x, label in dataset)
        history.losses.append(mean_loss)
        history.accuracies.append(correct / n)
    return history
