from .layers import (
    Conv1d,
    Dense,
    Dropout,
    Gelu,
    GlobalAvgPool,
    Layer,
    LayerNorm,
    Param,
    Relu,
    Softmax,
    glorot_uniform,
    softmax,
)
from .network import (
    CLASSIFIER_COEFFS,
    CLASSIFIER_FRAMES,
    DivergenceError,
    LayerSpec,
    Network,
    TrainConfig,
    TrainHistory,
    build_word_classifier,
    cross_entropy,
    cross_entropy_grad,
    train,
)
from .checkpoint import (
    CheckpointError,
    load_network,
    pack_container,
    save_network,
    unpack_container,
)

__all__ = [
    "CLASSIFIER_COEFFS",
    "CLASSIFIER_FRAMES",
    "CheckpointError",
    "Conv1d",
    "Dense",
    "DivergenceError",
    "Dropout",
    "Gelu",
    "GlobalAvgPool",
    "Layer",
    "LayerNorm",
    "LayerSpec",
    "Network",
    "Param",
    "Relu",
    "Softmax",
    "TrainConfig",
    "TrainHistory",
    "build_word_classifier",
    "cross_entropy",
    "cross_entropy_grad",
    "glorot_uniform",
    "load_network",
    "pack_container",
    "save_network",
    "softmax",
    "train",
    "unpack_container",
]
