from .config import (
    CodebookUsage,
    ContextConfig,
    EncoderConfig,
    LossConfig,
    MaskConfig,
    QuantizerConfig,
    W2vConfigError,
)
from .context import ContextNetwork, MultiHeadSelfAttention, TransformerBlock
from .encoder import Encoder
from .losses import (
    contrastive_loss,
    contrastive_loss_grad,
    cosine,
    diversity_loss,
    diversity_loss_grad,
    total_loss,
)
from .masking import MaskingError, apply_mask, draw_mask
from .pretrain import (
    DivergenceError,
    PretrainConfig,
    PretrainHistory,
    W2vModel,
    load_model,
    pretrain,
    sample_negatives,
    save_model,
    toy_demo_config,
    train_step,
)
from .quantizer import Quantizer

__all__ = [
    "CodebookUsage",
    "ContextConfig",
    "ContextNetwork",
    "DivergenceError",
    "Encoder",
    "EncoderConfig",
    "LossConfig",
    "MaskConfig",
    "MaskingError",
    "MultiHeadSelfAttention",
    "PretrainConfig",
    "PretrainHistory",
    "Quantizer",
    "QuantizerConfig",
    "TransformerBlock",
    "W2vConfigError",
    "W2vModel",
    "apply_mask",
    "contrastive_loss",
    "contrastive_loss_grad",
    "cosine",
    "diversity_loss",
    "diversity_loss_grad",
    "draw_mask",
    "load_model",
    "pretrain",
    "sample_negatives",
    "save_model",
    "total_loss",
    "toy_demo_config",
    "train_step",
]
