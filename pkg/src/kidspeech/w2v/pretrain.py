"""Toy self-supervised pretraining loop.

Each step: encode one clip, draw a span mask, quantize the original
latents at the masked positions (the targets), contextualize the masked
sequence, project to the quantized dimension, evaluate the contrastive
and diversity losses, backpropagate, and take an SGD step.  Runs are
deterministic per seed and single-threaded.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ..nnet.checkpoint import pack_container, unpack_container, CheckpointError
from ..nnet.layers import Dense, Param
from .config import (
    ContextConfig,
    EncoderConfig,
    CodebookUsage,
    LossConfig,
    MaskConfig,
    QuantizerConfig,
)
from .context import ContextNetwork
from .encoder import Encoder
from .losses import contrastive_loss_grad, diversity_loss_grad, total_loss
from .masking import draw_mask
from .quantizer import Quantizer


class DivergenceError(RuntimeError):
    def __init__(self, step: int):
        super().__init__(f"non-finite loss at step {step}")
        self.step = step


@dataclass(frozen=True)
class PretrainConfig:
    encoder: EncoderConfig = EncoderConfig()
    quantizer: QuantizerConfig = QuantizerConfig()
    mask: MaskConfig = MaskConfig()
    loss: LossConfig = LossConfig()
    context: ContextConfig = ContextConfig()
    learning_rate: float = 0.05


def toy_demo_config() -> PretrainConfig:
    """Settings for a fast, stable run on the bundled toy tone clips.

    A narrow single-block context keeps a 200-step run under half a
    minute.  The wide codebook logit spread pins code assignments to the
    tone segments instead of to the sampling noise, and short spans at
    low coverage leave each masked frame same-segment visible neighbours.
    The small learning rate stretches the descent across the whole run
    so the loss history shows it, rather than collapsing the interesting
    part into the first couple of steps.
    """
    return PretrainConfig(
        mask=MaskConfig(span_len=2, target_coverage=0.2),
        quantizer=QuantizerConfig(init_logit_scale=32.0),
        loss=LossConfig(n_negatives=8),
        context=ContextConfig(dim=64, n_blocks=1, n_heads=4, ffn_mult=2),
        learning_rate=3e-4,
    )


@dataclass(frozen=True)
class PretrainHistory:
    contrastive: np.ndarray
    diversity: np.ndarray
    total: np.ndarray

    def lines(self) -> list[str]:
        return [f"{i + 1} {m:.6f} {d:.6f} {t:.6f}" for i, (m, d, t) in
                enumerate(zip(self.contrastive, self.diversity, self.total))]


def sample_negatives(mask_positions, n_negatives: int,
                     rng: np.random.Generator) -> list[np.ndarray]:
    """For each masked position, distractor indices into the masked set.

    Uniform without replacement over the other masked positions; the
    count is clipped when fewer than n_negatives are available.
    """
    m = len(mask_positions)
    out = []
    for i in range(m):
        others = np.concatenate([np.arange(i), np.arange(i + 1, m)])
        size = min(n_negatives, others.shape[0])
        if size == 0:
            out.append(np.empty(0, dtype=np.int64))
        else:
            out.append(rng.choice(others, size=size, replace=False))
    return out


class W2vModel:
    def __init__(self, cfg: PretrainConfig, rng: np.random.Generator):
        self.cfg = cfg
        z_dim = cfg.encoder.channels
        self.encoder = Encoder(cfg.encoder, rng)
        self.quantizer = Quantizer(cfg.quantizer, z_dim, rng)
        self.mask_vector = Param("mask_vector", rng.uniform(0.0, 1.0, size=z_dim))
        self.context = ContextNetwork(cfg.context, z_dim, rng)
        self.final_proj = Dense(cfg.context.dim, cfg.quantizer.quantized_dim, rng=rng)
        for p in self.final_proj.params():
            p.name = f"final.{p.name}"

    def params(self) -> list[Param]:
        return (self.encoder.params() + [self.mask_vector] + self.context.params()
                + self.final_proj.params() + self.quantizer.params())

    def zero_grad(self) -> None:
        for p in self.params():
            p.grad[...] = 0.0


def train_step(model: W2vModel, samples: np.ndarray, rng: np.random.Generator,
               step: int) -> tuple[float, float, float, np.ndarray]:
    cfg = model.cfg
    alpha = cfg.loss.diversity_weight
    k = cfg.loss.similarity_temperature

    model.zero_grad()
    z = model.encoder.forward(samples, training=True)
    mask_idx = draw_mask(z.shape[0], cfg.mask, rng)
    n_masked = mask_idx.shape[0]
    masked = z.copy()
    masked[mask_idx] = model.mask_vector.value

    q, probs = model.quantizer.forward(z[mask_idx], rng, training=True)
    c = model.context.forward(masked, training=True)
    projected = model.final_proj.forward(c)

    negatives = sample_negatives(mask_idx, cfg.loss.n_negatives, rng)
    grad_proj = np.zeros_like(projected)
    grad_q = np.zeros_like(q)
    loss_m = 0.0
    for i, t in enumerate(mask_idx):
        l, g_c, g_pos, g_negs = contrastive_loss_grad(
            projected[t], q[i], q[negatives[i]], k)
        loss_m += l / n_masked
        grad_proj[t] += g_c / n_masked
        grad_q[i] += g_pos / n_masked
        np.add.at(grad_q, negatives[i], g_negs / n_masked)

    p_bar = probs.mean(axis=0)
    loss_d, grad_p_bar = diversity_loss_grad(p_bar)
    loss = total_loss(loss_m, loss_d, alpha)
    if not np.isfinite(loss):
        raise DivergenceError(step)

    grad_z_masked = model.quantizer.backward(grad_q, alpha * grad_p_bar / n_masked)
    grad_context = model.final_proj.backward(grad_proj)
    grad_latents = model.context.backward(grad_context)
    grad_z = grad_latents.copy()
    model.mask_vector.grad += grad_latents[mask_idx].sum(axis=0)
    grad_z[mask_idx] = grad_z_masked
    model.encoder.backward(grad_z)

    for p in model.params():
        p.value -= cfg.learning_rate * p.grad
    return loss_m, loss_d, loss, p_bar


def pretrain(clips, steps: int, cfg: PretrainConfig | None = None,
             rng_seed: int = 0) -> tuple[W2vModel, PretrainHistory, CodebookUsage]:
    """Run the pretraining loop; clips cycle round-robin across steps."""
    if not clips:
        raise ValueError("need at least one clip")
    cfg = cfg if cfg is not None else PretrainConfig()
    rng = np.random.default_rng(rng_seed)
    model = W2vModel(cfg, rng)
    arrays = [np.asarray(getattr(c, "samples", c), dtype=np.float64) for c in clips]
    l_m = np.zeros(steps)
    l_d = np.zeros(steps)
    l_total = np.zeros(steps)
    p_bar = None
    for step in range(1, steps + 1):
        samples = arrays[(step - 1) % len(arrays)]
        l_m[step - 1], l_d[step - 1], l_total[step - 1], p_bar = train_step(
            model, samples, rng, step)
    usage = CodebookUsage(p_bar)
    return model, PretrainHistory(l_m, l_d, l_total), usage


def save_model(path, model: W2vModel) -> None:
    config = {
        "format": 1,
        "kind": "w2v",
        "pretrain": {
            "encoder": dataclasses.asdict(model.cfg.encoder),
            "quantizer": dataclasses.asdict(model.cfg.quantizer),
            "mask": dataclasses.asdict(model.cfg.mask),
            "loss": dataclasses.asdict(model.cfg.loss),
            "context": dataclasses.asdict(model.cfg.context),
            "learning_rate": model.cfg.learning_rate,
        },
    }
    with open(path, "wb") as fh:
        fh.write(pack_container(config, [p.value for p in model.params()]))


def load_model(path) -> W2vModel:
    with open(path, "rb") as fh:
        config, tensors = unpack_container(fh.read())
    if config.get("kind") != "w2v":
        raise CheckpointError(f"expected a w2v container, got kind={config.get('kind')!r}")
    pc = config["pretrain"]
    enc = dict(pc["encoder"])
    enc["kernels"] = tuple(enc["kernels"])
    enc["strides"] = tuple(enc["strides"])
    cfg = PretrainConfig(
        encoder=EncoderConfig(**enc),
        quantizer=QuantizerConfig(**pc["quantizer"]),
        mask=MaskConfig(**pc["mask"]),
        loss=LossConfig(**pc["loss"]),
        context=ContextConfig(**pc["context"]),
        learning_rate=pc["learning_rate"],
    )
    model = W2vModel(cfg, np.random.default_rng(0))
    params = model.params()
    if len(params) != len(tensors):
        raise CheckpointError(
            f"container holds {len(tensors)} tensors, model needs {len(params)}")
    for p, t in zip(params, tensors):
        if p.value.shape != t.shape:
            raise CheckpointError(f"shape mismatch for {p.name}")
        p.value = t.copy()
        p.grad = np.zeros_like(p.value)
    return model
