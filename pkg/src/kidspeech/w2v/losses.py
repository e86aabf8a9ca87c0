"""Pretraining objectives: contrastive, diversity, and their sum.

The contrastive term scores the true quantized target against negative
distractors with temperature-scaled cosine similarity; the diversity
term is the (signed) negative mean entropy of averaged codeword usage.
Each loss has a companion that also returns analytic gradients.
"""

from __future__ import annotations

import numpy as np

from .config import CodebookUsage


def _unit_check(v: np.ndarray, what: str) -> float:
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError(f"zero-norm {what}: cosine similarity is undefined")
    return norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = _unit_check(a, "vector")
    nb = _unit_check(b, "vector")
    return float(np.dot(a, b) / (na * nb))


def contrastive_loss_grad(c: np.ndarray, q_pos: np.ndarray, q_negs: np.ndarray,
                          k: float):
    """Return (L_m, grad_c, grad_q_pos, grad_q_negs)."""
    if k <= 0:
        raise ValueError("similarity temperature must be > 0")
    c = np.asarray(c, dtype=np.float64)
    q_negs = np.asarray(q_negs, dtype=np.float64).reshape(-1, c.shape[0])
    cands = np.vstack([np.asarray(q_pos, dtype=np.float64)[None, :], q_negs])
    nc = _unit_check(c, "context vector")
    ncands = np.linalg.norm(cands, axis=1)
    if np.any(ncands == 0.0):
        raise ValueError("zero-norm candidate: cosine similarity is undefined")
    sims = cands @ c / (ncands * nc)
    logits = sims / k
    logits -= logits.max()
    exp = np.exp(logits)
    p = exp / exp.sum()
    loss = float(-np.log(p[0]))
    dsims = p / k
    dsims[0] -= 1.0 / k
    # d cos(c, q)/dc = (q/|q| - cos * c/|c|) / |c|, and symmetrically for q
    dcos_dc = (cands / ncands[:, None] - sims[:, None] * (c / nc)[None, :]) / nc
    grad_c = dsims @ dcos_dc
    grad_cands = dsims[:, None] * (
        (c / nc)[None, :] / ncands[:, None]
        - sims[:, None] * cands / (ncands ** 2)[:, None])
    return loss, grad_c, grad_cands[0], grad_cands[1:]


def contrastive_loss(c: np.ndarray, q_pos: np.ndarray, q_negs: np.ndarray,
                     k: float) -> float:
    loss, _, _, _ = contrastive_loss_grad(c, q_pos, q_negs, k)
    return loss


def diversity_loss_grad(probs: np.ndarray):
    """Return (L_d, dL_d/dprobs) for a (groups, entries) usage matrix."""
    probs = np.asarray(probs, dtype=np.float64)
    g, v = probs.shape
    nonzero = probs > 0
    plogp = np.where(nonzero, probs * np.log(np.where(nonzero, probs, 1.0)), 0.0)
    loss = float(plogp.sum() / (g * v))
    grad = np.where(nonzero, np.log(np.where(nonzero, probs, 1.0)) + 1.0, 0.0) / (g * v)
    return loss, grad


def diversity_loss(usage) -> float:
    probs = usage.probs if isinstance(usage, CodebookUsage) else np.asarray(usage)
    loss, _ = diversity_loss_grad(probs)
    return loss


def total_loss(l_m: float, l_d: float, alpha: float) -> float:
    if alpha < 0:
        raise ValueError("diversity weight must be >= 0")
    return l_m + alpha * l_d
