"""Training glue for the color-word classifier.

Clips become fixed-size MFCC matrices, get standardized per
coefficient, and feed the convolutional word classifier.  The
standardization statistics and class vocabulary travel inside the
checkpoint so the transcriber backend can reproduce the exact
preprocessing.
"""

from __future__ import annotations

import numpy as np

from .features import MfccConfig, mfcc, pad_or_truncate
from .nnet import (
    CLASSIFIER_FRAMES,
    Network,
    TrainConfig,
    TrainHistory,
    build_word_classifier,
    save_network,
    train,
)


def featurize(clips, mfcc_cfg: MfccConfig | None = None) -> np.ndarray:
    cfg = mfcc_cfg if mfcc_cfg is not None else MfccConfig()
    return np.stack([pad_or_truncate(mfcc(clip, cfg).frames, CLASSIFIER_FRAMES)
                     for clip in clips])


def standardization(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-coefficient mean and std over all frames of all clips."""
    flat = features.reshape(-1, features.shape[-1])
    mean = flat.mean(axis=0)
    std = flat.std(axis=0)
    std[std < 1e-8] = 1.0
    return mean, std


def train_color_classifier(clips, labels, class_words,
                           train_cfg: TrainConfig | None = None,
                           mfcc_cfg: MfccConfig | None = None
                           ) -> tuple[Network, TrainHistory, dict]:
    cfg = train_cfg if train_cfg is not None else TrainConfig()
    features = featurize(clips, mfcc_cfg)
    mean, std = standardization(features)
    standardized = (features - mean) / std
    network = build_word_classifier(len(class_words),
                                    np.random.default_rng(cfg.rng_seed))
    dataset = list(zip(standardized, labels))
    history = train(network, dataset, cfg)
    extra = {"class_words": list(class_words), "feat_mean": mean.tolist(),
             "feat_std": std.tolist()}
    return network, history, extra


def save_color_classifier(path, network: Network, extra: dict) -> None:
    save_network(path, network, kind="classifier", extra=extra)
