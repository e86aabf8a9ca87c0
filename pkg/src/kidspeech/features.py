"""MFCC feature extraction.

Standard speech front end: pre-emphasis, Hamming-windowed frames, power
spectrum, triangular mel filterbank (HTK mel scale), log energies with a
floor, and an orthonormal DCT-II keeping the first few coefficients.

The 25 ms / 10 ms / 26-filter / 13-coefficient defaults are the common
speech-recognition configuration; all of them are configurable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio import AudioClip


class FeatureConfigError(ValueError):
    """Raised for MFCC configurations that cannot produce a valid filterbank."""


@dataclass(frozen=True)
class MfccConfig:
    frame_len_ms: float = 25.0
    hop_ms: float = 10.0
    fft_size: int = 512
    n_mel_filters: int = 26
    n_coeffs: int = 13
    pre_emphasis: float = 0.97
    fmin_hz: float = 0.0
    fmax_hz: float | None = None  # None means sample_rate / 2
    log_floor: float = 1e-10

    def __post_init__(self):
        if not (self.frame_len_ms >= self.hop_ms > 0):
            raise ValueError("need frame_len_ms >= hop_ms > 0")
        if self.n_coeffs > self.n_mel_filters:
            raise ValueError("n_coeffs must not exceed n_mel_filters")
        if not (0.0 <= self.pre_emphasis < 1.0):
            raise ValueError("pre_emphasis must be in [0, 1)")

    def frame_len(self, sample_rate_hz: int) -> int:
        return int(round(self.frame_len_ms * sample_rate_hz / 1000.0))

    def hop(self, sample_rate_hz: int) -> int:
        return int(round(self.hop_ms * sample_rate_hz / 1000.0))


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-frame coefficient vectors with the start time of each frame."""

    frames: np.ndarray       # (n_frames, n_coeffs)
    frame_times_s: np.ndarray  # (n_frames,)

    def __post_init__(self):
        if len(self.frames) != len(self.frame_times_s):
            raise ValueError("one time per frame required")


def pre_emphasize(samples: np.ndarray, coeff: float) -> np.ndarray:
    """y[0] = x[0]; y[t] = x[t] - coeff * x[t-1]."""
    if not (0.0 <= coeff < 1.0):
        raise ValueError(f"pre-emphasis coefficient must be in [0, 1), got {coeff}")
    x = np.asarray(samples, dtype=np.float64)
    y = np.empty_like(x)
    y[:1] = x[:1]
    y[1:] = x[1:] - coeff * x[:-1]
    return y


def mel_scale(f_hz):
    """HTK mel scale: 2595 * log10(1 + f/700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(f_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (np.power(10.0, np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def build_mel_filterbank(cfg: MfccConfig, sample_rate_hz: int) -> np.ndarray:
    """Triangular filters, centers equally spaced on the mel scale.

    Returns a (n_mel_filters, fft_size//2 + 1) nonnegative weight matrix.

    Raises:
        FeatureConfigError: fmax above Nyquist, or the n_filters + 2 edge
            points collapse onto non-distinct FFT bins.
    """
    fmax = sample_rate_hz / 2.0 if cfg.fmax_hz is None else cfg.fmax_hz
    if fmax > sample_rate_hz / 2.0:
        raise FeatureConfigError(f"fmax {fmax} Hz above Nyquist for {sample_rate_hz} Hz")
    mel_points = np.linspace(mel_scale(cfg.fmin_hz), mel_scale(fmax), cfg.n_mel_filters + 2)
    hz_points = mel_to_hz(mel_points)
    bins = np.floor((cfg.fft_size + 1) * hz_points / sample_rate_hz).astype(int)
    if np.any(np.diff(bins) <= 0):
        raise FeatureConfigError(
            "mel filter edges do not map to distinct FFT bins; "
            "increase fft_size or reduce n_mel_filters"
        )

    weights = np.zeros((cfg.n_mel_filters, cfg.fft_size // 2 + 1))
    for m in range(1, cfg.n_mel_filters + 1):
        left, center, right = bins[m - 1], bins[m], bins[m + 1]
        for k in range(left, center):
            weights[m - 1, k] = (k - left) / (center - left)
        for k in range(center, min(right, cfg.fft_size // 2) + 1):
            weights[m - 1, k] = (right - k) / (right - center)
    return weights


def dct_basis(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis matrix C with C @ C.T == I.

    C[k, t] = s_k * cos(pi * k * (2t + 1) / (2n)), s_0 = sqrt(1/n),
    s_k = sqrt(2/n) otherwise.
    """
    k = np.arange(n)[:, None]
    t = np.arange(n)[None, :]
    basis = np.cos(np.pi * k * (2 * t + 1) / (2 * n)) * np.sqrt(2.0 / n)
    basis[0] /= np.sqrt(2.0)
    return basis


def frame_count(n_samples: int, frame_len: int, hop: int) -> int:
    """1 + floor((len - frame_len) / hop); zero if the clip is too short."""
    if n_samples < frame_len:
        return 0
    return 1 + (n_samples - frame_len) // hop


def mfcc(clip: AudioClip, cfg: MfccConfig = MfccConfig()) -> FeatureMatrix:
    """Compute the MFCC matrix of a clip.

    Per frame: pre-emphasis -> Hamming window -> power spectrum -> mel
    filterbank -> log(max(E, log_floor)) -> orthonormal DCT-II -> first
    n_coeffs coefficients.

    Raises:
        ValueError: clip shorter than one frame.
    """
    sr = clip.sample_rate_hz
    frame_len = cfg.frame_len(sr)
    hop = cfg.hop(sr)
    if cfg.fft_size < frame_len:
        raise FeatureConfigError(f"fft_size {cfg.fft_size} < frame length {frame_len}")
    n_frames = frame_count(len(clip), frame_len, hop)
    if n_frames == 0:
        raise ValueError(f"clip of {len(clip)} samples is shorter than one {frame_len}-sample frame")

    emphasized = pre_emphasize(clip.samples, cfg.pre_emphasis)
    idx = np.arange(frame_len)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = emphasized[idx] * np.hamming(frame_len)[None, :]

    spectrum = np.fft.rfft(frames, n=cfg.fft_size, axis=1)
    power = (spectrum.real ** 2 + spectrum.imag ** 2) / cfg.fft_size

    fbank = build_mel_filterbank(cfg, sr)
    mel_energies = power @ fbank.T
    log_mel = np.log(np.maximum(mel_energies, cfg.log_floor))

    basis = dct_basis(cfg.n_mel_filters)[:cfg.n_coeffs]
    coeffs = log_mel @ basis.T

    times = hop * np.arange(n_frames) / sr
    return FeatureMatrix(frames=coeffs, frame_times_s=times)


def pad_or_truncate(features, n_frames: int) -> np.ndarray:
    """Fix the frame count by zero-padding or truncating (classifier input).

    Accepts a FeatureMatrix or a plain (frames, coeffs) array.
    """
    mat = (features.frames if isinstance(features, FeatureMatrix)
           else np.asarray(features))
    if len(mat) >= n_frames:
        return mat[:n_frames].copy()
    out = np.zeros((n_frames, mat.shape[1]))
    out[:len(mat)] = mat
    return out
