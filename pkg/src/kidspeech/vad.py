"""Energy-based voice activity detection.

Adaptive-floor threshold detector: the noise floor is measured on the
leading part of the clip (the naming protocol guarantees pre-speech
silence), frames above floor + margin are speech, and short dips are
bridged by a hangover counter.  Deliberately simple and deterministic;
its sensitivity to noise is a documented failure mode, not a bug to
engineer away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioClip

_ENERGY_EPS = 1e-12


@dataclass(frozen=True)
class VadConfig:
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    noise_floor_init_ms: float = 100.0
    speech_margin_db: float = 6.0
    hangover_frames: int = 5
    min_speech_ms: float = 100.0
    min_gap_ms: float = 150.0

    def __post_init__(self):
        for name in ("frame_ms", "hop_ms", "noise_floor_init_ms", "min_speech_ms", "min_gap_ms"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.speech_margin_db <= 0:
            raise ValueError("speech_margin_db must be positive")
        if self.hangover_frames < 0:
            raise ValueError("hangover_frames must be nonnegative")


@dataclass(frozen=True)
class Segment:
    start_s: float
    end_s: float

    def __post_init__(self):
        if not (0.0 <= self.start_s < self.end_s):
            raise ValueError(f"invalid segment [{self.start_s}, {self.end_s}]")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


def frame_energies_db(clip: AudioClip, cfg: VadConfig) -> np.ndarray:
    """Per-frame log energy, 10*log10(mean(x^2) + eps)."""
    frame_len = int(round(cfg.frame_ms * clip.sample_rate_hz / 1000.0))
    hop = int(round(cfg.hop_ms * clip.sample_rate_hz / 1000.0))
    n_frames = 1 + (len(clip) - frame_len) // hop if len(clip) >= frame_len else 0
    if n_frames == 0:
        return np.empty(0)
    idx = np.arange(frame_len)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = clip.samples[idx]
    return 10.0 * np.log10(np.mean(frames ** 2, axis=1) + _ENERGY_EPS)


def detect_segments(clip: AudioClip, cfg: VadConfig = VadConfig()) -> list[Segment]:
    """Segment a clip into speech regions.

    Frames whose energy reaches floor + margin are speech; the floor is the
    median frame energy over the first ``noise_floor_init_ms``.  Dips up to
    ``hangover_frames`` long inside a speech run are bridged, then gaps
    shorter than ``min_gap_ms`` are merged, then runs shorter than
    ``min_speech_ms`` are dropped.  Boundaries always sit on frames that
    were actually above threshold, so segments are as tight as the framing
    allows.

    Raises:
        ValueError: clip shorter than the noise-floor window.
    """
    if clip.duration_s * 1000.0 < cfg.noise_floor_init_ms:
        raise ValueError(
            f"clip of {clip.duration_s * 1000:.0f} ms too short for "
            f"{cfg.noise_floor_init_ms:.0f} ms noise-floor estimation"
        )
    energies = frame_energies_db(clip, cfg)
    if len(energies) == 0:
        return []

    hop_s = cfg.hop_ms / 1000.0
    frame_s = cfg.frame_ms / 1000.0
    n_floor = max(1, int(cfg.noise_floor_init_ms // cfg.hop_ms))
    floor = float(np.median(energies[:n_floor]))
    speech = energies >= floor + cfg.speech_margin_db

    # Collect runs of speech frames, bridging dips up to hangover_frames.
    runs: list[list[int]] = []  # [first_frame, last_frame] inclusive
    silence_count = 0
    in_run = False
    for i, flag in enumerate(speech):
        if flag:
            if in_run and silence_count > 0 and silence_count <= cfg.hangover_frames:
                runs[-1][1] = i       # absorb the dip
            elif in_run and silence_count == 0:
                runs[-1][1] = i
            else:
                runs.append([i, i])
            in_run = True
            silence_count = 0
        elif in_run:
            silence_count += 1
            if silence_count > cfg.hangover_frames:
                in_run = False
                silence_count = 0

    segments = [
        Segment(start_s=first * hop_s, end_s=min(last * hop_s + frame_s, clip.duration_s))
        for first, last in runs
    ]

    # Gap-merge before the min-length filter, in that order: a plosive-split
    # word should be rejoined before it can be discarded as too short.
    merged: list[Segment] = []
    for seg in segments:
        if merged and (seg.start_s - merged[-1].end_s) * 1000.0 < cfg.min_gap_ms:
            merged[-1] = Segment(start_s=merged[-1].start_s, end_s=seg.end_s)
        else:
            merged.append(seg)

    return [s for s in merged if s.duration_s * 1000.0 >= cfg.min_speech_ms]


def extract(clip: AudioClip, segments: list[Segment]) -> list[AudioClip]:
    """Exact sample slices of each segment.

    Raises:
        ValueError: segment out of bounds for the clip.
    """
    out = []
    for seg in segments:
        if seg.end_s > clip.duration_s + 1e-9:
            raise ValueError(f"segment [{seg.start_s}, {seg.end_s}] beyond clip end {clip.duration_s}")
        first = int(round(seg.start_s * clip.sample_rate_hz))
        last = int(round(seg.end_s * clip.sample_rate_hz))
        out.append(AudioClip(samples=clip.samples[first:last].copy(), sample_rate_hz=clip.sample_rate_hz))
    return out
