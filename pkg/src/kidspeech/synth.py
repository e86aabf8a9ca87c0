"""Deterministic synthetic audio for demos, fixtures, and training sets.

Everything here is seeded and pure numpy, so regenerating a fixture set
produces byte-identical WAV files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio import CANONICAL_RATE_HZ, AudioClip, encode_wav
from .transcribe import content_hash

COLOR_WORDS = ("abi", "ghermez", "siyah", "meshki", "sabz", "zard")
COLOR_FUNDAMENTALS_HZ = (220.0, 294.0, 392.0, 523.0, 698.0, 932.0)


def sine_clip(freq_hz: float, duration_s: float = 1.0, amplitude: float = 0.3,
              phase: float = 0.0, sample_rate_hz: int = CANONICAL_RATE_HZ) -> AudioClip:
    t = np.arange(int(round(duration_s * sample_rate_hz))) / sample_rate_hz
    return AudioClip(amplitude * np.sin(2 * np.pi * freq_hz * t + phase),
                     sample_rate_hz)


def silence_clip(duration_s: float = 1.0,
                 sample_rate_hz: int = CANONICAL_RATE_HZ) -> AudioClip:
    return AudioClip(np.zeros(int(round(duration_s * sample_rate_hz))),
                     sample_rate_hz)


def tone_word_clip(class_index: int, duration_s: float = 1.0, amplitude: float = 0.3,
                   phase: float = 0.0, noise_amplitude: float = 0.0,
                   rng: np.random.Generator | None = None) -> AudioClip:
    """A harmonic tone standing in for one spoken color word."""
    freq = COLOR_FUNDAMENTALS_HZ[class_index]
    sr = CANONICAL_RATE_HZ
    t = np.arange(int(round(duration_s * sr))) / sr
    samples = amplitude * (np.sin(2 * np.pi * freq * t + phase)
                           + 0.4 * np.sin(2 * np.pi * 2 * freq * t + 2 * phase))
    if noise_amplitude > 0:
        rng = rng if rng is not None else np.random.default_rng(0)
        samples = samples + noise_amplitude * rng.standard_normal(t.shape[0])
    peak = np.max(np.abs(samples))
    if peak > 1.0:
        samples = samples / peak
    return AudioClip(samples, sr)


def color_tone_dataset(clips_per_class: int = 8, seed: int = 0,
                       duration_s: float = 1.0) -> tuple:
    """Seeded (clips, labels) over the six color-word tone classes."""
    rng = np.random.default_rng(seed)
    clips, labels = [], []
    for label in range(len(COLOR_WORDS)):
        for _ in range(clips_per_class):
            clips.append(tone_word_clip(
                label, duration_s=duration_s,
                amplitude=0.25 + 0.1 * rng.uniform(),
                phase=2 * np.pi * rng.uniform(),
                noise_amplitude=0.01, rng=rng))
            labels.append(label)
    return clips, labels


def burst_clip(bursts, duration_s: float, freq_hz: float = 440.0,
               amplitude: float = 0.5, noise_amplitude: float = 0.0,
               seed: int = 0) -> AudioClip:
    """Silence with tone bursts at exact (start_s, end_s) spans."""
    sr = CANONICAL_RATE_HZ
    n = int(round(duration_s * sr))
    t = np.arange(n) / sr
    samples = np.zeros(n)
    if noise_amplitude > 0:
        samples += noise_amplitude * np.random.default_rng(seed).standard_normal(n)
    for start_s, end_s in bursts:
        lo, hi = int(round(start_s * sr)), int(round(end_s * sr))
        samples[lo:hi] = amplitude * np.sin(2 * np.pi * freq_hz * t[lo:hi])
    return AudioClip(np.clip(samples, -1.0, 1.0), sr)


def toy_pretrain_clips(n_clips: int = 10, seed: int = 0,
                       duration_s: float = 1.0, segment_s: float = 0.15) -> list:
    """Seeded frequency-hopping clips for the toy pretraining loop.

    Each clip is a sequence of tone segments with per-segment random
    frequency and amplitude, so different time positions carry different
    content and within-utterance contrast is meaningful.  Frequencies sit
    on a 50 Hz grid: at the encoder's 320-sample hop that makes the phase
    advance a whole number of cycles, so every analysis window inside a
    segment sees identical samples and maps to identical latents.  Clips
    are noiseless for the same reason.
    """
    rng = np.random.default_rng(seed)
    sr = CANONICAL_RATE_HZ
    n = int(round(duration_s * sr))
    seg = max(1, int(round(segment_s * sr)))
    clips = []
    for _ in range(n_clips):
        samples = np.zeros(n)
        pos = 0
        while pos < n:
            length = min(seg, n - pos)
            t = np.arange(length) / sr
            freq = 50.0 * rng.integers(3, 71)
            amp = rng.uniform(0.2, 0.45)
            samples[pos:pos + length] = amp * np.sin(
                2 * np.pi * freq * t + 2 * np.pi * rng.uniform())
            pos += length
        clips.append(AudioClip(np.clip(samples, -1.0, 1.0), sr))
    return clips


# Bundled six-utterance evaluation fixture: (reference, mock hypothesis,
# task, environment) per row.  The mock transcripts plant one error type
# per row: none, substitution, deletion, insertion, substitution, total
# deletion.
MANIFEST_ROWS = (
    ("ghermez abi", "ghermez abi", "ran", "clean"),
    ("mashogh", "ghashogh", "pseudoword", "clean"),
    ("sabz zard", "sabz", "ran", "clean"),
    ("siyah", "siyah abi", "ran", "clean"),
    ("abi ghermez sabz", "abi sabz sabz", "ran", "noisy"),
    ("zard", "", "ran", "noisy"),
)


def write_manifest_fixtures(directory) -> tuple:
    """Write the six WAVs, manifest.tsv, and mock_transcripts.tsv.

    Returns (manifest path, mock transcripts path).  Audio content is a
    distinct deterministic tone per row; noisy rows carry added noise.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest_lines = []
    mock_lines = []
    for i, (reference, hypothesis, task, environment) in enumerate(MANIFEST_ROWS):
        noise = 0.02 if environment == "noisy" else 0.0
        clip = tone_word_clip(i % len(COLOR_WORDS), duration_s=1.2,
                              amplitude=0.3, phase=0.1 * i,
                              noise_amplitude=noise,
                              rng=np.random.default_rng(100 + i))
        wav_bytes = encode_wav(clip)
        name = f"utt{i + 1}.wav"
        (directory / name).write_bytes(wav_bytes)
        manifest_lines.append(f"{name}\t{reference}\t{task}\t{environment}\n")
        mock_lines.append(f"{content_hash(wav_bytes)}\t{hypothesis}\n")
    manifest_path = directory / "manifest.tsv"
    mock_path = directory / "mock_transcripts.tsv"
    manifest_path.write_text("".join(manifest_lines), encoding="utf-8")
    mock_path.write_text("".join(mock_lines), encoding="utf-8")
    return manifest_path, mock_path
