"""WAV decoding, normalization and resampling.

Everything downstream consumes one canonical representation: mono float
samples in [-1, 1] at a known rate.  Pipelines resample to 16 kHz on
ingestion (`CANONICAL_RATE_HZ`).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

CANONICAL_RATE_HZ = 16_000


class AudioFormatError(ValueError):
    """Raised when a byte stream is not decodable PCM WAV."""


@dataclass(frozen=True)
class AudioClip:
    """Immutable mono audio: normalized samples plus their sample rate.

    Invariants: every amplitude lies in [-1, 1] and ``sample_rate_hz > 0``.
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {samples.shape}")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if samples.size and (np.max(samples) > 1.0 or np.min(samples) < -1.0):
            raise ValueError("amplitudes outside [-1, 1]")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


WAVE_FORMAT_PCM = 1


def decode_wav(data: bytes) -> AudioClip:
    """Decode a RIFF/WAVE container holding 8- or 16-bit PCM.

    Stereo is downmixed by channel average; integer samples are scaled by
    1 / 2^(bits-1).  The container's sample rate is preserved.

    Raises:
        AudioFormatError: non-PCM codec, truncated header or data chunk,
            zero-length data, or a malformed container.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise AudioFormatError("not a RIFF/WAVE container")

    fmt = None
    pcm = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise AudioFormatError("truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise AudioFormatError(
                    f"truncated data chunk: header says {chunk_size} bytes, "
                    f"{len(body)} present"
                )
            pcm = body
        # chunks are word-aligned
        pos += 8 + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise AudioFormatError("missing fmt chunk")
    if pcm is None:
        raise AudioFormatError("missing data chunk")

    audio_format, n_channels, sample_rate, _, _, bits = fmt
    if audio_format != WAVE_FORMAT_PCM:
        raise AudioFormatError(f"unsupported codec (format tag {audio_format}); only PCM is handled")
    if n_channels not in (1, 2):
        raise AudioFormatError(f"unsupported channel count {n_channels}")
    if bits not in (8, 16):
        raise AudioFormatError(f"unsupported bit depth {bits}")
    if len(pcm) == 0:
        raise AudioFormatError("zero-length data chunk")

    if bits == 8:
        # 8-bit WAV is unsigned with midpoint 128
        raw = np.frombuffer(pcm, dtype=np.uint8).astype(np.float64) - 128.0
        scale = 128.0
    else:
        usable = len(pcm) - (len(pcm) % 2)
        raw = np.frombuffer(pcm[:usable], dtype="<i2").astype(np.float64)
        scale = 32768.0

    if n_channels == 2:
        usable = len(raw) - (len(raw) % 2)
        raw = raw[:usable].reshape(-1, 2).mean(axis=1)
    if raw.size == 0:
        raise AudioFormatError("zero-length data chunk")

    return AudioClip(samples=raw / scale, sample_rate_hz=sample_rate)


def encode_wav(clip: AudioClip) -> bytes:
    """Serialize a clip as mono 16-bit PCM WAV."""
    scaled = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    pcm = scaled.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(pcm), b"WAVE",
        b"fmt ", 16, WAVE_FORMAT_PCM, 1, clip.sample_rate_hz,
        clip.sample_rate_hz * 2, 2, 16,
        b"data", len(pcm),
    )
    return header + pcm


def resample(clip: AudioClip, target_hz: int) -> AudioClip:
    """Linear-interpolation resampling to ``target_hz``.

    Output length is round(len * target / source), so duration is preserved
    to within one sample period.
    """
    if target_hz <= 0:
        raise ValueError(f"target_hz must be positive, got {target_hz}")
    if target_hz == clip.sample_rate_hz:
        return clip
    n_out = int(round(len(clip) * target_hz / clip.sample_rate_hz))
    src_positions = np.arange(n_out) * (clip.sample_rate_hz / target_hz)
    out = np.interp(src_positions, np.arange(len(clip)), clip.samples)
    return AudioClip(samples=out, sample_rate_hz=target_hz)


def ensure_canonical(clip: AudioClip) -> AudioClip:
    """Resample to the canonical 16 kHz rate if needed."""
    return resample(clip, CANONICAL_RATE_HZ)
