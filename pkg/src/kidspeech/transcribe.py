"""Pluggable transcriber gateway.

All backends consume raw WAV bytes and return a Transcript, so content
hashing and scoring behave identically no matter where recognition
happens: a fixture map (mock), the local VAD+classifier chain, or a
remote HTTP service.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Protocol

import httpx
import numpy as np

from .audio import decode_wav, ensure_canonical
from .features import MfccConfig, mfcc, pad_or_truncate
from .nnet import CLASSIFIER_FRAMES, load_network
from .vad import VadConfig, detect_segments, extract


class TranscriberError(RuntimeError):
    pass


class TranscriptNotFoundError(TranscriberError):
    pass


class TranscriberConnectionError(TranscriberError):
    pass


class TranscriberTimeoutError(TranscriberError):
    pass


class TranscriberStatusError(TranscriberError):
    def __init__(self, status_code: int, detail: str = ""):
        super().__init__(f"transcription service returned {status_code}: {detail}")
        self.status_code = status_code


class MalformedResponseError(TranscriberError):
    pass


@dataclass(frozen=True)
class Transcript:
    words: tuple
    word_spans: tuple | None = None  # (start_s, end_s) per word when known

    @property
    def text(self) -> str:
        return " ".join(self.words)


class Transcriber(Protocol):
    provides_timings: bool

    def transcribe(self, wav_bytes: bytes) -> Transcript: ...


def content_hash(wav_bytes: bytes) -> str:
    return hashlib.sha256(wav_bytes).hexdigest()


class MockTranscriber:
    """Maps audio content hashes to canned transcripts."""

    provides_timings = False

    def __init__(self, fixture_map: dict):
        self.fixture_map = dict(fixture_map)

    @classmethod
    def from_file(cls, path) -> "MockTranscriber":
        fixture_map = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                digest, _, text = line.partition("\t")
                fixture_map[digest] = text
        return cls(fixture_map)

    def transcribe(self, wav_bytes: bytes) -> Transcript:
        digest = content_hash(wav_bytes)
        if digest not in self.fixture_map:
            raise TranscriptNotFoundError(f"no fixture transcript for audio {digest[:12]}")
        text = self.fixture_map[digest]
        return Transcript(tuple(text.split()))


class ClassifierTranscriber:
    """VAD segmentation followed by per-segment word classification."""

    provides_timings = True

    def __init__(self, network, class_words, feat_mean, feat_std,
                 vad_cfg: VadConfig | None = None,
                 mfcc_cfg: MfccConfig | None = None):
        self.network = network
        self.class_words = list(class_words)
        self.feat_mean = np.asarray(feat_mean, dtype=np.float64)
        self.feat_std = np.asarray(feat_std, dtype=np.float64)
        self.vad_cfg = vad_cfg if vad_cfg is not None else VadConfig()
        self.mfcc_cfg = mfcc_cfg if mfcc_cfg is not None else MfccConfig()

    @classmethod
    def from_checkpoint(cls, path, vad_cfg=None, mfcc_cfg=None) -> "ClassifierTranscriber":
        network, extra = load_network(path)
        return cls(network, extra["class_words"], extra["feat_mean"],
                   extra["feat_std"], vad_cfg=vad_cfg, mfcc_cfg=mfcc_cfg)

    def classify_features(self, features: np.ndarray) -> int:
        standardized = (features - self.feat_mean) / self.feat_std
        probs = self.network.forward(standardized)
        return int(np.argmax(probs))

    def transcribe(self, wav_bytes: bytes) -> Transcript:
        clip = ensure_canonical(decode_wav(wav_bytes))
        segments = detect_segments(clip, self.vad_cfg)
        words = []
        spans = []
        for segment, piece in zip(segments, extract(clip, segments)):
            features = pad_or_truncate(mfcc(piece, self.mfcc_cfg).frames,
                                       CLASSIFIER_FRAMES)
            words.append(self.class_words[self.classify_features(features)])
            spans.append((segment.start_s, segment.end_s))
        return Transcript(tuple(words), tuple(spans))


class HttpTranscriber:
    """POSTs WAV bytes to a remote endpoint; no automatic retries."""

    provides_timings = False

    def __init__(self, endpoint_url: str, timeout_s: float = 10.0,
                 auth_token: str | None = None):
        self.endpoint_url = endpoint_url
        headers = {"content-type": "audio/wav"}
        if auth_token:
            headers["authorization"] = f"Bearer {auth_token}"
        self._client = httpx.Client(timeout=timeout_s, headers=headers)

    def transcribe(self, wav_bytes: bytes) -> Transcript:
        try:
            response = self._client.post(self.endpoint_url, content=wav_bytes)
        except httpx.TimeoutException as exc:
            raise TranscriberTimeoutError(f"transcription request timed out: {exc}") from exc
        except httpx.HTTPError as exc:
            raise TranscriberConnectionError(f"transcription request failed: {exc}") from exc
        if not 200 <= response.status_code < 300:
            raise TranscriberStatusError(response.status_code, response.text[:200])
        try:
            payload = response.json()
        except (json.JSONDecodeError, ValueError) as exc:
            raise MalformedResponseError(f"response is not JSON: {exc}") from exc
        if not isinstance(payload, dict) or "transcript" not in payload:
            raise MalformedResponseError("response JSON lacks a 'transcript' field")
        words = tuple(str(payload["transcript"]).split())
        spans = None
        if isinstance(payload.get("words"), list):
            try:
                spans = tuple((float(w["start_s"]), float(w["end_s"]))
                              for w in payload["words"])
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedResponseError(f"malformed word timings: {exc}") from exc
            if len(spans) != len(words):
                raise MalformedResponseError("word timing count does not match transcript")
        return Transcript(words, spans)

    def close(self) -> None:
        self._client.close()
