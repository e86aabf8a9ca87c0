"""Task-level scoring: RAN naming, pseudo-word repetition, corpus evaluation.

RAN marks come from the deterministic alignment backtrace so one slip
costs one item.  Pseudo-word scoring always grades against the target
pseudo-word itself.  Manifest evaluation pools edit operations across a
corpus the same way the library's corpus_rate does.
"""

from __future__ import annotations

import importlib.resources
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .audio import decode_wav
from .metrics import DEL, MATCH, SUB, EditOps, corpus_rate, edit_align
from .phonology import G2pError, Lexicon, bundled_lexicon, g2p_phrase, normalize_word
from .transcribe import Transcriber, Transcript

logger = logging.getLogger(__name__)

# Persian uses two interchangeable words for black; either earns the mark.
BLACK_WORDS = frozenset({"siyah", "meshki"})

TASK_TAGS = ("ran", "pseudoword")
ENVIRONMENT_TAGS = ("clean", "noisy")


class UnknownWordError(ValueError):
    pass


def canonical_color(word: str) -> str:
    word = normalize_word(word)
    return "siyah" if word in BLACK_WORDS else word


@dataclass(frozen=True)
class RanTrial:
    expected_sequence: tuple

    def __post_init__(self):
        if not self.expected_sequence:
            raise ValueError("expected_sequence must be nonempty")
        object.__setattr__(self, "expected_sequence",
                           tuple(str(w) for w in self.expected_sequence))


@dataclass(frozen=True)
class RanMark:
    kind: str  # correct | substituted | missed
    expected: str
    said: str | None = None

    def to_payload(self) -> dict:
        return {"kind": self.kind, "expected": self.expected, "said": self.said}


@dataclass(frozen=True)
class RanResult:
    marks: tuple
    extras: tuple
    accuracy: float
    total_time_s: float
    items_per_s: float

    def to_payload(self) -> dict:
        return {
            "marks": [m.to_payload() for m in self.marks],
            "extras": list(self.extras),
            "accuracy": self.accuracy,
            "total_time_s": self.total_time_s,
            "items_per_s": self.items_per_s,
        }


def score_ran(trial: RanTrial, transcript: Transcript, clip_duration_s: float,
              lexicon: Lexicon | None = None) -> RanResult:
    lexicon = lexicon if lexicon is not None else bundled_lexicon()
    for word in trial.expected_sequence:
        if word not in lexicon:
            raise UnknownWordError(f"expected word {word!r} is not in the lexicon")
    recognized = tuple(transcript.words)
    ref = [canonical_color(w) for w in trial.expected_sequence]
    hyp = [canonical_color(w) for w in recognized]
    _, alignment = edit_align(ref, hyp)
    marks = []
    extras = []
    for step in alignment:
        if step.kind == MATCH:
            marks.append(RanMark("correct", trial.expected_sequence[step.ref_index],
                                 recognized[step.hyp_index]))
        elif step.kind == SUB:
            marks.append(RanMark("substituted", trial.expected_sequence[step.ref_index],
                                 recognized[step.hyp_index]))
        elif step.kind == DEL:
            marks.append(RanMark("missed", trial.expected_sequence[step.ref_index]))
        else:
            extras.append(recognized[step.hyp_index])
    n_correct = sum(1 for m in marks if m.kind == "correct")
    accuracy = n_correct / len(trial.expected_sequence)
    if transcript.word_spans:
        total_time_s = float(transcript.word_spans[-1][1])
    else:
        total_time_s = float(clip_duration_s)
    items_per_s = len(trial.expected_sequence) / total_time_s if total_time_s > 0 else 0.0
    return RanResult(tuple(marks), tuple(extras), accuracy, total_time_s, items_per_s)


@dataclass(frozen=True)
class DiffStep:
    kind: str
    target: str | None
    response: str | None

    def to_payload(self) -> dict:
        return {"kind": self.kind, "target": self.target, "response": self.response}


@dataclass(frozen=True)
class PseudoResult:
    target_word: str
    response_text: str
    target_phonemes: tuple
    response_phonemes: tuple
    ops: EditOps
    alignment: tuple  # DiffStep per alignment step, matches included
    exact_match: bool
    per: float

    @property
    def diff(self) -> tuple:
        """Only the error positions of the alignment."""
        return tuple(s for s in self.alignment if s.kind != MATCH)

    def to_payload(self) -> dict:
        return {
            "target_word": self.target_word,
            "response_text": self.response_text,
            "target_phonemes": list(self.target_phonemes),
            "response_phonemes": list(self.response_phonemes),
            "ops": {"insertions": self.ops.insertions, "deletions": self.ops.deletions,
                    "substitutions": self.ops.substitutions, "matches": self.ops.matches},
            "alignment": [s.to_payload() for s in self.alignment],
            "exact_match": self.exact_match,
            "per": self.per,
        }


def score_pseudoword(target_word: str, response_text: str,
                     lexicon: Lexicon | None = None) -> PseudoResult:
    lexicon = lexicon if lexicon is not None else bundled_lexicon()
    target_seq = lexicon.lookup(target_word)
    if target_seq is None:
        raise UnknownWordError(f"target word {target_word!r} is not in the lexicon")
    response_seq = g2p_phrase(response_text, lexicon)
    ref = [p.code for p in target_seq]
    hyp = [p.code for p in response_seq]
    ops, alignment = edit_align(ref, hyp)
    steps = []
    for step in alignment:
        target = ref[step.ref_index] if step.ref_index is not None else None
        response = hyp[step.hyp_index] if step.hyp_index is not None else None
        steps.append(DiffStep(step.kind, target, response))
    return PseudoResult(
        target_word=target_word,
        response_text=response_text,
        target_phonemes=tuple(ref),
        response_phonemes=tuple(hyp),
        ops=ops,
        alignment=tuple(steps),
        exact_match=ops.total_errors == 0,
        per=ops.total_errors / len(ref),
    )


@dataclass(frozen=True)
class ManifestRecord:
    audio_path: Path
    transcript: str
    task: str
    environment: str


class ManifestFormatError(ValueError):
    pass


def parse_manifest(path) -> list[ManifestRecord]:
    """Tab-separated lines: audio_path, transcript, task, environment."""
    path = Path(path)
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ManifestFormatError(
                    f"{path}:{lineno}: expected 4 tab-separated fields, got {len(parts)}")
            audio, transcript, task, environment = parts
            if task not in TASK_TAGS:
                raise ManifestFormatError(
                    f"{path}:{lineno}: task must be one of {TASK_TAGS}, got {task!r}")
            if environment not in ENVIRONMENT_TAGS:
                raise ManifestFormatError(
                    f"{path}:{lineno}: environment must be one of "
                    f"{ENVIRONMENT_TAGS}, got {environment!r}")
            records.append(ManifestRecord(path.parent / audio, transcript,
                                          task, environment))
    return records


@dataclass(frozen=True)
class UtteranceEval:
    index: int
    audio_path: Path
    environment: str
    reference: str
    hypothesis: str
    per: float
    wer: float


@dataclass(frozen=True)
class PooledRates:
    utterances: int
    per: float
    wer: float


@dataclass(frozen=True)
class EvalReport:
    pooled: PooledRates
    by_environment: dict
    utterances: tuple
    failures: tuple  # (index, audio_path, message)
    reference_rows: tuple = field(default=())


def reference_rows() -> tuple:
    """Published production-scale results bundled for report context."""
    text = (importlib.resources.files("kidspeech.data") / "reference_results.json"
            ).read_text(encoding="utf-8")
    return tuple((r["model"], r["dataset"], r["metric"], r["value"])
                 for r in json.loads(text)["rows"])


def bundled_fixture_dir() -> Path:
    """Directory holding the shipped demo manifest, clips, and mock transcripts."""
    return Path(str(importlib.resources.files("kidspeech.data") / "fixtures"))


def _pool(rows: list[UtteranceEval], phone_pairs, word_pairs) -> PooledRates:
    pooled_per, _ = corpus_rate(phone_pairs)
    pooled_wer, _ = corpus_rate(word_pairs)
    return PooledRates(len(rows), pooled_per, pooled_wer)


def evaluate_manifest(records, transcriber: Transcriber,
                      lexicon: Lexicon | None = None) -> EvalReport:
    lexicon = lexicon if lexicon is not None else bundled_lexicon()
    entries = []  # (row, phone pair, word pair)
    failures = []
    for index, record in enumerate(records):
        try:
            wav_bytes = Path(record.audio_path).read_bytes()
            decode_wav(wav_bytes)  # surface undecodable audio as a failure here
            transcript = transcriber.transcribe(wav_bytes)
            ref_words = record.transcript.split()
            hyp_words = list(transcript.words)
            ref_phones = [p.code for p in g2p_phrase(record.transcript, lexicon)]
            hyp_phones = [p.code for p in g2p_phrase(transcript.text, lexicon)]
            ops_p, _ = edit_align(ref_phones, hyp_phones)
            ops_w, _ = edit_align(ref_words, hyp_words)
            row = UtteranceEval(
                index, record.audio_path, record.environment, record.transcript,
                transcript.text, ops_p.total_errors / len(ref_phones),
                ops_w.total_errors / len(ref_words))
            entries.append((row, (ref_phones, hyp_phones), (ref_words, hyp_words)))
        except Exception as exc:
            logger.warning("record %d (%s) failed: %s", index, record.audio_path, exc)
            failures.append((index, str(record.audio_path), str(exc)))
    rows = [e[0] for e in entries]
    by_environment = {}
    for env in ENVIRONMENT_TAGS:
        env_entries = [e for e in entries if e[0].environment == env]
        if not env_entries:
            continue
        by_environment[env] = _pool([e[0] for e in env_entries],
                                    [e[1] for e in env_entries],
                                    [e[2] for e in env_entries])
    pooled = (_pool(rows, [e[1] for e in entries], [e[2] for e in entries])
              if entries else PooledRates(0, 0.0, 0.0))
    return EvalReport(pooled, by_environment, tuple(rows), tuple(failures),
                      reference_rows())


def render_report(report: EvalReport) -> str:
    """Aligned text table followed by machine-readable record lines."""
    lines = []
    lines.append(f"{'dataset':<18} {'utts':>4} {'PER':>8} {'WER':>8}")
    lines.append(f"{'local manifest':<18} {report.pooled.utterances:>4} "
                 f"{report.pooled.per:>8.4f} {report.pooled.wer:>8.4f}")
    for env, rates in sorted(report.by_environment.items()):
        lines.append(f"{'  ' + env:<18} {rates.utterances:>4} "
                     f"{rates.per:>8.4f} {rates.wer:>8.4f}")
    if report.reference_rows:
        lines.append("")
        lines.append(f"{'reference model':<24} {'dataset':<28} {'metric':<6} {'value':>6}")
        for model, dataset, metric, value in report.reference_rows:
            lines.append(f"{model:<24} {dataset:<28} {metric:<6} {value:>6.1f}")
    if report.failures:
        lines.append("")
        lines.append(f"failures: {len(report.failures)}")
        for index, path, message in report.failures:
            lines.append(f"  record {index} ({path}): {message}")
    lines.append("")
    lines.append(f"result\tpooled\tper={report.pooled.per:.9f}\twer={report.pooled.wer:.9f}"
                 f"\tutterances={report.pooled.utterances}")
    for env, rates in sorted(report.by_environment.items()):
        lines.append(f"result\t{env}\tper={rates.per:.9f}\twer={rates.wer:.9f}"
                     f"\tutterances={rates.utterances}")
    for row in report.utterances:
        lines.append(f"utterance\t{row.index}\t{row.environment}"
                     f"\tper={row.per:.9f}\twer={row.wer:.9f}")
    return "\n".join(lines)
