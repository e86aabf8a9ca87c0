"""Levenshtein alignment and error rates.

Unit-cost edit distance with a deterministic backtrace (precedence
match > substitution > deletion > insertion at equal cost), plus the
phoneme/word error rates built on it: (I + D + S) / reference length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

MATCH = "match"
SUB = "sub"
DEL = "del"
INS = "ins"


@dataclass(frozen=True)
class EditOps:
    insertions: int
    deletions: int
    substitutions: int
    matches: int

    @property
    def total_errors(self) -> int:
        return self.insertions + self.deletions + self.substitutions


@dataclass(frozen=True)
class AlignStep:
    """One backtrace op; indices are None on the stream an op skips."""

    kind: str                 # match | sub | del | ins
    ref_index: int | None
    hyp_index: int | None


EditAlignment = list


def edit_align(ref: Sequence, hyp: Sequence) -> tuple[EditOps, list[AlignStep]]:
    """Minimal-cost alignment of two symbol sequences.

    Dynamic programming with unit costs.  Ties in the backtrace resolve as
    match > substitution > deletion > insertion, which makes alignments
    (and everything scored from them) deterministic.
    """
    n, m = len(ref), len(hyp)
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0] = i
    for j in range(1, m + 1):
        cost[0][j] = j
    for i in range(1, n + 1):
        ref_sym = ref[i - 1]
        row, prev = cost[i], cost[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (0 if ref_sym == hyp[j - 1] else 1)
            row[j] = min(diag, prev[j] + 1, row[j - 1] + 1)

    steps: list[AlignStep] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = cost[i][j]
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and here == cost[i - 1][j - 1]:
            steps.append(AlignStep(MATCH, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and here == cost[i - 1][j - 1] + 1:
            steps.append(AlignStep(SUB, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and here == cost[i - 1][j] + 1:
            steps.append(AlignStep(DEL, i - 1, None))
            i -= 1
        else:
            steps.append(AlignStep(INS, None, j - 1))
            j -= 1
    steps.reverse()

    kinds = [s.kind for s in steps]
    ops = EditOps(
        insertions=kinds.count(INS),
        deletions=kinds.count(DEL),
        substitutions=kinds.count(SUB),
        matches=kinds.count(MATCH),
    )
    return ops, steps


def per(ref: Sequence, hyp: Sequence) -> float:
    """Phoneme error rate: (I + D + S) / len(ref).  May exceed 1.0."""
    if len(ref) == 0:
        raise ValueError("phoneme error rate needs a nonempty reference")
    ops, _ = edit_align(ref, hyp)
    return ops.total_errors / len(ref)


def wer(ref: Sequence[str], hyp: Sequence[str]) -> float:
    """Word error rate: (I + D + S) / len(ref) at word granularity."""
    if len(ref) == 0:
        raise ValueError("word error rate needs a nonempty reference")
    ops, _ = edit_align(ref, hyp)
    return ops.total_errors / len(ref)


def corpus_rate(pairs: Sequence[tuple[Sequence, Sequence]]) -> tuple[float, list[float]]:
    """Pooled rate over utterances: sum of errors / sum of reference lengths.

    Returns the pooled rate and the per-utterance rates.  Pooling matches
    how single dataset-level numbers are usually reported; it is not the
    mean of the per-utterance rates when lengths differ.
    """
    total_errors = 0
    total_len = 0
    rates = []
    for ref, hyp in pairs:
        if len(ref) == 0:
            raise ValueError("corpus rate needs nonempty references")
        ops, _ = edit_align(ref, hyp)
        total_errors += ops.total_errors
        total_len += len(ref)
        rates.append(ops.total_errors / len(ref))
    if total_len == 0:
        raise ValueError("corpus rate needs at least one pair")
    return total_errors / total_len, rates
