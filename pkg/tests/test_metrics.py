"""Edit distance, alignment, and error-rate tests.

The distance itself is checked against an independent brute-force
recursion over the full closure of short sequences; the alignment is
checked structurally (cost accounting, script validity) since the
backtrace tie-break makes one of several minimal scripts canonical.
"""

import itertools
from functools import lru_cache

import numpy as np
import pytest

from kidspeech.metrics import (
    DEL,
    INS,
    MATCH,
    SUB,
    AlignStep,
    EditOps,
    corpus_rate,
    edit_align,
    per,
    wer,
)

ALPHABET = "abc"


def brute_distance(ref, hyp):
    """Minimal edit cost by plain recursion on the definition.

    Deliberately shares no code with the DP implementation.
    """

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        step = 0 if ref[i - 1] == hyp[j - 1] else 1
        return min(go(i - 1, j - 1) + step, go(i - 1, j) + 1, go(i, j - 1) + 1)

    return go(len(ref), len(hyp))


def all_strings(max_len):
    out = [""]
    for length in range(1, max_len + 1):
        out.extend("".join(t) for t in itertools.product(ALPHABET, repeat=length))
    return out


class TestDistanceOracle:
    def test_exhaustive_closure_up_to_length_4(self):
        """Every pair of 3-symbol strings with lengths <= 4 agrees with brute force."""
        strings = all_strings(4)
        mismatches = 0
        for a in strings:
            for b in strings:
                ops, _ = edit_align(a, b)
                if ops.total_errors != brute_distance(a, b):
                    mismatches += 1
        assert mismatches == 0

    def test_random_length_5_pairs(self):
        """10k random length-5 pairs agree with brute force."""
        rng = np.random.default_rng(1)
        for _ in range(10000):
            a = "".join(rng.choice(list(ALPHABET), size=5))
            b = "".join(rng.choice(list(ALPHABET), size=5))
            ops, _ = edit_align(a, b)
            assert ops.total_errors == brute_distance(a, b)


class TestAlignmentStructure:
    def test_script_cost_matches_op_counts(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            a = "".join(rng.choice(list(ALPHABET), size=rng.integers(0, 7)))
            b = "".join(rng.choice(list(ALPHABET), size=rng.integers(0, 7)))
            ops, steps = edit_align(a, b)
            kinds = [s.kind for s in steps]
            assert ops.matches == kinds.count(MATCH)
            assert ops.substitutions == kinds.count(SUB)
            assert ops.deletions == kinds.count(DEL)
            assert ops.insertions == kinds.count(INS)

    def test_script_replays_ref_into_hyp(self):
        """Applying the alignment ops to ref reconstructs hyp exactly."""
        rng = np.random.default_rng(3)
        for _ in range(500):
            a = "".join(rng.choice(list(ALPHABET), size=rng.integers(0, 7)))
            b = "".join(rng.choice(list(ALPHABET), size=rng.integers(0, 7)))
            _, steps = edit_align(a, b)
            consumed, emitted = [], []
            for s in steps:
                if s.kind == MATCH:
                    consumed.append(a[s.ref_index])
                    emitted.append(a[s.ref_index])
                    assert a[s.ref_index] == b[s.hyp_index]
                elif s.kind == SUB:
                    consumed.append(a[s.ref_index])
                    emitted.append(b[s.hyp_index])
                    assert a[s.ref_index] != b[s.hyp_index]
                elif s.kind == DEL:
                    consumed.append(a[s.ref_index])
                else:
                    emitted.append(b[s.hyp_index])
            assert "".join(consumed) == a
            assert "".join(emitted) == b

    def test_indices_cover_both_streams_in_order(self):
        _, steps = edit_align("abca", "bcab")
        ref_idx = [s.ref_index for s in steps if s.ref_index is not None]
        hyp_idx = [s.hyp_index for s in steps if s.hyp_index is not None]
        assert ref_idx == [0, 1, 2, 3]
        assert hyp_idx == [0, 1, 2, 3]

    def test_accounting_identities(self):
        """matches+subs+dels = len(ref); matches+subs+ins = len(hyp)."""
        rng = np.random.default_rng(4)
        for _ in range(500):
            a = "".join(rng.choice(list(ALPHABET), size=rng.integers(0, 8)))
            b = "".join(rng.choice(list(ALPHABET), size=rng.integers(0, 8)))
            ops, _ = edit_align(a, b)
            assert ops.matches + ops.substitutions + ops.deletions == len(a)
            assert ops.matches + ops.substitutions + ops.insertions == len(b)

    def test_tie_break_prefers_substitution_over_indel_pair(self):
        ops, steps = edit_align("a", "b")
        assert [s.kind for s in steps] == [SUB]
        assert ops.total_errors == 1


class TestMetricProperties:
    def test_symmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            a = "".join(rng.choice(list(ALPHABET), size=rng.integers(0, 6)))
            b = "".join(rng.choice(list(ALPHABET), size=rng.integers(0, 6)))
            assert edit_align(a, b)[0].total_errors == edit_align(b, a)[0].total_errors

    def test_triangle_inequality(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            a, b, c = ("".join(rng.choice(list(ALPHABET), size=rng.integers(0, 6)))
                       for _ in range(3))
            dab = edit_align(a, b)[0].total_errors
            dbc = edit_align(b, c)[0].total_errors
            dac = edit_align(a, c)[0].total_errors
            assert dac <= dab + dbc

    def test_identity_of_indiscernibles(self):
        assert edit_align("abc", "abc")[0].total_errors == 0
        assert edit_align("abc", "abd")[0].total_errors > 0


class TestRates:
    def test_known_pair(self):
        """One substitution in a 5-symbol reference gives rate 0.2 exactly."""
        ref = ["m", "a", "sh", "o", "gh"]
        hyp = ["gh", "a", "sh", "o", "gh"]
        assert per(ref, hyp) == 0.2

    def test_rate_can_exceed_one(self):
        assert per("a", "bbb") > 1.0

    def test_empty_hypothesis_is_all_deletions(self):
        assert per("abc", "") == 1.0
        assert wer(["x", "y"], []) == 1.0

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            per("", "abc")
        with pytest.raises(ValueError):
            wer([], ["a"])

    def test_wer_on_words(self):
        assert wer(["sabz", "zard"], ["sabz"]) == 0.5

    def test_pooled_rate_is_not_mean_of_rates(self):
        pairs = [("aaaa", "aaaa"), ("b", "c")]
        pooled, rates = corpus_rate(pairs)
        assert rates == [0.0, 1.0]
        assert pooled == pytest.approx(1 / 5)
        assert pooled != np.mean(rates)

    def test_pooled_rate_scale_free(self):
        """Duplicating every utterance leaves the pooled rate unchanged."""
        pairs = [("abc", "abd"), ("ab", "b")]
        pooled_once, _ = corpus_rate(pairs)
        pooled_twice, _ = corpus_rate(pairs * 2)
        assert pooled_twice == pytest.approx(pooled_once, abs=1e-15)

    def test_pooled_rejects_empty_reference(self):
        with pytest.raises(ValueError):
            corpus_rate([("", "a")])
