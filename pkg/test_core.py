#!/usr/bin/env python3
"""
Tests for the core vocabulary: alphabets, oracles, explicit precedence
systems, language enumeration and the axiom checks.
"""

import random

import pytest
from pydantic import ValidationError

from core import (
    Alphabet,
    ComparisonOracle,
    ExplicitMps,
    LanguageSet,
    Verdict,
    bits_of_count,
    check_antimatroid_axioms,
    check_greedoid_axioms,
    compress,
    count_permutations,
    enumerate_language,
    expand,
    itb_bits,
    iter_bits,
    mps_from_language,
)
from errors import AxiomError, MonotonicityError, PreconditionError, SizeLimitError
from settings import get_settings, reload_settings


def test_bit_helpers():
    assert list(iter_bits(0b10110)) == [1, 2, 4]
    assert compress(1, 0b101) == 0b11
    assert expand(1, 0b11) == 0b101
    for x in range(4):
        for index in range(8):
            assert compress(x, expand(x, index)) == index


def test_alphabet_words():
    alphabet = Alphabet(("a", "b", "c"))
    assert alphabet.parse_word("bca") == (1, 2, 0)
    assert alphabet.parse_word("b c a") == (1, 2, 0)
    assert alphabet.parse_word("ε") == ()
    assert alphabet.format_word((2, 0)) == "ca"
    assert alphabet.format_set(0b101) == "{a, c}"
    with pytest.raises(PreconditionError):
        alphabet.parse_word("abd")
    with pytest.raises(PreconditionError):
        Alphabet(("a", "a"))
    wide = Alphabet(("x1", "x2"))
    assert not wide.compact
    assert wide.format_word((1, 0)) == "x2 x1"
    assert Alphabet.letters(30).names[0] == "x0"


def test_alphabet_and_verdict_are_frozen_models():
    alphabet = Alphabet(["a", "b"])
    assert alphabet == Alphabet(("a", "b"))
    assert alphabet.id_of("b") == 1
    with pytest.raises(ValidationError):
        alphabet.names = ("c",)
    verdict = Verdict.failed("no exchange", ((0,), (1,)))
    assert not verdict
    assert verdict.model_dump() == {"ok": False, "message": "no exchange", "witness": ((0,), (1,))}
    with pytest.raises(ValidationError):
        verdict.ok = True
    assert Verdict.passed()


def test_oracle_counts_and_replays():
    oracle = ComparisonOracle((2, 0, 1), record=True)
    assert oracle.less(2, 1)
    assert not oracle.less(1, 0)
    assert oracle.count == 2
    assert oracle.replay()
    with pytest.raises(PreconditionError):
        oracle.less(1, 1)
    with pytest.raises(PreconditionError):
        ComparisonOracle((0, 0, 1))


def test_example_language(example):
    alphabet, mps = example
    language = enumerate_language(mps)
    words = sorted(alphabet.format_word(w) for w in language.permutations())
    assert words == ["abc", "acb", "bac", "bca"]
    assert count_permutations(mps) == 4
    assert itb_bits(language) == pytest.approx(2.0)
    assert mps.available(0) == 0b011
    assert mps.available(0b001) == 0b110
    assert check_antimatroid_axioms(language)


def test_monotonicity_is_enforced():
    with pytest.raises(MonotonicityError):
        ExplicitMps(2, [[1, 0], [1, 1]])
    with pytest.raises(PreconditionError):
        ExplicitMps(2, [[1, 1]])


def test_partial_order_chain_has_one_permutation():
    mps = ExplicitMps.from_partial_order(3, [(0, 1), (1, 2)])
    assert enumerate_language(mps).permutations() == [(0, 1, 2)]
    assert bits_of_count(count_permutations(mps)) == 0.0


def test_empty_alphabet():
    mps = ExplicitMps(0, [])
    language = enumerate_language(mps)
    assert language.permutations() == [()]
    assert count_permutations(mps) == 1
    assert check_antimatroid_axioms(language)


def test_bits_of_zero_count_is_undefined():
    with pytest.raises(PreconditionError):
        bits_of_count(0)


def test_axiom_witness_is_smallest_pair():
    language = LanguageSet(2, [(), (0,), (1,), (0, 1)])
    verdict = check_antimatroid_axioms(language)
    assert not verdict
    assert verdict.witness == ((0,), (1,))
    assert not check_greedoid_axioms(language)


def test_prefix_closure_is_required():
    verdict = check_antimatroid_axioms(LanguageSet(2, [(), (0, 1)]))
    assert not verdict
    assert "prefix" in verdict.message


def test_language_round_trip_on_random_antimatroids():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 6)
        language = enumerate_language(ExplicitMps.random(n, rng))
        rebuilt = mps_from_language(language)
        assert enumerate_language(rebuilt) == language


def test_language_round_trip_at_eight_elements():
    rng = random.Random(8)
    for _ in range(5):
        language = enumerate_language(ExplicitMps.random(8, rng, density=0.5))
        assert enumerate_language(mps_from_language(language)) == language


def test_mps_from_language_rejects_bad_input():
    with pytest.raises(AxiomError):
        mps_from_language(LanguageSet(2, []))
    with pytest.raises(AxiomError):
        mps_from_language(LanguageSet(2, [(), (0,), (1,), (0, 1)]))


def test_random_mps_is_full():
    rng = random.Random(3)
    for n in range(1, 9):
        assert count_permutations(ExplicitMps.random(n, rng)) >= 1


def test_brute_force_limit_comes_from_settings(monkeypatch):
    rng = random.Random(1)
    mps = ExplicitMps.random(11, rng)
    with pytest.raises(SizeLimitError):
        enumerate_language(mps)
    monkeypatch.setenv("ANTISORT_BF_LIMIT", "12")
    assert reload_settings().bf_limit == 12
    assert get_settings().bf_limit == 12


def test_invalid_setting_fails_loudly(monkeypatch):
    monkeypatch.setenv("ANTISORT_HEAP_CEILING", "-3")
    with pytest.raises(ValidationError):
        reload_settings()


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
