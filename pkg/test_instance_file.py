#!/usr/bin/env python3
"""
Tests for instance and hidden-order files
"""

from fractions import Fraction

import pytest

from core import enumerate_language
from errors import InstanceParseError
from instance_file import (
    EXAMPLE_TWO,
    example_two_instance,
    format_instance,
    parse_instance,
    parse_order_text,
    parse_text,
    read_order,
)
from sorter import validate_cds

INSTANCES = {
    "formulas": EXAMPLE_TWO,
    "ercs": "ercs\nalphabet a b c\na b | c\n",
    "digraph": "digraph\nalphabet s x y\nroot s\ns x\nx y\ns y\n",
    "graph": "graph\nalphabet p q r\nroot q\np q\nq r\n",
    "chordal": "graph chordal\nalphabet a b c d\na b\nb c\na c\nc d\n",
    "weighted-digraph": "weighted-digraph\nalphabet s t u\nroot s\ns t 1/2\nt u 0.25\ns u 2\n",
}


def test_example_two(example):
    instance = example_two_instance()
    assert instance.kind == "formulas"
    assert instance.alphabet.names == ("a", "b", "c")
    assert instance.ground_truth() == example[1]
    assert validate_cds(instance.make_cds(), instance.ground_truth())


@pytest.mark.parametrize("kind", sorted(INSTANCES))
def test_every_kind_parses_and_validates(kind):
    instance = parse_text(INSTANCES[kind])
    assert instance.kind == kind
    verdict = validate_cds(instance.make_cds(), instance.ground_truth())
    assert verdict, verdict.message


@pytest.mark.parametrize("kind", sorted(INSTANCES))
def test_canonical_text_is_stable(kind):
    once = format_instance(parse_text(INSTANCES[kind]))
    assert format_instance(parse_text(once)) == once


def test_ercs_match_the_formula_example():
    ercs = parse_text(INSTANCES["ercs"])
    formulas = example_two_instance()
    assert enumerate_language(ercs.ground_truth()) == enumerate_language(formulas.ground_truth())


def test_weights_are_exact_fractions():
    instance = parse_text(INSTANCES["weighted-digraph"])
    assert dict(((u, v), w) for u, v, w in instance.payload.arcs()) == {
        (0, 1): Fraction(1, 2), (1, 2): Fraction(1, 4), (0, 2): Fraction(2),
    }
    assert "s t 1/2" in format_instance(instance)


def test_undirected_graph_is_symmetric():
    instance = parse_text(INSTANCES["graph"])
    assert instance.payload.root == 1
    assert sorted(instance.payload.arcs()) == [(0, 1), (1, 0), (1, 2), (2, 1)]
    assert enumerate_language(instance.ground_truth()).permutations() == [(1, 0, 2), (1, 2, 0)]


def test_comments_and_blank_lines():
    text = "# leading comment\n\nercs   # trailing\nalphabet a b\n\na | b  # b after a\n"
    instance = parse_text(text)
    assert list(instance.payload.ercs) == [(0b01, 0b10)]


def test_missing_formula_defaults_to_true():
    instance = parse_text("formulas\nalphabet a b\nb: a\n")
    assert enumerate_language(instance.ground_truth()).permutations() == [(0, 1)]


def test_empty_alphabet():
    instance = parse_text("formulas\nalphabet\n")
    assert instance.n == 0
    assert enumerate_language(instance.ground_truth()).permutations() == [()]
    assert parse_order_text("", instance.alphabet) == ()


@pytest.mark.parametrize("text, line, column", [
    ("", 1, 1),
    ("matrix\nalphabet a\n", 1, 1),
    ("ercs\n", 2, 1),
    ("ercs\nletters a b\n", 2, 1),
    ("ercs\nalphabet a b a\n", 2, 14),
    ("ercs\nalphabet a root\n", 2, 12),
    ("ercs\nalphabet a (b)\n", 2, 12),
    ("ercs\nalphabet a b\na | z\n", 3, 5),
    ("ercs\nalphabet a b\na b\n", 3, 1),
    ("ercs\nalphabet a b\na | a\n", 3, 1),
    ("formulas\nalphabet a b c\nc: (a & b | a)\n", 3, 11),
    ("formulas\nalphabet a b\nq: 1\n", 3, 1),
    ("formulas\nalphabet a b\na: 1\na: b\n", 4, 1),
    ("digraph\nalphabet a b\nroot a\nroot b\n", 4, 1),
    ("digraph\nalphabet a b\nroot a\na b c\n", 4, 1),
    ("weighted-digraph\nalphabet a b\nroot a\na b 0\n", 4, 5),
    ("weighted-digraph\nalphabet a b\nroot a\na b heavy\n", 4, 5),
    ("graph chordal\nalphabet a b\nroot a\n", 3, 1),
])
def test_syntax_errors_carry_locations(text, line, column):
    with pytest.raises(InstanceParseError) as info:
        parse_text(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize("text", [
    "graph chordal\nalphabet a b c d\na b\nb c\nc d\nd a\n",
    "digraph\nalphabet a b c\nroot a\na b\n",
])
def test_semantic_errors_point_at_the_header(text):
    with pytest.raises(InstanceParseError) as info:
        parse_text("# leading\n" + text)
    assert info.value.line == 2


def test_hidden_orders():
    alphabet = example_two_instance().alphabet
    assert parse_order_text("bca\n", alphabet) == (1, 2, 0)
    assert parse_order_text("# hidden\nb c a\n", alphabet) == (1, 2, 0)
    for bad in ("bc", "bcaa", "bcx"):
        with pytest.raises(InstanceParseError):
            parse_order_text(bad, alphabet)


def test_files_on_disk(write_file):
    instance = parse_instance(write_file("two.txt", EXAMPLE_TWO))
    assert instance.n == 3
    assert read_order(write_file("order.txt", "acb\n"), instance.alphabet) == (0, 2, 1)
    with pytest.raises(InstanceParseError):
        parse_instance(write_file("two.txt", EXAMPLE_TWO).with_name("missing.txt"))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
