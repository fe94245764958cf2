#!/usr/bin/env python3
"""
Tests for layers, bottlenecks, the trace CDS, merging and the optimal sorter
"""

import random

import pytest
from pydantic import ValidationError

from core import ComparisonOracle, ExplicitMps, bits_of_count, count_permutations, enumerate_language
from errors import MergeMismatchError, NotFullError
from optimal import (
    TraceCds,
    bottleneck_sequence,
    compute_layers,
    exp_search,
    exp_search_budget,
    merge,
    optimal_sort,
)
from representations import ErcCds, ErcSet, FormulaCds, ercs_from_mps, formulas_from_mps
from settings import get_settings
from sorter import enumerate_cds_permutations, restrict, sample_permutation


def formula_factory(mps):
    system = formulas_from_mps(mps)
    return lambda: FormulaCds(system)


def test_example_layers(example):
    _, mps = example
    layers = compute_layers(FormulaCds(formulas_from_mps(mps)))
    assert layers.layers == ((0, 1), (2,))
    assert layers.k == 2
    assert layers.lower_bound_bits() == 1
    beta = bottleneck_sequence(layers)
    assert beta.bottlenecks == (2,)
    assert beta.lower_bound_bits() == pytest.approx(1.0)
    assert beta.model_dump() == {"bottlenecks": (2,), "n": 3}
    with pytest.raises(ValidationError):
        layers.layers = ()


def test_chain_is_all_bottlenecks():
    layers = compute_layers(ErcCds(ErcSet.from_pairs(3, [(0, 1), (1, 2)])))
    assert layers.layers == ((0,), (1,), (2,))
    assert bottleneck_sequence(layers).t == 3


def test_layers_need_a_full_antimatroid():
    with pytest.raises(NotFullError):
        compute_layers(ErcCds(ErcSet.from_pairs(3, [(1, 2), (2, 1)])))


def test_layer_and_bottleneck_bounds():
    rng = random.Random(41)
    for _ in range(80):
        mps = ExplicitMps.random(rng.randint(1, 7), rng)
        layers = compute_layers(FormulaCds(formulas_from_mps(mps)))
        beta = bottleneck_sequence(layers)
        words = enumerate_language(mps).permutations()
        assert layers.n == mps.n
        assert len(words) >= 2 ** layers.lower_bound_bits()
        assert len(words) >= 2 ** beta.lower_bound_bits()
        for word in words:
            # bottlenecks appear in layer order in every word
            positions = [word.index(b) for b in beta.bottlenecks]
            assert positions == sorted(positions)


def test_example_trace(example):
    _, mps = example
    trace = TraceCds(FormulaCds(formulas_from_mps(mps)), 0b101)
    assert sorted(trace.init()) == [0, 2]
    assert enumerate_cds_permutations(TraceCds(FormulaCds(formulas_from_mps(mps)), 0b101)) == [(0, 2), (2, 0)]


@pytest.mark.parametrize("n, instances", [(1, 1), (2, 3), (3, 3), (4, 3), (5, 3), (6, 3), (7, 2)])
def test_trace_words_are_restrictions(n, instances):
    rng = random.Random(42 + n)
    for _ in range(instances):
        mps = ExplicitMps.random(n, rng)
        words = enumerate_language(mps).permutations()
        system = formulas_from_mps(mps)
        for gamma in range(1 << mps.n):
            expected = sorted({restrict(word, gamma) for word in words})
            assert enumerate_cds_permutations(TraceCds(FormulaCds(system), gamma)) == expected, gamma


def test_exp_search_positions_and_budget():
    hidden = list(range(40))
    g = list(range(0, 40, 2))
    for start in range(len(g) + 1):
        for d in range(1, 40, 2):
            oracle = ComparisonOracle(hidden)
            found = exp_search(d, g, start, oracle)
            expected = next((i for i in range(start, len(g)) if g[i] > d), len(g))
            assert found == expected
            assert oracle.count <= exp_search_budget(found - start)


def test_exp_search_budget_values():
    assert exp_search_budget(0) == 2
    assert exp_search_budget(1) == 4
    assert exp_search_budget(7) == 8


@pytest.mark.parametrize("n, instances", [(1, 1), (2, 3), (3, 3), (4, 3), (5, 3), (6, 2), (7, 1)])
def test_merge_every_bipartition(n, instances):
    rng = random.Random(43 + n)
    for _ in range(instances):
        mps = ExplicitMps.random(n, rng)
        system = formulas_from_mps(mps)
        everything = (1 << mps.n) - 1
        for word in enumerate_language(mps).permutations():
            for gamma in range(1 << mps.n):
                left = restrict(word, gamma)
                right = restrict(word, everything & ~gamma)
                merged = merge(FormulaCds(system), left, right, ComparisonOracle(word))
                assert tuple(merged) == word


def test_merge_detects_inconsistent_words(example):
    _, mps = example
    # c ahead of both a and b can never be available
    with pytest.raises(MergeMismatchError):
        merge(FormulaCds(formulas_from_mps(mps)), (2, 0), (1,), ComparisonOracle((2, 0, 1)))


def test_optimal_sort_example(example):
    _, mps = example
    for word in enumerate_language(mps).permutations():
        report = optimal_sort(formula_factory(mps), ComparisonOracle(word), itb_bits=2.0)
        assert tuple(report.output) == word
        assert report.mode == "optimal"
        assert report.itb_bits == 2.0


def test_optimal_sort_reuses_one_cds():
    rng = random.Random(44)
    mps = ExplicitMps.random(6, rng)
    cds = ErcCds(ercs_from_mps(mps))
    for word in enumerate_language(mps).permutations()[:20]:
        assert tuple(optimal_sort(cds, ComparisonOracle(word)).output) == word


def test_optimal_sort_within_ceiling():
    rng = random.Random(45)
    ceiling = get_settings().optimal_ceiling
    for _ in range(80):
        mps = ExplicitMps.random(rng.randint(1, 8), rng)
        itb = bits_of_count(count_permutations(mps))
        factory = formula_factory(mps)
        hidden = sample_permutation(factory(), rng)
        report = optimal_sort(factory, ComparisonOracle(hidden), itb_bits=itb)
        assert report.output == hidden
        assert report.comparisons <= ceiling * (1 + itb)


def test_optimal_sort_on_a_total_order_is_free():
    n = 30
    ercs = ErcSet.from_pairs(n, [(x, x + 1) for x in range(n - 1)])
    report = optimal_sort(ErcCds(ercs), ComparisonOracle(range(n)))
    assert report.output == list(range(n))
    assert report.comparisons == 0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
