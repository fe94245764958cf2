#!/usr/bin/env python3
"""
Tests for chordal recognition, clique trees and simplicial-vertex pruning
"""

import math
import random

import networkx as nx
import pytest

from chordal import (
    ChordalGraph,
    SimplicialCds,
    build_clique_tree,
    count_peos,
    is_peo,
    is_simplicial,
    maximum_cardinality_search,
    random_chordal_graph,
    simplicial_mask,
)
from core import ComparisonOracle, ExplicitMps
from errors import ChordalityError, InputError, SizeLimitError
from settings import get_settings
from sorter import count_cds_permutations, enumerate_cds_permutations, sample_permutation, topological_heapsort, validate_cds


def as_networkx(graph):
    reference = nx.Graph()
    reference.add_nodes_from(range(graph.n))
    reference.add_edges_from(graph.edges())
    return reference


def ground_truth(graph):
    return ExplicitMps.from_predicates(graph.n, lambda v, mask: is_simplicial(graph, v, mask))


def test_triangle_is_one_clique():
    tree = build_clique_tree(ChordalGraph(3, [(0, 1), (1, 2), (0, 2)]))
    assert tree.maximal_cliques() == [(0, 1, 2)]
    assert tree.edges() == []


def test_path_has_two_cliques():
    tree = build_clique_tree(ChordalGraph(3, [(0, 1), (1, 2)]))
    assert tree.maximal_cliques() == [(0, 1), (1, 2)]
    assert [s for _, _, s in tree.edges()] == [1]
    assert tree.is_coherent()


def test_four_cycle_is_rejected_with_witness():
    with pytest.raises(ChordalityError) as info:
        ChordalGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    v, first, second = info.value.witness
    cycle = {frozenset(e) for e in [(0, 1), (1, 2), (2, 3), (3, 0)]}
    assert frozenset((v, first)) in cycle
    assert frozenset((v, second)) in cycle
    assert frozenset((first, second)) not in cycle
    assert isinstance(info.value, InputError)


def test_recognition_agrees_with_networkx():
    rng = random.Random(31)
    for _ in range(150):
        n = rng.randint(1, 7)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.45]
        reference = nx.Graph()
        reference.add_nodes_from(range(n))
        reference.add_edges_from(edges)
        if nx.is_chordal(reference):
            ChordalGraph(n, edges)
        else:
            with pytest.raises(ChordalityError):
                ChordalGraph(n, edges)


def test_mcs_labels_count_visited_neighbours():
    graph = ChordalGraph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    order, labels = maximum_cardinality_search(graph)
    assert order[0] == 0
    assert labels[0] == 0
    seen = set()
    for v, label in zip(order, labels):
        assert label == len(graph.adj[v] & seen)
        seen.add(v)


def test_clique_tree_matches_networkx_cliques():
    rng = random.Random(32)
    for _ in range(30):
        graph = random_chordal_graph(rng.randint(1, 30), rng, connected=rng.random() < 0.5)
        tree = build_clique_tree(graph)
        expected = sorted(tuple(sorted(c)) for c in nx.chordal_graph_cliques(as_networkx(graph)))
        assert tree.maximal_cliques() == expected
        assert tree.is_coherent()


def test_path_pruning_language():
    graph = ChordalGraph(3, [(0, 1), (1, 2)])
    cds = SimplicialCds(graph)
    assert sorted(cds.init()) == [0, 2]
    assert cds.step(0) == [1]
    assert enumerate_cds_permutations(SimplicialCds(graph)) == [(0, 1, 2), (0, 2, 1), (2, 0, 1), (2, 1, 0)]


def test_triangle_admits_every_order():
    graph = ChordalGraph(3, [(0, 1), (1, 2), (0, 2)])
    assert count_cds_permutations(SimplicialCds(graph)) == 6


def test_peo_checks():
    path = ChordalGraph(3, [(0, 1), (1, 2)])
    assert is_peo(path, (0, 2, 1))
    assert not is_peo(path, (1, 0, 2))
    assert not is_peo(path, (0, 1))
    assert simplicial_mask(path) == 0b101
    assert simplicial_mask(path, removed=0b001) == 0b110


def test_pruning_matches_brute_force():
    rng = random.Random(33)
    for _ in range(40):
        graph = random_chordal_graph(rng.randint(0, 6), rng, connected=rng.random() < 0.6)
        verdict = validate_cds(SimplicialCds(graph, check_coherence=True), ground_truth(graph))
        assert verdict, verdict.message


def test_peo_count_lower_bound():
    rng = random.Random(34)
    for _ in range(50):
        graph = random_chordal_graph(rng.randint(1, 9), rng)
        count = count_peos(graph)
        assert count >= 2 ** (graph.n - 1)
        if graph.n <= 7:
            assert count_cds_permutations(SimplicialCds(graph)) == count


def test_peo_count_respects_limit():
    graph = random_chordal_graph(12, random.Random(35))
    with pytest.raises(SizeLimitError):
        count_peos(graph)


def test_heapsort_comparisons_already_optimal():
    rng = random.Random(36)
    ceiling = get_settings().plain_ceiling
    for n in (3, 5, 7, 9, 100, 1000):
        graph = random_chordal_graph(n, rng)
        # past the counting limit, log2 #PEO is replaced by its n - 1 lower bound
        itb = math.log2(count_peos(graph)) if n <= 9 else float(n - 1)
        hidden = sample_permutation(SimplicialCds(graph), rng)
        report, _ = topological_heapsort(SimplicialCds(graph), ComparisonOracle(hidden))
        assert report.output == hidden
        assert is_peo(graph, report.output)
        assert report.comparisons <= ceiling * (n + itb)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
