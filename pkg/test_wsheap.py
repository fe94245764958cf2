#!/usr/bin/env python3
"""
Tests for the working-set heap
"""

import bisect
import heapq
import itertools
import random

import pytest

from core import ComparisonOracle
from errors import EmptyHeapError, HeapUsageError, MetricsUnavailableError
from settings import get_settings
from wsheap import WorkingSetHeap, heapsort


def test_heapsort_recovers_hidden_order():
    rng = random.Random(11)
    hidden = list(range(200))
    rng.shuffle(hidden)
    oracle = ComparisonOracle(hidden)
    items = list(range(200))
    rng.shuffle(items)
    order, heap = heapsort(items, oracle)
    assert order == hidden
    assert heap.comparisons == oracle.count


def test_inserts_settle_at_first_peek():
    oracle = ComparisonOracle(range(10))
    heap = WorkingSetHeap(oracle)
    for x in range(10):
        heap.insert(x)
    assert oracle.count == 0
    assert heap.peek() == 0
    assert oracle.count == 9
    assert heap.peek() == 0
    assert oracle.count == 9
    assert len(heap) == 10


def test_usage_errors():
    heap = WorkingSetHeap(ComparisonOracle(range(3)))
    with pytest.raises(EmptyHeapError):
        heap.extract_min()
    with pytest.raises(IndexError):
        heap.peek()
    heap.insert(1)
    with pytest.raises(HeapUsageError):
        heap.insert(1)
    assert heap.extract_min() == 1
    with pytest.raises(HeapUsageError):
        heap.insert(1)
    with pytest.raises(MetricsUnavailableError):
        heap.metrics()


def test_membership_and_snapshot():
    heap = WorkingSetHeap(ComparisonOracle((2, 1, 0)))
    heap.insert(0)
    heap.insert(2)
    assert 2 in heap
    assert heap.contains(0)
    assert heap.snapshot() == frozenset({0, 2})
    assert heap.extract_min() == 2
    assert heap.snapshot() == frozenset({0})


def test_weak_working_set_sizes():
    heap = WorkingSetHeap(ComparisonOracle(range(4)), record=True)
    heap.insert(0)
    heap.insert(1)
    heap.insert(2)
    assert heap.extract_min() == 0
    heap.insert(3)
    assert heap.extract_min() == 1
    metrics = heap.metrics()
    # w'(0) counts 0, 1, 2; w'(1) counts 1, 2, 3
    assert metrics.working_set == {0: 3, 1: 3}
    assert metrics.bound == pytest.approx(2 * (1 + 1.584962500721156))


def test_immediate_extraction_has_working_set_one():
    heap = WorkingSetHeap(ComparisonOracle(range(5)), record=True)
    for x in range(5):
        heap.insert(x)
        heap.extract_min()
    metrics = heap.metrics()
    assert set(metrics.working_set.values()) == {1}
    assert metrics.comparisons == 0
    assert metrics.constant == 0.0


@pytest.mark.parametrize("workload", ["random", "sorted", "reversed"])
def test_measured_constant_stays_under_ceiling(workload):
    rng = random.Random(5)
    n = 512
    items = list(range(n))
    if workload == "random":
        rng.shuffle(items)
    elif workload == "reversed":
        items.reverse()
    _, heap = heapsort(items, ComparisonOracle(range(n)), record=True)
    assert heap.metrics().constant <= get_settings().heap_ceiling


@pytest.mark.parametrize("n", [1, 2, 3, 10, 100, 1000, 10_000])
def test_sorted_run_costs_at_most_two_per_element(n):
    oracle = ComparisonOracle(range(n))
    order, _ = heapsort(range(n), oracle)
    assert order == list(range(n))
    assert oracle.count <= 2 * n


def test_singleton_extraction_is_free():
    oracle = ComparisonOracle(range(3))
    heap = WorkingSetHeap(oracle)
    heap.insert(2)
    assert heap.extract_min() == 2
    assert oracle.count == 0


def op_patterns(n):
    """Insert/extract sequences with n inserts that never extract from an empty heap and end empty"""
    def extend(pattern, inserted, present):
        if inserted == n and present == 0:
            yield pattern
            return
        if inserted < n:
            yield from extend(pattern + "I", inserted + 1, present + 1)
        if present:
            yield from extend(pattern + "E", inserted, present - 1)
    return list(extend("", 0, 0))


def run_against_sorted_list(hidden, items, pattern):
    rank = {x: r for r, x in enumerate(hidden)}
    heap = WorkingSetHeap(ComparisonOracle(hidden))
    reference = []
    pending = iter(items)
    for op in pattern:
        if op == "I":
            x = next(pending)
            heap.insert(x)
            bisect.insort(reference, (rank[x], x))
        else:
            assert heap.extract_min() == reference.pop(0)[1]
        assert len(heap) == len(reference)


@pytest.mark.parametrize("n", range(1, 7))
def test_every_small_interleaving_matches_sorted_list(n):
    patterns = op_patterns(n)
    for items in itertools.permutations(range(n)):
        for pattern in patterns:
            run_against_sorted_list(list(range(n)), items, pattern)


@pytest.mark.parametrize("n, seed", [(10, 1), (200, 2), (1000, 3), (10_000, 4)])
def test_random_interleavings_match_reference_queue(n, seed):
    rng = random.Random(seed)
    hidden = list(range(n))
    rng.shuffle(hidden)
    rank = {x: r for r, x in enumerate(hidden)}
    items = list(range(n))
    rng.shuffle(items)
    heap = WorkingSetHeap(ComparisonOracle(hidden))
    reference = []
    for x in items:
        heap.insert(x)
        heapq.heappush(reference, (rank[x], x))
        while reference and rng.random() < 0.4:
            assert heap.extract_min() == heapq.heappop(reference)[1]
    while reference:
        assert heap.extract_min() == heapq.heappop(reference)[1]
    assert not heap


def test_never_compares_an_element_with_itself():
    # the oracle raises PreconditionError on x vs x
    rng = random.Random(6)
    items = list(range(300))
    rng.shuffle(items)
    oracle = ComparisonOracle(range(300), record=True)
    order, _ = heapsort(items, oracle)
    assert order == list(range(300))
    assert all(x != y for x, y, _ in oracle.history)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
