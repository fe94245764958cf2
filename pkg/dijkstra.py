#!/usr/bin/env python3
"""
Dijkstra's algorithm on the working-set heap
Decrease-key by lazy reinsertion, distance orderings versus the
vertex-search antimatroid, and transcript equality with topological heapsort.
"""

import logging
import math
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

from pydantic import BaseModel, Field

from core import ComparisonOracle, Verdict, enumerate_language
from errors import InputError, SizeLimitError
from representations import RootedGraph, VertexSearchCds, random_rooted_graph
from sorter import Transcript, topological_heapsort
from wsheap import WorkingSetHeap

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 7


class WeightedDigraph:
    """Rooted digraph with a positive weight on every arc"""

    def __init__(self, n: int, arcs: Iterable[tuple], source: int = 0):
        weights: Dict[tuple, object] = {}
        for u, v, w in arcs:
            if not w > 0:
                raise InputError(f"arc ({u}, {v}) has nonpositive weight {w}")
            if u == v:
                continue
            if (u, v) not in weights or w < weights[(u, v)]:
                weights[(u, v)] = w
        self.graph = RootedGraph(n, weights.keys(), source, directed=True)
        self.weights = weights

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def source(self) -> int:
        return self.graph.root

    def arcs(self):
        for u, v in self.graph.arcs():
            yield u, v, self.weights[(u, v)]


class _EntryOrder:
    """Compares heap entries by (tentative distance, vertex id) and counts comparisons"""

    def __init__(self):
        self.keys: Dict[int, tuple] = {}
        self.count = 0

    def less(self, a: int, b: int) -> bool:
        self.count += 1
        return self.keys[a] < self.keys[b]


class KeyedHeapAdapter:
    """
    Vertex-keyed priority queue over the working-set heap. decrease_key
    inserts a fresh entry and leaves the old one to be skipped on extraction;
    membership and snapshots describe the logical contents only.
    """

    def __init__(self):
        self._order = _EntryOrder()
        self._heap = WorkingSetHeap(self._order)
        self._live: Dict[int, int] = {}
        self._key: Dict[int, object] = {}
        self._next_entry = 0
        self.decrease_keys = 0

    @property
    def comparisons(self) -> int:
        return self._order.count

    def __len__(self) -> int:
        return len(self._live)

    def __bool__(self) -> bool:
        return bool(self._live)

    def __contains__(self, v) -> bool:
        return v in self._live

    def snapshot(self) -> frozenset:
        return frozenset(self._live)

    def get_key(self, v):
        """Current tentative distance, or None when v is not queued"""
        return self._key.get(v) if v in self._live else None

    def _push(self, v, key):
        entry = self._next_entry
        self._next_entry += 1
        self._order.keys[entry] = (key, v)
        self._live[v] = entry
        self._key[v] = key
        self._heap.insert(entry)

    def insert(self, v, key):
        if v in self._live:
            raise InputError(f"vertex {v} is already queued")
        self._push(v, key)

    def decrease_key(self, v, key):
        if v not in self._live or not key < self._key[v]:
            raise InputError(f"decrease_key({v}) must lower an existing key")
        self.decrease_keys += 1
        self._push(v, key)

    def extract_min(self):
        while True:
            entry = self._heap.extract_min()
            key, v = self._order.keys.pop(entry)
            if self._live.get(v) == entry:
                del self._live[v]
                return v, key


class DijkstraResult(BaseModel):
    """Extraction order, exact distances (int or Fraction) and queue costs of one run"""
    order: List[int] = Field(default_factory=list)
    distances: Dict[int, Any] = Field(default_factory=dict)
    transcript: Transcript = Field(default_factory=Transcript)
    decrease_keys: int = 0
    comparisons: int = 0


def dijkstra_order(G: WeightedDigraph) -> DijkstraResult:
    """Vertices in nondecreasing distance from the source; ties go to the smaller id"""
    queue = KeyedHeapAdapter()
    result = DijkstraResult()
    if not G.n:
        result.transcript.queues.append(frozenset())
        return result
    queue.insert(G.source, 0)
    result.transcript.queues.append(queue.snapshot())
    done = set()
    while queue:
        u, d = queue.extract_min()
        done.add(u)
        result.order.append(u)
        result.distances[u] = d
        for v in G.graph.out[u]:
            if v in done:
                continue
            candidate = d + G.weights[(u, v)]
            current = queue.get_key(v)
            if current is None:
                queue.insert(v, candidate)
            elif candidate < current:
                queue.decrease_key(v, candidate)
        result.transcript.queues.append(queue.snapshot())
    result.decrease_keys = queue.decrease_keys
    result.comparisons = queue.comparisons
    logger.debug("dijkstra: n=%d m=%d decrease_keys=%d", G.n, G.m, result.decrease_keys)
    return result


def has_unique_ordering(result: DijkstraResult) -> bool:
    values = list(result.distances.values())
    return len(set(values)) == len(values)


def perturb_weights(G: WeightedDigraph) -> WeightedDigraph:
    """
    Exact rational perturbation: arc number i gains 2^-(i+1) / (2D), where
    every distance is a multiple of 1/D. Shortest paths to different vertices
    end in different arcs, so all distances become distinct while every
    strict inequality between original distances survives.
    """
    arcs = [(u, v, Fraction(w)) for u, v, w in G.arcs()]
    denominator = 1
    for _, _, w in arcs:
        denominator = denominator * w.denominator // math.gcd(denominator, w.denominator)
    scale = Fraction(1, 2 * denominator)
    perturbed = [(u, v, w + scale / 2 ** (i + 1)) for i, (u, v, w) in enumerate(arcs)]
    return WeightedDigraph(G.n, perturbed, G.source)


def constructed_weights(graph: RootedGraph, order) -> WeightedDigraph:
    """w(v_i, v_j) = j - i when v_j comes later in `order`, n otherwise"""
    position = {v: i for i, v in enumerate(order)}
    arcs = []
    for u, v in graph.arcs():
        i, j = position[u], position[v]
        arcs.append((u, v, j - i if j > i else graph.n))
    return WeightedDigraph(graph.n, arcs, graph.root)


def is_search_order(graph: RootedGraph, order) -> bool:
    """Root first, and every later vertex has an in-neighbour placed before it"""
    order = list(order)
    if sorted(order) != list(range(graph.n)):
        return False
    if not order:
        return True
    if order[0] != graph.root:
        return False
    seen = set()
    for v in order:
        if v != graph.root and not any(u in seen for u in graph.inn[v]):
            return False
        seen.add(v)
    return True


def random_weights(graph: RootedGraph, rng, max_weight: int = 10) -> WeightedDigraph:
    return WeightedDigraph(graph.n, [(u, v, rng.randint(1, max_weight)) for u, v in graph.arcs()], graph.root)


def check_distance_ordering_equivalence(graph: RootedGraph, rng=None, random_trials: int = 20,
                                        limit: int = EXHAUSTIVE_LIMIT) -> Verdict:
    """
    Every vertex-search order is realized as the unique Dijkstra order of the
    constructed weights, and Dijkstra orders for random weights are always
    vertex-search orders.
    """
    if graph.n > limit:
        raise SizeLimitError(graph.n, limit, "check_distance_ordering_equivalence")
    orders = enumerate_language(graph.to_mps(), limit=limit).permutations()
    for order in orders:
        result = dijkstra_order(constructed_weights(graph, order))
        if tuple(result.order) != tuple(order):
            return Verdict.failed(
                f"constructed weights for {list(order)} produced {result.order}", (tuple(order), result.order)
            )
    if rng is not None:
        for _ in range(random_trials):
            result = dijkstra_order(random_weights(graph, rng))
            if not is_search_order(graph, result.order):
                return Verdict.failed(f"Dijkstra order {result.order} is not a search order", result.order)
    return Verdict.passed(f"{len(orders)} search orders realized")


def check_transcript_equivalence(G: WeightedDigraph) -> Verdict:
    """
    With a unique distance ordering, Dijkstra and topological heapsort over
    the vertex-search CDS (hidden order = the distance ordering) hold the same
    vertices after every extraction. Ties are removed by perturbation first.
    """
    result = dijkstra_order(G)
    if not has_unique_ordering(result):
        G = perturb_weights(G)
        result = dijkstra_order(G)
    oracle = ComparisonOracle(result.order)
    _, transcript = topological_heapsort(VertexSearchCds(G.graph), oracle, record_transcript=True)
    if transcript.queues != result.transcript.queues:
        for i, (a, b) in enumerate(zip(transcript.queues, result.transcript.queues)):
            if a != b:
                return Verdict.failed(f"transcripts differ at Q{i}", (i, sorted(a), sorted(b)))
        return Verdict.failed("transcripts have different lengths")
    return Verdict.passed(f"{len(result.order)} extractions agree")


def equivalence_suite(rng, small_graphs: int = 30, small_n: int = 6, transcript_graphs: int = 100,
                      transcript_n: int = 50) -> List[tuple]:
    """
    Seeded sweep: search-order equivalence on random digraphs with at most
    `small_n` vertices, then transcript equality on larger random weighted
    digraphs. Returns (name, Verdict) pairs, stopping each part at its first failure.
    """
    def search_checks():
        for _ in range(small_graphs):
            graph = random_rooted_graph(rng.randint(1, small_n), rng, extra_arcs=rng.randint(0, small_n))
            yield check_distance_ordering_equivalence(graph, rng)

    def transcript_checks():
        for _ in range(transcript_graphs):
            graph = random_rooted_graph(rng.randint(1, transcript_n), rng)
            yield check_transcript_equivalence(random_weights(graph, rng))

    return [
        ("search_orders", _first_failure(search_checks(), f"{small_graphs} random digraphs")),
        ("transcripts", _first_failure(transcript_checks(), f"{transcript_graphs} weighted digraphs")),
    ]


def _first_failure(verdicts, summary: str) -> Verdict:
    for verdict in verdicts:
        if not verdict:
            return verdict
    return Verdict.passed(summary)
