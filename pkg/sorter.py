#!/usr/bin/env python3
"""
Generalized topological heapsort
The candidate data structure (CDS) contract shared by every availability
backend, transcripts, sort reports, and the brute-force replay oracles that
check a CDS against an explicit precedence system.
"""

import logging
import time
from abc import ABC, abstractmethod
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional

from pydantic import BaseModel, Field

from core import ExplicitMps, LanguageSet, Verdict, as_mask, bits_of_count, full_mask, iter_bits
from errors import ContractError, SizeLimitError, StallError
from settings import resolve_limit
from wsheap import HeapMetrics, WorkingSetHeap

logger = logging.getLogger(__name__)


class CandidateDataStructure(ABC):
    """
    Availability engine driven through init()/step(x).

    init() starts a fresh epoch with nothing chosen and reports every element
    available from the empty set. step(x) requires x to be available, reports
    exactly the elements that become available, then adds x to the chosen set.
    Subclasses implement _init/_step and add to `work` whatever units of
    internal effort they want measured.
    """

    def __init__(self, n: int, validated: bool = True, elements: Optional[int] = None):
        self.n = n
        self.validated = validated
        self.elements = full_mask(n) if elements is None else elements
        self.epoch = 0
        self.work = 0
        self.steps = 0
        self._chosen = 0
        self._reported = 0

    @property
    def size(self) -> int:
        """Number of elements a full run reports"""
        return bin(self.elements).count("1")

    @property
    def chosen(self) -> int:
        return self._chosen

    @property
    def available(self) -> int:
        """Reported but not yet chosen, as a bitmask"""
        return self._reported & ~self._chosen

    def init(self) -> List[int]:
        self.epoch += 1
        self.work = 0
        self.steps = 0
        self._chosen = 0
        self._reported = 0
        reported = list(self._init())
        self._record(reported)
        return reported

    def step(self, x: int) -> List[int]:
        if not self.epoch:
            raise ContractError("step called before init")
        if self.validated:
            if self._chosen >> x & 1:
                raise ContractError(f"step({x}): element already chosen")
            if not self._reported >> x & 1:
                raise ContractError(f"step({x}): element is not available")
            if self.steps >= self.size:
                raise ContractError("more steps than elements in this epoch")
        self.steps += 1
        reported = list(self._step(x))
        self._chosen |= 1 << x
        self._record(reported)
        return reported

    def _record(self, reported: Iterable[int]):
        for y in reported:
            if self.validated:
                if self._reported >> y & 1:
                    raise ContractError(f"element {y} reported twice in one epoch")
                if not self.elements >> y & 1:
                    raise ContractError(f"element {y} is outside this structure's alphabet")
            self._reported |= 1 << y

    @abstractmethod
    def _init(self) -> Iterable[int]:
        ...

    @abstractmethod
    def _step(self, x: int) -> Iterable[int]:
        ...


class Transcript(BaseModel):
    """Queue contents Q0..Qn: Q0 after init, Q_i after the i-th extraction and its inserts"""
    queues: List[FrozenSet[int]] = Field(default_factory=list)

    def check(self, output) -> Verdict:
        """x_i ∈ Q_{i-1} and x_i ∉ Q_j for every j ≥ i"""
        output = list(output)
        if len(self.queues) != len(output) + 1:
            return Verdict.failed(f"expected {len(output) + 1} queues, got {len(self.queues)}")
        for i, x in enumerate(output, start=1):
            if x not in self.queues[i - 1]:
                return Verdict.failed(f"output {i} ({x}) missing from Q{i - 1}", (i, x))
            for j in range(i, len(self.queues)):
                if x in self.queues[j]:
                    return Verdict.failed(f"output {i} ({x}) reappears in Q{j}", (i, x))
        return Verdict.passed()


class SortReport(BaseModel):
    """What a sort run produced and what it cost"""
    output: List[int]
    comparisons: int
    cds_steps: int = 0
    cds_work: int = 0
    queue_events: int = 0
    itb_bits: Optional[float] = None
    wall_time: float = 0.0
    cds_time: float = 0.0
    mode: str = "plain"
    heap_metrics: Optional[HeapMetrics] = None

    @property
    def ratio(self) -> Optional[float]:
        """comparisons / (1 + itb_bits) when the ITB is known"""
        if self.itb_bits is None:
            return None
        return self.comparisons / (1 + self.itb_bits)

    def machine_lines(self, alphabet) -> List[str]:
        """key=value lines without timings, stable across runs"""
        lines = [
            f"mode={self.mode}",
            f"output={alphabet.format_word(self.output)}",
            f"comparisons={self.comparisons}",
            f"cds_steps={self.cds_steps}",
            f"cds_work={self.cds_work}",
            f"queue_events={self.queue_events}",
        ]
        if self.itb_bits is not None:
            lines.append(f"itb_bits={self.itb_bits:.6f}")
            lines.append(f"ratio={self.ratio:.6f}")
        return lines


def topological_heapsort(cds: CandidateDataStructure, oracle, record_transcript: bool = False,
                         itb_bits: Optional[float] = None, heap_record: bool = False):
    """
    Sort the hidden order of `oracle` using availability from `cds`.

    Returns (SortReport, Transcript or None). With heap_record the report
    carries the heap's working-set metrics.
    """
    started = time.perf_counter()
    baseline = oracle.count
    heap = WorkingSetHeap(oracle, record=heap_record)
    seen = set()
    output = []
    queue_events = 0
    cds_time = 0.0

    def push_all(reported):
        nonlocal queue_events
        for y in reported:
            if y in seen:
                raise ContractError(f"element {y} reported after it was already queued or output")
            seen.add(y)
            heap.insert(y)
            queue_events += 1

    tick = time.perf_counter()
    reported = cds.init()
    cds_time += time.perf_counter() - tick
    push_all(reported)
    transcript = Transcript(queues=[heap.snapshot()]) if record_transcript else None

    while heap:
        x = heap.extract_min()
        queue_events += 1
        output.append(x)
        tick = time.perf_counter()
        reported = cds.step(x)
        cds_time += time.perf_counter() - tick
        push_all(reported)
        if transcript is not None:
            transcript.queues.append(heap.snapshot())

    if len(output) != cds.size:
        raise StallError(
            f"no element available after {len(output)} of {cds.size} outputs", prefix=output
        )

    report = SortReport(
        output=output,
        comparisons=oracle.count - baseline,
        cds_steps=cds.steps,
        cds_work=cds.work,
        queue_events=queue_events,
        itb_bits=itb_bits,
        wall_time=time.perf_counter() - started,
        cds_time=cds_time,
        heap_metrics=heap.metrics() if heap_record else None,
    )
    logger.debug("heapsort: n=%d comparisons=%d", len(output), report.comparisons)
    return report, transcript


def _maximal_words(S: ExplicitMps):
    stack = [((), 0)]
    while stack:
        word, mask = stack.pop()
        avail = S.available(mask)
        if not avail:
            yield word
            continue
        for x in iter_bits(avail):
            stack.append((word + (x,), mask | 1 << x))


def validate_cds(cds: CandidateDataStructure, S: ExplicitMps, limit: Optional[int] = None) -> Verdict:
    """
    Replay every word of L(S) into cds and compare the reported-available set
    with {x ∉ α̃ : p_x(α̃) = 1} after each prefix. Returns the first mismatch.
    """
    limit = resolve_limit(limit)
    if S.n > limit:
        raise SizeLimitError(S.n, limit, "validate_cds")
    if cds.n != S.n:
        return Verdict.failed(f"CDS has n={cds.n}, MPS has n={S.n}")
    checked = 0
    for word in sorted(_maximal_words(S)):
        try:
            cds.init()
            mask = 0
            for k in range(len(word) + 1):
                expected = S.available(mask)
                if cds.available != expected:
                    prefix = word[:k]
                    return Verdict.failed(
                        f"availability mismatch after {list(prefix)}: expected "
                        f"{sorted(iter_bits(expected))}, got {sorted(iter_bits(cds.available))}",
                        (prefix, expected, cds.available),
                    )
                if k < len(word):
                    cds.step(word[k])
                    mask |= 1 << word[k]
        except ContractError as e:
            return Verdict.failed(f"contract violated while replaying {list(word)}: {e}", (word,))
        checked += 1
    return Verdict.passed(f"{checked} maximal words replayed")


def replay(cds: CandidateDataStructure, word) -> int:
    """Init, step through word, return the available mask"""
    cds.init()
    for x in word:
        cds.step(x)
    return cds.available


def cds_availability(cds: CandidateDataStructure, limit: Optional[int] = None) -> Dict[int, int]:
    """
    Map every feasible set reachable through the CDS to its available set,
    exploring breadth-first with one replay per feasible set.
    """
    limit = resolve_limit(limit)
    if cds.size > limit:
        raise SizeLimitError(cds.size, limit, "cds_availability")
    table = {}
    queue = deque([(0, ())])
    while queue:
        mask, word = queue.popleft()
        if mask in table:
            continue
        avail = replay(cds, word)
        table[mask] = avail
        for x in iter_bits(avail):
            if (mask | 1 << x) not in table:
                queue.append((mask | 1 << x, word + (x,)))
    return table


def mps_from_cds(cds: CandidateDataStructure, limit: Optional[int] = None) -> ExplicitMps:
    """Rebuild the MPS whose language the CDS generates (elements outside the CDS alphabet never appear)"""
    table = cds_availability(cds, limit)
    generators = [[] for _ in range(cds.n)]
    for mask, avail in table.items():
        for x in iter_bits(avail):
            generators[x].append(mask)
    return ExplicitMps.from_generators(cds.n, generators)


def enumerate_cds_permutations(cds: CandidateDataStructure, limit: Optional[int] = None) -> List[tuple]:
    """All full words the CDS admits, sorted"""
    table = cds_availability(cds, limit)
    target = cds.elements
    words = []
    stack = [((), 0)]
    while stack:
        word, mask = stack.pop()
        if mask == target:
            words.append(word)
            continue
        for x in iter_bits(table.get(mask, 0)):
            stack.append((word + (x,), mask | 1 << x))
    return sorted(words)


def enumerate_cds_language(cds: CandidateDataStructure, limit: Optional[int] = None) -> LanguageSet:
    table = cds_availability(cds, limit)
    words = [()]
    stack = [((), 0)]
    while stack:
        word, mask = stack.pop()
        for x in iter_bits(table.get(mask, 0)):
            extended = word + (x,)
            words.append(extended)
            stack.append((extended, mask | 1 << x))
    return LanguageSet(cds.n, words)


def count_cds_permutations(cds: CandidateDataStructure, limit: Optional[int] = None) -> int:
    table = cds_availability(cds, limit)
    ways = {0: 1}
    for mask in sorted(table, key=lambda m: bin(m).count("1")):
        if mask not in ways:
            continue
        for x in iter_bits(table[mask]):
            nxt = mask | 1 << x
            ways[nxt] = ways.get(nxt, 0) + ways[mask]
    return ways.get(cds.elements, 0)


def cds_itb_bits(cds: CandidateDataStructure, limit: Optional[int] = None) -> Optional[float]:
    """log2 of the CDS's permutation count, or None above the limit or for an empty language"""
    try:
        count = count_cds_permutations(cds, limit)
    except SizeLimitError:
        return None
    return bits_of_count(count) if count else None


def sample_permutation(cds: CandidateDataStructure, rng) -> List[int]:
    """
    Random walk through the CDS picking uniformly among available elements.
    Always yields a member of P(A) for a full antimatroid, but not uniformly.
    """
    cds.init()
    word = []
    while cds.available:
        x = rng.choice(sorted(iter_bits(cds.available)))
        cds.step(x)
        word.append(x)
    if len(word) != cds.size:
        raise StallError("random walk stalled; the antimatroid is not full", prefix=word)
    return word


def restrict(word, elements) -> tuple:
    """Word restricted to a sub-alphabet given as a mask or iterable"""
    mask = as_mask(elements)
    return tuple(x for x in word if mask >> x & 1)
