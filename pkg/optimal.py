#!/usr/bin/env python3
"""
Comparison-optimal antimatroid sorting
Layers and bottlenecks, the trace CDS over a sub-alphabet, merging two
pre-sorted words under antimatroid constraints, and the three-phase driver
that combines them.
"""

import logging
import math
import time
from collections import deque
from typing import Callable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict

from errors import MergeMismatchError, NotFullError, StallError
from sorter import CandidateDataStructure, SortReport, topological_heapsort

logger = logging.getLogger(__name__)


class LayerSequence(BaseModel):
    """L1..Lk: L1 is everything available at the start, L_i everything available once L1..L_{i-1} are chosen"""
    model_config = ConfigDict(frozen=True)

    layers: Tuple[Tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.layers)

    @property
    def n(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def lower_bound_bits(self) -> int:
        """|P| ≥ 2^(n-k)"""
        return self.n - self.k

    def layer_of(self) -> dict:
        return {x: i for i, layer in enumerate(self.layers) for x in layer}


class BottleneckSequence(BaseModel):
    """Elements that are alone in their layer, in layer order"""
    model_config = ConfigDict(frozen=True)

    bottlenecks: Tuple[int, ...]
    n: int

    @property
    def t(self) -> int:
        return len(self.bottlenecks)

    def lower_bound_bits(self) -> float:
        """|P| ≥ 2^((n-t)/2)"""
        return (self.n - self.t) / 2


def compute_layers(cds: CandidateDataStructure) -> LayerSequence:
    """One full init+step pass, stepping a whole layer before looking at the next"""
    current = sorted(cds.init())
    layers = []
    while current:
        layers.append(tuple(current))
        following = []
        for x in current:
            following.extend(cds.step(x))
        current = sorted(following)
    covered = sum(len(layer) for layer in layers)
    if covered != cds.size:
        raise NotFullError(
            f"layering stalls after {covered} of {cds.size} elements; the antimatroid has no full word"
        )
    return LayerSequence(layers=tuple(layers))


def bottleneck_sequence(layers: LayerSequence) -> BottleneckSequence:
    return BottleneckSequence(bottlenecks=tuple(layer[0] for layer in layers.layers if len(layer) == 1),
                              n=layers.n)


class TraceCds(CandidateDataStructure):
    """
    CDS for the restriction of an antimatroid to Γ. Elements outside Γ are
    stepped through the inner CDS as soon as they are reported, in FIFO
    order, so only Γ-elements ever surface.
    """

    def __init__(self, inner: CandidateDataStructure, gamma: int, validated: bool = True):
        super().__init__(inner.n, validated, elements=gamma & inner.elements)
        self.inner = inner
        self._cleanup = deque()

    def _absorb(self, reported, out):
        for y in reported:
            if self.elements >> y & 1:
                out.append(y)
            else:
                self._cleanup.append(y)

    def _drain(self, out):
        while self._cleanup:
            y = self._cleanup.popleft()
            self.work += 1
            self._absorb(self.inner.step(y), out)

    def _init(self):
        self._cleanup.clear()
        out = []
        self._absorb(self.inner.init(), out)
        self._drain(out)
        return out

    def _step(self, x):
        out = []
        self._absorb(self.inner.step(x), out)
        self._drain(out)
        return out


def trace_cds(inner: CandidateDataStructure, gamma: int, validated: bool = True) -> TraceCds:
    return TraceCds(inner, gamma, validated)


def exp_search(d: int, g: Sequence[int], start: int, oracle) -> int:
    """
    Smallest index i* ≥ start with d ≺ g[i*], or len(g) if there is none.
    Probes start, start+1, start+3, start+7, ... then binary searches the
    last gap.
    """
    end = len(g)
    below = start - 1
    step = 1
    probe = start
    while probe < end:
        if oracle.less(d, g[probe]):
            break
        below = probe
        probe = start + (step << 1) - 1
        step <<= 1
    high = min(probe, end)
    low = below + 1
    while low < high:
        mid = (low + high) // 2
        if oracle.less(d, g[mid]):
            high = mid
        else:
            low = mid + 1
    return low


def exp_search_budget(gap: int) -> int:
    """Comparison ceiling for one exp_search whose answer lies `gap` past its start"""
    return 2 * math.ceil(math.log2(gap + 1)) + 2


def merge(cds: CandidateDataStructure, gamma: Sequence[int], delta: Sequence[int], oracle,
          check_budget: bool = True) -> List[int]:
    """
    Merge two words that are already sorted by the hidden order. The head of
    delta is placed by exponential search only once it is available;
    otherwise the head of gamma must come first and is output for free.
    """
    gamma, delta = list(gamma), list(delta)
    cds.init()
    out = []
    i = j = 0

    def emit(x):
        if not cds.available >> x & 1:
            raise MergeMismatchError(
                f"element {x} is ordered next but the candidate structure does not report it available"
            )
        out.append(x)
        cds.step(x)

    while i < len(gamma) or j < len(delta):
        if j < len(delta) and cds.available >> delta[j] & 1:
            before = oracle.count
            target = exp_search(delta[j], gamma, i, oracle)
            if check_budget and oracle.count - before > exp_search_budget(target - i):
                raise AssertionError(f"exp_search spent {oracle.count - before} comparisons for gap {target - i}")
            for x in gamma[i:target]:
                emit(x)
            emit(delta[j])
            i = target
            j += 1
        else:
            if i >= len(gamma) or not cds.available >> gamma[i] & 1:
                raise StallError("neither head of the merge is available", prefix=out)
            emit(gamma[i])
            i += 1
    return out


CdsSource = Union[CandidateDataStructure, Callable[[], CandidateDataStructure]]


def _fresh(source: CdsSource) -> CandidateDataStructure:
    if isinstance(source, CandidateDataStructure):
        return source
    return source()


def optimal_sort(source: CdsSource, oracle, itb_bits: Optional[float] = None) -> SortReport:
    """
    Three phases, each on a fresh CDS epoch: bottlenecks from the layers,
    topological heapsort of the remaining elements through a trace CDS,
    then a merge of the bottleneck word with the sorted remainder.
    `source` is a CDS (re-initialised per phase) or a factory of fresh ones.
    """
    started = time.perf_counter()
    baseline = oracle.count
    steps = work = 0
    cds_time = 0.0

    layer_cds = _fresh(source)
    tick = time.perf_counter()
    layers = compute_layers(layer_cds)
    cds_time += time.perf_counter() - tick
    steps += layer_cds.steps
    work += layer_cds.work
    beta = bottleneck_sequence(layers)
    gamma_mask = layer_cds.elements
    for x in beta.bottlenecks:
        gamma_mask &= ~(1 << x)

    trace = TraceCds(_fresh(source), gamma_mask)
    sorted_rest, _ = topological_heapsort(trace, oracle)
    steps += trace.steps + trace.inner.steps
    work += trace.work + trace.inner.work
    cds_time += sorted_rest.cds_time

    merge_cds = _fresh(source)
    tick = time.perf_counter()
    output = merge(merge_cds, beta.bottlenecks, sorted_rest.output, oracle)
    cds_time += time.perf_counter() - tick
    steps += merge_cds.steps
    work += merge_cds.work

    logger.debug("optimal sort: n=%d bottlenecks=%d rest=%d comparisons=%d",
                 len(output), beta.t, len(sorted_rest.output), oracle.count - baseline)
    return SortReport(
        output=output,
        comparisons=oracle.count - baseline,
        cds_steps=steps,
        cds_work=work,
        queue_events=sorted_rest.queue_events,
        itb_bits=itb_bits,
        wall_time=time.perf_counter() - started,
        cds_time=cds_time,
        mode="optimal",
    )
