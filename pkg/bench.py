#!/usr/bin/env python3
"""
Measured-constant suites
Each suite runs seeded instances and reports comparisons next to the bound
they are supposed to respect, plus the worst constant seen.
"""

import logging
import math
import random
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel

from chordal import SimplicialCds, count_peos, random_chordal_graph
from core import ComparisonOracle, ExplicitMps, Verdict, bits_of_count, count_permutations
from errors import PreconditionError
from limits import demonstrate_suboptimality
from optimal import optimal_sort
from representations import ErcCds, ErcSet, FormulaCds, ercs_from_mps, formulas_from_mps
from settings import get_settings
from sorter import sample_permutation, topological_heapsort
from wsheap import WorkingSetHeap

logger = logging.getLogger(__name__)

CSV_HEADER = "suite,instance,n,itb_bits,comparisons,bound,constant"


class BenchRow(BaseModel):
    suite: str
    instance: str
    n: int
    itb_bits: float
    comparisons: float
    bound: float
    constant: float

    def csv(self) -> str:
        return (f"{self.suite},{self.instance},{self.n},{self.itb_bits:.4f},"
                f"{self.comparisons:.2f},{self.bound:.4f},{self.constant:.4f}")


class SuiteResult(BaseModel):
    name: str
    rows: List[BenchRow]
    ceiling: Optional[float] = None

    @property
    def worst(self) -> float:
        return max((row.constant for row in self.rows), default=0.0)

    @property
    def ok(self) -> bool:
        return self.ceiling is None or self.worst <= self.ceiling


def _row(suite, instance, n, itb, comparisons, bound) -> BenchRow:
    return BenchRow(suite=suite, instance=instance, n=n, itb_bits=itb, comparisons=comparisons,
                    bound=bound, constant=comparisons / bound if bound else 0.0)


# heap workloads

def _workload_random(heap, n, rng):
    items = list(range(n))
    rng.shuffle(items)
    for x in items:
        heap.insert(x)
    while heap:
        heap.extract_min()


def _workload_sorted(heap, n, rng):
    for x in range(n):
        heap.insert(x)
    while heap:
        heap.extract_min()


def _workload_sliding(heap, n, rng, window=8):
    """Keep roughly `window` elements resident, inserting in hidden order with local shuffles"""
    items = list(range(n))
    for start in range(0, n, window):
        chunk = items[start:start + window]
        rng.shuffle(chunk)
        items[start:start + window] = chunk
    for x in items:
        heap.insert(x)
        if len(heap) > window:
            heap.extract_min()
    while heap:
        heap.extract_min()


HEAP_WORKLOADS: Dict[str, Callable] = {
    "random": _workload_random,
    "sorted": _workload_sorted,
    "sliding": _workload_sliding,
}


def heap_suite(rng, sizes: Sequence[int] = (64, 256, 1024)) -> SuiteResult:
    """Comparisons against Σ (1 + log2 w'(x)) over the extracted elements"""
    rows = []
    for name, workload in HEAP_WORKLOADS.items():
        for n in sizes:
            oracle = ComparisonOracle(range(n))
            heap = WorkingSetHeap(oracle, record=True)
            workload(heap, n, rng)
            metrics = heap.metrics()
            rows.append(_row("heap", name, n, 0.0, metrics.comparisons, metrics.bound))
    return SuiteResult(name="heap", rows=rows, ceiling=get_settings().heap_ceiling)


# brute-force instances

def brute_force_instances(rng, count: int = 30, max_n: int = 8):
    for index in range(count):
        n = rng.randint(1, max_n)
        yield f"mps{index}", ExplicitMps.random(n, rng)


def brute_force_suites(rng, count: int = 30, max_n: int = 8, orders_per_instance: int = 3):
    """Plain mode against n + itb_bits and optimal mode against 1 + itb_bits"""
    plain_rows, optimal_rows = [], []
    for name, mps in brute_force_instances(rng, count, max_n):
        itb = bits_of_count(count_permutations(mps))
        backends = {
            "formulas": lambda: FormulaCds(formulas_from_mps(mps)),
            "ercs": lambda: ErcCds(ercs_from_mps(mps)),
        }
        for backend, factory in backends.items():
            for trial in range(orders_per_instance):
                hidden = sample_permutation(factory(), rng)
                report, _ = topological_heapsort(factory(), ComparisonOracle(hidden))
                plain_rows.append(_row("plain", f"{name}-{backend}-{trial}", mps.n, itb,
                                       report.comparisons, mps.n + itb))
                report = optimal_sort(factory, ComparisonOracle(hidden))
                optimal_rows.append(_row("optimal", f"{name}-{backend}-{trial}", mps.n, itb,
                                         report.comparisons, 1 + itb))
    settings = get_settings()
    return (SuiteResult(name="plain", rows=plain_rows, ceiling=settings.plain_ceiling),
            SuiteResult(name="optimal", rows=optimal_rows, ceiling=settings.optimal_ceiling))


# bottleneck chain

def bottleneck_chain(n: int, diamonds: int) -> ErcSet:
    """
    A chain 0..n-1 in which `diamonds` disjoint consecutive pairs are left
    unordered; every other element needs the whole previous level.
    The ITB is exactly `diamonds` bits.
    """
    if n < 2 * diamonds:
        raise PreconditionError("chain too short for the requested diamonds")
    levels = []
    x = 0
    spacing = max(1, (n - 2 * diamonds) // (diamonds + 1))
    while x < n:
        pair_due = len([lv for lv in levels if len(lv) == 2]) < diamonds and len(levels) % (spacing + 1) == spacing
        if pair_due and x + 1 < n:
            levels.append((x, x + 1))
            x += 2
        else:
            levels.append((x,))
            x += 1
    missing = diamonds - len([lv for lv in levels if len(lv) == 2])
    if missing > 0:
        raise PreconditionError("could not place every diamond")
    ercs = []
    for before, after in zip(levels, levels[1:]):
        for u in before:
            for v in after:
                ercs.append((1 << u, 1 << v))
    return ErcSet(n, ercs)


def bottleneck_chain_suite(rng, sizes: Sequence[int] = tuple(2 ** e for e in range(6, 15)),
                           diamonds: int = 4) -> List[SuiteResult]:
    plain_rows, optimal_rows = [], []
    for n in sizes:
        ercs = bottleneck_chain(n, diamonds)
        hidden = sample_permutation(ErcCds(ercs), rng)
        report, _ = topological_heapsort(ErcCds(ercs), ComparisonOracle(hidden))
        plain_rows.append(_row("chain-plain", f"chain{n}", n, float(diamonds), report.comparisons, n + diamonds))
        report = optimal_sort(ErcCds(ercs), ComparisonOracle(hidden))
        optimal_rows.append(_row("chain-optimal", f"chain{n}", n, float(diamonds), report.comparisons, 1 + diamonds))
    settings = get_settings()
    return [SuiteResult(name="chain-plain", rows=plain_rows, ceiling=settings.plain_ceiling),
            SuiteResult(name="chain-optimal", rows=optimal_rows, ceiling=settings.optimal_ceiling)]


# chordal graphs

def chordal_suite(rng, exact_sizes: Sequence[int] = (3, 5, 7, 9), large_sizes: Sequence[int] = (100, 1000),
                  per_size: int = 5) -> SuiteResult:
    """
    Plain comparisons against n + log2 #PEO (exact for small graphs, the
    2^(n-1) lower bound otherwise).
    """
    rows = []
    for n in list(exact_sizes) + list(large_sizes):
        for trial in range(per_size):
            graph = random_chordal_graph(n, rng)
            itb = math.log2(count_peos(graph)) if n in exact_sizes else float(n - 1)
            hidden = sample_permutation(SimplicialCds(graph), rng)
            report, _ = topological_heapsort(SimplicialCds(graph), ComparisonOracle(hidden))
            rows.append(_row("chordal", f"chordal{n}-{trial}", n, itb, report.comparisons, n + itb))
    return SuiteResult(name="chordal", rows=rows, ceiling=get_settings().plain_ceiling)


def suboptimality_suite(rng, trials: int = 16) -> SuiteResult:
    rows = [
        _row(f"limits-{row.family}", f"{row.family}{row.n}", row.n, row.itb_bits, row.comparisons, row.itb_bits)
        for row in demonstrate_suboptimality(rng, trials=trials)
    ]
    return SuiteResult(name="limits", rows=rows)


SUITES = ("heap", "plain", "optimal", "chain", "chordal", "limits")


def run_bench(seed: int = 0, suites: Sequence[str] = SUITES, quick: bool = False) -> List[SuiteResult]:
    """Run the named suites with one seeded generator; `quick` shrinks every suite"""
    rng = random.Random(seed)
    results = []
    if "heap" in suites:
        results.append(heap_suite(rng, sizes=(64, 256) if quick else (64, 256, 1024)))
    if "plain" in suites or "optimal" in suites:
        plain, optimal = brute_force_suites(rng, count=8 if quick else 30)
        results.extend(r for r in (plain, optimal) if r.name in suites)
    if "chain" in suites:
        sizes = (64, 128, 256) if quick else tuple(2 ** e for e in range(6, 15))
        results.extend(bottleneck_chain_suite(rng, sizes=sizes))
    if "chordal" in suites:
        results.append(chordal_suite(rng, large_sizes=(50,) if quick else (100, 1000),
                                     per_size=2 if quick else 5))
    if "limits" in suites:
        results.append(suboptimality_suite(rng, trials=4 if quick else 16))
    for result in results:
        logger.info("suite %s: worst constant %.3f (ceiling %s)", result.name, result.worst, result.ceiling)
    return results


def limits_verdict(result: SuiteResult) -> Verdict:
    """Rotation ratios rise strictly and end at 3 or more; block ratios rise"""
    def constants(family):
        return [row.constant for row in sorted(result.rows, key=lambda r: r.n) if row.suite == f"limits-{family}"]

    rotation, block = constants("rotation"), constants("block")
    if any(a >= b for a, b in zip(rotation, rotation[1:])):
        return Verdict.failed(f"rotation ratios do not increase: {rotation}", rotation)
    if rotation and rotation[-1] < 3:
        return Verdict.failed(f"final rotation ratio {rotation[-1]:.3f} is below 3", rotation)
    if len(block) > 1 and block[-1] <= block[0]:
        return Verdict.failed(f"block ratios do not grow: {block}", block)
    return Verdict.passed("suboptimality ratios grow")


def write_csv(results: Sequence[SuiteResult]) -> List[str]:
    return [CSV_HEADER] + [row.csv() for result in results for row in result.rows]
