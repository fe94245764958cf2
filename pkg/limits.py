#!/usr/bin/env python3
"""
Where topological heapsort stops being optimal
Generators, precedence tables and demonstrations for three families beyond
antimatroids: the rotation greedoid, the single-move family (non-monotone
precedence) and the block family (order-sensitive precedence).
None of them is offered to the sorter as a candidate data structure.
"""

import logging
import math
from functools import cmp_to_key
from itertools import permutations
from typing import Iterator, List, Optional, Sequence

from pydantic import BaseModel

from core import ComparisonOracle, LanguageSet, Verdict, as_mask, bits_of_count, check_antimatroid_axioms, check_greedoid_axioms, compress, expand, iter_bits, support
from errors import AxiomError, PreconditionError, SizeLimitError
from settings import get_settings, resolve_limit
from wsheap import WorkingSetHeap

logger = logging.getLogger(__name__)

ROTATION_EXPLICIT_LIMIT = 8
RULE_CHECK_LIMIT = 7


# rotation family

def rotate_blocks(n: int, cuts: int) -> tuple:
    """Cut 0..n-1 after every position whose bit is set in `cuts`, then rotate each block right by one"""
    word = []
    start = 0
    for end in range(1, n + 1):
        if end == n or cuts >> (end - 1) & 1:
            block = list(range(start, end))
            word.extend([block[-1]] + block[:-1])
            start = end
    return tuple(word)


def iter_rotation(n: int) -> Iterator[tuple]:
    """Every rotation permutation, one per subset of the n-1 cut positions"""
    if n == 0:
        yield ()
        return
    for cuts in range(1 << (n - 1)):
        yield rotate_blocks(n, cuts)


def enumerate_rotation(n: int, limit: int = ROTATION_EXPLICIT_LIMIT) -> LanguageSet:
    """The rotation permutations as an explicit set"""
    if n > limit:
        raise SizeLimitError(n, limit, "enumerate_rotation")
    return LanguageSet(n, iter_rotation(n))


def count_rotation(n: int, limit: Optional[int] = None) -> int:
    """Distinct rotation permutations, counted by generating them"""
    limit = get_settings().rotation_count_limit if limit is None else limit
    if n > limit:
        raise SizeLimitError(n, limit, "count_rotation")
    return len(set(iter_rotation(n)))


def rotation_language(n: int, limit: int = ROTATION_EXPLICIT_LIMIT) -> LanguageSet:
    """Prefix closure of the rotation permutations"""
    if n > limit:
        raise SizeLimitError(n, limit, "rotation_language")
    return LanguageSet.prefixes_of(n, iter_rotation(n))


def check_rotation_is_greedoid_not_antimatroid(n: int, limit: int = RULE_CHECK_LIMIT) -> Verdict:
    """
    The prefix closure satisfies the greedoid axioms and, for n ≥ 3, violates
    the antimatroid axioms. For n ≤ 2 every permutation is a rotation, so
    both checks pass.
    """
    if n > limit:
        raise SizeLimitError(n, limit, "check_rotation_is_greedoid_not_antimatroid")
    language = rotation_language(n)
    greedoid = check_greedoid_axioms(language)
    antimatroid = check_antimatroid_axioms(language)
    if not greedoid:
        return Verdict.failed(f"rotation language is not a greedoid: {greedoid.message}", greedoid.witness)
    if n <= 2:
        if not antimatroid:
            return Verdict.failed("degenerate rotation language should be an antimatroid", antimatroid.witness)
        return Verdict.passed("degenerate: greedoid and antimatroid")
    if antimatroid:
        return Verdict.failed("rotation language unexpectedly satisfies the antimatroid axioms")
    return Verdict(ok=True, message=f"greedoid; not an antimatroid ({antimatroid.message})",
                   witness=antimatroid.witness)


# non-monotone precedence

class PrecedenceTable:
    """Precedence functions without the monotonicity requirement"""

    def __init__(self, n: int, tables: Sequence[Sequence[int]]):
        self.n = n
        size = 1 << (n - 1) if n else 0
        self.tables = tuple(bytes(1 if bit else 0 for bit in table) for table in tables)
        if len(self.tables) != n or any(len(t) != size for t in self.tables):
            raise PreconditionError(f"expected {n} tables of {size} entries")

    @classmethod
    def from_predicates(cls, n: int, predicate) -> "PrecedenceTable":
        size = 1 << (n - 1) if n else 0
        return cls(n, [[predicate(x, expand(x, i)) for i in range(size)] for x in range(n)])

    def evaluate(self, x: int, chosen) -> int:
        return self.tables[x][compress(x, as_mask(chosen))]

    def available(self, chosen) -> int:
        mask = as_mask(chosen)
        return as_mask(x for x in range(self.n) if not mask >> x & 1 and self.tables[x][compress(x, mask)])

    def is_monotone(self) -> bool:
        width = self.n - 1
        return all(
            not value or all(i >> b & 1 or table[i | 1 << b] for b in range(width))
            for table in self.tables
            for i, value in enumerate(table)
        )


def enumerate_precedence_language(table: PrecedenceTable, limit: Optional[int] = None) -> LanguageSet:
    limit = resolve_limit(limit)
    if table.n > limit:
        raise SizeLimitError(table.n, limit, "enumerate_precedence_language")
    words = [()]
    stack = [((), 0)]
    while stack:
        word, mask = stack.pop()
        for x in iter_bits(table.available(mask)):
            extended = word + (x,)
            words.append(extended)
            stack.append((extended, mask | 1 << x))
    return LanguageSet(table.n, words)


def nmps_from_language(L: LanguageSet) -> PrecedenceTable:
    """p_x(Y) = 1 iff some word α ∈ L with α̃ = Y has αx ∈ L"""
    true_at = [set() for _ in range(L.n)]
    for word in L.words:
        if word:
            true_at[word[-1]].add(support(word[:-1]))
    return PrecedenceTable.from_predicates(L.n, lambda x, mask: int(mask in true_at[x]))


def nmps_from_greedoid(L: LanguageSet, limit: Optional[int] = None) -> PrecedenceTable:
    """The construction above, for languages that pass the greedoid axioms"""
    verdict = check_greedoid_axioms(L, limit)
    if not verdict:
        raise AxiomError(f"language is not a greedoid: {verdict.message}")
    return nmps_from_language(L)


# single-move family

def single_move_permutations(n: int) -> List[tuple]:
    """α_i moves element i to the front of 0..n-1"""
    return [tuple([i] + [x for x in range(n) if x != i]) for i in range(n)]


def single_move_language(n: int) -> LanguageSet:
    return LanguageSet.prefixes_of(n, single_move_permutations(n))


def single_move_nmps(n: int) -> PrecedenceTable:
    """p_i(X) = 1 iff X is empty or contains 0..i-1"""
    return PrecedenceTable.from_predicates(
        n, lambda i, mask: int(mask == 0 or mask & ((1 << i) - 1) == (1 << i) - 1)
    )


class SingleMoveAdversary:
    """
    Comparison oracle that answers by the identity order and tracks which
    single-move permutations are still consistent with every answer.
    """

    def __init__(self, n: int):
        self.n = n
        self.candidates = set(range(n))
        self.count = 0
        self.max_eliminated = 0
        self._ranks = {i: {x: r for r, x in enumerate(p)} for i, p in enumerate(single_move_permutations(n))}

    def less(self, x: int, y: int) -> bool:
        if x == y:
            raise PreconditionError(f"element {x} compared with itself")
        self.count += 1
        answer = x < y
        eliminated = {i for i in self.candidates if (self._ranks[i][x] < self._ranks[i][y]) != answer}
        self.candidates -= eliminated
        self.max_eliminated = max(self.max_eliminated, len(eliminated))
        return answer

    @property
    def resolved(self) -> bool:
        return len(self.candidates) <= 1


def eliminations_per_pair(n: int) -> int:
    """Largest number of candidates a single comparison can eliminate against the identity"""
    worst = 0
    for x in range(n):
        for y in range(x + 1, n):
            adversary = SingleMoveAdversary(n)
            adversary.less(x, y)
            worst = max(worst, adversary.max_eliminated)
    return worst


def certify_single_move_lower_bound(n: int, rng=None) -> Verdict:
    """
    Every comparison removes at most one candidate, so n-1 comparisons are
    needed. Checked on all pairs for small n, and by driving a library sort
    and random probing until the candidates are resolved.
    """
    if n < 1:
        raise PreconditionError("single-move family needs n ≥ 1")
    if n <= 16:
        worst = eliminations_per_pair(n)
        if worst > 1:
            return Verdict.failed(f"a comparison eliminated {worst} candidates", worst)

    adversary = SingleMoveAdversary(n)
    sorted(range(n), key=cmp_to_key(lambda x, y: -1 if adversary.less(x, y) else 1))
    if adversary.max_eliminated > 1:
        return Verdict.failed(f"library sort saw a comparison eliminate {adversary.max_eliminated}")
    if adversary.count < n - 1 and n > 1:
        return Verdict.failed(f"library sort finished with {adversary.count} < n-1 comparisons")

    if rng is not None and n > 1:
        adversary = SingleMoveAdversary(n)
        while not adversary.resolved:
            x, y = rng.sample(range(n), 2)
            before = len(adversary.candidates)
            adversary.less(x, y)
            if before - len(adversary.candidates) > 1:
                return Verdict.failed("random probe eliminated more than one candidate", (x, y))
            if adversary.count <= n - 2 and len(adversary.candidates) < 2:
                return Verdict.failed(f"resolved after only {adversary.count} comparisons")
        if adversary.count < n - 1:
            return Verdict.failed(f"random probing resolved after {adversary.count} comparisons")
    return Verdict.passed(f"n={n}: at least {max(n - 1, 0)} comparisons are necessary")


# block family

class BlockLanguage:
    """
    k blocks of k elements (element i*k+j is the j-th of block i); each member
    permutes exactly one block and keeps every other block in order.
    """

    def __init__(self, k: int):
        if k < 1:
            raise PreconditionError("block family needs k ≥ 1")
        self.k = k
        self.n = k * k

    @property
    def size(self) -> int:
        """Indexed members: one per (block, block permutation)"""
        return self.k * math.factorial(self.k)

    @property
    def distinct_size(self) -> int:
        """Distinct permutations: the identity arises once per block"""
        return self.k * (math.factorial(self.k) - 1) + 1

    def itb_bits(self) -> float:
        return bits_of_count(self.size)

    def members(self) -> Iterator[tuple]:
        k = self.k
        for block in range(k):
            head = tuple(range(block * k))
            tail = tuple(range((block + 1) * k, self.n))
            for middle in permutations(range(block * k, (block + 1) * k)):
                yield head + middle + tail

    def distinct_members(self) -> set:
        return set(self.members())


class BlockAvailability:
    """
    Order-sensitive availability for the block family: inside the current
    block every remaining element is available until some earlier block has
    been completed out of order, after which only the next element in order is.
    """

    def __init__(self, k: int):
        self.k = k
        self.n = k * k
        self.reset()

    def reset(self) -> List[int]:
        self.word = []
        self.deviated = False
        self._block_in_order = True
        self._reported = set()
        return self._newly_available()

    def available(self) -> List[int]:
        if len(self.word) == self.n:
            return []
        position = len(self.word)
        if self.deviated:
            return [position]
        block = position // self.k
        taken = set(self.word)
        return [x for x in range(block * self.k, (block + 1) * self.k) if x not in taken]

    def _newly_available(self) -> List[int]:
        fresh = [x for x in self.available() if x not in self._reported]
        self._reported.update(fresh)
        return fresh

    def step(self, x: int) -> List[int]:
        if x not in self.available():
            raise PreconditionError(f"element {x} is not available after {self.word}")
        position = len(self.word)
        if x != position:
            self._block_in_order = False
        self.word.append(x)
        if len(self.word) % self.k == 0:
            if not self._block_in_order:
                self.deviated = True
            self._block_in_order = True
        return self._newly_available()

    def language(self) -> LanguageSet:
        """All words the engine admits (small k only)"""
        words = []
        stack = [[]]
        while stack:
            prefix = stack.pop()
            words.append(tuple(prefix))
            self.reset()
            for x in prefix:
                self.step(x)
            for x in self.available():
                stack.append(prefix + [x])
        self.reset()
        return LanguageSet(self.n, words)


# demonstrations

class SuboptimalityRow(BaseModel):
    family: str
    n: int
    itb_bits: float
    comparisons: float
    ratio: float

    def csv(self) -> str:
        return f"{self.family},{self.n},{self.itb_bits:.4f},{self.comparisons:.2f},{self.ratio:.4f}"


CSV_HEADER = "family,n,itb_bits,comparisons,ratio"


def rotation_heapsort_comparisons(n: int, rng) -> int:
    """All elements go into the heap up front (no candidate structure exists); hidden order is a random rotation"""
    cuts = rng.getrandbits(n - 1) if n > 1 else 0
    oracle = ComparisonOracle(rotate_blocks(n, cuts))
    items = list(range(n))
    rng.shuffle(items)
    heap = WorkingSetHeap(oracle)
    for x in items:
        heap.insert(x)
    while heap:
        heap.extract_min()
    return oracle.count


def block_heapsort_comparisons(k: int, rng) -> int:
    """
    Heapsort driven by the order-sensitive engine with the identity as hidden
    order; each batch of newly available elements is inserted in shuffled order.
    """
    engine = BlockAvailability(k)
    oracle = ComparisonOracle(range(engine.n))
    heap = WorkingSetHeap(oracle)
    batch = engine.reset()
    while True:
        rng.shuffle(batch)
        for x in batch:
            heap.insert(x)
        if not heap:
            break
        batch = engine.step(heap.extract_min())
    if len(engine.word) != engine.n:
        raise PreconditionError("block engine stalled")
    return oracle.count


def demonstrate_suboptimality(rng, trials: int = 16,
                              rotation_sizes=(8, 16, 32, 64, 128),
                              block_sizes=(2, 4, 8, 16),
                              single_move_sizes=(3, 8, 16, 32, 64)) -> List[SuboptimalityRow]:
    """Measured comparisons against the ITB for the three families; rows with itb_bits = 0 are skipped"""
    rows = []
    for n in rotation_sizes:
        itb = float(n - 1)
        if itb <= 0:
            continue
        average = sum(rotation_heapsort_comparisons(n, rng) for _ in range(trials)) / trials
        rows.append(SuboptimalityRow(family="rotation", n=n, itb_bits=itb, comparisons=average, ratio=average / itb))
    for k in block_sizes:
        family = BlockLanguage(k)
        itb = family.itb_bits()
        if itb <= 0:
            continue
        average = sum(block_heapsort_comparisons(k, rng) for _ in range(trials)) / trials
        rows.append(SuboptimalityRow(family="block", n=family.n, itb_bits=itb, comparisons=average, ratio=average / itb))
    for n in single_move_sizes:
        itb = math.log2(n)
        if itb <= 0:
            continue
        verdict = certify_single_move_lower_bound(n, rng)
        if not verdict:
            raise AxiomError(f"single-move adversary failed: {verdict.message}")
        rows.append(SuboptimalityRow(family="single-move", n=n, itb_bits=itb,
                                     comparisons=float(n - 1), ratio=(n - 1) / itb))
    logger.debug("suboptimality rows: %d", len(rows))
    return rows


def ratios_increase(rows: Sequence[SuboptimalityRow], family: str) -> bool:
    ratios = [row.ratio for row in rows if row.family == family]
    return all(a < b for a, b in zip(ratios, ratios[1:]))
