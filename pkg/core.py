#!/usr/bin/env python3
"""
Core vocabulary for antimatroid sorting
Alphabets, words, counting comparison oracles, explicit monotone precedence
systems and the brute-force language oracles built on top of them.

Element ids are dense integers 0..n-1; element sets are int bitmasks.
"""

import logging
import math
from typing import Any, Callable, Dict, Iterable, Iterator, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr

from errors import AxiomError, MonotonicityError, PreconditionError, SizeLimitError
from settings import resolve_limit

logger = logging.getLogger(__name__)

# Exact subset-DP counting stays practical well past the enumeration limit.
COUNT_LIMIT = 22


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the element ids contained in a bitmask, smallest first"""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def as_mask(elements) -> int:
    """Accept a bitmask or an iterable of ids and return a bitmask"""
    if isinstance(elements, int):
        return elements
    mask = 0
    for x in elements:
        mask |= 1 << x
    return mask


def support(word: Sequence[int]) -> int:
    return as_mask(word)


def full_mask(n: int) -> int:
    return (1 << n) - 1


def compress(x: int, mask: int) -> int:
    """Index of the subset `mask` of Σ\\{x} inside an (n-1)-bit table"""
    low = mask & ((1 << x) - 1)
    return low | ((mask >> (x + 1)) << x)


def expand(x: int, index: int) -> int:
    """Inverse of compress: table index back to a subset of Σ\\{x}"""
    low = index & ((1 << x) - 1)
    return low | ((index >> x) << (x + 1))


class Alphabet(BaseModel):
    """Ordered, duplicate-free element names; ids follow list order"""
    model_config = ConfigDict(frozen=True)

    names: Tuple[str, ...]
    _ids: Dict[str, int] = PrivateAttr(default_factory=dict)

    def __init__(self, names: Iterable[str]):
        names = tuple(str(name) for name in names)
        if len(set(names)) != len(names):
            raise PreconditionError(f"alphabet names must be unique: {names}")
        super().__init__(names=names)
        self._ids = {name: i for i, name in enumerate(names)}

    @classmethod
    def letters(cls, n: int) -> "Alphabet":
        if n <= 26:
            return cls(tuple(chr(ord("a") + i) for i in range(n)))
        return cls(tuple(f"x{i}" for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def compact(self) -> bool:
        """True when every name is one character, so words print without separators"""
        return all(len(name) == 1 for name in self.names)

    def id_of(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError as e:
            raise PreconditionError(f"unknown element {name!r}") from e

    def name_of(self, x: int) -> str:
        return self.names[x]

    def parse_word(self, text: str) -> tuple:
        text = text.strip()
        if not text or text == "ε":
            return ()
        if self.compact and " " not in text:
            return tuple(self.id_of(ch) for ch in text)
        return tuple(self.id_of(token) for token in text.split())

    def format_word(self, word: Iterable[int]) -> str:
        sep = "" if self.compact else " "
        return sep.join(self.names[x] for x in word)

    def format_set(self, elements) -> str:
        return "{" + ", ".join(self.names[x] for x in iter_bits(as_mask(elements))) + "}"


class Verdict(BaseModel):
    """Outcome of a check: truthy iff ok, with an optional witness on failure"""
    model_config = ConfigDict(frozen=True)

    ok: bool
    message: str = "ok"
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls, message: str = "ok") -> "Verdict":
        return cls(ok=True, message=message)

    @classmethod
    def failed(cls, message: str, witness: Any = None) -> "Verdict":
        return cls(ok=False, message=message, witness=witness)


class ComparisonOracle:
    """
    Answers x ≺π y for a hidden total order π and counts every query.
    The counter is the single comparison meter shared by heaps, merges and
    adversaries.
    """

    def __init__(self, order: Sequence[int], record: bool = False):
        self.order = tuple(order)
        n = len(self.order)
        if sorted(self.order) != list(range(n)):
            raise PreconditionError("hidden order must be a permutation of 0..n-1")
        self._rank = [0] * n
        for position, x in enumerate(self.order):
            self._rank[x] = position
        self.count = 0
        self.history: Optional[list] = [] if record else None

    @property
    def n(self) -> int:
        return len(self.order)

    def rank(self, x: int) -> int:
        return self._rank[x]

    def less(self, x: int, y: int) -> bool:
        """Return True iff x comes before y in the hidden order"""
        if x == y:
            raise PreconditionError(f"element {x} compared with itself")
        self.count += 1
        answer = self._rank[x] < self._rank[y]
        if self.history is not None:
            self.history.append((x, y, answer))
        return answer

    def replay(self) -> bool:
        """Check that every recorded answer agrees with one total order"""
        if self.history is None:
            return True
        return all((self._rank[x] < self._rank[y]) == answer for x, y, answer in self.history)


class ExplicitMps:
    """
    Monotone precedence system stored as one bit table per element.

    Table `tables[x]` has 2^(n-1) entries indexed by `compress(x, X)` for
    X ⊆ Σ\\{x}; entry 1 means p_x(X) = 1.
    """

    def __init__(self, n: int, tables: Sequence[Sequence[int]], validate: bool = True):
        self.n = n
        size = 1 << (n - 1) if n else 0
        if len(tables) != n:
            raise PreconditionError(f"expected {n} tables, got {len(tables)}")
        self.tables = tuple(
            bytes(table) if isinstance(table, (bytes, bytearray)) else bytes(1 if bit else 0 for bit in table)
            for table in tables
        )
        for x, table in enumerate(self.tables):
            if len(table) != size:
                raise PreconditionError(f"table of element {x} has {len(table)} entries, expected {size}")
        if validate:
            self._check_monotone()

    def _check_monotone(self):
        width = self.n - 1
        for x, table in enumerate(self.tables):
            for index, value in enumerate(table):
                if not value:
                    continue
                for b in range(width):
                    if not index >> b & 1 and not table[index | 1 << b]:
                        chosen = expand(x, index)
                        raise MonotonicityError(
                            f"p_{x} drops from 1 to 0 when adding element "
                            f"{expand(x, 1 << b).bit_length() - 1} to {sorted(iter_bits(chosen))}"
                        )

    # construction helpers

    @classmethod
    def from_predicates(cls, n: int, predicate: Callable[[int, int], bool]) -> "ExplicitMps":
        """Tabulate predicate(x, chosen_mask) for every x and chosen ⊆ Σ\\{x}"""
        size = 1 << (n - 1) if n else 0
        tables = [[1 if predicate(x, expand(x, i)) else 0 for i in range(size)] for x in range(n)]
        return cls(n, tables)

    @classmethod
    def from_generators(cls, n: int, generators: Sequence[Iterable]) -> "ExplicitMps":
        """p_x(X) = 1 iff some generator set of x is contained in X (monotone by construction)"""
        size = 1 << (n - 1) if n else 0
        tables = []
        for x in range(n):
            table = bytearray(size)
            for gen in generators[x]:
                mask = as_mask(gen)
                if mask >> x & 1:
                    raise PreconditionError(f"generator of element {x} contains {x}")
                table[compress(x, mask)] = 1
            _upward_closure(table, n - 1)
            tables.append(table)
        return cls(n, tables, validate=False)

    @classmethod
    def from_partial_order(cls, n: int, pairs: Iterable[tuple]) -> "ExplicitMps":
        """Each (u, v) pair demands u before v; p_v(X) = 1 iff all predecessors of v are in X"""
        preds = [0] * n
        for u, v in pairs:
            preds[v] |= 1 << u
        return cls.from_generators(n, [[preds[x]] for x in range(n)])

    @classmethod
    def random(cls, n: int, rng, density: float = 0.4, extra_generators: int = 2) -> "ExplicitMps":
        """
        Random full MPS: a hidden permutation σ is drawn and every element gets
        one generator inside its σ-prefix, so σ ∈ P(S) and P(S) is never empty.
        Extra generators range over all other elements.
        """
        sigma = list(range(n))
        rng.shuffle(sigma)
        generators = []
        before = 0
        for x in sigma:
            gens = [sum(1 << y for y in iter_bits(before) if rng.random() < density)]
            others = full_mask(n) & ~(1 << x)
            for _ in range(rng.randint(0, extra_generators)):
                gens.append(sum(1 << y for y in iter_bits(others) if rng.random() < density))
            generators.append((x, gens))
            before |= 1 << x
        generators.sort()
        return cls.from_generators(n, [gens for _, gens in generators])

    # queries

    def evaluate(self, x: int, chosen) -> int:
        mask = as_mask(chosen)
        if mask >> x & 1:
            raise PreconditionError(f"element {x} is already in the chosen set")
        return self.tables[x][compress(x, mask)]

    def available(self, chosen) -> int:
        """Bitmask of {x ∉ chosen : p_x(chosen) = 1}"""
        mask = as_mask(chosen)
        result = 0
        for x in range(self.n):
            if not mask >> x & 1 and self.tables[x][compress(x, mask)]:
                result |= 1 << x
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, ExplicitMps) and self.n == other.n and self.tables == other.tables

    def __hash__(self) -> int:
        return hash((self.n, self.tables))

    def __repr__(self) -> str:
        return f"ExplicitMps(n={self.n})"


def _upward_closure(table: bytearray, width: int):
    for b in range(width):
        bit = 1 << b
        for index in range(len(table)):
            if index & bit and table[index ^ bit]:
                table[index] = 1


def evaluate_mps(S: ExplicitMps, x: int, chosen) -> int:
    """Return p_x(chosen); x must not be in chosen"""
    return S.evaluate(x, chosen)


class LanguageSet:
    """Explicit simple language over an alphabet of n elements"""

    def __init__(self, n: int, words: Iterable[Sequence[int]]):
        self.n = n
        normalized = set()
        for word in words:
            word = tuple(word)
            if len(set(word)) != len(word):
                raise PreconditionError(f"word {word} is not simple")
            if any(not 0 <= x < n for x in word):
                raise PreconditionError(f"word {word} uses ids outside 0..{n - 1}")
            normalized.add(word)
        self.words = frozenset(normalized)

    @classmethod
    def prefixes_of(cls, n: int, words: Iterable[Sequence[int]]) -> "LanguageSet":
        """Prefix closure of the given words (ε included)"""
        closure = {()}
        for word in words:
            word = tuple(word)
            for k in range(1, len(word) + 1):
                closure.add(word[:k])
        return cls(n, closure)

    def __contains__(self, word) -> bool:
        return tuple(word) in self.words

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(sorted(self.words))

    def __eq__(self, other) -> bool:
        return isinstance(other, LanguageSet) and self.n == other.n and self.words == other.words

    def __hash__(self) -> int:
        return hash((self.n, self.words))

    def permutations(self) -> list:
        """P(L): the words of full length, sorted"""
        return sorted(word for word in self.words if len(word) == self.n)

    def is_full(self) -> bool:
        return any(len(word) == self.n for word in self.words)

    def feasible_sets(self) -> set:
        return {support(word) for word in self.words}

    def continuations(self, word) -> int:
        """Bitmask of {x : word·x ∈ L}"""
        word = tuple(word)
        mask = 0
        for x in range(self.n):
            if word + (x,) in self.words:
                mask |= 1 << x
        return mask

    def __repr__(self) -> str:
        return f"LanguageSet(n={self.n}, words={len(self.words)})"


def _check_size(n: int, limit: Optional[int], what: str):
    limit = resolve_limit(limit)
    if n > limit:
        raise SizeLimitError(n, limit, what)


def enumerate_language(S: ExplicitMps, limit: Optional[int] = None) -> LanguageSet:
    """L(S) by depth-first search over prefixes"""
    _check_size(S.n, limit, "enumerate_language")
    words = [()]
    stack = [((), 0)]
    while stack:
        word, mask = stack.pop()
        for x in iter_bits(S.available(mask)):
            extended = word + (x,)
            words.append(extended)
            stack.append((extended, mask | 1 << x))
    logger.debug("enumerated %d words for n=%d", len(words), S.n)
    return LanguageSet(S.n, words)


def count_permutations(S: ExplicitMps, limit: int = COUNT_LIMIT) -> int:
    """|P(S)| by dynamic programming over chosen sets"""
    if S.n > limit:
        raise SizeLimitError(S.n, limit, "count_permutations")
    ways = [0] * (1 << S.n)
    ways[0] = 1
    for mask in range(1 << S.n):
        if not ways[mask]:
            continue
        for x in iter_bits(S.available(mask)):
            ways[mask | 1 << x] += ways[mask]
    return ways[-1]


def bits_of_count(count: int) -> float:
    if count <= 0:
        raise PreconditionError("the language has no permutations; its ITB is undefined")
    return math.log2(count)


def itb_bits(L: LanguageSet) -> float:
    """log2 |P(L)|"""
    return bits_of_count(len(L.permutations()))


def _accessibility(L: LanguageSet) -> Verdict:
    for word in sorted(L.words):
        if word and word[:-1] not in L.words:
            return Verdict.failed(
                f"not prefix-closed: {word} is in the language but {word[:-1]} is not",
                (word, word[:-1]),
            )
    return Verdict.passed()


def _exchange(L: LanguageSet, needs_extension: Callable[[int, int, int], bool], axiom: str) -> Verdict:
    """
    Check the exchange axiom on (support, continuation) classes first and
    fall back to an ordered word-pair scan only to extract the smallest witness.
    needs_extension(alpha_support, alpha_length, beta_support, beta_length)
    says whether a pair is constrained by the axiom.
    """
    continuation = {word: L.continuations(word) for word in L.words}
    classes = {(support(word), len(word), cont) for word, cont in continuation.items()}
    feasible = {(support(word), len(word)) for word in L.words}

    def violated(alpha_support, alpha_length, beta_support, beta_length, cont):
        return (
            needs_extension(alpha_support, alpha_length, beta_support, beta_length)
            and not alpha_support & ~beta_support & cont
        )

    if not any(violated(a, la, b, lb, c) for b, lb, c in classes for a, la in feasible):
        return Verdict.passed()
    ordered = sorted(L.words)
    for alpha in ordered:
        a, la = support(alpha), len(alpha)
        for beta in ordered:
            if violated(a, la, support(beta), len(beta), continuation[beta]):
                return Verdict.failed(
                    f"{axiom} exchange axiom fails: no x in {alpha} \\ {beta} extends {beta}",
                    (alpha, beta),
                )
    raise AssertionError("class scan and word scan disagree")


def check_antimatroid_axioms(L: LanguageSet, limit: Optional[int] = None) -> Verdict:
    """Accessibility plus: α̃ ⊄ β̃ ⇒ some x ∈ α̃ \\ β̃ has βx ∈ L"""
    _check_size(L.n, limit, "check_antimatroid_axioms")
    verdict = _accessibility(L)
    if not verdict:
        return verdict
    return _exchange(L, lambda a, la, b, lb: bool(a & ~b), "antimatroid")


def check_greedoid_axioms(L: LanguageSet, limit: Optional[int] = None) -> Verdict:
    """Accessibility plus: |α| > |β| ⇒ some x ∈ α̃ \\ β̃ has βx ∈ L"""
    _check_size(L.n, limit, "check_greedoid_axioms")
    verdict = _accessibility(L)
    if not verdict:
        return verdict
    return _exchange(L, lambda a, la, b, lb: la > lb, "greedoid")


def mps_from_language(L: LanguageSet, limit: Optional[int] = None) -> ExplicitMps:
    """p_x(X) = 1 iff some word αx ∈ L has α̃ ⊆ X"""
    if not L.words:
        raise AxiomError("the empty language is not generated by any MPS")
    verdict = check_antimatroid_axioms(L, limit)
    if not verdict:
        raise AxiomError(f"language is not an antimatroid: {verdict.message}")
    generators = [set() for _ in range(L.n)]
    for word in L.words:
        if word:
            generators[word[-1]].add(support(word[:-1]))
    return ExplicitMps.from_generators(L.n, [sorted(gens) for gens in generators])


def example_two() -> tuple:
    """Alphabet and MPS of the three-element antimatroid where c needs a or b first"""
    return Alphabet(("a", "b", "c")), ExplicitMps.from_generators(3, [[0], [0], [0b001, 0b010]])
