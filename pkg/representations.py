#!/usr/bin/env python3
"""
Antimatroid representations with linear-time candidate data structures
- monotone precedence formulas, one per element
- ERC sets (A, B): some element of A must precede all of B
- vertex-search antimatroids on rooted graphs
plus translations between them and explicit precedence systems.
"""

import logging
import re
from collections import deque
from itertools import permutations
from typing import Iterable, List, Optional, Sequence

from core import ExplicitMps, LanguageSet, Verdict, as_mask, expand, full_mask, iter_bits
from errors import FormulaParseError, InputError, PreconditionError, SizeLimitError
from settings import resolve_limit
from sorter import CandidateDataStructure

logger = logging.getLogger(__name__)

# Token stream: variables are element ids (>= 0), everything else is negative.
LPAREN = -1
RPAREN = -2
AND = -3
OR = -4
ZERO = -5
ONE = -6

_SYMBOLS = {"(": LPAREN, ")": RPAREN, "&": AND, "∧": AND, "|": OR, "∨": OR, "0": ZERO, "1": ONE}
_TEXT = {LPAREN: "(", RPAREN: ")", AND: " & ", OR: " | ", ZERO: "0", ONE: "1"}
_TOKEN = re.compile(r"\(|\)|&|\||∧|∨|[^\s()&|∧∨]+")
_NEGATIONS = ("!", "~", "¬", "-")

VAR = "var"
CONST = "const"
AND_NODE = "and"
OR_NODE = "or"


class FNode:
    """Formula tree node; operator nodes are n-ary over a single operator"""
    __slots__ = ("kind", "value", "children")

    def __init__(self, kind, value=None, children=None):
        self.kind = kind
        self.value = value
        self.children = children if children is not None else []


def tokenize(text: str, alphabet) -> tuple:
    """Split formula text into tokens; returns (tokens, character offsets)"""
    tokens, offsets = [], []
    for match in _TOKEN.finditer(text):
        word = match.group(0)
        if word in _SYMBOLS:
            tokens.append(_SYMBOLS[word])
        elif word.startswith(_NEGATIONS):
            raise FormulaParseError("negation is not allowed in a monotone formula", match.start())
        else:
            try:
                tokens.append(alphabet.id_of(word))
            except PreconditionError as e:
                raise FormulaParseError(f"unknown element {word!r}", match.start()) from e
        offsets.append(match.start())
    return tokens, offsets


class _Frame:
    __slots__ = ("op", "children", "expect_operand", "start")

    def __init__(self, start):
        self.op = None
        self.children = []
        self.expect_operand = True
        self.start = start


def parse_tokens(tokens: Sequence[int], owner: Optional[int] = None) -> FNode:
    """
    Parse a fully parenthesized token stream into a tree. Chains of one
    operator inside a single pair of parentheses are accepted; mixing
    operators without parentheses is rejected.
    """
    frames: List[_Frame] = []
    top: List[FNode] = []

    def add_operand(node, pos):
        if not frames:
            if top:
                raise FormulaParseError("more than one top-level term", pos)
            top.append(node)
            return
        frame = frames[-1]
        if not frame.expect_operand:
            raise FormulaParseError("missing operator between operands", pos)
        frame.children.append(node)
        frame.expect_operand = False

    for pos, tok in enumerate(tokens):
        if tok == LPAREN:
            frames.append(_Frame(pos))
        elif tok == RPAREN:
            if not frames:
                raise FormulaParseError("unbalanced ')'", pos)
            frame = frames.pop()
            if not frame.children or frame.expect_operand:
                raise FormulaParseError("operator or parentheses without an operand", pos)
            if frame.op is None:
                node = frame.children[0]
            else:
                node = FNode(AND_NODE if frame.op == AND else OR_NODE, children=frame.children)
            add_operand(node, pos)
        elif tok in (AND, OR):
            if not frames:
                raise FormulaParseError("binary operator outside parentheses", pos)
            frame = frames[-1]
            if frame.expect_operand:
                raise FormulaParseError("operator without a left operand", pos)
            if frame.op is not None and frame.op != tok:
                raise FormulaParseError("mixed operators need their own parentheses", pos)
            frame.op = tok
            frame.expect_operand = True
        elif tok in (ZERO, ONE):
            add_operand(FNode(CONST, 1 if tok == ONE else 0), pos)
        elif tok >= 0:
            if owner is not None and tok == owner:
                raise FormulaParseError(f"formula of element {owner} mentions itself", pos)
            add_operand(FNode(VAR, tok), pos)
        else:
            raise FormulaParseError(f"unknown token {tok}", pos)
    if frames:
        raise FormulaParseError("unbalanced '('", frames[-1].start)
    if not top:
        raise FormulaParseError("empty formula", 0)
    return top[0]


def postorder(root: FNode) -> List[FNode]:
    order, stack = [], [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded or not node.children:
            order.append(node)
            continue
        stack.append((node, True))
        for child in reversed(node.children):
            stack.append((child, False))
    return order


def serialize(root: FNode) -> List[int]:
    out, stack = [], [root]
    while stack:
        item = stack.pop()
        if isinstance(item, int):
            out.append(item)
        elif item.kind == VAR:
            out.append(item.value)
        elif item.kind == CONST:
            out.append(ONE if item.value else ZERO)
        else:
            op = AND if item.kind == AND_NODE else OR
            pending = [LPAREN]
            for i, child in enumerate(item.children):
                if i:
                    pending.append(op)
                pending.append(child)
            pending.append(RPAREN)
            stack.extend(reversed(pending))
    return out


def _simplify_tree(root: FNode) -> FNode:
    result = {}
    for node in postorder(root):
        if node.kind in (VAR, CONST):
            result[id(node)] = node
            continue
        kids = [result[id(child)] for child in node.children]
        absorbing, neutral = (0, 1) if node.kind == AND_NODE else (1, 0)
        if any(k.kind == CONST and k.value == absorbing for k in kids):
            result[id(node)] = FNode(CONST, absorbing)
            continue
        kids = [k for k in kids if not (k.kind == CONST and k.value == neutral)]
        if not kids:
            result[id(node)] = FNode(CONST, neutral)
        elif len(kids) == 1:
            result[id(node)] = kids[0]
        else:
            result[id(node)] = FNode(node.kind, children=kids)
    return result[id(root)]


class Formula:
    """Monotone precedence formula F_x guarding element `owner`"""

    def __init__(self, owner: int, tokens: Sequence[int]):
        self.owner = owner
        self.tokens = tuple(tokens)
        self.root = parse_tokens(self.tokens, owner)

    @classmethod
    def parse(cls, text: str, alphabet, owner: int) -> "Formula":
        tokens, offsets = tokenize(text, alphabet)
        try:
            return cls(owner, tokens)
        except FormulaParseError as e:
            offset = offsets[e.position] if e.position is not None and e.position < len(offsets) else len(text)
            raise FormulaParseError(e.reason, offset) from e

    @classmethod
    def from_tree(cls, owner: int, root: FNode) -> "Formula":
        return cls(owner, serialize(root))

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Formula) and (self.owner, self.tokens) == (other.owner, other.tokens)

    def __hash__(self) -> int:
        return hash((self.owner, self.tokens))

    def variables(self) -> int:
        return as_mask(tok for tok in self.tokens if tok >= 0)

    def is_constant(self, value: int) -> bool:
        return self.root.kind == CONST and self.root.value == value

    def evaluate(self, chosen) -> int:
        mask = as_mask(chosen)
        values = {}
        for node in postorder(self.root):
            if node.kind == VAR:
                values[id(node)] = mask >> node.value & 1
            elif node.kind == CONST:
                values[id(node)] = node.value
            elif node.kind == AND_NODE:
                values[id(node)] = int(all(values[id(c)] for c in node.children))
            else:
                values[id(node)] = int(any(values[id(c)] for c in node.children))
        return values[id(self.root)]

    def format(self, alphabet) -> str:
        return "".join(alphabet.name_of(tok) if tok >= 0 else _TEXT[tok] for tok in self.tokens)

    def __repr__(self) -> str:
        return f"Formula(owner={self.owner}, tokens={len(self.tokens)})"


def simplify_formula(F: Formula) -> Formula:
    """Apply the constant rewrite rules to a fixed point: result is 0, 1 or constant-free"""
    return Formula.from_tree(F.owner, _simplify_tree(F.root))


def variable(x: int) -> FNode:
    return FNode(VAR, x)


def constant(value: int) -> FNode:
    return FNode(CONST, 1 if value else 0)


def conjunction(children: Iterable[FNode]) -> FNode:
    kids = list(children)
    if not kids:
        return constant(1)
    return kids[0] if len(kids) == 1 else FNode(AND_NODE, children=kids)


def disjunction(children: Iterable[FNode]) -> FNode:
    kids = list(children)
    if not kids:
        return constant(0)
    return kids[0] if len(kids) == 1 else FNode(OR_NODE, children=kids)


class FormulaSystem:
    """One formula per element plus the occurrence index of every variable"""

    def __init__(self, formulas: Sequence[Formula]):
        self.formulas = tuple(formulas)
        self.n = len(self.formulas)
        for x, formula in enumerate(self.formulas):
            if formula.owner != x:
                raise InputError(f"formula {x} is owned by element {formula.owner}")
            bad = [tok for tok in formula.tokens if tok >= self.n]
            if bad:
                raise InputError(f"formula of element {x} uses unknown element {bad[0]}")
        self.occurrences = {}
        for y, formula in enumerate(self.formulas):
            for pos, tok in enumerate(formula.tokens):
                if tok >= 0:
                    self.occurrences.setdefault((tok, y), []).append(pos)

    @property
    def size(self) -> int:
        """Total token count: the input size"""
        return sum(len(f) for f in self.formulas)

    def to_mps(self) -> ExplicitMps:
        return ExplicitMps.from_predicates(self.n, lambda x, mask: self.formulas[x].evaluate(mask))

    def dependency_graph(self) -> dict:
        """x -> elements whose formula mentions x"""
        graph = {x: [] for x in range(self.n)}
        for x, y in sorted(self.occurrences):
            graph[x].append(y)
        return graph


class FormulaCds(CandidateDataStructure):
    """
    Substitutes 1 for every occurrence of a stepped element and propagates
    collapses upward. Every node is resolved at most once per epoch, so the
    total work of an epoch is bounded by the token count.
    """

    def __init__(self, system: FormulaSystem, validated: bool = True):
        super().__init__(system.n, validated)
        self.system = system

    def _build(self):
        # flat arrays over all formulas, rebuilt from the pristine token streams
        self._parent = []
        self._kind = []
        self._pending = []
        self._state = []
        self._root_owner = {}
        self._occurrences = [[] for _ in range(self.n)]
        constants = []
        for formula in self.system.formulas:
            root = parse_tokens(formula.tokens, formula.owner)
            stack = [(root, -1)]
            while stack:
                node, parent = stack.pop()
                index = len(self._kind)
                self._kind.append(node.kind)
                self._parent.append(parent)
                self._pending.append(len(node.children))
                self._state.append(None)
                if parent == -1:
                    self._root_owner[index] = formula.owner
                if node.kind == VAR:
                    self._occurrences[node.value].append(index)
                elif node.kind == CONST:
                    constants.append((index, node.value))
                for child in node.children:
                    stack.append((child, index))
        return constants

    def _resolve(self, node: int, value: int, reported: list):
        while True:
            self.work += 1
            self._state[node] = value
            parent = self._parent[node]
            if parent == -1:
                if value:
                    reported.append(self._root_owner[node])
                return
            if self._state[parent] is not None:
                return
            short_circuit = 0 if self._kind[parent] == AND_NODE else 1
            if value == short_circuit:
                node = parent
                continue
            self._pending[parent] -= 1
            if self._pending[parent]:
                return
            node, value = parent, 1 - short_circuit

    def _init(self):
        reported = []
        for index, value in self._build():
            if self._state[index] is None:
                self._resolve(index, value, reported)
        return sorted(reported)

    def _step(self, x):
        reported = []
        for leaf in self._occurrences[x]:
            if self._state[leaf] is None:
                self._resolve(leaf, 1, reported)
        return reported


def formula_cds(system: FormulaSystem, validated: bool = True) -> FormulaCds:
    return FormulaCds(system, validated)


def formulas_from_mps(S: ExplicitMps) -> FormulaSystem:
    """Disjunctive normal form over the minimal true sets of every p_x"""
    formulas = []
    width = S.n - 1
    for x in range(S.n):
        table = S.tables[x]
        minimal = []
        for index, value in enumerate(table):
            if value and not any(index >> b & 1 and table[index ^ 1 << b] for b in range(width)):
                minimal.append(expand(x, index))
        terms = [conjunction(variable(y) for y in iter_bits(mask)) for mask in sorted(minimal)]
        formulas.append(Formula.from_tree(x, disjunction(terms)))
    return FormulaSystem(formulas)


class ErcSet:
    """Elementary ranking conditions (A, B) over n elements, stored as bitmask pairs"""

    def __init__(self, n: int, ercs: Iterable[tuple]):
        self.n = n
        kept = []
        for a, b in ercs:
            a, b = as_mask(a), as_mask(b)
            if (a | b) >> n:
                raise InputError(f"ERC ({sorted(iter_bits(a))}, {sorted(iter_bits(b))}) uses unknown elements")
            if a & b:
                raise InputError(f"ERC sides overlap on {sorted(iter_bits(a & b))}")
            if not a:
                raise InputError(f"ERC with empty A blocks {sorted(iter_bits(b))} forever")
            if not b:
                logger.warning("dropping vacuous ERC with empty B (A=%s)", sorted(iter_bits(a)))
                continue
            kept.append((a, b))
        self.ercs = tuple(kept)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple]) -> "ErcSet":
        """Partial order arcs u -> v as ERCs ({u}, {v})"""
        return cls(n, [(1 << u, 1 << v) for u, v in pairs])

    def __len__(self) -> int:
        return len(self.ercs)

    @property
    def size(self) -> int:
        return sum(bin(a).count("1") + bin(b).count("1") for a, b in self.ercs)

    def consistent(self, order: Sequence[int]) -> bool:
        """Some a ∈ A precedes every b ∈ B, for every ERC"""
        rank = {x: i for i, x in enumerate(order)}
        for a, b in self.ercs:
            first_a = min(rank[x] for x in iter_bits(a))
            if any(rank[y] < first_a for y in iter_bits(b)):
                return False
        return True

    def to_mps(self) -> ExplicitMps:
        """p_x(X) = 1 iff every ERC with x ∈ B has A ∩ X ≠ ∅"""
        return ExplicitMps.from_predicates(
            self.n, lambda x, mask: all(a & mask for a, b in self.ercs if b >> x & 1)
        )


class ErcCds(CandidateDataStructure):
    """In-degree counting over ERCs; each ERC is retired once"""

    def __init__(self, ercs: ErcSet, validated: bool = True):
        super().__init__(ercs.n, validated)
        self.ercs = ercs
        self._by_a = [[] for _ in range(ercs.n)]
        for index, (a, _) in enumerate(ercs.ercs):
            for x in iter_bits(a):
                self._by_a[x].append(index)

    def _init(self):
        self._blockers = [0] * self.n
        self._retired = [False] * len(self.ercs.ercs)
        for _, b in self.ercs.ercs:
            for y in iter_bits(b):
                self._blockers[y] += 1
        return [x for x in range(self.n) if not self._blockers[x]]

    def _step(self, x):
        reported = []
        for index in self._by_a[x]:
            if self._retired[index]:
                continue
            self._retired[index] = True
            self.work += 1
            for y in iter_bits(self.ercs.ercs[index][1]):
                self.work += 1
                self._blockers[y] -= 1
                if not self._blockers[y]:
                    reported.append(y)
        return reported


def erc_cds(ercs: ErcSet, validated: bool = True) -> ErcCds:
    return ErcCds(ercs, validated)


def ercs_from_mps(S: ExplicitMps) -> ErcSet:
    """One ERC (Σ \\ {x} \\ X, {x}) per maximal false set X of p_x"""
    ercs = []
    width = S.n - 1
    everything = full_mask(S.n)
    for x in range(S.n):
        table = S.tables[x]
        for index, value in enumerate(table):
            if value:
                continue
            if all(index >> b & 1 or table[index | 1 << b] for b in range(width)):
                ercs.append((everything & ~(1 << x) & ~expand(x, index), 1 << x))
    return ErcSet(S.n, ercs)


def formulas_from_ercs(ercs: ErcSet) -> FormulaSystem:
    """F_x = conjunction over ERCs with x ∈ B of the disjunction of A"""
    formulas = []
    for x in range(ercs.n):
        clauses = [disjunction(variable(y) for y in iter_bits(a)) for a, b in ercs.ercs if b >> x & 1]
        formulas.append(Formula.from_tree(x, conjunction(clauses)))
    return FormulaSystem(formulas)


def erc_semantics_check(ercs: ErcSet, L: LanguageSet, limit: Optional[int] = None) -> Verdict:
    """
    Brute force over all permutations: the ERC-consistent ones must equal P(L),
    and for every ERC the "each b has an earlier a" and "one a precedes all b"
    readings must agree.
    """
    limit = resolve_limit(limit)
    if ercs.n > limit:
        raise SizeLimitError(ercs.n, limit, "erc_semantics_check")
    expected = set(L.permutations())
    for order in permutations(range(ercs.n)):
        rank = {x: i for i, x in enumerate(order)}
        for a, b in ercs.ercs:
            each_b = all(any(rank[x] < rank[y] for x in iter_bits(a)) for y in iter_bits(b))
            one_a = any(all(rank[x] < rank[y] for y in iter_bits(b)) for x in iter_bits(a))
            if each_b != one_a:
                return Verdict.failed("the two ERC readings disagree", (order, (a, b)))
        if ercs.consistent(order) != (order in expected):
            return Verdict.failed(
                f"permutation {order} is {'consistent' if order not in expected else 'inconsistent'} "
                "with the ERCs but the language says otherwise",
                order,
            )
    return Verdict.passed(f"{len(expected)} consistent permutations")


class RootedGraph:
    """Directed (or symmetrized undirected) graph with a root that reaches every vertex"""

    def __init__(self, n: int, edges: Iterable[tuple], root: int = 0, directed: bool = True):
        if not 0 <= root < max(n, 1):
            raise InputError(f"root {root} is not a vertex")
        self.n = n
        self.root = root
        self.directed = directed
        out = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) uses an unknown vertex")
            if u == v:
                continue
            out[u].add(v)
            if not directed:
                out[v].add(u)
        self.out = [sorted(neighbours) for neighbours in out]
        self.inn = [[] for _ in range(n)]
        for u in range(n):
            for v in self.out[u]:
                self.inn[v].append(u)
        self.m = sum(len(neighbours) for neighbours in self.out)
        unreachable = sorted(set(range(n)) - set(self.bfs_distances()))
        if unreachable:
            raise InputError(f"vertices {unreachable} are not reachable from the root {root}")

    def arcs(self):
        for u in range(self.n):
            for v in self.out[u]:
                yield u, v

    def bfs_distances(self) -> dict:
        if not self.n:
            return {}
        dist = {self.root: 0}
        queue = deque([self.root])
        while queue:
            u = queue.popleft()
            for v in self.out[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def to_mps(self) -> ExplicitMps:
        """The root is always available; any other vertex needs a chosen in-neighbour"""
        inn = [as_mask(self.inn[v]) for v in range(self.n)]
        return ExplicitMps.from_predicates(
            self.n, lambda v, mask: v == self.root or bool(inn[v] & mask)
        )

    def to_formulas(self) -> FormulaSystem:
        formulas = []
        for v in range(self.n):
            if v == self.root:
                formulas.append(Formula.from_tree(v, constant(1)))
            else:
                formulas.append(Formula.from_tree(v, disjunction(variable(u) for u in self.inn[v])))
        return FormulaSystem(formulas)


class VertexSearchCds(CandidateDataStructure):
    """The disjunction of in-neighbours, specialized to a reported flag per vertex"""

    def __init__(self, graph: RootedGraph, validated: bool = True):
        super().__init__(graph.n, validated)
        self.graph = graph

    def _init(self):
        self._seen = [False] * self.n
        if not self.n:
            return []
        self._seen[self.graph.root] = True
        return [self.graph.root]

    def _step(self, v):
        reported = []
        for u in self.graph.out[v]:
            self.work += 1
            if not self._seen[u]:
                self._seen[u] = True
                reported.append(u)
        return reported


def vertex_search_cds(graph: RootedGraph, validated: bool = True) -> VertexSearchCds:
    return VertexSearchCds(graph, validated)


def truth_table_equal(first: Formula, second: Formula, n: int) -> bool:
    """Compare two formulas on every subset of Σ minus the owner"""
    owner = first.owner
    size = 1 << (n - 1) if n else 0
    return all(first.evaluate(expand(owner, i)) == second.evaluate(expand(owner, i)) for i in range(size))



def random_rooted_graph(n: int, rng, extra_arcs: Optional[int] = None, directed: bool = True,
                        root: int = 0) -> RootedGraph:
    """Random spanning arborescence from the root plus extra random arcs"""
    if n == 0:
        return RootedGraph(0, [], 0, directed)
    order = [v for v in range(n) if v != root]
    rng.shuffle(order)
    placed = [root]
    edges = []
    for v in order:
        edges.append((rng.choice(placed), v))
        placed.append(v)
    extra = n if extra_arcs is None else extra_arcs
    for _ in range(extra if n > 1 else 0):
        u, v = rng.sample(range(n), 2)
        edges.append((u, v))
    return RootedGraph(n, edges, root, directed)
