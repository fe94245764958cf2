#!/usr/bin/env python3
"""
Instance files
Line-oriented UTF-8 text: a header naming the kind, an alphabet line, then
kind-specific body lines. "#" starts a comment.

    formulas              ercs                 digraph / graph / graph chordal
    alphabet a b c        alphabet a b c       alphabet a b c
    a: 1                  a | c                root a
    b: 1                  b | c                a b
    c: (a | b)                                 a c

weighted-digraph bodies use "u v w" arc lines with w a positive decimal or
fraction. Every error carries a line (and where possible a column).
"""

import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Tuple

from pydantic import BaseModel

from chordal import ChordalGraph, SimplicialCds, is_simplicial
from core import Alphabet, ExplicitMps, iter_bits
from dijkstra import WeightedDigraph
from errors import AntisortError, FormulaParseError, InputError, InstanceParseError, PreconditionError
from representations import ErcCds, ErcSet, Formula, FormulaCds, FormulaSystem, RootedGraph, VertexSearchCds
from sorter import CandidateDataStructure

logger = logging.getLogger(__name__)

KINDS = ("formulas", "ercs", "digraph", "graph", "chordal", "weighted-digraph")
_RESERVED = set("()&|:#∧∨")
_FIELD = re.compile(r"\S+")


class Instance(BaseModel):
    """A parsed instance: its kind, alphabet and the representation it describes"""
    kind: str
    alphabet: Alphabet
    payload: Any

    @property
    def n(self) -> int:
        return self.alphabet.n

    def make_cds(self, validated: bool = True) -> CandidateDataStructure:
        """A fresh candidate data structure for the instance's backend"""
        if self.kind == "formulas":
            return FormulaCds(self.payload, validated)
        if self.kind == "ercs":
            return ErcCds(self.payload, validated)
        if self.kind in ("digraph", "graph"):
            return VertexSearchCds(self.payload, validated)
        if self.kind == "weighted-digraph":
            return VertexSearchCds(self.payload.graph, validated)
        return SimplicialCds(self.payload, validated)

    def ground_truth(self) -> ExplicitMps:
        """Explicit precedence system built from the representation, not from the CDS"""
        if self.kind == "chordal":
            graph = self.payload
            return ExplicitMps.from_predicates(graph.n, lambda v, mask: is_simplicial(graph, v, mask))
        if self.kind == "weighted-digraph":
            return self.payload.graph.to_mps()
        return self.payload.to_mps()


def _fields(line: str) -> List[Tuple[str, int]]:
    """Whitespace-separated fields with 1-based columns"""
    return [(m.group(0), m.start() + 1) for m in _FIELD.finditer(line)]


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            lines.append((number, line))
    return lines


def _parse_header(number: int, line: str) -> str:
    words = line.split()
    if words == ["graph", "chordal"]:
        return "chordal"
    if len(words) == 1 and words[0] in KINDS:
        return words[0]
    raise InstanceParseError(f"unknown instance kind {line.strip()!r}; expected one of {', '.join(KINDS)}",
                             number, 1)


def _parse_alphabet(number: int, line: str) -> Alphabet:
    fields = _fields(line)
    if fields[0][0] != "alphabet":
        raise InstanceParseError("second line must declare the alphabet", number, fields[0][1])
    seen = set()
    for name, column in fields[1:]:
        if name in seen:
            raise InstanceParseError(f"duplicate element {name!r}", number, column)
        if name in ("0", "1", "root") or _RESERVED & set(name) or name.startswith(("!", "~", "¬", "-")):
            raise InstanceParseError(f"{name!r} cannot be used as an element name", number, column)
        seen.add(name)
    return Alphabet(tuple(name for name, _ in fields[1:]))


def _element(alphabet: Alphabet, name: str, number: int, column: int) -> int:
    try:
        return alphabet.id_of(name)
    except PreconditionError as e:
        raise InstanceParseError(f"unknown element {name!r}", number, column) from e


def _parse_formulas(alphabet, body, header_line) -> FormulaSystem:
    texts = {}
    for number, line in body:
        owner_text, sep, formula_text = line.partition(":")
        if not sep:
            raise InstanceParseError("expected 'element: formula'", number, 1)
        name = owner_text.strip()
        column = line.index(name) + 1 if name else 1
        owner = _element(alphabet, name, number, column)
        if owner in texts:
            raise InstanceParseError(f"second formula for {name!r}", number, column)
        start = len(owner_text) + 1
        try:
            texts[owner] = Formula.parse(formula_text, alphabet, owner)
        except FormulaParseError as e:
            offset = e.position if e.position is not None else len(formula_text)
            raise InstanceParseError(e.reason, number, start + offset + 1) from e
    formulas = []
    for x in range(alphabet.n):
        if x not in texts:
            logger.debug("element %s has no formula line; using 1", alphabet.name_of(x))
            texts[x] = Formula.parse("1", alphabet, x)
        formulas.append(texts[x])
    try:
        return FormulaSystem(formulas)
    except InputError as e:
        raise InstanceParseError(str(e), header_line) from e


def _parse_ercs(alphabet, body, header_line) -> ErcSet:
    ercs = []
    for number, line in body:
        left, sep, right = line.partition("|")
        if not sep or "|" in right:
            raise InstanceParseError("expected 'A | B' with exactly one '|'", number, 1)
        sides = []
        for text, offset in ((left, 0), (right, len(left) + 1)):
            mask = 0
            for name, column in _fields(text):
                mask |= 1 << _element(alphabet, name, number, offset + column)
            sides.append(mask)
        if sides[1] or not sides[0]:
            # locate per-line errors; vacuous ERCs are dropped once by the final ErcSet
            try:
                ErcSet(alphabet.n, [tuple(sides)])
            except InputError as e:
                raise InstanceParseError(str(e), number, 1) from e
        ercs.append(tuple(sides))
    return ErcSet(alphabet.n, ercs)


def _parse_arcs(alphabet, body, weighted: bool, allow_root: bool):
    root = None
    arcs = []
    width = 3 if weighted else 2
    for number, line in body:
        fields = _fields(line)
        if fields[0][0] == "root":
            if not allow_root:
                raise InstanceParseError("chordal graphs have no root", number, fields[0][1])
            if len(fields) != 2:
                raise InstanceParseError("expected 'root r'", number, fields[0][1])
            if root is not None:
                raise InstanceParseError("root declared twice", number, fields[0][1])
            root = _element(alphabet, fields[1][0], number, fields[1][1])
            continue
        if len(fields) != width:
            expected = "'u v w'" if weighted else "'u v'"
            raise InstanceParseError(f"expected {expected}", number, fields[0][1])
        u = _element(alphabet, fields[0][0], number, fields[0][1])
        v = _element(alphabet, fields[1][0], number, fields[1][1])
        if weighted:
            text, column = fields[2]
            try:
                w = Fraction(text)
            except (ValueError, ZeroDivisionError) as e:
                raise InstanceParseError(f"weight {text!r} is not a number", number, column) from e
            if w <= 0:
                raise InstanceParseError(f"weight {text!r} is not positive", number, column)
            arcs.append((u, v, w))
        else:
            arcs.append((u, v))
    return (0 if root is None else root), arcs


def parse_text(text: str) -> Instance:
    """Parse instance text; raises InstanceParseError with a location"""
    lines = _content_lines(text)
    if not lines:
        raise InstanceParseError("empty instance file", 1, 1)
    header_line, header = lines[0]
    kind = _parse_header(header_line, header)
    if len(lines) < 2:
        raise InstanceParseError("missing alphabet line", header_line + 1, 1)
    alphabet = _parse_alphabet(*lines[1])
    body = lines[2:]
    try:
        if kind == "formulas":
            payload = _parse_formulas(alphabet, body, header_line)
        elif kind == "ercs":
            payload = _parse_ercs(alphabet, body, header_line)
        elif kind == "chordal":
            _, edges = _parse_arcs(alphabet, body, weighted=False, allow_root=False)
            payload = ChordalGraph(alphabet.n, edges)
        elif kind == "weighted-digraph":
            root, arcs = _parse_arcs(alphabet, body, weighted=True, allow_root=True)
            payload = WeightedDigraph(alphabet.n, arcs, root)
        else:
            root, edges = _parse_arcs(alphabet, body, weighted=False, allow_root=True)
            payload = RootedGraph(alphabet.n, edges, root, directed=(kind == "digraph"))
    except InstanceParseError:
        raise
    except AntisortError as e:
        raise InstanceParseError(str(e), header_line, 1) from e
    return Instance(kind=kind, alphabet=alphabet, payload=payload)


def parse_instance(path) -> Instance:
    """Read and parse an instance file"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceParseError(f"cannot read {path}: {e}") from e
    return parse_text(text)


def _format_weight(w) -> str:
    return str(Fraction(w))


def format_instance(instance: Instance) -> str:
    """Canonical text; parse_text(format_instance(i)) formats back to the same text"""
    alphabet = instance.alphabet
    name = alphabet.name_of
    header = "graph chordal" if instance.kind == "chordal" else instance.kind
    lines = [header, " ".join(["alphabet", *alphabet.names])]
    payload = instance.payload
    if instance.kind == "formulas":
        for formula in payload.formulas:
            lines.append(f"{name(formula.owner)}: {formula.format(alphabet)}")
    elif instance.kind == "ercs":
        for a, b in payload.ercs:
            left = " ".join(name(x) for x in iter_bits(a))
            right = " ".join(name(x) for x in iter_bits(b))
            lines.append(f"{left} | {right}")
    elif instance.kind == "chordal":
        lines.extend(f"{name(u)} {name(v)}" for u, v in payload.edges())
    elif instance.kind == "weighted-digraph":
        if instance.n:
            lines.append(f"root {name(payload.source)}")
        lines.extend(f"{name(u)} {name(v)} {_format_weight(w)}" for u, v, w in payload.arcs())
    else:
        if instance.n:
            lines.append(f"root {name(payload.root)}")
        for u, v in payload.arcs():
            if payload.directed or u < v:
                lines.append(f"{name(u)} {name(v)}")
    return "\n".join(lines) + "\n"


def parse_order_text(text: str, alphabet: Alphabet) -> tuple:
    """A hidden order: one word over the alphabet, comments allowed"""
    joined = " ".join(line.strip() for _, line in _content_lines(text))
    if alphabet.compact:
        joined = joined.replace(" ", "")
    try:
        order = alphabet.parse_word(joined)
    except PreconditionError as e:
        raise InstanceParseError(str(e)) from e
    if sorted(order) != list(range(alphabet.n)):
        raise InstanceParseError("hidden order must list every element of the alphabet exactly once")
    return order


def read_order(path, alphabet: Alphabet) -> tuple:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceParseError(f"cannot read {path}: {e}") from e
    return parse_order_text(text, alphabet)


EXAMPLE_TWO = """\
# c needs a or b
formulas
alphabet a b c
a: 1
b: 1
c: (a | b)
"""


def example_two_instance() -> Instance:
    return parse_text(EXAMPLE_TWO)
