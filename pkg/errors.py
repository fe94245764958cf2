#!/usr/bin/env python3
"""
Exception hierarchy for antimatroid-heapsort
"""


class AntisortError(Exception):
    """Base class for every error raised by this package"""


class PreconditionError(AntisortError):
    """An operation was called outside its documented precondition"""


class SizeLimitError(AntisortError):
    """A brute-force operation was asked to run above its size limit"""

    def __init__(self, n, limit, what="instance"):
        super().__init__(f"{what} has n={n}, above the brute-force limit {limit}")
        self.n = n
        self.limit = limit


class MonotonicityError(AntisortError):
    """A precedence table is not monotone"""


class AxiomError(AntisortError):
    """A language does not satisfy the axioms a construction requires"""


class NotFullError(AntisortError):
    """The antimatroid has no full word, so no layer sequence exists"""


class ContractError(AntisortError):
    """A candidate data structure broke its init/step contract"""


class StallError(AntisortError):
    """Sorting ran out of available elements before outputting everything"""

    def __init__(self, message, prefix=()):
        super().__init__(message)
        self.prefix = tuple(prefix)


class HeapUsageError(AntisortError):
    """Invalid use of the working-set heap (for example a duplicate insert)"""


class EmptyHeapError(AntisortError, IndexError):
    """extract_min on an empty heap"""


class MetricsUnavailableError(AntisortError):
    """Heap metrics were requested but the op-log is disabled"""


class FormulaParseError(AntisortError):
    """Malformed precedence formula"""

    def __init__(self, message, position=None):
        where = f" at token {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
        self.reason = message
        self.position = position


class InputError(AntisortError):
    """Semantically invalid input (unreachable vertex, bad weight, empty ERC side)"""


class ChordalityError(InputError):
    """The graph is not chordal"""

    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


class MergeMismatchError(AntisortError):
    """Comparison answers disagree with what the candidate data structure reports"""


class InstanceParseError(AntisortError):
    """Syntax or semantic error in an instance file"""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(f"{loc}{message}")
        self.line = line
        self.column = column
