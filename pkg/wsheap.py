#!/usr/bin/env python3
"""
Working-set priority queue
Two-pass pairing heap without decrease-key, ordered by a comparison oracle.
Inserts are buffered and paired among themselves at the next extract or peek.
Opt-in op-log that measures weak working-set sizes.
"""

import logging
import math
from typing import Dict, List, Optional

from pydantic import BaseModel

from errors import EmptyHeapError, HeapUsageError, MetricsUnavailableError

logger = logging.getLogger(__name__)

INSERT = "insert"
EXTRACT = "extract"


class HeapMetrics(BaseModel):
    """Comparison total and w'(x) for every extracted element"""
    comparisons: int
    working_set: Dict[int, int]

    @property
    def bound(self) -> float:
        """Σ over extracted x of (1 + log2 w'(x))"""
        return sum(1 + math.log2(w) for w in self.working_set.values())

    @property
    def constant(self) -> float:
        """Measured C in comparisons ≤ C · bound (0 when nothing was extracted)"""
        bound = self.bound
        return self.comparisons / bound if bound else 0.0


class _Node:
    __slots__ = ("item", "children")

    def __init__(self, item):
        self.item = item
        self.children = []


class WorkingSetHeap:
    """
    Min-heap of element ids. `oracle` must provide less(x, y); every call is
    counted by the oracle and mirrored in the heap's own tally.
    """

    def __init__(self, oracle, record: bool = False):
        self.oracle = oracle
        self._root: Optional[_Node] = None
        self._pending: List[_Node] = []
        self._present = set()
        self._inserted = set()
        self.comparisons = 0
        self.log: Optional[List[tuple]] = [] if record else None

    def __len__(self) -> int:
        return len(self._present)

    def __bool__(self) -> bool:
        return bool(self._present)

    def __contains__(self, x) -> bool:
        return x in self._present

    def contains(self, x) -> bool:
        return x in self._present

    def snapshot(self) -> frozenset:
        """Current contents as a set (no comparisons)"""
        return frozenset(self._present)

    def _link(self, a: _Node, b: _Node) -> _Node:
        self.comparisons += 1
        if self.oracle.less(a.item, b.item):
            a.children.append(b)
            return a
        b.children.append(a)
        return b

    def insert(self, x):
        """Add x; no comparison now, one link when the buffer is settled"""
        if x in self._inserted:
            raise HeapUsageError(f"element {x} was already inserted into this heap")
        self._inserted.add(x)
        self._present.add(x)
        self._pending.append(_Node(x))
        if self.log is not None:
            self.log.append((INSERT, x))

    def _settle(self):
        # k buffered nodes cost k - 1 links among themselves plus one against the root
        if not self._pending:
            return
        tree = self._combine(self._pending)
        self._pending = []
        self._root = tree if self._root is None else self._link(self._root, tree)

    def peek(self):
        if not self._present:
            raise EmptyHeapError("peek on an empty heap")
        self._settle()
        return self._root.item

    def extract_min(self):
        """Remove and return the oracle-minimum"""
        if not self._present:
            raise EmptyHeapError("extract_min on an empty heap")
        self._settle()
        top = self._root.item
        self._root = self._combine(self._root.children)
        self._present.discard(top)
        if self.log is not None:
            self.log.append((EXTRACT, top))
        return top

    def _combine(self, children: List[_Node]) -> Optional[_Node]:
        if not children:
            return None
        # left-to-right pairing pass
        paired = []
        for i in range(0, len(children) - 1, 2):
            paired.append(self._link(children[i], children[i + 1]))
        if len(children) % 2:
            paired.append(children[-1])
        # right-to-left fold
        root = paired[-1]
        for node in reversed(paired[:-1]):
            root = self._link(node, root)
        return root

    def metrics(self) -> HeapMetrics:
        """w'(x) = number of inserts in [insert-time(x), extract-time(x)], x included"""
        if self.log is None:
            raise MetricsUnavailableError("heap was created without record=True")
        inserts_so_far = 0
        inserted_at = {}
        working_set = {}
        for kind, x in self.log:
            if kind == INSERT:
                inserted_at[x] = inserts_so_far
                inserts_so_far += 1
            else:
                working_set[x] = inserts_so_far - inserted_at[x]
        return HeapMetrics(comparisons=self.comparisons, working_set=working_set)


def heapsort(items, oracle, record: bool = False):
    """Insert everything, then extract everything; returns (order, heap)"""
    heap = WorkingSetHeap(oracle, record=record)
    for x in items:
        heap.insert(x)
    order = [heap.extract_min() for _ in range(len(heap))]
    return order, heap
