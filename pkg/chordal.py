#!/usr/bin/env python3
"""
Chordal graphs and simplicial-vertex pruning
Maximum cardinality search, clique trees, and a candidate data structure
that maintains the simplicial vertices of a chordal graph under simplicial
vertex deletions by contracting clique-tree edges.
"""

import heapq
import logging
from typing import Dict, Iterable, List, Optional

from core import iter_bits
from errors import ChordalityError, ContractError, InputError, SizeLimitError
from settings import resolve_limit
from sorter import CandidateDataStructure

logger = logging.getLogger(__name__)


class ChordalGraph:
    """Undirected simple graph, verified chordal at construction"""

    def __init__(self, n: int, edges: Iterable[tuple]):
        self.n = n
        adj = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) uses an unknown vertex")
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        self.adj = [frozenset(neighbours) for neighbours in adj]
        self.m = sum(len(neighbours) for neighbours in self.adj) // 2
        self.mcs_order, self.mcs_labels = maximum_cardinality_search(self)
        self._verify_peo()

    def edges(self):
        for u in range(self.n):
            for v in sorted(self.adj[u]):
                if u < v:
                    yield u, v

    def _verify_peo(self):
        # elimination order is the reverse of the search order
        position = {v: i for i, v in enumerate(reversed(self.mcs_order))}
        for v in self.mcs_order:
            later = [u for u in self.adj[v] if position[u] > position[v]]
            if len(later) < 2:
                continue
            follower = min(later, key=position.__getitem__)
            for u in sorted(later):
                if u != follower and u not in self.adj[follower]:
                    raise ChordalityError(
                        f"vertex {v} has non-adjacent neighbours {follower} and {u} "
                        "that must both survive its elimination",
                        (v, follower, u),
                    )


def maximum_cardinality_search(graph) -> tuple:
    """
    Visit order and labels (number of already-visited neighbours at visit
    time). Ties go to the smallest vertex id.
    """
    weight = [0] * graph.n
    visited = [False] * graph.n
    heap = [(0, v) for v in range(graph.n)]
    heapq.heapify(heap)
    order, labels = [], []
    while heap:
        negative, v = heapq.heappop(heap)
        if visited[v] or -negative != weight[v]:
            continue
        visited[v] = True
        order.append(v)
        labels.append(weight[v])
        for u in graph.adj[v]:
            if not visited[u]:
                weight[u] += 1
                heapq.heappush(heap, (-weight[u], u))
    return order, labels


class CliqueTree:
    """
    Clique forest: node -> member set K(x), node adjacency with separator
    sizes s_e, and one handle per graph vertex pointing at a node that
    contains it.
    """

    def __init__(self, n: int):
        self.n = n
        self.members: Dict[int, set] = {}
        self.adj: Dict[int, Dict[int, int]] = {}
        self.handle: List[Optional[int]] = [None] * n

    def add_node(self, members) -> int:
        node = len(self.members) if not self.members else max(self.members) + 1
        self.members[node] = set(members)
        self.adj[node] = {}
        for v in members:
            if self.handle[v] is None:
                self.handle[v] = node
        return node

    def add_edge(self, x: int, y: int):
        s = len(self.members[x] & self.members[y])
        self.adj[x][y] = s
        self.adj[y][x] = s

    def copy(self) -> "CliqueTree":
        other = CliqueTree(self.n)
        other.members = {x: set(k) for x, k in self.members.items()}
        other.adj = {x: dict(edges) for x, edges in self.adj.items()}
        other.handle = list(self.handle)
        return other

    def maximal_cliques(self) -> List[tuple]:
        return sorted(tuple(sorted(k)) for k in self.members.values() if k)

    def edges(self) -> List[tuple]:
        return sorted((x, y, s) for x, edges in self.adj.items() for y, s in edges.items() if x < y)

    def clique_count(self) -> List[int]:
        count = [0] * self.n
        for k in self.members.values():
            for v in k:
                count[v] += 1
        return count

    def total_size(self) -> int:
        return sum(len(k) for k in self.members.values())

    def is_coherent(self) -> bool:
        """Every vertex's nodes form a connected subtree (equivalent to the path condition)"""
        containing: Dict[int, set] = {}
        for x, k in self.members.items():
            for v in k:
                containing.setdefault(v, set()).add(x)
        for v, nodes in containing.items():
            start = next(iter(nodes))
            seen, stack = {start}, [start]
            while stack:
                x = stack.pop()
                for y in self.adj[x]:
                    if y in nodes and y not in seen:
                        seen.add(y)
                        stack.append(y)
            if seen != nodes:
                return False
        for x, edges in self.adj.items():
            for y, s in edges.items():
                if s != len(self.members[x] & self.members[y]):
                    return False
        return True


def build_clique_tree(graph: ChordalGraph) -> CliqueTree:
    """
    Clique forest from the maximum cardinality search: a new clique starts
    whenever a vertex's label does not exceed the previous label, and hangs
    below the clique of its latest-visited earlier neighbour.
    """
    tree = CliqueTree(graph.n)
    visited_at = {}
    clique_of = {}
    current = None
    previous_label = -1
    for index, (v, label) in enumerate(zip(graph.mcs_order, graph.mcs_labels)):
        earlier = [u for u in graph.adj[v] if u in visited_at]
        if current is None or label <= previous_label:
            current = tree.add_node(earlier + [v])
            if earlier:
                anchor = max(earlier, key=visited_at.__getitem__)
                tree.add_edge(current, clique_of[anchor])
        else:
            tree.members[current].add(v)
            if tree.handle[v] is None:
                tree.handle[v] = current
        visited_at[v] = index
        clique_of[v] = current
        previous_label = label
    # separators were computed while cliques were still growing
    for x, y, _ in tree.edges():
        tree.add_edge(x, y)
    return tree


class SimplicialCds(CandidateDataStructure):
    """
    Reports simplicial vertices of G - U as U grows. A vertex is simplicial
    iff it lies in exactly one maximal clique; deleting it may make its
    clique non-maximal, which shows as an incident edge with s_e = |K(x)|
    and is repaired by contracting that edge.
    """

    def __init__(self, graph: ChordalGraph, validated: bool = True, check_coherence: bool = False):
        super().__init__(graph.n, validated)
        self.graph = graph
        self.pristine = build_clique_tree(graph)
        self.check_coherence = check_coherence

    def _init(self):
        self.tree = self.pristine.copy()
        self._count = self.tree.clique_count()
        self._heaps = {}
        for x, edges in self.tree.adj.items():
            heap = [(-s, y) for y, s in edges.items()]
            heapq.heapify(heap)
            self._heaps[x] = heap
        return [v for v in range(self.n) if self._count[v] == 1]

    def _top_edge(self, x: int):
        heap = self._heaps[x]
        edges = self.tree.adj[x]
        while heap:
            negative, y = heap[0]
            if edges.get(y) == -negative:
                return y, -negative
            heapq.heappop(heap)
        return None, 0

    def _step(self, v):
        x = self.tree.handle[v]
        members = self.tree.members[x]
        members.discard(v)
        self.work += 1
        reported = []
        if not members:
            self._remove_node(x)
            return reported
        y, s = self._top_edge(x)
        if y is not None and s == len(members):
            self._contract(x, y, reported)
            if self.check_coherence and not self.tree.is_coherent():
                raise ContractError(f"clique tree lost coherence after removing {v}")
        return reported

    def _remove_node(self, x: int):
        for y in list(self.tree.adj[x]):
            del self.tree.adj[y][x]
        del self.tree.adj[x]
        del self.tree.members[x]
        del self._heaps[x]

    def _contract(self, x: int, y: int, reported: list):
        """Merge x into y; K(x) ⊆ K(y)"""
        for u in self.tree.members[x]:
            self.work += 1
            self._count[u] -= 1
            if self.tree.handle[u] == x:
                self.tree.handle[u] = y
            if self._count[u] == 1:
                reported.append(u)
        for z, s in self.tree.adj[x].items():
            if z == y:
                continue
            self.work += 1
            del self.tree.adj[z][x]
            self.tree.adj[z][y] = s
            self.tree.adj[y][z] = s
            heapq.heappush(self._heaps[z], (-s, y))
            heapq.heappush(self._heaps[y], (-s, z))
        del self.tree.adj[y][x]
        del self.tree.adj[x]
        del self.tree.members[x]
        del self._heaps[x]
        reported.sort()


def simplicial_cds(graph: ChordalGraph, validated: bool = True, check_coherence: bool = False) -> SimplicialCds:
    return SimplicialCds(graph, validated, check_coherence)


def is_simplicial(graph, v: int, removed: int = 0) -> bool:
    """Neighbours of v outside `removed` are pairwise adjacent"""
    rest = [u for u in graph.adj[v] if not removed >> u & 1]
    for i, u in enumerate(rest):
        for w in rest[i + 1:]:
            if w not in graph.adj[u]:
                return False
    return True


def simplicial_mask(graph, removed: int = 0) -> int:
    mask = 0
    for v in range(graph.n):
        if not removed >> v & 1 and is_simplicial(graph, v, removed):
            mask |= 1 << v
    return mask


def is_peo(graph, order) -> bool:
    """Each vertex is simplicial in the graph left after removing its predecessors"""
    order = list(order)
    if sorted(order) != list(range(graph.n)):
        return False
    removed = 0
    for v in order:
        if not is_simplicial(graph, v, removed):
            return False
        removed |= 1 << v
    return True


def count_peos(graph, limit: Optional[int] = None) -> int:
    """Number of perfect elimination orderings by DP over removed sets"""
    limit = resolve_limit(limit)
    if graph.n > limit:
        raise SizeLimitError(graph.n, limit, "count_peos")
    ways = [0] * (1 << graph.n)
    ways[0] = 1
    for removed in range(1 << graph.n):
        if not ways[removed]:
            continue
        for v in iter_bits(simplicial_mask(graph, removed)):
            ways[removed | 1 << v] += ways[removed]
    return ways[-1]


def random_chordal_graph(n: int, rng, connected: bool = True) -> ChordalGraph:
    """
    Grow a chordal graph: each new vertex joins a random subset of an existing
    clique, so the reverse insertion order is a perfect elimination ordering.
    """
    edges = []
    cliques = []
    for v in range(n):
        if not cliques or (not connected and rng.random() < 0.15):
            cliques.append([v])
            continue
        base = rng.choice(cliques)
        size = rng.randint(1, len(base))
        chosen = rng.sample(base, size)
        edges.extend((u, v) for u in chosen)
        cliques.append(chosen + [v])
    return ChordalGraph(n, edges)
