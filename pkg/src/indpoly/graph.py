"""Undirected graphs on dense integer vertices, subset masks and self-avoiding walks.

Vertex subsets are plain Python ints used as bitmasks (bit ``v`` set iff
vertex ``v`` is a member).  Ints are immutable and cheap to pass down a
recursion, so no undo bookkeeping is needed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidInputError


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with vertices ``0..n-1``.

    ``adjacency[v]`` is the ascending tuple of neighbours of ``v``.  The
    ascending order fixes the child ordering used by every recursion.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int
    neighbor_masks: tuple[int, ...] = field(repr=False, compare=False)

    @property
    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def closed_neighbor_mask(self, v: int) -> int:
        return self.neighbor_masks[v] | (1 << v)

    def is_independent(self, mask: int) -> bool:
        for v in members(mask):
            if self.neighbor_masks[v] & mask:
                return False
        return True

    def induced(self, vertices: Sequence[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph on ``vertices`` (relabelled in the given order)."""
        index = {v: i for i, v in enumerate(vertices)}
        edges = [
            (index[u], index[w])
            for u in vertices
            for w in self.adjacency[u]
            if w in index and u < w
        ]
        return build_graph(len(vertices), edges), list(vertices)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a :class:`Graph`; duplicate edges (in either orientation) collapse."""
    if n < 0:
        raise InvalidInputError(f"vertex count must be nonnegative, got {n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for edge in edges:
        if len(edge) != 2:
            raise InvalidInputError(f"edge must be a pair, got {edge!r}")
        u, v = int(edge[0]), int(edge[1])
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidInputError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise InvalidInputError(f"self-loop at vertex {u}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)
    masks = tuple(sum(1 << w for w in a) for a in adjacency)
    edge_count = sum(len(a) for a in adjacency) // 2
    return Graph(n=n, adjacency=adjacency, edge_count=edge_count, neighbor_masks=masks)


def subset_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << int(v)
    return mask


def members(mask: int) -> list[int]:
    """Vertices of ``mask`` in ascending order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def lowest_member(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def count_saw(g: Graph, v: int, length: int) -> int:
    """Number of self-avoiding walks with exactly ``length`` edges starting at ``v``."""
    if not 0 <= v < g.n:
        raise InvalidInputError(f"vertex {v} out of range for n={g.n}")
    if length < 0:
        raise InvalidInputError("walk length must be nonnegative")
    if length == 0:
        return 1
    if length > g.n - 1:
        return 0

    adj = g.adjacency

    def walk(u: int, visited: int, remaining: int) -> int:
        if remaining == 0:
            return 1
        total = 0
        for w in adj[u]:
            if not visited >> w & 1:
                total += walk(w, visited | (1 << w), remaining - 1)
        return total

    return walk(v, 1 << v, length)


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex lists of the connected components, each ascending, ordered by smallest vertex."""
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, stack = [], [s]
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        out.append(sorted(comp))
    return out
