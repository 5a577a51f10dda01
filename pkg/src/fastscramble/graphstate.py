"""Graph states and rank-based entropies of their bipartitions.

For a graph state, the Renyi-2 entropy of a vertex subset A equals the
GF(2) rank of the adjacency block connecting A to its complement, so
bipartition statistics reduce to small rank computations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import BitMatrix, rank_words
from .seeding import substream
from .tableau import StabilizerTableau


@dataclass
class Graph:
    """Simple undirected graph with a bit-packed adjacency matrix."""

    n_vertices: int
    adj: BitMatrix

    @classmethod
    def empty(cls, n: int) -> "Graph":
        if n < 1:
            raise ValueError("need at least one vertex")
        return cls(n, BitMatrix.zeros(n, n))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        g = cls.empty(n)
        for a, b in edges:
            g.add_edge(a, b)
        return g

    def add_edge(self, a: int, b: int) -> None:
        if a == b:
            raise ValueError("no self loops")
        self.adj.set(a, b, 1)
        self.adj.set(b, a, 1)

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.adj.get(a, b))

    def edges(self) -> list[tuple[int, int]]:
        out = []
        arr = self.adj.to_array()
        for a in range(self.n_vertices):
            for b in range(a + 1, self.n_vertices):
                if arr[a, b]:
                    out.append((a, b))
        return out

    def degree(self, v: int) -> int:
        return int(self.adj.to_array()[v].sum())

    def to_edge_list(self) -> str:
        """Header line with the vertex count, then one 'i j' line per edge."""
        lines = [str(self.n_vertices)]
        lines += [f"{a} {b}" for a, b in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> "Graph":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        n = int(lines[0])
        edges = []
        for ln in lines[1:]:
            a, b = ln.split()
            edges.append((int(a), int(b)))
        return cls.from_edges(n, edges)


def hypercube(m: int) -> Graph:
    """m-dimensional hypercube: vertices 0..2**m-1, edges where indices
    differ in exactly one bit."""
    if m < 1:
        raise ValueError("need m >= 1")
    n = 1 << m
    g = Graph.empty(n)
    for i in range(n):
        for k in range(m):
            j = i ^ (1 << k)
            if j > i:
                g.add_edge(i, j)
    return g


def graph_entropy_bits(graph: Graph, subset) -> int:
    """Renyi-2 entropy of a graph-state bipartition, in bits.

    Equals the GF(2) rank of the adjacency block between the subset and
    its complement.
    """
    n = graph.n_vertices
    sub = sorted(set(int(q) for q in subset))
    if len(sub) != len(list(subset)):
        raise ValueError("duplicate vertex in subset")
    if sub and (sub[0] < 0 or sub[-1] >= n):
        raise IndexError("vertex outside graph")
    if not sub or len(sub) == n:
        return 0
    inside = np.zeros(n, dtype=bool)
    inside[sub] = True
    comp_cols = np.nonzero(~inside)[0].astype(np.int64)
    work = graph.adj.data[sub].copy()
    return rank_words(work, comp_cols)


def tableau_from_graph(graph: Graph) -> StabilizerTableau:
    """Graph state: fully x-polarized input, then CZ on every edge."""
    t = StabilizerTableau.new_polarized(graph.n_vertices, "x")
    for a, b in graph.edges():
        t.apply_cz(a, b)
    return t


def page_scrambling_fraction(
    graph: Graph, sizes, samples_per_size: int, seed: int
) -> dict[int, float]:
    """Fraction of sampled subsets whose entropy is maximal, per size.

    Maximal means min(|A|, N - |A|) bits, the pure-state ceiling.
    """
    n = graph.n_vertices
    out: dict[int, float] = {}
    for size in sizes:
        if not 0 <= size <= n:
            raise ValueError("subset size outside 0..N")
        ceiling = min(size, n - size)
        hits = 0
        for k in range(samples_per_size):
            rng = substream(seed, f"page-fraction-{size}", k)
            sub = rng.choice(n, size, replace=False)
            if graph_entropy_bits(graph, sub) == ceiling:
                hits += 1
        out[int(size)] = hits / samples_per_size
    return out
