"""Simple directed cycles: canonical form, enumeration and counting."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import CatalogExplosionError, NotSelfAvoidingError
from .markov import FluxField, MarkovProcess

DEFAULT_CAP = 10**6


@dataclass(frozen=True, order=False)
class Cycle:
    """Self-avoiding closed path, stored rotated so the smallest vertex leads."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        vs = tuple(int(v) for v in self.vertices)
        if len(vs) < 2:
            raise NotSelfAvoidingError(f"cycle needs at least 2 vertices, got {vs}")
        if len(set(vs)) != len(vs):
            raise NotSelfAvoidingError(f"vertex sequence {vs} is not self-avoiding")
        k = vs.index(min(vs))
        object.__setattr__(self, "vertices", vs[k:] + vs[:k])

    def __len__(self):
        return len(self.vertices)

    @property
    def sort_key(self):
        return (len(self.vertices), self.vertices)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        vs = self.vertices
        return tuple((vs[k], vs[(k + 1) % len(vs)]) for k in range(len(vs)))

    def passage(self, i: int, j: int | None = None) -> int:
        """1 if the cycle passes through vertex ``i`` (or directed edge ``(i, j)``)."""
        if j is None:
            return int(i in self.vertices)
        return int((i, j) in self.edges)

    def label(self, arrow="→") -> str:
        return arrow.join(str(v + 1) for v in self.vertices)

    def __str__(self):
        return self.label()


def canonicalize(vertices: Sequence[int]) -> Cycle:
    return Cycle(tuple(vertices))


def _adjacency(g) -> np.ndarray:
    if isinstance(g, MarkovProcess):
        return g.off_diagonal > 0
    if isinstance(g, FluxField):
        return g.phi > 0
    if isinstance(g, nx.DiGraph):
        nodes = sorted(g.nodes)
        if nodes != list(range(len(nodes))):
            raise ValueError("graph nodes must be 0..n-1")
        adj = nx.to_numpy_array(g, nodelist=nodes, weight=None) > 0
    else:
        adj = np.asarray(g) != 0
    adj = adj.copy()
    np.fill_diagonal(adj, False)
    return adj


class CycleCatalog(tuple):
    """Ordered, duplicate-free collection of cycles."""

    def __new__(cls, cycles: Iterable[Cycle]):
        cycles = tuple(cycles)
        if len(set(cycles)) != len(cycles):
            raise ValueError("catalog contains duplicate cycles")
        return super().__new__(cls, cycles)

    def index(self, cycle, *args):
        if not isinstance(cycle, Cycle):
            cycle = Cycle(tuple(cycle))
        return super().index(cycle, *args)

    def to_json(self) -> list[list[int]]:
        return [[v + 1 for v in c.vertices] for c in self]

    @classmethod
    def from_json(cls, data) -> "CycleCatalog":
        return cls(Cycle(tuple(v - 1 for v in vs)) for vs in data)


def enumerate_cycles(g, cap: int = DEFAULT_CAP) -> CycleCatalog:
    """All simple directed cycles of length >= 2, sorted by (length, vertices)."""
    adj = _adjacency(g)
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(adj.shape[0]))
    digraph.add_edges_from(zip(*np.nonzero(adj)))
    found = []
    for vs in nx.simple_cycles(digraph):
        found.append(Cycle(tuple(vs)))
        if len(found) > cap:
            raise CatalogExplosionError(
                f"more than {cap} simple cycles; restrict the graph or raise the cap"
            )
    found.sort(key=lambda c: c.sort_key)
    return CycleCatalog(found)


@dataclass(frozen=True)
class CycleCounts:
    M: int
    M_B: int
    M_SNT: int


def cycle_counts(g, cap: int = DEFAULT_CAP) -> CycleCounts:
    """Catalog size, Betti number |E| - N + 1 and SNT fundamental-cycle count U - N + 1."""
    adj = _adjacency(g)
    n = adj.shape[0]
    n_edges = int(adj.sum())
    undirected = int(np.triu(adj | adj.T, k=1).sum())
    return CycleCounts(
        M=len(enumerate_cycles(adj, cap=cap)),
        M_B=n_edges - n + 1,
        M_SNT=undirected - n + 1,
    )
