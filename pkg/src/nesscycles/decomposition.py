"""Deterministic iterative cycle decomposition of steady-state flux fields.

For each cycle in a chosen order, the cycle receives the smallest flux still
present on its edges, and that amount is removed from every edge it uses.
On a Kirchhoff-balanced field the remainder is zero once every cycle has been
visited, and the weights reproduce the field exactly.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _backend
from .cycles import Cycle, CycleCatalog, enumerate_cycles
from .errors import CombinatorialCapError, InconsistencyError
from .markov import LINEAR_TOL, FluxField

SNAP_RTOL = 1e-13
DEDUP_RTOL = 1e-10
DEFAULT_MAX_ORDERINGS = math.factorial(10)
_CHUNK = 20000


@dataclass(frozen=True, eq=False)
class CycleDecomposition:
    catalog: CycleCatalog
    weights: np.ndarray
    ordering: tuple[int, ...]
    residual: FluxField

    @property
    def n_states(self) -> int:
        return self.residual.n_states

    def weight(self, cycle) -> float:
        return float(self.weights[self.catalog.index(cycle)])

    def as_dict(self) -> dict[Cycle, float]:
        return {c: float(w) for c, w in zip(self.catalog, self.weights)}

    @property
    def support(self) -> tuple[Cycle, ...]:
        return tuple(c for c, w in zip(self.catalog, self.weights) if w > 0)

    def to_json(self) -> dict:
        return {
            "cycles": [
                {"cycle": [v + 1 for v in c.vertices], "weight": float(w)}
                for c, w in zip(self.catalog, self.weights)
            ],
            "ordering": [[v + 1 for v in self.catalog[k].vertices] for k in self.ordering],
        }


class _Problem:
    """Edge-indexed arrays shared by every run over one field and catalog."""

    def __init__(self, f: FluxField, catalog: CycleCatalog):
        n = f.n_states
        rows, cols = np.nonzero(f.phi > 0)
        edge_set = set(zip(rows.tolist(), cols.tolist()))
        for c in catalog:
            edge_set.update(c.edges)
        self.edges = sorted(edge_set)
        index = {e: k for k, e in enumerate(self.edges)}
        self.n = n
        self.f = f
        self.catalog = catalog
        self.esrc = np.array([e[0] for e in self.edges], dtype=np.int64)
        self.edst = np.array([e[1] for e in self.edges], dtype=np.int64)
        self.flux = np.ascontiguousarray(f.phi[self.esrc, self.edst], dtype=np.float64)
        width = max((len(c) for c in catalog), default=1)
        self.cyc_edges = np.full((len(catalog), width), -1, dtype=np.int64)
        self.cyc_len = np.array([len(c) for c in catalog], dtype=np.int64)
        self.incidence = np.zeros((len(catalog), len(self.edges)))
        for k, c in enumerate(catalog):
            ids = [index[e] for e in c.edges]
            self.cyc_edges[k, : len(ids)] = ids
            self.incidence[k, ids] = 1.0
        self.scale = float(self.flux.max()) if self.flux.size else 0.0
        self.snap = SNAP_RTOL * self.scale
        self.tol = LINEAR_TOL * max(1.0, self.scale)

    def run(self, orders: np.ndarray) -> np.ndarray:
        orders = np.ascontiguousarray(orders, dtype=np.int64)
        weights, violation, residual = _backend.decompose_batch(
            self.flux, self.cyc_edges, self.cyc_len, orders,
            self.esrc, self.edst, self.n, self.snap,
        )
        if violation.size and violation.max() > self.tol:
            raise InconsistencyError(
                f"node condition drifted to {violation.max():.3e} during decomposition"
            )
        if residual.size and residual.max() > self.tol:
            r = int(np.argmax(residual))
            raise InconsistencyError(
                f"residual flux {residual[r]:.3e} remains after visiting every cycle "
                f"(ordering {orders[r].tolist()}); catalog incomplete or field corrupted"
            )
        if len(self.edges):
            recon = weights @ self.incidence
            gap = np.abs(recon - self.flux).max()
            if gap > self.tol:
                raise InconsistencyError(f"reconstruction differs from input by {gap:.3e}")
        return weights

    def make(self, weights: np.ndarray, ordering) -> CycleDecomposition:
        w = np.array(weights, dtype=float)
        w.setflags(write=False)
        zero = FluxField(np.zeros((self.n, self.n)))
        return CycleDecomposition(self.catalog, w, tuple(int(k) for k in ordering), zero)


def _resolve(f: FluxField, catalog, ordering):
    if catalog is None:
        catalog = enumerate_cycles(f)
    elif not isinstance(catalog, CycleCatalog):
        catalog = CycleCatalog(catalog)
    if ordering is None:
        order = list(range(len(catalog)))
    else:
        order = [catalog.index(k) if not isinstance(k, (int, np.integer)) else int(k) for k in ordering]
        if sorted(order) != list(range(len(catalog))):
            raise ValueError("ordering must be a permutation of the catalog")
    return catalog, order


def decompose(f: FluxField, catalog: Sequence[Cycle] | None = None, ordering=None) -> CycleDecomposition:
    """Decompose ``f`` visiting catalog cycles in ``ordering``.

    ``ordering`` may hold catalog positions or cycles; default is catalog order.
    """
    catalog, order = _resolve(f, catalog, ordering)
    problem = _Problem(f, catalog)
    f.check_node_condition(problem.tol)
    weights = problem.run(np.array([order]))
    return problem.make(weights[0], order)


def reconstruct_fluxes(d: CycleDecomposition) -> FluxField:
    phi = np.zeros((d.n_states, d.n_states))
    for c, w in zip(d.catalog, d.weights):
        for i, j in c.edges:
            phi[i, j] += w
    return FluxField(phi)


class _Distinct:
    def __init__(self, problem: _Problem):
        self.problem = problem
        self.reps: list[np.ndarray] = []
        self.orderings: list[np.ndarray] = []
        self.atol = DEDUP_RTOL * max(problem.scale, np.finfo(float).tiny)

    def add(self, weights: np.ndarray, orders: np.ndarray):
        quantum = self.atol / 10
        keys = np.round(weights / quantum)
        _, first = np.unique(keys, axis=0, return_index=True)
        for r in np.sort(first):
            w = weights[r]
            if not any(np.max(np.abs(w - rep)) <= self.atol for rep in self.reps):
                self.reps.append(w)
                self.orderings.append(orders[r])

    def result(self):
        return [self.problem.make(w, o) for w, o in zip(self.reps, self.orderings)]


def _run_chunks(problem: _Problem, chunks, threads: int):
    distinct = _Distinct(problem)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for orders, weights in pool.map(lambda o: (o, problem.run(o)), chunks):
                distinct.add(weights, orders)
    else:
        for orders in chunks:
            distinct.add(problem.run(orders), orders)
    return distinct


def enumerate_decompositions(f: FluxField, catalog=None,
                             max_orderings: int = DEFAULT_MAX_ORDERINGS,
                             threads: int = 1) -> list[CycleDecomposition]:
    """Distinct decompositions over every ordering of the catalog.

    Results are deduplicated by weight vector and listed in order of the
    first ordering (lexicographic over catalog positions) producing them.
    """
    catalog, _ = _resolve(f, catalog, None)
    total = math.factorial(len(catalog))
    if total > max_orderings:
        raise CombinatorialCapError(
            f"{len(catalog)} cycles give {total} orderings (cap {max_orderings}); "
            "use sample_decompositions for a seeded random subset"
        )
    problem = _Problem(f, catalog)
    f.check_node_condition(problem.tol)
    perms = itertools.permutations(range(len(catalog)))

    def chunks():
        while True:
            block = list(itertools.islice(perms, _CHUNK))
            if not block:
                return
            yield np.array(block, dtype=np.int64).reshape(len(block), len(catalog))

    return _run_chunks(problem, chunks(), threads).result()


class SampledDecompositions(NamedTuple):
    decompositions: list
    n_samples: int
    seed: int
    # the distinct count is only a lower bound on the true number
    lower_bound: bool = True


def sample_decompositions(f: FluxField, catalog=None, n_samples: int = 10000,
                          seed: int = 0, threads: int = 1) -> SampledDecompositions:
    catalog, _ = _resolve(f, catalog, None)
    problem = _Problem(f, catalog)
    f.check_node_condition(problem.tol)
    rng = np.random.default_rng(seed)
    m = len(catalog)

    def chunks():
        left = n_samples
        while left > 0:
            k = min(left, _CHUNK)
            left -= k
            yield np.argsort(rng.random((k, m)), axis=1).astype(np.int64)

    found = _run_chunks(problem, list(chunks()), threads).result()
    return SampledDecompositions(found, n_samples, seed)


class SplitDecomposition(NamedTuple):
    two_cycle_part: CycleDecomposition
    current_part: CycleDecomposition


def db_current_split(f: FluxField, catalog=None) -> SplitDecomposition:
    """Visit all 2-cycles first, splitting the detailed-balance part from the currents."""
    catalog, _ = _resolve(f, catalog, None)
    twos = [k for k, c in enumerate(catalog) if len(c) == 2]
    rest = [k for k, c in enumerate(catalog) if len(c) != 2]
    full = decompose(f, catalog, twos + rest)

    two_cat = CycleCatalog(catalog[k] for k in twos)
    two_w = np.array([full.weights[k] for k in twos])
    # 2-cycles never share a directed edge, so their order cannot matter
    expected = np.array([min(f.phi[c.vertices[0], c.vertices[1]],
                             f.phi[c.vertices[1], c.vertices[0]]) for c in two_cat])
    if two_w.size and np.max(np.abs(two_w - expected)) > LINEAR_TOL * max(1.0, expected.max()):
        raise InconsistencyError("2-cycle weights depend on their order")
    current_field = FluxField(np.clip(f.phi - f.phi.T, 0.0, None))
    two_w.setflags(write=False)
    two_part = CycleDecomposition(two_cat, two_w, tuple(range(len(twos))), current_field)

    cur_cat = CycleCatalog(catalog[k] for k in rest)
    cur_w = np.array([full.weights[k] for k in rest])
    cur_w.setflags(write=False)
    cur_part = CycleDecomposition(cur_cat, cur_w, tuple(range(len(rest))), full.residual)
    return SplitDecomposition(two_part, cur_part)
