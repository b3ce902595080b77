"""Cycle transform: the dual graph whose nodes are weighted cycles.

Cycles sharing a state exchange "tickets" there. At state i a cycle beta is
drawn with probability m_beta / (total weight of cycles through i); the
resulting exchange fluxes between cycles are symmetric, so the dual process
is detailed-balanced and admits a Boltzmann-type potential.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cycles import Cycle
from .decomposition import CycleDecomposition
from .errors import InconsistencyError
from .markov import LINEAR_TOL, LOG_TOL, MarkovProcess, steady_fluxes


@dataclass(frozen=True, eq=False)
class CycleGraph:
    nodes: tuple[Cycle, ...]
    m: np.ndarray
    b: np.ndarray  # b[a, c]: exchange rate from node a to node c
    psi: np.ndarray
    tau: np.ndarray
    loop_mass: float = 0.0

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Unordered node pairs (a < c) sharing at least one state."""
        n = len(self.nodes)
        return [(a, c) for a in range(n) for c in range(a + 1, n) if self.b[a, c] > 0]

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"cycle": [v + 1 for v in c.vertices], "m": float(m), "tau": float(t),
                 "H": float(-np.log(m))}
                for c, m, t in zip(self.nodes, self.m, self.tau)
            ],
            "edges": [
                {"a": [v + 1 for v in self.nodes[a].vertices],
                 "b": [v + 1 for v in self.nodes[c].vertices],
                 "b_ab": float(self.b[a, c]), "b_ba": float(self.b[c, a]),
                 "psi": float(self.psi[a, c])}
                for a, c in self.edges
            ],
        }


def build_cycle_graph(d: CycleDecomposition, p: MarkovProcess) -> CycleGraph:
    nodes = tuple(c for c, w in zip(d.catalog, d.weights) if w > 0)
    m = np.array([d.weight(c) for c in nodes])
    n = p.n_states
    chi = np.zeros((len(nodes), n))
    for k, c in enumerate(nodes):
        chi[k, list(c.vertices)] = 1.0

    served = m @ chi  # total cycle weight through each state
    throughput = steady_fluxes(p).phi.sum(axis=0)
    bad = np.nonzero((served <= 0) & (throughput > 0))[0]
    if bad.size:
        raise InconsistencyError(f"state {bad[0] + 1} carries flux but no weighted cycle")
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(served > 0, 1.0 / served, 0.0)
    # b[a, c] = sum_i chi[a, i] chi[c, i] m[c] / served[i]
    shared = (chi * inv) @ chi.T
    b = shared * m[None, :]
    np.fill_diagonal(b, 0.0)
    psi = m[:, None] * b
    asym = np.max(np.abs(psi - psi.T)) if psi.size else 0.0
    if asym > LINEAR_TOL:
        raise InconsistencyError(f"cycle-graph fluxes not symmetric (max gap {asym:.3e})")
    tau = chi @ p.mean_waiting_times()
    loop_mass = 0.0
    if p.is_discrete:
        # loops are outside cycle space; their mass completes the normalization
        loop_mass = float(_discrete_loop_mass(d, p))
    return CycleGraph(nodes, m, b, psi, tau, loop_mass)


def _discrete_loop_mass(d: CycleDecomposition, p: MarkovProcess) -> float:
    w = p.off_diagonal
    out = np.zeros(p.n_states)
    for c, m in zip(d.catalog, d.weights):
        for i, _ in c.edges:
            out[i] += m
    with np.errstate(divide="ignore", invalid="ignore"):
        occupancy = np.where(w.sum(axis=1) > 0, out / w.sum(axis=1), 0.0)
    return float((occupancy * np.diag(p.rates)).sum())


@dataclass(frozen=True)
class CyclePotential:
    H: dict
    Z: float

    def weight(self, cycle: Cycle) -> float:
        return float(np.exp(-self.H[cycle]) / self.Z)

    def shifted(self, c: float) -> "CyclePotential":
        """Same weights in another gauge: H -> H + c, Z -> Z * exp(-c)."""
        return CyclePotential({k: v + c for k, v in self.H.items()}, self.Z * np.exp(-c))


def normalization(g: CycleGraph) -> float:
    """``sum m * tau`` (plus loop mass in discrete time); equals 1 for a steady state."""
    return float(np.dot(g.m, g.tau) + g.loop_mass)


def cycle_potential(g: CycleGraph) -> CyclePotential:
    """Potential in the gauge Z = 1, so H = -ln m."""
    norm = normalization(g)
    if abs(norm - 1.0) > LOG_TOL:
        raise InconsistencyError(f"sum of m*tau is {norm:.12g}, expected 1")
    h = -np.log(g.m)
    for a, c in g.edges:
        gap = abs((h[c] - h[a]) + np.log(g.b[a, c] / g.b[c, a]))
        if gap > LOG_TOL:
            raise InconsistencyError(
                f"potential difference inconsistent with exchange rates ({gap:.3e})"
            )
    return CyclePotential(dict(zip(g.nodes, h.tolist())), 1.0)


def partition_function(pot: CyclePotential, g: CycleGraph) -> float:
    """``sum tau * exp(-H)`` over nodes, loops counted as unit-period 1-cycles.

    Equals ``pot.Z`` whenever the potential is self-consistent.
    """
    total = sum(t * np.exp(-pot.H[c]) for c, t in zip(g.nodes, g.tau))
    return float(total + g.loop_mass * pot.Z)
