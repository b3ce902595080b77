"""Finite-state Markov processes, their steady states and steady-state fluxes.

States are 0-based here. File formats and human-readable reports are 1-based.

For continuous time ``rates[i, j]`` is the jump rate i -> j and the diagonal is
zero. For discrete time ``rates[i, j]`` is the jump probability and the
diagonal holds the staying probabilities (loops).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    DetailedBalanceRequiredError,
    InconsistencyError,
    NotSteadyStateError,
    NumericalError,
    UnreachableStateError,
    ValidationError,
    ZeroRateEdgeError,
)

CONTINUOUS = "continuous"
DISCRETE = "discrete"

LINEAR_TOL = 1e-12
LOG_TOL = 1e-10


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MarkovProcess:
    rates: np.ndarray
    time_kind: str = CONTINUOUS

    def __post_init__(self):
        rates = np.array(self.rates, dtype=float)
        if rates.ndim != 2 or rates.shape[0] != rates.shape[1] or rates.shape[0] < 1:
            raise ValueError(f"rates must be a non-empty square matrix, got shape {rates.shape}")
        if self.time_kind not in (CONTINUOUS, DISCRETE):
            raise ValueError(f"time_kind must be 'continuous' or 'discrete', not {self.time_kind!r}")
        if self.time_kind == CONTINUOUS:
            np.fill_diagonal(rates, 0.0)
        object.__setattr__(self, "rates", _frozen(rates))

    @classmethod
    def from_edges(cls, n, edges, time_kind=CONTINUOUS, loops=()):
        """Build from 0-based ``(i, j, rate)`` triples and ``(i, p)`` loops."""
        rates = np.zeros((n, n))
        for i, j, w in edges:
            if i == j:
                raise ValueError(f"edge {i + 1}->{j + 1} is a loop; pass loops separately")
            rates[i, j] = w
        for i, a in loops:
            if time_kind != DISCRETE:
                raise ValueError("loops are only meaningful for discrete time")
            rates[i, i] = a
        return cls(rates, time_kind)

    @property
    def n_states(self) -> int:
        return self.rates.shape[0]

    @property
    def is_discrete(self) -> bool:
        return self.time_kind == DISCRETE

    @property
    def off_diagonal(self) -> np.ndarray:
        w = self.rates.copy()
        np.fill_diagonal(w, 0.0)
        return w

    def edges(self):
        """Directed edges ``(i, j)``, i != j, with positive rate, row-major."""
        w = self.off_diagonal
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(w > 0))]

    def mean_waiting_times(self) -> np.ndarray:
        """Mean sojourn time per state; one step per visit in discrete time."""
        if self.is_discrete:
            return np.ones(self.n_states)
        with np.errstate(divide="ignore"):
            return 1.0 / self.off_diagonal.sum(axis=1)

    def generator(self) -> np.ndarray:
        """Transition matrix W with diagonal -sum of outgoing rates (continuous)."""
        w = self.off_diagonal
        np.fill_diagonal(w, -w.sum(axis=1))
        return w


@dataclass(frozen=True, eq=False)
class FluxField:
    """Non-negative edge fluxes ``phi[i, j]`` (i != j) plus optional loop fluxes."""

    phi: np.ndarray
    loops: np.ndarray | None = field(default=None)

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
            raise ValueError("phi must be square")
        np.fill_diagonal(phi, 0.0)
        if not (np.all(np.isfinite(phi)) and np.all(phi >= 0)):
            raise ValueError("fluxes must be finite and non-negative")
        object.__setattr__(self, "phi", _frozen(phi))
        if self.loops is not None:
            loops = np.asarray(self.loops, dtype=float)
            if loops.shape != (phi.shape[0],):
                raise ValueError("loops must have one entry per state")
            if not np.all(loops >= 0):
                raise ValueError("loop fluxes must be non-negative")
            object.__setattr__(self, "loops", _frozen(loops))

    @property
    def n_states(self) -> int:
        return self.phi.shape[0]

    def divergence(self) -> np.ndarray:
        """Net outflux per vertex, ``sum_j (phi[i, j] - phi[j, i])``."""
        return self.phi.sum(axis=1) - self.phi.sum(axis=0)

    def currents(self) -> np.ndarray:
        return self.phi - self.phi.T

    def check_node_condition(self, tol=LINEAR_TOL):
        div = np.abs(self.divergence())
        worst = int(np.argmax(div))
        if div[worst] > tol:
            raise NotSteadyStateError(worst, float(div[worst]))


def validate_process(p: MarkovProcess) -> list[str]:
    """Return every broken invariant as a readable message (1-based states)."""
    violations = []
    w = p.rates
    n = p.n_states
    if not np.all(np.isfinite(w)):
        violations.append("rates contain non-finite values")
    for i, j in zip(*np.nonzero(w < 0)):
        violations.append(f"edge {i + 1}->{j + 1}: negative rate {w[i, j]:g}")
    if p.is_discrete:
        if np.any(w > 1):
            for i, j in zip(*np.nonzero(w > 1)):
                violations.append(f"edge {i + 1}->{j + 1}: jump probability {w[i, j]:g} > 1")
        for i, s in enumerate(w.sum(axis=1)):
            if abs(s - 1.0) > LINEAR_TOL:
                violations.append(
                    f"state {i + 1}: jump probabilities sum to {s:.12g}, "
                    "normalization sum_j a[i,j] = 1 violated"
                )
    else:
        for i, s in enumerate(p.off_diagonal.sum(axis=1)):
            if not s > 0:
                violations.append(f"state {i + 1}: no outgoing positive rate (infinite waiting time)")
    if n > 1:
        n_comp, _ = connected_components(p.off_diagonal > 0, directed=True, connection="strong")
        if n_comp > 1:
            violations.append(f"not strongly connected ({n_comp} strongly connected components)")
    return violations


def require_valid(p: MarkovProcess):
    violations = validate_process(p)
    if violations:
        raise ValidationError("invalid Markov process: " + "; ".join(violations), violations)


def master_rhs(p: MarkovProcess, dist) -> np.ndarray:
    """Time derivative (or one-step change) of ``dist`` under the master equation."""
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (p.n_states,):
        raise ValueError(f"distribution must have length {p.n_states}")
    phi = dist[:, None] * p.off_diagonal
    return phi.sum(axis=0) - phi.sum(axis=1)


def stationary_distribution(p: MarkovProcess, tol=LINEAR_TOL) -> np.ndarray:
    """Unique normalized steady state of an irreducible process.

    Solves the balance system densely, with the normalization row replacing
    one redundant balance equation.
    """
    require_valid(p)
    n = p.n_states
    if n == 1:
        return _frozen([1.0])
    if p.is_discrete:
        m = p.rates.T - np.eye(n)
    else:
        m = p.generator().T
    m[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"steady-state solve failed: {exc}") from exc
    if np.any(pi < -tol):
        raise NumericalError("steady-state solve produced negative probabilities",
                             residual=float(-pi.min()))
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.max(np.abs(master_rhs(p, pi))))
    if residual > tol:
        raise NumericalError(f"steady-state residual {residual:.3e} exceeds {tol:g}", residual=residual)
    return _frozen(pi)


def fluxes(p: MarkovProcess, dist) -> FluxField:
    """Instantaneous fluxes ``dist[i] * rates[i, j]`` (loops included for discrete time)."""
    dist = np.asarray(dist, dtype=float)
    phi = dist[:, None] * p.off_diagonal
    loops = dist * np.diag(p.rates) if p.is_discrete else None
    return FluxField(phi, loops)


def steady_fluxes(p: MarkovProcess) -> FluxField:
    f = fluxes(p, stationary_distribution(p))
    f.check_node_condition()
    return f


def path_weight(p: MarkovProcess, path: Sequence[int]) -> float:
    """Product of rates along consecutive vertices of ``path``."""
    weight = 1.0
    for i, j in zip(path[:-1], path[1:]):
        w = p.rates[i, j] if i != j else 0.0
        if not w > 0:
            raise ZeroRateEdgeError(i, j)
        weight *= w
    return float(weight)


def is_detailed_balanced(p: MarkovProcess, tol=LOG_TOL) -> tuple[bool, float]:
    current = steady_fluxes(p).currents()
    worst = float(np.max(np.abs(current)))
    return worst <= tol, worst


def is_dynamically_reversible(p: MarkovProcess) -> bool:
    support = p.off_diagonal > 0
    return bool(np.array_equal(support, support.T))


def equilibrium_potential(p: MarkovProcess) -> tuple[np.ndarray, float]:
    """Potential U with U[0] = 0 and partition value Z for a detailed-balanced process.

    U is propagated along a BFS spanning tree from state 0; every non-tree
    edge is then used as an independent second path to check consistency.
    """
    balanced, worst = is_detailed_balanced(p)
    if not balanced:
        raise DetailedBalanceRequiredError(
            f"process is not detailed-balanced (max |current| = {worst:.3e})"
        )
    w = p.off_diagonal
    n = p.n_states
    u = np.full(n, np.nan)
    u[0] = 0.0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.nonzero(w[i] > 0)[0]:
            if np.isnan(u[j]):
                # p_j / p_i = w_ij / w_ji along the tree edge
                u[j] = u[i] - np.log(w[i, j] / w[j, i])
                queue.append(j)
    for i, j in zip(*np.nonzero(w > 0)):
        gap = abs((u[j] - u[i]) + np.log(w[i, j] / w[j, i]))
        if gap > LOG_TOL:
            raise InconsistencyError(
                f"path-ratio inconsistency {gap:.3e} on edge {i + 1}->{j + 1}"
            )
    z = float(np.exp(-u).sum())
    return _frozen(u), z


def dt_reconstruct(f: FluxField) -> tuple[MarkovProcess, np.ndarray]:
    """Recover a discrete-time chain and its steady state from fluxes with loops."""
    f.check_node_condition()
    loops = f.loops if f.loops is not None else np.zeros(f.n_states)
    joint = f.phi + np.diag(loops)
    pi = joint.sum(axis=1)
    empty = np.nonzero(~(pi > 0))[0]
    if empty.size:
        raise UnreachableStateError(
            f"state {empty[0] + 1} has zero total flux; cannot reconstruct its jump probabilities"
        )
    a = joint / pi[:, None]
    return MarkovProcess(a, DISCRETE), _frozen(pi)
