"""Cycle averages, flux averages and thermodynamic edge quantities.

Undefined edge quantities (affinities and electromotances on one-way edges,
resistances where no current flows) are NaN, with an explicit ``defined``
mask alongside, so any sum that touches them comes out NaN instead of a
silently wrong number.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .cycles import Cycle
from .decomposition import CycleDecomposition
from .errors import DivergentEntropyError, DomainError, InconsistencyError
from .markov import LINEAR_TOL, MarkovProcess, fluxes, stationary_distribution


@dataclass(frozen=True, eq=False)
class EdgeObservable:
    F: np.ndarray
    antisymmetric: bool = False

    def __post_init__(self):
        f = np.array(self.F, dtype=float)
        np.fill_diagonal(f, 0.0)
        if self.antisymmetric and not np.array_equal(f, -f.T):
            raise ValueError("observable flagged antisymmetric but F != -F.T")
        f.setflags(write=False)
        object.__setattr__(self, "F", f)

    @classmethod
    def passage(cls, n: int, i: int, j: int) -> "EdgeObservable":
        f = np.zeros((n, n))
        f[i, j] = 1.0
        return cls(f)


def cycle_average(d: CycleDecomposition, values: Mapping[Cycle, float]) -> float:
    """Weighted sum of per-cycle values over the cycles that carry weight."""
    total = 0.0
    for c, w in zip(d.catalog, d.weights):
        if w == 0:
            continue
        if c not in values:
            raise DomainError(f"no value given for cycle {c.label()}")
        total += w * values[c]
    return float(total)


def cycle_observable(F, c: Cycle) -> float:
    """Integral of an edge quantity along ``c``."""
    f = F.F if isinstance(F, EdgeObservable) else np.asarray(F, dtype=float)
    return float(sum(f[i, j] for i, j in c.edges))


def flux_average(p: MarkovProcess, F: EdgeObservable) -> float:
    """Steady-state flux of ``F``, ``sum_ij F[i, j] phi[i, j]``."""
    f = fluxes(p, stationary_distribution(p))
    j_f = float(np.sum(F.F * f.phi))
    if F.antisymmetric:
        half = 0.5 * float(np.sum(F.F * f.currents()))
        if abs(half - j_f) > LINEAR_TOL * max(1.0, abs(j_f)):
            raise InconsistencyError("antisymmetric flux average disagrees with current form")
    return j_f


@dataclass(frozen=True, eq=False)
class ThermoEdgeQuantities:
    """Electric/thermodynamic analogues of edge fluxes.

    ``A`` affinity, ``E`` electromotance, ``U`` voltage (potential difference),
    ``V`` potential, ``I`` current, ``R`` resistance with ``U + E = R I``.
    """

    p: np.ndarray
    phi: np.ndarray
    I: np.ndarray
    A: np.ndarray
    E: np.ndarray
    U: np.ndarray
    V: np.ndarray
    R: np.ndarray

    @property
    def reversible(self) -> np.ndarray:
        return np.isfinite(self.A)

    def edges(self):
        """Unordered pairs ``(i, j)``, i < j, with a transition in either direction."""
        support = (self.phi > 0) | (self.phi.T > 0)
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(np.triu(support, k=1)))]


def thermo_quantities(p: MarkovProcess, dist=None) -> ThermoEdgeQuantities:
    pi = stationary_distribution(p) if dist is None else np.asarray(dist, dtype=float)
    w = p.off_diagonal
    phi = pi[:, None] * w
    current = phi - phi.T
    both = (w > 0) & (w.T > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.log(pi)
        u = logp[:, None] - logp[None, :]
        a = np.where(both, np.log(phi) - np.log(phi.T), np.nan)
        e = np.where(both, np.log(w) - np.log(w.T), np.nan)
        scale = max(float(phi.max()), np.finfo(float).tiny)
        flowing = both & (np.abs(current) > LINEAR_TOL * scale)
        r = np.where(flowing, a / current, np.nan)
    np.fill_diagonal(u, 0.0)
    for arr in (a, e):
        np.fill_diagonal(arr, 0.0)
    return ThermoEdgeQuantities(pi, phi, current, a, e, u, -logp, r)


@dataclass(frozen=True)
class EntropyProduction:
    P_tot: float
    P_sys: float
    P_med: float


def _check_divergence(w, phi):
    one_way = (w > 0) & ~(w.T > 0) & (phi > 0)
    if np.any(one_way):
        i, j = (int(k) for k in np.argwhere(one_way)[0])
        raise DivergentEntropyError(i, j)


def entropy_production(p: MarkovProcess, dist="steady") -> EntropyProduction:
    """Total, system and medium entropy production rates (nats per unit time).

    At a distribution with empty states the system term is +inf.
    """
    if isinstance(dist, str):
        if dist != "steady":
            raise ValueError("dist must be a distribution or 'steady'")
        pi = stationary_distribution(p)
    else:
        pi = np.asarray(dist, dtype=float)
    w = p.off_diagonal
    phi = pi[:, None] * w
    _check_divergence(w, phi)
    current = phi - phi.T
    active = current != 0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.log(phi) - np.log(phi.T)
        u = np.log(pi)[:, None] - np.log(pi)[None, :]
        e = np.log(w) - np.log(w.T)
    p_tot = 0.5 * float(np.sum(np.where(active, a * current, 0.0)))
    p_sys = 0.5 * float(np.sum(np.where(active, u * current, 0.0)))
    p_med = 0.5 * float(np.sum(np.where(active, e * current, 0.0)))
    return EntropyProduction(p_tot, p_sys, p_med)


def gibbs_entropy(dist) -> float:
    pi = np.asarray(dist, dtype=float)
    nz = pi[pi > 0]
    return float(-np.sum(nz * np.log(nz)))


def entropy_production_cycles(d: CycleDecomposition, p: MarkovProcess) -> float:
    """Steady-state entropy production as the weighted sum of cycle affinities."""
    pi = stationary_distribution(p)
    w = p.off_diagonal
    phi = pi[:, None] * w
    _check_divergence(w, phi)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.log(phi) - np.log(phi.T)
    total = 0.0
    for c, m in zip(d.catalog, d.weights):
        if m > 0:
            total += m * cycle_observable(a, c)
    return float(total)


def series_resistance(p: MarkovProcess, i: int, j: int, k: int) -> tuple[float, float]:
    """Compare the two-step element i -> j -> k with its edges in series.

    The element is the composite transition "jump to j, then leave j towards
    k", with effective rates ``w[i, j] * w[j, k] / out(j)`` and the reverse
    analogue. Returns ``(R_element, R_ij + R_jk)``.

    When j has no neighbours besides i and k (any 3-state chain), the element
    current equals the edge current because
    ``phi_ij phi_jk - phi_kj phi_ji = I p_j out(j)``, so the two numbers agree
    to rounding.
    """
    t = thermo_quantities(p)
    w = p.off_diagonal
    out = w.sum(axis=1)
    fwd = t.p[i] * w[i, j] * w[j, k] / out[j]
    bwd = t.p[k] * w[k, j] * w[j, i] / out[j]
    element = (np.log(fwd) - np.log(bwd)) / (fwd - bwd)
    return float(element), float(t.R[i, j] + t.R[j, k])
