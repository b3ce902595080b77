"""Two particles on a four-site periodic ring with one modified bond.

Particles hop one site to the right at rate 1, except across the boundary
bond (site 4 -> site 1), where the rate is ``x``. States are numbered as in
the configuration table below (0-based internally).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cycles import Cycle, CycleCatalog
from .decomposition import CycleDecomposition, decompose
from .markov import FluxField, MarkovProcess

# occupied sites (1-based) of each state
CONFIGURATIONS = (
    (1, 3),  # 1: ●○●○
    (2, 3),  # 2: ○●●○
    (1, 4),  # 3: ●○○●
    (1, 2),  # 4: ●●○○
    (3, 4),  # 5: ○○●●
    (2, 4),  # 6: ○●○●
)
N_SITES = 4

ALPHA = Cycle((0, 2, 5, 3))  # 1→3→6→4, gait 1f
BETA = Cycle((0, 1, 5, 4))   # 1→2→6→5, gait 1b
GAMMA = Cycle((0, 2, 5, 4))  # 1→3→6→5, gait 2f
DELTA = Cycle((0, 1, 5, 3))  # 1→2→6→4, gait 2b
NAMED_CYCLES = {"alpha": ALPHA, "beta": BETA, "gamma": GAMMA, "delta": DELTA}
GAITS = {"alpha": "1f", "beta": "1b", "gamma": "2f", "delta": "2b"}
_NAMES = {c: name for name, c in NAMED_CYCLES.items()}


def cycle_name(c: Cycle) -> str:
    return _NAMES.get(c, c.label())


def config_string(state: int) -> str:
    occ = CONFIGURATIONS[state]
    return "".join("●" if s in occ else "○" for s in range(1, N_SITES + 1))


@dataclass(frozen=True)
class TasepConfig:
    x: float

    def __post_init__(self):
        if not self.x > 0:
            raise ValueError(f"boundary rate x must be positive, got {self.x}")


def _hops(occupied):
    """Yield ``(new_occupied, crosses_boundary)`` for every allowed hop."""
    occ = set(occupied)
    for s in sorted(occ):
        t = s % N_SITES + 1
        if t not in occ:
            yield tuple(sorted(occ - {s} | {t})), s == N_SITES


def build_tasep(c: TasepConfig | float) -> MarkovProcess:
    x = c.x if isinstance(c, TasepConfig) else TasepConfig(float(c)).x
    index = {cfg: k for k, cfg in enumerate(CONFIGURATIONS)}
    rates = np.zeros((len(CONFIGURATIONS), len(CONFIGURATIONS)))
    for i, cfg in enumerate(CONFIGURATIONS):
        for new, boundary in _hops(cfg):
            rates[i, index[new]] = x if boundary else 1.0
    return MarkovProcess(rates)


def normalization(x: float) -> float:
    return 2 + 5 * x + 5 * x * x


def tasep_analytic(c: TasepConfig | float) -> tuple[np.ndarray, FluxField]:
    """Closed-form steady state and fluxes."""
    x = c.x if isinstance(c, TasepConfig) else TasepConfig(float(c)).x
    cx = normalization(x)
    p = np.array([x * (1 + x), x * (1 + x), x * (1 + x), 2 * x * x, 2, 2 * x]) / cx
    pref = x / cx
    inner, fast, slow = pref * (1 + x), pref * (2 * x), pref * 2
    phi = np.zeros((6, 6))
    for i, j in ((0, 1), (1, 5), (0, 2), (2, 5)):
        phi[i, j] = inner
    phi[5, 3] = phi[3, 0] = fast
    phi[5, 4] = phi[4, 0] = slow
    return p, FluxField(phi)


def catalog() -> CycleCatalog:
    """The four cycles in default (length, vertex-sequence) order."""
    return CycleCatalog(sorted(NAMED_CYCLES.values(), key=lambda c: c.sort_key))


def pinned_ordering(pinned: Cycle, cat: CycleCatalog | None = None) -> list[int]:
    cat = cat if cat is not None else catalog()
    first = cat.index(pinned)
    return [first] + [k for k in range(len(cat)) if k != first]


def pinned_decomposition(x: float, pinned: Cycle = ALPHA) -> CycleDecomposition:
    _, f = tasep_analytic(x)
    cat = catalog()
    return decompose(f, cat, pinned_ordering(pinned, cat))


def support_tag(d: CycleDecomposition) -> str:
    names = sorted(cycle_name(c) for c in d.support)
    return "+".join(names)


@dataclass(frozen=True)
class SweepRow:
    x: float
    raw: dict
    scaled: dict
    support_tag: str


def tasep_sweep(x_values: Sequence[float], pinned: Cycle = ALPHA) -> list[SweepRow]:
    """Decompose the analytic fluxes at each ``x`` with ``pinned`` visited first.

    Scaled weights are divided by the common factor x / C(x).
    """
    rows = []
    for x in x_values:
        d = pinned_decomposition(x, pinned)
        pref = x / normalization(x)
        raw = {name: d.weight(c) for name, c in NAMED_CYCLES.items()}
        scaled = {name: w / pref for name, w in raw.items()}
        rows.append(SweepRow(float(x), raw, scaled, support_tag(d)))
    return rows


@dataclass(frozen=True)
class Kink:
    x0: float
    left_slope: float
    right_slope: float

    @property
    def discontinuity(self) -> float:
        return self.left_slope - self.right_slope


def kink_slopes(pinned: Cycle = ALPHA, x0: float = 1.0, h: float = 1e-4) -> Kink:
    """One-sided finite-difference slopes of the pinned cycle's scaled weight at ``x0``."""
    def scaled(x):
        return pinned_decomposition(x, pinned).weight(pinned) / (x / normalization(x))

    mid = scaled(x0)
    return Kink(x0, (mid - scaled(x0 - h)) / h, (scaled(x0 + h) - mid) / h)


def follow_cycle(cycle: Cycle, start_state: int = 0, labels=("A", "B")):
    """Move labelled particles around ``cycle`` starting at ``start_state``.

    Returns the labelled configuration (site -> label) after one traversal.
    """
    vs = cycle.vertices
    k = vs.index(start_state)
    path = vs[k:] + vs[:k] + (start_state,)
    occ = dict(zip(CONFIGURATIONS[start_state], labels))
    for a, b in zip(path[:-1], path[1:]):
        src = set(CONFIGURATIONS[a]) - set(CONFIGURATIONS[b])
        dst = set(CONFIGURATIONS[b]) - set(CONFIGURATIONS[a])
        if len(src) != 1 or len(dst) != 1:
            raise ValueError(f"{a + 1}->{b + 1} is not a single-particle hop")
        s, t = src.pop(), dst.pop()
        occ[t] = occ.pop(s)
    return occ
