"""Kinetic Monte Carlo trajectories and empirical flux estimates."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _backend
from .markov import FluxField, MarkovProcess, require_valid

_BLOCK = 1 << 16


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    total_time: float
    seed: int
    n_states: int
    start: int = 0
    discrete: bool = False

    def __len__(self):
        return len(self.times)

    def holding_times(self) -> np.ndarray:
        """Time spent in each state over ``[0, total_time]``."""
        hold = np.zeros(self.n_states)
        if len(self.times) == 0:
            hold[self.start] = self.total_time
            return hold
        starts = np.concatenate(([0.0], self.times))
        ends = np.concatenate((self.times, [self.total_time]))
        states = np.concatenate(([self.start], self.dst))
        np.add.at(hold, states, ends - starts)
        return hold

    def occupation(self) -> np.ndarray:
        return self.holding_times() / self.total_time

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["time", "from", "to"])
            for t, i, j in zip(self.times.tolist(), self.src.tolist(), self.dst.tolist()):
                out.writerow([repr(t), i + 1, j + 1])


def _jump_table(p: MarkovProcess):
    """CSR rows of (target, cumulative rate); loops included for discrete time."""
    w = p.rates if p.is_discrete else p.off_diagonal
    offsets = [0]
    targets, cum = [], []
    for i in range(p.n_states):
        js = np.nonzero(w[i] > 0)[0]
        targets.extend(js.tolist())
        cum.extend(np.cumsum(w[i, js]).tolist())
        offsets.append(len(targets))
    return (np.array(offsets, dtype=np.int64), np.array(targets, dtype=np.int64),
            np.array(cum, dtype=np.float64))


def simulate(p: MarkovProcess, n_events: int | None = None, t_max: float | None = None,
             seed: int = 0, start: int = 0) -> Trajectory:
    """Gillespie trajectory until ``n_events`` jumps or time ``t_max``.

    Continuous time: exponential waiting times with the total exit rate, next
    state drawn proportional to its rate. Discrete time: unit steps, the jump
    (possibly a loop) drawn from the row of jump probabilities.
    With ``n_events`` the trajectory ends at the last jump.
    """
    require_valid(p)
    if (n_events is None) == (t_max is None):
        raise ValueError("give exactly one of n_events or t_max")
    offsets, targets, cum = _jump_table(p)
    rng = np.random.default_rng(seed)
    limit = np.inf if t_max is None else float(t_max)
    want = n_events if n_events is not None else None
    times, srcs, dsts = [], [], []
    state, time, done = int(start), 0.0, 0
    while True:
        k = _BLOCK if want is None else min(_BLOCK, want - done)
        if k <= 0:
            break
        exp_draws = rng.standard_exponential(k)
        uni_draws = rng.random(k)
        t_out = np.empty(k)
        s_out = np.empty(k, dtype=np.int64)
        d_out = np.empty(k, dtype=np.int64)
        got, state, time, hit = _backend.simulate_chunk(
            offsets, targets, cum, state, time, exp_draws, uni_draws,
            limit, p.is_discrete, t_out, s_out, d_out,
        )
        times.append(t_out[:got])
        srcs.append(s_out[:got])
        dsts.append(d_out[:got])
        done += got
        if hit:
            break
    times = np.concatenate(times) if times else np.empty(0)
    total = limit if t_max is not None else (float(times[-1]) if len(times) else 0.0)
    return Trajectory(times, np.concatenate(srcs) if srcs else np.empty(0, np.int64),
                      np.concatenate(dsts) if dsts else np.empty(0, np.int64),
                      total, seed, p.n_states, int(start), p.is_discrete)


def transition_counts(t: Trajectory) -> np.ndarray:
    counts = np.zeros((t.n_states, t.n_states))
    np.add.at(counts, (t.src, t.dst), 1.0)
    return counts


def empirical_fluxes(t: Trajectory) -> FluxField:
    """Jump counts per unit time (per step in discrete time)."""
    if not t.total_time > 0:
        raise ValueError("trajectory has no duration")
    counts = transition_counts(t) / t.total_time
    loops = np.diag(counts).copy() if t.discrete else None
    return FluxField(counts, loops)


def project_kirchhoff(f: FluxField) -> FluxField:
    """Smallest L2 change on the support of ``f`` that satisfies the node condition."""
    phi = f.phi
    edges = np.argwhere(phi > 0)
    if len(edges) == 0:
        return FluxField(phi.copy())
    n = f.n_states
    incidence = np.zeros((n, len(edges)))
    incidence[edges[:, 0], np.arange(len(edges))] += 1.0
    incidence[edges[:, 1], np.arange(len(edges))] -= 1.0
    values = phi[edges[:, 0], edges[:, 1]]
    correction = np.linalg.lstsq(incidence, incidence @ values, rcond=None)[0]
    projected = values - correction
    if np.any(projected < 0):
        raise ValueError("projection onto balanced fluxes produced negative values")
    out = np.zeros_like(phi)
    out[edges[:, 0], edges[:, 1]] = projected
    return FluxField(out, f.loops)
