"""Compare the compiled and pure-Python kernels on identical inputs.

Output equality is checked in tests/test_backends.py.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import itertools
import time

import numpy as np

from nesscycles import _kernels_py
from nesscycles.cycles import enumerate_cycles
from nesscycles.decomposition import _Problem
from nesscycles.markov import MarkovProcess, steady_fluxes
from nesscycles.simulator import _jump_table
from nesscycles.tasep import build_tasep

try:
    from nesscycles import _kernels as compiled
except ImportError:
    compiled = None


def ring_with_chords(n=6, seed=0):
    rng = np.random.default_rng(seed)
    w = np.zeros((n, n))
    for i in range(n):
        w[i, (i + 1) % n] = rng.uniform(1, 2)
        w[(i + 1) % n, i] = rng.uniform(0.1, 0.5)
    w[0, 3] = w[3, 0] = 1.0
    return MarkovProcess(w)


def decompose_inputs(max_orderings=40320):
    f = steady_fluxes(ring_with_chords())
    problem = _Problem(f, enumerate_cycles(f))
    m = len(problem.catalog)
    perms = itertools.islice(itertools.permutations(range(m)), max_orderings)
    orders = np.array(list(perms), dtype=np.int64)
    return (problem.flux, problem.cyc_edges, problem.cyc_len, orders,
            problem.esrc, problem.edst, problem.n, problem.snap), m


def simulate_inputs(k=200_000):
    offsets, targets, cum = _jump_table(build_tasep(2.0))
    rng = np.random.default_rng(1)
    return offsets, targets, cum, rng.standard_exponential(k), rng.random(k)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if compiled is None:
        print("compiled kernels not built; only the Python timings are shown")

    dec_args, m = decompose_inputs()
    offsets, targets, cum, exp_draws, uni_draws = simulate_inputs()
    k = len(exp_draws)

    def run_sim(mod):
        out = (np.empty(k), np.empty(k, dtype=np.int64), np.empty(k, dtype=np.int64))
        return mod.simulate_chunk(offsets, targets, cum, 0, 0.0, exp_draws, uni_draws,
                                  np.inf, False, *out)

    cases = [
        (f"decompose_batch ({len(dec_args[3])} orderings, M={m})",
         lambda mod: mod.decompose_batch(*dec_args)),
        (f"simulate_chunk ({k} events)", run_sim),
    ]
    print(f"{'kernel':<44}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, call in cases:
        t_py = best_of(lambda: call(_kernels_py), args.repeat)
        if compiled is None:
            print(f"{name:<44}{t_py:>12.4f}{'-':>12}{'-':>10}")
            continue
        t_c = best_of(lambda: call(compiled), args.repeat)
        print(f"{name:<44}{t_py:>12.4f}{t_c:>12.4f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
