"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

Same signatures and the same floating-point operation order for weights and
trajectories, so both backends agree bit for bit on those. The node-condition
diagnostic may differ in the last digits.
"""
import numpy as np


def _node_violation(work, esrc, edst, n):
    div = np.zeros(n)
    np.add.at(div, esrc, work)
    np.subtract.at(div, edst, work)
    return float(np.max(np.abs(div))) if n else 0.0


def decompose_batch(flux, cyc_edges, cyc_len, orders, esrc, edst, n, snap):
    n_orders, m = orders.shape
    weights = np.zeros((n_orders, m))
    violation = np.zeros(n_orders)
    residual = np.zeros(n_orders)
    cycles = [list(cyc_edges[c, : cyc_len[c]]) for c in range(cyc_edges.shape[0])]
    for r in range(n_orders):
        work = [float(v) for v in flux]
        worst = 0.0
        for c in orders[r]:
            edges = cycles[c]
            mk = min(work[e] for e in edges)
            if mk > 0:
                for e in edges:
                    work[e] -= mk
                    if work[e] <= snap:
                        work[e] = 0.0
            else:
                mk = 0.0
            weights[r, c] = mk
            worst = max(worst, _node_violation(np.array(work), esrc, edst, n))
        violation[r] = worst
        residual[r] = max(work) if work else 0.0
    return weights, violation, residual


def simulate_chunk(offsets, targets, cumrates, state, time, exp_draws, uni_draws,
                   t_max, unit_time, out_times, out_src, out_dst):
    offsets = offsets.tolist()
    targets = targets.tolist()
    cumrates = cumrates.tolist()
    exp_draws = exp_draws.tolist()
    uni_draws = uni_draws.tolist()
    for k in range(len(exp_draws)):
        lo = offsets[state]
        hi = offsets[state + 1] - 1
        total = cumrates[hi]
        dt = 1.0 if unit_time else exp_draws[k] / total
        if time + dt > t_max:
            return k, state, time, True
        time += dt
        u = uni_draws[k] * total
        while lo < hi:
            mid = (lo + hi) // 2
            if cumrates[mid] > u:
                hi = mid
            else:
                lo = mid + 1
        out_times[k] = time
        out_src[k] = state
        out_dst[k] = targets[lo]
        state = targets[lo]
    return len(exp_draws), state, time, False
