# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Keep in lockstep with ``_kernels_py.py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef double _node_violation(const double[::1] work, const cnp.int64_t[::1] esrc,
                            const cnp.int64_t[::1] edst, double[::1] div) noexcept nogil:
    cdef Py_ssize_t e, v
    cdef double worst = 0.0, d
    for v in range(div.shape[0]):
        div[v] = 0.0
    for e in range(work.shape[0]):
        div[esrc[e]] += work[e]
        div[edst[e]] -= work[e]
    for v in range(div.shape[0]):
        d = div[v] if div[v] >= 0 else -div[v]
        if d > worst:
            worst = d
    return worst


def decompose_batch(const double[::1] flux, const cnp.int64_t[:, ::1] cyc_edges,
                    const cnp.int64_t[::1] cyc_len, const cnp.int64_t[:, ::1] orders,
                    const cnp.int64_t[::1] esrc, const cnp.int64_t[::1] edst,
                    Py_ssize_t n, double snap):
    """Run the min-and-subtract iteration once per row of ``orders``.

    Returns weights indexed by catalog position, the worst node-condition
    violation seen after any step, and the largest residual edge flux.
    """
    cdef Py_ssize_t n_orders = orders.shape[0], m = orders.shape[1]
    cdef Py_ssize_t n_edges = flux.shape[0]
    weights_arr = np.zeros((n_orders, m), dtype=np.float64)
    violation_arr = np.zeros(n_orders, dtype=np.float64)
    residual_arr = np.zeros(n_orders, dtype=np.float64)
    cdef double[:, ::1] weights = weights_arr
    cdef double[::1] violation = violation_arr
    cdef double[::1] residual = residual_arr
    cdef double[::1] work = np.empty(n_edges, dtype=np.float64)
    cdef double[::1] div = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t r, k, c, t, e
    cdef double mk, v, worst
    with nogil:
        for r in range(n_orders):
            for e in range(n_edges):
                work[e] = flux[e]
            worst = 0.0
            for k in range(m):
                c = orders[r, k]
                mk = work[cyc_edges[c, 0]]
                for t in range(1, cyc_len[c]):
                    v = work[cyc_edges[c, t]]
                    if v < mk:
                        mk = v
                if mk > 0:
                    for t in range(cyc_len[c]):
                        e = cyc_edges[c, t]
                        work[e] -= mk
                        if work[e] <= snap:
                            work[e] = 0.0
                else:
                    mk = 0.0
                weights[r, c] = mk
                v = _node_violation(work, esrc, edst, div)
                if v > worst:
                    worst = v
            violation[r] = worst
            v = 0.0
            for e in range(n_edges):
                if work[e] > v:
                    v = work[e]
            residual[r] = v
    return weights_arr, violation_arr, residual_arr


def simulate_chunk(const cnp.int64_t[::1] offsets, const cnp.int64_t[::1] targets,
                   const double[::1] cumrates, Py_ssize_t state, double time,
                   const double[::1] exp_draws, const double[::1] uni_draws,
                   double t_max, bint unit_time,
                   double[::1] out_times, cnp.int64_t[::1] out_src,
                   cnp.int64_t[::1] out_dst):
    """Advance a jump process through one block of pre-drawn random numbers.

    Returns ``(n_events, state, time, hit_t_max)``.
    """
    cdef Py_ssize_t k = 0, lo, hi, mid, n_draws = exp_draws.shape[0]
    cdef double total, dt, u
    cdef bint hit = False
    with nogil:
        while k < n_draws:
            lo = offsets[state]
            hi = offsets[state + 1] - 1
            total = cumrates[hi]
            dt = 1.0 if unit_time else exp_draws[k] / total
            if time + dt > t_max:
                hit = True
                break
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
            k += 1
    return k, state, time, hit
