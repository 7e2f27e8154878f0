# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled selection kernels.

Scalar mirror of ``_pykernels``: every floating-point expression tree and
accumulation order matches the NumPy fallback exactly, so both backends
produce bit-identical gains and identical selections. Compile without
-ffast-math or -march=native; reassociation or FMA contraction would break
that contract.
"""

import numpy as np

NAME = "cython"


cdef double _pair_div(Py_ssize_t size) noexcept:
    cdef long long p = <long long> size * (size - 1) // 2
    if p < 1:
        p = 1
    return <double> p


def greedy(double[::1] rbar, double[:, ::1] wbar, Py_ssize_t k, bint normalize):
    """k greedy picks by marginal gain over pre-scaled relevance/weights."""
    cdef Py_ssize_t n = rbar.shape[0]
    cdef Py_ssize_t s, c, best
    cdef double rel_sum = 0.0, pair_sum = 0.0
    cdef double base, gain, best_gain, size_new, pd_new
    cdef long evals = 0
    sel_arr = np.zeros(n, dtype=np.uint8)
    div_arr = np.zeros(n, dtype=np.float64)
    cdef unsigned char[::1] selected = sel_arr
    cdef double[::1] divsum = div_arr
    picks = []
    for s in range(k):
        if normalize:
            if s == 0:
                base = 0.0
            else:
                base = rel_sum / s + pair_sum / _pair_div(s)
            size_new = <double> (s + 1)
            pd_new = _pair_div(s + 1)
        best = -1
        best_gain = 0.0
        for c in range(n):
            if selected[c]:
                continue
            if normalize:
                gain = (rel_sum + rbar[c]) / size_new + (pair_sum + divsum[c]) / pd_new - base
            else:
                gain = rbar[c] + divsum[c]
            if best < 0 or gain > best_gain:
                best_gain = gain
                best = c
        evals += n - s
        selected[best] = 1
        picks.append(best)
        rel_sum = rel_sum + rbar[best]
        pair_sum = pair_sum + divsum[best]
        for c in range(n):
            divsum[c] = divsum[c] + wbar[c, best]
    return picks, evals


def local_search(double[::1] rbar, double[:, ::1] wbar, Py_ssize_t k,
                 init, long max_passes, bint normalize):
    """Best-improvement single-swap search from an initial selection."""
    cdef Py_ssize_t n = rbar.shape[0]
    sel = sorted(init)
    cdef Py_ssize_t m = len(sel)
    sel_arr = np.asarray(sel, dtype=np.int64)
    cdef long long[::1] sel_v = sel_arr
    in_arr = np.zeros(n, dtype=np.uint8)
    tot_arr = np.zeros(n, dtype=np.float64)
    cdef unsigned char[::1] in_set = in_arr
    cdef double[::1] totals = tot_arr
    cdef Py_ssize_t a, b, c, u, v, ui
    cdef double rel_sum = 0.0, pair_sum = 0.0
    for a in range(m):
        in_set[sel_v[a]] = 1
    for a in range(m):
        u = sel_v[a]
        for c in range(n):
            totals[c] = totals[c] + wbar[c, u]
    for a in range(m):
        rel_sum = rel_sum + rbar[sel_v[a]]
    for a in range(m):
        for b in range(a + 1, m):
            pair_sum = pair_sum + wbar[sel_v[a], sel_v[b]]
    cdef double pd = _pair_div(m)
    cdef double size = <double> m

    cdef long passes = 0
    cdef long evals = 0
    cdef double best_gain, gain, current, r_u, t_u, new_rel, new_pair
    cdef Py_ssize_t best_u, best_v
    current = 0.0
    while passes < max_passes:
        passes += 1
        best_gain = 0.0
        best_u = -1
        best_v = -1
        if normalize:
            current = rel_sum / size + pair_sum / pd
        for ui in range(m):
            u = sel_v[ui]
            r_u = rbar[u]
            t_u = totals[u]
            for v in range(n):
                if in_set[v]:
                    continue
                if normalize:
                    new_rel = (rel_sum + rbar[v]) - r_u
                    new_pair = pair_sum + ((totals[v] - wbar[v, u]) - t_u)
                    gain = (new_rel / size + new_pair / pd) - current
                else:
                    gain = (rbar[v] - r_u) + ((totals[v] - wbar[v, u]) - t_u)
                if gain > best_gain:
                    best_gain = gain
                    best_u = u
                    best_v = v
            evals += n - m
        if best_u < 0:
            break
        rel_sum = (rel_sum + rbar[best_v]) - rbar[best_u]
        pair_sum = pair_sum + ((totals[best_v] - wbar[best_v, best_u]) - totals[best_u])
        for c in range(n):
            totals[c] = (totals[c] + wbar[c, best_v]) - wbar[c, best_u]
        in_set[best_u] = 0
        in_set[best_v] = 1
        for a in range(m):
            if sel_v[a] == best_u:
                sel_v[a] = best_v
                break
        sel_arr.sort()
    return [int(i) for i in sel_arr], passes, evals


def qp_ascent(double[::1] rbar, double[:, ::1] wbar, double[::1] x0,
              long steps, double step_size, project):
    """Projected gradient ascent; ``project`` is the shared Python projector."""
    cdef Py_ssize_t n = rbar.shape[0]
    cdef Py_ssize_t i, j
    cdef long step
    x_arr = np.array(x0, dtype=np.float64)
    grad_arr = np.empty(n, dtype=np.float64)
    raw_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] grad = grad_arr
    cdef double[::1] raw = raw_arr
    cdef double acc
    for step in range(steps):
        for i in range(n):
            acc = rbar[i]
            for j in range(n):
                acc = acc + wbar[i, j] * x[j]
            grad[i] = acc
        for i in range(n):
            raw[i] = x[i] + step_size * grad[i]
        new_arr = np.asarray(project(raw_arr.copy()), dtype=np.float64)
        if np.array_equal(new_arr, x_arr):
            break  # bitwise fixed point; every further iterate is identical
        x_arr = new_arr
        x = x_arr
    return x_arr
