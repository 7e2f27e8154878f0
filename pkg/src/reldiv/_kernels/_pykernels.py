"""NumPy fallback for the selection kernels.

Mirrors ``_ckernels.pyx`` expression by expression. Both backends must keep
the same floating-point expression trees and accumulation orders (vectorized
elementwise ops here correspond to scalar left-to-right loops there), so that
a given instance produces bit-identical gains, and therefore identical
selections, on either backend. Tie-breaking is "first candidate in ascending
index order wins", implemented with strict ``>`` comparisons (``np.argmax``
returns the first maximum).
"""

import numpy as np

NAME = "python"


def _pair_div(size: int) -> float:
    return float(max(1, size * (size - 1) // 2))


def greedy(rbar: np.ndarray, wbar: np.ndarray, k: int, normalize: bool):
    """k greedy picks by marginal gain over pre-scaled relevance/weights.

    rbar = alpha * relevance, wbar = (1 - alpha) * weights, diagonal zero.
    Returns (picks in selection order, candidate evaluations).
    """
    n = rbar.shape[0]
    selected = np.zeros(n, dtype=bool)
    divsum = np.zeros(n)
    picks = []
    rel_sum = 0.0
    pair_sum = 0.0
    evals = 0
    for s in range(k):
        if normalize:
            if s == 0:
                base = 0.0
            else:
                base = rel_sum / s + pair_sum / _pair_div(s)
            size_new = float(s + 1)
            gains = (rel_sum + rbar) / size_new + (pair_sum + divsum) / _pair_div(s + 1) - base
        else:
            gains = rbar + divsum
        gains[selected] = -np.inf
        best = int(np.argmax(gains))
        evals += n - s
        selected[best] = True
        picks.append(best)
        rel_sum = rel_sum + rbar[best]
        pair_sum = pair_sum + divsum[best]
        divsum = divsum + wbar[:, best]
    return picks, evals


def local_search(
    rbar: np.ndarray,
    wbar: np.ndarray,
    k: int,
    init: list[int],
    max_passes: int,
    normalize: bool,
):
    """Best-improvement single-swap search from an initial selection.

    One swap per pass; terminates at a local optimum or after max_passes.
    Returns (selected ascending, passes, swap evaluations).
    """
    n = rbar.shape[0]
    sel = sorted(init)
    in_set = np.zeros(n, dtype=bool)
    in_set[sel] = True
    totals = np.zeros(n)
    for s in sel:
        totals = totals + wbar[:, s]
    rel_sum = 0.0
    for s in sel:
        rel_sum = rel_sum + float(rbar[s])
    pair_sum = 0.0
    for a in range(len(sel)):
        for b in range(a + 1, len(sel)):
            pair_sum = pair_sum + float(wbar[sel[a], sel[b]])
    pd = _pair_div(len(sel))
    size = float(len(sel))

    passes = 0
    evals = 0
    while passes < max_passes:
        passes += 1
        best_gain = 0.0
        best_u = -1
        best_v = -1
        if normalize:
            current = rel_sum / size + pair_sum / pd
        for u in sel:
            r_u = float(rbar[u])
            t_u = float(totals[u])
            if normalize:
                new_rel = (rel_sum + rbar) - r_u
                new_pair = pair_sum + ((totals - wbar[:, u]) - t_u)
                gains = (new_rel / size + new_pair / pd) - current
            else:
                gains = (rbar - r_u) + ((totals - wbar[:, u]) - t_u)
            gains[in_set] = -np.inf
            v = int(np.argmax(gains))
            evals += n - len(sel)
            gain = float(gains[v])
            if gain > best_gain:
                best_gain = gain
                best_u = u
                best_v = v
        if best_u < 0:
            break
        rel_sum = (rel_sum + float(rbar[best_v])) - float(rbar[best_u])
        pair_sum = pair_sum + (
            (float(totals[best_v]) - float(wbar[best_v, best_u])) - float(totals[best_u])
        )
        totals = (totals + wbar[:, best_v]) - wbar[:, best_u]
        in_set[best_u] = False
        in_set[best_v] = True
        sel.remove(best_u)
        sel.append(best_v)
        sel.sort()
    return sel, passes, evals


def qp_ascent(
    rbar: np.ndarray,
    wbar: np.ndarray,
    x0: np.ndarray,
    steps: int,
    step_size: float,
    project,
):
    """Projected gradient ascent on alpha*r.x + (1-alpha)*sum_{i<j} W_ij x_i x_j.

    The gradient is rbar + wbar @ x with the matvec accumulated column by
    column; ``project`` maps the raw step back onto the capped simplex.
    """
    x = np.array(x0, dtype=np.float64)
    n = x.shape[0]
    for _ in range(steps):
        grad = rbar.copy()
        for j in range(n):
            grad += wbar[:, j] * x[j]
        x_new = project(x + step_size * grad)
        if np.array_equal(x_new, x):
            break  # bitwise fixed point; every further iterate is identical
        x = x_new
    return x
