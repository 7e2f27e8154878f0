"""Fixed-size subset selection maximizing the relevance-diversity objective.

Four strategies: exhaustive enumeration (small candidate pools), greedy
marginal gain, greedy plus best-improvement swap search, and a continuous
relaxation solved by projected gradient ascent and rounded to the top-k
coordinates.

Determinism rules shared by all solvers:
  * ties break to the lowest original candidate index (for exhaustive
    search, to the lexicographically smallest index list);
  * the reported objective_value is recomputed through
    :func:`reldiv.similarity.objective` on the selected tokens, so it is
    bit-identical to any later recomputation.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .errors import EmptyInput, TooLarge
from .similarity import (
    ObjectiveParams,
    combine_terms,
    objective,
    relevance_vector,
    weight_matrix,
)
from .token_model import Query, Token

DEFAULT_EXACT_LIMIT = 20


class Solver(Enum):
    EXACT = "exact"
    GREEDY = "greedy"
    LOCAL_SEARCH = "local"
    QP_RELAX = "qp"


@dataclass(frozen=True)
class SelectionConfig:
    """Subset size, objective parameters, and solver tuning knobs."""

    k: int
    params: ObjectiveParams = field(default_factory=lambda: ObjectiveParams(alpha=0.9))
    solver: Solver = Solver.LOCAL_SEARCH
    max_passes: int = 100
    qp_steps: int = 500
    qp_step_size: float = 0.05
    seed: int = 0  # reserved; all current solvers are deterministic
    exact_limit: int = DEFAULT_EXACT_LIMIT

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")
        if self.qp_steps < 1:
            raise ValueError("qp_steps must be at least 1")
        if self.qp_step_size <= 0:
            raise ValueError("qp_step_size must be positive")
        if self.exact_limit < 1:
            raise ValueError("exact_limit must be at least 1")


@dataclass(frozen=True)
class SolverStats:
    evaluations: int
    passes: int
    k_clamped: bool = False


@dataclass(frozen=True)
class SelectionResult:
    """Selected candidate positions (ascending) plus diagnostics."""

    indices: tuple[int, ...]
    objective_value: float
    per_token_relevance: tuple[float, ...]
    solver_stats: SolverStats


def _check_nonempty(tokens):
    if not tokens:
        raise EmptyInput("selection requires at least one candidate token")


def _finish(tokens, query, params, picked, evaluations, passes, k_clamped) -> SelectionResult:
    indices = tuple(sorted(picked))
    subset = [tokens[i] for i in indices]
    value = objective(subset, query, params)
    r = relevance_vector(subset, query)
    stats = SolverStats(evaluations=evaluations, passes=passes, k_clamped=k_clamped)
    return SelectionResult(
        indices=indices,
        objective_value=value,
        per_token_relevance=tuple(float(v) for v in r),
        solver_stats=stats,
    )


def _scaled_arrays(tokens, query, params):
    """Pre-scaled (alpha * r, (1-alpha) * W) consumed by the kernels."""
    r = relevance_vector(tokens, query)
    w = weight_matrix(tokens, params)
    rbar = params.alpha * r
    wbar = (1.0 - params.alpha) * w
    return np.ascontiguousarray(rbar), np.ascontiguousarray(wbar)


def _lex_combinations(n: int, k: int):
    """All k-subsets of range(n) in lexicographic order (own odometer; the
    test oracle enumerates independently via itertools)."""
    idx = list(range(k))
    while True:
        yield idx
        # advance the rightmost index that can still move
        i = k - 1
        while i >= 0 and idx[i] == n - k + i:
            i -= 1
        if i < 0:
            return
        idx[i] += 1
        for j in range(i + 1, k):
            idx[j] = idx[j - 1] + 1


def select_exact(tokens: list[Token], query: Query, cfg: SelectionConfig) -> SelectionResult:
    """Enumerate every k-subset and return the maximum objective.

    Subset values use the same exactly rounded sums as
    :func:`reldiv.similarity.objective`, so the winner matches a brute-force
    enumeration over ``objective`` bit for bit. Only permitted for candidate
    pools up to ``cfg.exact_limit``.
    """
    _check_nonempty(tokens)
    n = len(tokens)
    if n > cfg.exact_limit:
        raise TooLarge(f"{n} candidates exceed exact_limit={cfg.exact_limit}")
    k = min(cfg.k, n)
    r = relevance_vector(tokens, query)
    w = weight_matrix(tokens, cfg.params)
    best_idx = None
    best_val = -math.inf
    evaluations = 0
    for combo in _lex_combinations(n, k):
        rel_sum = math.fsum(float(r[i]) for i in combo)
        pair_sum = math.fsum(
            float(w[combo[a], combo[b]]) for a in range(k) for b in range(a + 1, k)
        )
        val = combine_terms(rel_sum, pair_sum, k, cfg.params)
        evaluations += 1
        if best_idx is None or val > best_val:
            best_val = val
            best_idx = list(combo)
    return _finish(tokens, query, cfg.params, best_idx, evaluations, 1, cfg.k > n)


def select_greedy(tokens: list[Token], query: Query, cfg: SelectionConfig) -> SelectionResult:
    """Add the candidate with maximal marginal gain, k times.

    The first pick's gain is the weighted relevance alone (the diversity
    term of a singleton is zero).
    """
    _check_nonempty(tokens)
    n = len(tokens)
    k = min(cfg.k, n)
    rbar, wbar = _scaled_arrays(tokens, query, cfg.params)
    picks, evals = _kernels.active().greedy(rbar, wbar, k, cfg.params.normalize_terms)
    return _finish(tokens, query, cfg.params, picks, evals, 1, cfg.k > n)


def select_local_search(tokens: list[Token], query: Query, cfg: SelectionConfig) -> SelectionResult:
    """Best-improvement swap search: apply the best strictly improving
    (in, out) single swap once per pass until a local optimum or max_passes.

    Runs two descents, one from the greedy selection and one from the rounded
    QP relaxation, and keeps the better local optimum (the greedy start on
    ties, so instances where greedy is already optimal report passes=1). A
    single greedy start strands the search on plateau-heavy instances where
    many pair similarities clamp to epsilon; the relaxation start recovers
    those while keeping the result deterministic.
    """
    _check_nonempty(tokens)
    n = len(tokens)
    k = min(cfg.k, n)
    rbar, wbar = _scaled_arrays(tokens, query, cfg.params)
    kern = _kernels.active()
    normalize = cfg.params.normalize_terms
    picks, greedy_evals = kern.greedy(rbar, wbar, k, normalize)
    sel_a, passes_a, evals_a = kern.local_search(
        rbar, wbar, k, picks, cfg.max_passes, normalize
    )
    qp_init = _qp_round_indices(rbar, wbar, k, cfg)
    sel_b, passes_b, evals_b = kern.local_search(
        rbar, wbar, k, qp_init, cfg.max_passes, normalize
    )
    val_a = objective([tokens[i] for i in sorted(sel_a)], query, cfg.params)
    val_b = objective([tokens[i] for i in sorted(sel_b)], query, cfg.params)
    sel, passes = (sel_a, passes_a) if val_a >= val_b else (sel_b, passes_b)
    evaluations = greedy_evals + evals_a + cfg.qp_steps + evals_b
    return _finish(tokens, query, cfg.params, sel, evaluations, passes, cfg.k > n)


def project_capped_simplex(v: np.ndarray, k: int) -> np.ndarray:
    """Euclidean projection onto {x : 0 <= x <= 1, sum(x) = k}.

    Water-filling on the shift tau in x = clip(v - tau, 0, 1): the coordinate
    sum s(tau) is piecewise linear and non-increasing, so the exact crossing
    s(tau) = k is solved on the breakpoint segment that brackets it. One
    shared implementation serves both kernel backends.
    """
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[0]
    if k >= n:
        return np.ones(n)
    if k <= 0:
        return np.zeros(n)
    vs = np.sort(v)
    csum = np.concatenate(([0.0], np.cumsum(vs)))
    # s changes slope where a coordinate hits its cap (v_i - 1) or its floor (v_i)
    bp = np.sort(np.concatenate((vs - 1.0, vs)))
    i_hi = np.searchsorted(vs, bp + 1.0, side="left")  # v_i >= b+1 are capped
    i_lo = np.searchsorted(vs, bp, side="right")  # v_i <= b are floored
    s = (n - i_hi) + (csum[i_hi] - csum[i_lo]) - bp * (i_hi - i_lo)
    # rightmost breakpoint with s >= k; s(bp[0]) = n >= k and s(bp[-1]) = 0 < k
    j = int(np.nonzero(s >= k)[0][-1])
    den = s[j] - s[j + 1]
    if den > 0:
        tau = bp[j] + (s[j] - k) * (bp[j + 1] - bp[j]) / den
    else:
        tau = bp[j]
    return np.clip(v - tau, 0.0, 1.0)


def _qp_round_indices(rbar, wbar, k, cfg) -> list[int]:
    """Projected gradient ascent on the relaxation, rounded to top-k.

    The step is capped at 1/L, where L (the largest row sum of the scaled
    weight matrix) bounds the gradient Lipschitz constant; a raw fixed step
    overshoots on large diversity weights and cycles between best-response
    sets instead of converging. With alpha = 1 the weight term vanishes, L is
    zero, and the configured step applies unchanged.
    """
    n = rbar.shape[0]
    if cfg.params.normalize_terms:
        rbar = rbar / k
        wbar = wbar / float(max(1, k * (k - 1) // 2))
    lipschitz = float(np.abs(wbar).sum(axis=1).max()) if n > 1 else 0.0
    step = cfg.qp_step_size if lipschitz == 0.0 else min(cfg.qp_step_size, 1.0 / lipschitz)
    x0 = np.full(n, k / n)
    x = _kernels.active().qp_ascent(
        np.ascontiguousarray(rbar),
        np.ascontiguousarray(wbar),
        x0,
        cfg.qp_steps,
        step,
        lambda raw: project_capped_simplex(raw, k),
    )
    order = sorted(range(n), key=lambda i: (-x[i], i))
    return order[:k]


def select_qp_relax(tokens: list[Token], query: Query, cfg: SelectionConfig) -> SelectionResult:
    """Relax membership indicators to x in [0,1]^n with sum(x) = k, run
    projected gradient ascent, and round to the top-k coordinates (ties to
    the lowest index). The reported value is the discrete objective of the
    rounded set."""
    _check_nonempty(tokens)
    n = len(tokens)
    k = min(cfg.k, n)
    rbar, wbar = _scaled_arrays(tokens, query, cfg.params)
    picked = _qp_round_indices(rbar, wbar, k, cfg)
    return _finish(tokens, query, cfg.params, picked, cfg.qp_steps, 1, cfg.k > n)


_DISPATCH = {
    Solver.EXACT: select_exact,
    Solver.GREEDY: select_greedy,
    Solver.LOCAL_SEARCH: select_local_search,
    Solver.QP_RELAX: select_qp_relax,
}


def select(tokens: list[Token], query: Query, cfg: SelectionConfig) -> SelectionResult:
    """Run the solver named by ``cfg.solver``."""
    return _DISPATCH[cfg.solver](tokens, query, cfg)
