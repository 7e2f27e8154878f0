"""Relevance, pairwise similarity, diversity weights, and the selection objective.

The objective over a subset S with query q is

    F(S) = alpha * sum_{t in S} cos(t, q)
         + (1 - alpha) * sum_{unordered pairs i<j} 1 / max(cos(t_i, t_j), epsilon)

Pairs are counted once (unordered). Cosines are clamped to [-1, 1], and the
pairwise similarity is floored at ``epsilon`` before inversion so the
diversity term stays finite and positive for anti-correlated tokens.

Float determinism contract: every similarity number in the library flows
through :func:`paired_dots`, which accumulates strictly in ascending
coordinate order, and objective sums use ``math.fsum`` (exactly rounded, so
the result is independent of summation order). Solvers recompute their
reported objective through :func:`objective`, which makes "recomputing the
objective on the selected subset reproduces the reported value bit-exactly"
a structural guarantee rather than a numerical accident.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DuplicateToken, EmptySubset, SelfPair
from .token_model import Query, Token

DEFAULT_EPSILON = 1e-3


@dataclass(frozen=True)
class ObjectiveParams:
    """Trade-off weight alpha, similarity floor, and optional term scaling."""

    alpha: float
    epsilon: float = DEFAULT_EPSILON
    normalize_terms: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must be in (0, 1]")


def paired_dots(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All pairwise dot products between rows of (n, d) and (m, d) arrays.

    Accumulates column by column so entry [i, j] is the strict left-to-right
    sum over coordinates. Do not replace with BLAS (``@``/``np.dot``): BLAS
    reorders partial sums, which would break the bit-level agreement between
    single-pair and matrix computations and between kernel backends.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"dimensions {a.shape[1]} and {b.shape[1]} disagree")
    out = np.zeros((a.shape[0], b.shape[0]))
    buf = np.empty_like(out)
    for j in range(a.shape[1]):
        np.multiply(a[:, j, None], b[None, :, j], out=buf)
        out += buf
    return out


def cosine(a, b) -> float:
    """Dot product of two unit embeddings, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64).reshape(1, -1)
    b = np.asarray(b, dtype=np.float64).reshape(1, -1)
    s = float(paired_dots(a, b)[0, 0])
    return min(1.0, max(-1.0, s))


def relevance(token: Token, query: Query) -> float:
    """Cosine similarity between a token embedding and the query embedding."""
    return cosine(token.embedding, query.embedding)


def diversity_weight(t_i: Token, t_j: Token, params: ObjectiveParams) -> float:
    """Reciprocal pairwise similarity, floored at epsilon; in [1, 1/epsilon]."""
    if t_i is t_j or t_i.id == t_j.id:
        raise SelfPair(f"diversity weight undefined for token {t_i.id!r} with itself")
    return 1.0 / max(cosine(t_i.embedding, t_j.embedding), params.epsilon)


def relevance_vector(tokens: list[Token], query: Query) -> np.ndarray:
    """Clamped relevance of each token to the query, in token order."""
    if not tokens:
        return np.zeros(0)
    emb = np.stack([t.embedding for t in tokens])
    r = paired_dots(emb, query.embedding.reshape(1, -1))[:, 0]
    return np.clip(r, -1.0, 1.0)


def weight_matrix(tokens: list[Token], params: ObjectiveParams) -> np.ndarray:
    """Pairwise diversity weights with zeroed diagonal.

    Entry [i, j] is bit-identical to ``diversity_weight(tokens[i], tokens[j])``.
    """
    emb = np.stack([t.embedding for t in tokens])
    s = np.clip(paired_dots(emb, emb), -1.0, 1.0)
    w = 1.0 / np.maximum(s, params.epsilon)
    np.fill_diagonal(w, 0.0)
    return w


def combine_terms(rel_sum: float, pair_sum: float, size: int, params: ObjectiveParams) -> float:
    """Weight the relevance and diversity sums into the objective value."""
    if params.normalize_terms:
        rel_sum = rel_sum / size
        pair_sum = pair_sum / max(1, size * (size - 1) // 2)
    return params.alpha * rel_sum + (1.0 - params.alpha) * pair_sum


def objective(subset: list[Token], query: Query, params: ObjectiveParams) -> float:
    """Objective value of a token subset.

    Relevance and pair sums are exactly rounded (``math.fsum``), so the value
    is invariant under any permutation of ``subset``. Singleton subsets have
    a zero diversity term.
    """
    if not subset:
        raise EmptySubset("objective requires at least one token")
    seen = set()
    for t in subset:
        if t.id in seen:
            raise DuplicateToken(f"token {t.id!r} appears twice")
        seen.add(t.id)
    emb = np.stack([t.embedding for t in subset])
    if emb.shape[1] != query.embedding.shape[0]:
        raise DimensionMismatch(
            f"token dimension {emb.shape[1]} vs query dimension {query.embedding.shape[0]}"
        )
    k = len(subset)
    r = np.clip(paired_dots(emb, query.embedding.reshape(1, -1))[:, 0], -1.0, 1.0)
    rel_sum = math.fsum(float(v) for v in r)
    if k > 1:
        s = np.clip(paired_dots(emb, emb), -1.0, 1.0)
        w = 1.0 / np.maximum(s, params.epsilon)
        pair_sum = math.fsum(float(w[i, j]) for i in range(k) for j in range(i + 1, k))
    else:
        pair_sum = 0.0
    return combine_terms(rel_sum, pair_sum, k, params)
