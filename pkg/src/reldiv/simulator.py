"""Synthetic token streams with planted ground truth.

Embeddings live on the unit sphere: cluster centers are drawn uniformly,
tokens are re-normalized center-plus-noise draws, and planted tokens are
built at a controlled relevance to the emitted query so that a margin over
every distractor holds by construction. Everything is deterministic given
the seed.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleMargin
from .similarity import cosine
from .solvers import SelectionResult
from .token_model import Query, Token, TokenKind, normalize_embedding

DEFAULT_KIND_MIX = (0.625, 0.261, 0.114)

_PLANTED_REL_LO = 0.80
_PLANTED_REL_HI = 0.90
_RESAMPLE_BUDGET = 1000


@dataclass(frozen=True)
class SimConfig:
    """Shape of the generated stream and of its planted signal."""

    num_tokens: int
    dim: int = 64
    kind_mix: tuple[float, float, float] = DEFAULT_KIND_MIX
    num_clusters: int = 8
    cluster_spread: float = 0.25
    planted_size: int = 0
    planted_margin: float = 0.2
    video_length: float = 600.0
    seed: int = 0

    def __post_init__(self):
        if self.num_tokens < 1:
            raise ValueError("num_tokens must be positive")
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.num_clusters < 1:
            raise ValueError("num_clusters must be positive")
        if self.cluster_spread < 0:
            raise ValueError("cluster_spread must be non-negative")
        if not 0 <= self.planted_size <= self.num_tokens:
            raise ValueError("planted_size must be in [0, num_tokens]")
        if not 0.0 < self.planted_margin <= 1.0:
            raise ValueError("planted_margin must be in (0, 1]")
        if self.video_length <= 0:
            raise ValueError("video_length must be positive")
        if min(self.kind_mix) < 0 or abs(sum(self.kind_mix) - 1.0) > 1e-9:
            raise ValueError("kind_mix must be non-negative and sum to 1")


@dataclass(frozen=True)
class GroundTruth:
    """Ids of the planted tokens and the moment covering their spans."""

    relevant_ids: frozenset[str]
    moment: tuple[float, float]


def _unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(dim)
        if np.linalg.norm(v) > 1e-6:
            return normalize_embedding(v)


def _kind_counts(mix: tuple[float, float, float], n: int) -> list[int]:
    """Largest-remainder rounding of the kind proportions to n tokens."""
    raw = [m * n for m in mix]
    counts = [int(math.floor(x)) for x in raw]
    remainders = sorted(range(3), key=lambda i: (-(raw[i] - counts[i]), i))
    short = n - sum(counts)
    for i in range(short):
        counts[remainders[i % 3]] += 1
    return counts


def _planted_embedding(rng, query_emb, dim):
    """Unit vector at a controlled relevance to the query."""
    target = rng.uniform(_PLANTED_REL_LO, _PLANTED_REL_HI)
    if dim == 1:
        return query_emb.copy(), float(cosine(query_emb, query_emb))
    noise = rng.standard_normal(dim)
    ortho = noise - np.dot(noise, query_emb) * query_emb
    norm = np.linalg.norm(ortho)
    if norm < 1e-9:
        ortho = np.zeros(dim)
        ortho[int(np.argmin(np.abs(query_emb)))] = 1.0
        ortho = ortho - np.dot(ortho, query_emb) * query_emb
        norm = np.linalg.norm(ortho)
    emb = normalize_embedding(target * query_emb + math.sqrt(1.0 - target * target) * ortho / norm)
    return emb, float(cosine(emb, query_emb))


def generate(cfg: SimConfig) -> tuple[list[Token], Query, GroundTruth]:
    """Build (tokens, query, ground truth) for one synthetic instance.

    Planted tokens occupy a contiguous block of time slots and each has
    relevance at least ``planted_margin`` above every distractor; distractors
    violating the margin are re-drawn, and the generator raises
    InfeasibleMargin once the retry budget is exhausted (in low effective
    dimensions a large margin may be unreachable).
    """
    rng = np.random.default_rng(cfg.seed)
    n, dim = cfg.num_tokens, cfg.dim
    query_emb = _unit(rng, dim)
    centers = [_unit(rng, dim) for _ in range(cfg.num_clusters)]

    planted_positions: set[int] = set()
    if cfg.planted_size > 0:
        block_start = int(rng.integers(0, n - cfg.planted_size + 1))
        planted_positions = set(range(block_start, block_start + cfg.planted_size))

    planted_rels = []
    embeddings: list[np.ndarray | None] = [None] * n
    for pos in sorted(planted_positions):
        emb, rel = _planted_embedding(rng, query_emb, dim)
        embeddings[pos] = emb
        planted_rels.append(rel)
    cap = min(planted_rels) - cfg.planted_margin if planted_rels else math.inf

    for pos in range(n):
        if pos in planted_positions:
            continue
        for attempt in range(_RESAMPLE_BUDGET + 1):
            center = centers[int(rng.integers(0, cfg.num_clusters))]
            emb = normalize_embedding(center + cfg.cluster_spread * rng.standard_normal(dim))
            if cosine(emb, query_emb) <= cap:
                break
        else:
            raise InfeasibleMargin(
                f"distractor below relevance {cap:.3f} not found in "
                f"{_RESAMPLE_BUDGET} attempts (dim={dim})"
            )
        embeddings[pos] = emb

    counts = _kind_counts(cfg.kind_mix, n)
    kind_pool = (
        [TokenKind.SCENE] * counts[0] + [TokenKind.OBJECT] * counts[1] + [TokenKind.ACTION] * counts[2]
    )
    kinds = [kind_pool[i] for i in rng.permutation(n)]

    edges = [i * cfg.video_length / n for i in range(n + 1)]
    tokens = []
    for i in range(n):
        bbox = None
        if kinds[i] is not TokenKind.SCENE:
            x0, y0 = rng.uniform(0.0, 0.5, size=2)
            x1 = rng.uniform(x0, 1.0)
            y1 = rng.uniform(y0, 1.0)
            bbox = (float(x0), float(y0), float(x1), float(y1))
        tokens.append(
            Token(
                id=f"tok{i:05d}",
                kind=kinds[i],
                embedding=embeddings[i],
                span=(edges[i], edges[i + 1]),
                bbox=bbox,
                source=f"sim:seed{cfg.seed}",
            )
        )

    query = Query(id=f"query:seed{cfg.seed}", embedding=query_emb, text=None)
    if planted_positions:
        first = min(planted_positions)
        last = max(planted_positions)
        moment = (edges[first], edges[last + 1])
        relevant = frozenset(tokens[i].id for i in planted_positions)
    else:
        moment = (0.0, 0.0)
        relevant = frozenset()
    return tokens, query, GroundTruth(relevant_ids=relevant, moment=moment)


def recovery_rate(result: SelectionResult, truth: GroundTruth, tokens: list[Token]) -> float:
    """Fraction of planted tokens recovered by the selection."""
    selected = {tokens[i].id for i in result.indices}
    return len(selected & truth.relevant_ids) / max(1, len(truth.relevant_ids))


def duplicate_pair_instance(
    num_fill: int = 4, dim: int = 8, video_length: float = 60.0
) -> tuple[list[Token], Query]:
    """Adversarial diversity instance: tokens 0 and 1 share one embedding,
    all others are mutually orthogonal basis vectors. Any subset holding both
    duplicates pays pair weight 1 where an orthogonal substitute would pay
    the much larger 1/epsilon."""
    if dim < num_fill + 1:
        raise ValueError("dim must exceed num_fill")
    n = num_fill + 2
    basis = np.eye(dim)
    embs = [basis[0], basis[0]] + [basis[1 + j] for j in range(num_fill)]
    edges = [i * video_length / n for i in range(n + 1)]
    tokens = [
        Token(id=f"dup{i}", kind=TokenKind.SCENE, embedding=embs[i], span=(edges[i], edges[i + 1]))
        for i in range(n)
    ]
    query = Query(id="dup-query", embedding=normalize_embedding(np.ones(dim)))
    return tokens, query
