"""Moment decoding, temporal IoU, and Recall@K evaluation, plus a
relevance-ranked baseline grounder so the metric pipeline runs end to end
without a trained decoder."""

from dataclasses import dataclass

from .errors import EmptyInput, LengthMismatch
from .similarity import relevance
from .token_model import Query, Token, VideoMeta

DEFAULT_KS = (1, 5)
DEFAULT_THRESHOLDS = (0.3, 0.5)


@dataclass(frozen=True)
class Moment:
    """A (start, end) interval in seconds."""

    start: float
    end: float

    def __post_init__(self):
        if self.start < 0 or self.start > self.end:
            raise ValueError(f"invalid moment ({self.start}, {self.end})")


@dataclass(frozen=True)
class TokenPrediction:
    """Per-token decoder output: normalized time, score, boundary distances."""

    token_time: float
    score: float
    d_start: float
    d_end: float

    def __post_init__(self):
        if not 0.0 <= self.token_time <= 1.0:
            raise ValueError("token_time must be in [0, 1]")
        if self.d_start < 0 or self.d_end < 0:
            raise ValueError("boundary distances must be non-negative")


@dataclass(frozen=True)
class GroundingMetrics:
    """Recall per (K, threshold) plus the per-K average across thresholds."""

    recall: dict[tuple[int, float], float]
    average: dict[int, float]
    num_queries: int


def decode_moment(pred: TokenPrediction, meta: VideoMeta) -> Moment:
    """(token_time -/+ boundary distances) scaled by the video length,
    clamped into [0, video length]."""
    start = (pred.token_time - pred.d_start) * meta.length_seconds
    end = (pred.token_time + pred.d_end) * meta.length_seconds
    return Moment(start=max(0.0, start), end=min(meta.length_seconds, end))


def tiou(a: Moment, b: Moment) -> float:
    """Temporal intersection over union; identical zero-width moments are 1."""
    inter = min(a.end, b.end) - max(a.start, b.start)
    if inter < 0:
        return 0.0
    union = max(a.end, b.end) - min(a.start, b.start)
    if union == 0.0:
        return 1.0  # two identical zero-width moments
    return inter / union


def recall_at(
    preds_per_query: list[list[Moment]],
    gts: list[Moment],
    ks=DEFAULT_KS,
    thresholds=DEFAULT_THRESHOLDS,
) -> GroundingMetrics:
    """Fraction of queries whose top-K predictions reach each tIoU threshold.

    Each prediction list must already be ranked (descending score, earlier
    start first among ties). With zero queries every recall is reported as 0.
    """
    if isinstance(ks, int):
        ks = (ks,)
    if len(preds_per_query) != len(gts):
        raise LengthMismatch(
            f"{len(preds_per_query)} prediction lists vs {len(gts)} ground truths"
        )
    num = len(gts)
    recall = {}
    average = {}
    for k in ks:
        per_threshold = []
        for theta in thresholds:
            hits = 0
            for preds, gt in zip(preds_per_query, gts):
                if any(tiou(p, gt) >= theta for p in preds[:k]):
                    hits += 1
            value = hits / num if num else 0.0
            recall[(k, theta)] = value
            per_threshold.append(value)
        average[k] = sum(per_threshold) / len(per_threshold)
    return GroundingMetrics(recall=recall, average=average, num_queries=num)


def baseline_ground(tokens: list[Token], query: Query, top_k: int) -> list[Moment]:
    """Rank token spans by relevance (ties: earlier start first) and emit the
    top_k as candidate moments."""
    if not tokens:
        raise EmptyInput("baseline_ground requires at least one token")
    scored = sorted(
        range(len(tokens)),
        key=lambda i: (-relevance(tokens[i], query), tokens[i].t_start, i),
    )
    return [Moment(start=tokens[i].t_start, end=tokens[i].t_end) for i in scored[:top_k]]
