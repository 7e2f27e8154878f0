"""Token, query, and video data model shared by all other modules.

Embeddings are stored unit-normalized; every downstream cosine becomes a
plain dot product.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ZeroVector

UNIT_NORM_TOL = 1e-6


class TokenKind(Enum):
    SCENE = "scene"
    OBJECT = "object"
    ACTION = "action"


def _as_embedding(raw) -> np.ndarray:
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Token:
    """One semantic entity (scene frame, static object, or tracklet)."""

    id: str
    kind: TokenKind
    embedding: np.ndarray
    span: tuple[float, float]
    bbox: tuple[float, float, float, float] | None = None
    source: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "embedding", _as_embedding(self.embedding))
        object.__setattr__(self, "span", (float(self.span[0]), float(self.span[1])))
        if self.bbox is not None:
            object.__setattr__(self, "bbox", tuple(float(v) for v in self.bbox))

    @property
    def t_start(self) -> float:
        return self.span[0]

    @property
    def t_end(self) -> float:
        return self.span[1]


@dataclass(frozen=True)
class Query:
    """Task query embedded in the same space as the tokens."""

    id: str
    embedding: np.ndarray
    text: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "embedding", _as_embedding(self.embedding))


@dataclass(frozen=True)
class VideoMeta:
    """Length, frame rate, and frame count of the source video."""

    length_seconds: float
    fps: float
    frame_count: int

    def __post_init__(self):
        if self.length_seconds <= 0:
            raise ValueError("length_seconds must be positive")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.frame_count < 1:
            raise ValueError("frame_count must be at least 1")
        # frame_count must agree with length * fps to within one frame
        if abs(self.frame_count - self.length_seconds * self.fps) > 1.0 + 1e-9:
            raise ValueError("frame_count inconsistent with length_seconds * fps")


def normalize_embedding(raw) -> np.ndarray:
    """Scale a vector to unit L2 norm, preserving direction.

    Iterates to a bitwise fixed point so that re-normalizing the output
    returns it unchanged.

    Raises:
        ZeroVector: if the input norm is below 1e-12.
    """
    vec = np.asarray(raw, dtype=np.float64).reshape(-1)
    if vec.size < 1:
        raise ZeroVector("empty vector")
    norm = float(np.sqrt(np.sum(vec * vec)))
    if not np.isfinite(norm) or norm < 1e-12:
        raise ZeroVector()
    for _ in range(100):
        if norm == 1.0:
            break
        scaled = vec / norm
        if np.array_equal(scaled, vec):
            break
        vec = scaled
        norm = float(np.sqrt(np.sum(vec * vec)))
    vec = vec.copy()
    vec.flags.writeable = False
    return vec


def validate_token(token: Token, meta: VideoMeta) -> list[str]:
    """List every violated token invariant; an empty list means valid.

    Violations are data, not failures: nothing is raised.
    """
    report = []
    if not token.id:
        report.append("id must be non-empty")
    emb = token.embedding
    if emb.size < 1:
        report.append("embedding must have dimension >= 1")
    else:
        norm = float(np.linalg.norm(emb))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            report.append(f"unit norm violated (norm={norm:.6g})")
    t0, t1 = token.span
    if t0 > t1:
        report.append("span ordering violated (t_start > t_end)")
    if t0 < 0 or t1 > meta.length_seconds:
        report.append("span outside [0, video length]")
    if token.bbox is not None:
        x0, y0, x1, y1 = token.bbox
        if x0 > x1 or y0 > y1:
            report.append("bbox coordinates out of order")
        if min(token.bbox) < 0 or max(token.bbox) > 1:
            report.append("bbox coordinates outside [0, 1]")
    return report
