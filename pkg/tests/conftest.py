import numpy as np
import pytest

from reldiv import _kernels
from reldiv.token_model import Query, Token, TokenKind, normalize_embedding


@pytest.fixture(params=sorted(_kernels.available()))
def backend(request):
    """Run the decorated test once per importable kernel backend."""
    previous = _kernels.active_name()
    _kernels.use(request.param)
    yield request.param
    _kernels.use(previous)


def make_tokens(rng: np.random.Generator, n: int, dim: int, video_length: float = 100.0):
    """Random unit-embedded tokens with spans tiling [0, video_length]."""
    tokens = []
    for i in range(n):
        emb = normalize_embedding(rng.standard_normal(dim))
        span = (i * video_length / n, (i + 1) * video_length / n)
        tokens.append(Token(id=f"t{i:04d}", kind=TokenKind.SCENE, embedding=emb, span=span))
    return tokens


def make_query(rng: np.random.Generator, dim: int) -> Query:
    return Query(id="q", embedding=normalize_embedding(rng.standard_normal(dim)))
