"""Global-mode selection (with optional uniform pre-sampling) and streaming
selection over consecutive token windows.

Streaming carries the previously retained subset forward: each step selects
over (retained union window), so the solver never sees more than
window_size + k candidates regardless of video length. Step 0 starts from an
empty retained set.
"""

from dataclasses import dataclass

from .errors import EmptyInput, UnsortedInput, WindowOverflow
from .solvers import SelectionConfig, SelectionResult, select
from .token_model import Query, Token
from .tracklet_prep import uniform_scene_indices


@dataclass(frozen=True)
class StreamConfig:
    """Token budget per window plus the per-step selection config."""

    window_size: int
    selection: SelectionConfig

    def __post_init__(self):
        if self.window_size < 1:
            raise ValueError("window_size must be at least 1")


@dataclass(frozen=True)
class StreamState:
    """Retained subset after ``step`` windows; immutable value."""

    retained: tuple[Token, ...]
    step: int
    last_result: SelectionResult | None = None


def stream_init(cfg: StreamConfig) -> StreamState:
    """Fresh state: empty retained set at step 0."""
    return StreamState(retained=(), step=0, last_result=None)


def stream_step(
    state: StreamState, window: list[Token], query: Query, cfg: StreamConfig
) -> StreamState:
    """Select over the union of carried tokens and the new window.

    Carried tokens come first in candidate order; window tokens that repeat a
    carried id are dropped (the union is a set). The input state is not
    modified.
    """
    if len(window) > cfg.window_size:
        raise WindowOverflow(f"window holds {len(window)} tokens, budget is {cfg.window_size}")
    carried_ids = {t.id for t in state.retained}
    union = list(state.retained) + [t for t in window if t.id not in carried_ids]
    if not union:
        return StreamState(retained=(), step=state.step + 1, last_result=state.last_result)
    result = select(union, query, cfg.selection)
    retained = tuple(union[i] for i in result.indices)
    return StreamState(retained=retained, step=state.step + 1, last_result=result)


def run_global(
    tokens: list[Token],
    query: Query,
    cfg: SelectionConfig,
    presample_to: int | None = None,
) -> SelectionResult:
    """One selection over the full candidate pool.

    With ``presample_to`` below the pool size, candidates are first reduced
    to floor-spaced picks over the time-sorted order (the memory workaround
    for pools too large to optimize directly); returned indices always refer
    to the original token list.
    """
    if not tokens:
        raise EmptyInput("run_global requires at least one token")
    n = len(tokens)
    if presample_to is None or presample_to >= n:
        return select(tokens, query, cfg)
    time_order = sorted(range(n), key=lambda i: (tokens[i].t_start, i))
    kept = [time_order[j] for j in uniform_scene_indices(n, presample_to)]
    result = select([tokens[i] for i in kept], query, cfg)
    indices = tuple(sorted(kept[j] for j in result.indices))
    rel_by_orig = dict(zip((kept[j] for j in result.indices), result.per_token_relevance))
    return SelectionResult(
        indices=indices,
        objective_value=result.objective_value,
        per_token_relevance=tuple(rel_by_orig[i] for i in indices),
        solver_stats=result.solver_stats,
    )


def run_stream(tokens: list[Token], query: Query, cfg: StreamConfig) -> StreamState:
    """Partition time-sorted tokens into consecutive windows and fold
    :func:`stream_step` over them."""
    for a, b in zip(tokens, tokens[1:]):
        if b.t_start < a.t_start:
            raise UnsortedInput("tokens must be sorted by t_start ascending")
    state = stream_init(cfg)
    for start in range(0, len(tokens), cfg.window_size):
        state = stream_step(state, tokens[start : start + cfg.window_size], query, cfg)
    return state
