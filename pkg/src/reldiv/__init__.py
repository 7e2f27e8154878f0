"""reldiv: relevance-diversity subset selection over timed embedding tokens.

Selects a fixed-size subset of unit-embedded video tokens balancing query
relevance against pairwise diversity, in one global pass or as a streaming
fold over token windows. Ships a synthetic instance generator with planted
ground truth, tracklet preprocessing rules, temporal-grounding metrics, and
a line-delimited JSON CLI.
"""

__version__ = "0.1.0"

from . import _kernels
from .errors import RelDivError
from .grounding import (
    GroundingMetrics,
    Moment,
    TokenPrediction,
    baseline_ground,
    decode_moment,
    recall_at,
    tiou,
)
from .similarity import (
    ObjectiveParams,
    cosine,
    diversity_weight,
    objective,
    relevance,
    relevance_vector,
    weight_matrix,
)
from .simulator import GroundTruth, SimConfig, duplicate_pair_instance, generate, recovery_rate
from .solvers import (
    SelectionConfig,
    SelectionResult,
    Solver,
    SolverStats,
    project_capped_simplex,
    select,
    select_exact,
    select_greedy,
    select_local_search,
    select_qp_relax,
)
from .streaming import StreamConfig, StreamState, run_global, run_stream, stream_init, stream_step
from .token_model import (
    Query,
    Token,
    TokenKind,
    VideoMeta,
    normalize_embedding,
    validate_token,
)
from .tracklet_prep import (
    Tracklet,
    TrackletRules,
    filter_split_tracklets,
    spatial_union,
    uniform_scene_indices,
)


def kernel_backend() -> str:
    """Name of the selection-kernel backend chosen at import."""
    return _kernels.active_name()
