"""Line-delimited JSON token files, run reports, and the command line.

Token files hold one JSON object per line; an optional header object marked
with "meta": true carries video length, fps, and embedding dimension.
Reports are JSON on stdout and are byte-identical across reruns with the
same inputs and seed, except for the wall_clock_ms field.
"""

import argparse
import json
import sys
import time

from . import __version__
from .errors import (
    DimensionMismatch,
    ParseError,
    RelDivError,
    ZeroVector,
)
from .grounding import Moment, baseline_ground, recall_at
from .similarity import ObjectiveParams
from .simulator import DEFAULT_KIND_MIX, GroundTruth, SimConfig, generate, recovery_rate
from .solvers import SelectionConfig, Solver
from .streaming import StreamConfig, run_global, run_stream
from .token_model import Query, Token, TokenKind, VideoMeta, normalize_embedding

_KIND_FROM_STR = {k.value: k for k in TokenKind}

DEFAULT_ALPHA = 0.9
DEFAULT_WINDOW = 1000
DEFAULT_EPSILON = 1e-3


def _meta_from_header(header, tokens):
    length = header.get("video_length") if header else None
    fps = header.get("fps") if header else None
    if length is None:
        length = max((t.t_end for t in tokens), default=1.0)
        if length <= 0:
            length = 1.0
    if fps is None:
        fps = 1.0
    frame_count = max(1, round(length * fps))
    return VideoMeta(length_seconds=float(length), fps=float(fps), frame_count=frame_count)


def load_tokens(path) -> tuple[list[Token], VideoMeta]:
    """Read a token file; embeddings come back unit-normalized and tokens
    sorted by start time. Errors carry the 1-based line number."""
    tokens = []
    header = None
    dim = None
    seen_ids = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", lineno) from exc
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", lineno)
            if obj.get("meta"):
                if header is not None:
                    raise ParseError("duplicate meta header", lineno)
                header = obj
                if "dim" in obj:
                    dim = int(obj["dim"])
                continue
            try:
                token_id = str(obj["id"])
                kind_str = obj["kind"]
                span = (float(obj["t_start"]), float(obj["t_end"]))
                raw_emb = obj["embedding"]
            except KeyError as exc:
                raise ParseError(f"missing field {exc.args[0]!r}", lineno) from exc
            if kind_str not in _KIND_FROM_STR:
                raise ParseError(f"unknown kind {kind_str!r}", lineno)
            kind = _KIND_FROM_STR[kind_str]
            if token_id in seen_ids:
                raise ParseError(f"duplicate token id {token_id!r}", lineno)
            seen_ids.add(token_id)
            if not isinstance(raw_emb, list) or not raw_emb:
                raise ParseError("embedding must be a non-empty array", lineno)
            if dim is None:
                dim = len(raw_emb)
            elif len(raw_emb) != dim:
                raise DimensionMismatch(
                    f"embedding has {len(raw_emb)} dims, file uses {dim}", line=lineno
                )
            try:
                emb = normalize_embedding(raw_emb)
            except ZeroVector as exc:
                raise ZeroVector(line=lineno) from exc
            bbox = obj.get("bbox")
            if bbox is not None:
                if not isinstance(bbox, list) or len(bbox) != 4:
                    raise ParseError("bbox must be an array of 4 numbers", lineno)
                bbox = tuple(float(v) for v in bbox)
            tokens.append(
                Token(
                    id=token_id,
                    kind=kind,
                    embedding=emb,
                    span=span,
                    bbox=bbox,
                    source=obj.get("source"),
                )
            )
    tokens.sort(key=lambda t: t.t_start)
    return tokens, _meta_from_header(header, tokens)


def save_tokens(path, tokens: list[Token], meta: VideoMeta | None = None):
    """Write tokens as line-delimited JSON with a meta header."""
    with open(path, "w", encoding="utf-8") as fh:
        if meta is not None:
            header = {
                "meta": True,
                "video_length": meta.length_seconds,
                "fps": meta.fps,
                "dim": int(tokens[0].embedding.shape[0]) if tokens else 0,
            }
            fh.write(json.dumps(header, sort_keys=True) + "\n")
        for t in tokens:
            rec = {
                "id": t.id,
                "kind": t.kind.value,
                "t_start": t.t_start,
                "t_end": t.t_end,
                "embedding": [float(v) for v in t.embedding],
            }
            if t.bbox is not None:
                rec["bbox"] = list(t.bbox)
            if t.source is not None:
                rec["source"] = t.source
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def save_truth(path, query: Query, truth: GroundTruth):
    doc = {
        "query": {"id": query.id, "embedding": [float(v) for v in query.embedding]},
        "relevant_ids": sorted(truth.relevant_ids),
        "moment": [truth.moment[0], truth.moment[1]],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_query(path) -> Query:
    """Read a query from a truth file or a bare {id, embedding} object."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    obj = doc.get("query", doc)
    return Query(
        id=str(obj.get("id", "query")),
        embedding=normalize_embedding(obj["embedding"]),
        text=obj.get("text"),
    )


def load_truth(path) -> tuple[Query, GroundTruth]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    query = Query(
        id=str(doc["query"].get("id", "query")),
        embedding=normalize_embedding(doc["query"]["embedding"]),
    )
    moment = tuple(float(v) for v in doc.get("moment", (0.0, 0.0)))
    truth = GroundTruth(relevant_ids=frozenset(doc.get("relevant_ids", ())), moment=moment)
    return query, truth


def _selection_config(args) -> SelectionConfig:
    params = ObjectiveParams(
        alpha=args.alpha, epsilon=args.epsilon, normalize_terms=args.normalize_terms
    )
    return SelectionConfig(k=args.k, params=params, solver=Solver(args.solver), seed=args.seed)


def _config_echo(args, keys):
    return {key: getattr(args, key) for key in keys if hasattr(args, key)}


def _kind_counts(tokens, indices):
    counts = {kind.value: 0 for kind in TokenKind}
    for i in indices:
        counts[tokens[i].kind.value] += 1
    return counts


def _result_payload(tokens, result):
    return {
        "selected_ids": [tokens[i].id for i in result.indices],
        "objective": result.objective_value,
        "per_kind_counts": _kind_counts(tokens, result.indices),
        "per_token_relevance": list(result.per_token_relevance),
        "solver_stats": {
            "evaluations": result.solver_stats.evaluations,
            "passes": result.solver_stats.passes,
            "k_clamped": result.solver_stats.k_clamped,
        },
    }


def _metrics_payload(metrics):
    return {
        "recall": {f"R@{k}@{theta:g}": v for (k, theta), v in sorted(metrics.recall.items())},
        "average": {f"R@{k}": v for k, v in sorted(metrics.average.items())},
        "num_queries": metrics.num_queries,
    }


def _emit(report, started):
    report["wall_clock_ms"] = (time.perf_counter() - started) * 1000.0
    print(json.dumps(report, sort_keys=True, indent=2))
    return 0


def _cmd_simulate(args, started):
    mix = tuple(float(v) for v in args.kind_mix.split(","))
    if len(mix) != 3:
        raise RelDivError("--kind-mix needs three comma-separated proportions")
    cfg = SimConfig(
        num_tokens=args.num_tokens,
        dim=args.dim,
        kind_mix=mix,
        num_clusters=args.clusters,
        cluster_spread=args.spread,
        planted_size=args.planted,
        planted_margin=args.margin,
        video_length=args.video_length,
        seed=args.seed,
    )
    tokens, query, truth = generate(cfg)
    meta = VideoMeta(
        length_seconds=cfg.video_length,
        fps=1.0,
        frame_count=max(1, round(cfg.video_length)),
    )
    save_tokens(args.out, tokens, meta)
    save_truth(args.truth_out, query, truth)
    report = {
        "command": "simulate",
        "config": _config_echo(
            args,
            [
                "num_tokens", "dim", "clusters", "spread", "planted",
                "margin", "video_length", "kind_mix", "seed",
            ],
        ),
        "tokens_written": len(tokens),
        "out": args.out,
        "truth_out": args.truth_out,
        "planted_ids": sorted(truth.relevant_ids),
        "moment": list(truth.moment),
    }
    return _emit(report, started)


def _cmd_select(args, started):
    tokens, _ = load_tokens(args.tokens)
    query = load_query(args.query)
    cfg = _selection_config(args)
    result = run_global(tokens, query, cfg, presample_to=args.presample)
    report = {
        "command": "select",
        "config": _config_echo(
            args,
            ["tokens", "query", "k", "alpha", "solver", "epsilon",
             "normalize_terms", "presample", "seed"],
        ),
    }
    report.update(_result_payload(tokens, result))
    return _emit(report, started)


def _cmd_stream(args, started):
    tokens, _ = load_tokens(args.tokens)
    query = load_query(args.query)
    cfg = StreamConfig(window_size=args.window, selection=_selection_config(args))
    state = run_stream(tokens, query, cfg)
    counts = {kind.value: 0 for kind in TokenKind}
    for t in state.retained:
        counts[t.kind.value] += 1
    last = state.last_result
    report = {
        "command": "stream",
        "config": _config_echo(
            args,
            ["tokens", "query", "k", "alpha", "solver", "epsilon",
             "normalize_terms", "window", "seed"],
        ),
        "steps": state.step,
        "selected_ids": sorted(t.id for t in state.retained),
        "objective": last.objective_value if last else None,
        "per_kind_counts": counts,
        "solver_stats": (
            {
                "evaluations": last.solver_stats.evaluations,
                "passes": last.solver_stats.passes,
                "k_clamped": last.solver_stats.k_clamped,
            }
            if last
            else None
        ),
    }
    return _emit(report, started)


def _cmd_ground_eval(args, started):
    tokens, meta = load_tokens(args.tokens)
    query, truth = load_truth(args.truth)
    preds = baseline_ground(tokens, query, args.top_k)
    gt = Moment(start=truth.moment[0], end=truth.moment[1])
    thresholds = tuple(float(v) for v in args.thresholds.split(","))
    metrics = recall_at([preds], [gt], ks=(1, 5), thresholds=thresholds)
    report = {
        "command": "ground-eval",
        "config": _config_echo(args, ["tokens", "truth", "top_k", "thresholds"]),
        "video_length": meta.length_seconds,
        "grounding": _metrics_payload(metrics),
        "top_moments": [[m.start, m.end] for m in preds],
    }
    return _emit(report, started)


def _cmd_sweep_alpha(args, started):
    tokens, _ = load_tokens(args.tokens)
    query = load_query(args.query)
    truth = None
    if args.truth:
        _, truth = load_truth(args.truth)
    alphas = [float(v) for v in args.alphas.split(",")]
    rows = []
    for alpha in alphas:
        params = ObjectiveParams(
            alpha=alpha, epsilon=args.epsilon, normalize_terms=args.normalize_terms
        )
        cfg = SelectionConfig(
            k=args.k, params=params, solver=Solver(args.solver), seed=args.seed
        )
        result = run_global(tokens, query, cfg, presample_to=args.presample)
        row = {
            "alpha": alpha,
            "objective": result.objective_value,
            "selected_ids": [tokens[i].id for i in result.indices],
        }
        if truth is not None:
            row["recovery"] = recovery_rate(result, truth, tokens)
        rows.append(row)
    report = {
        "command": "sweep-alpha",
        "config": _config_echo(
            args,
            ["tokens", "query", "truth", "k", "solver", "epsilon",
             "normalize_terms", "presample", "seed", "alphas"],
        ),
        "sweep": rows,
    }
    return _emit(report, started)


def _add_selection_flags(p, with_window=False, with_presample=False):
    p.add_argument("--k", type=int, required=True, help="subset size; typical budgets run 16-450 tokens depending on the downstream head")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="relevance/diversity trade-off in [0,1] (default %(default)s, the recommended operating point)")
    p.add_argument("--solver", choices=[s.value for s in Solver], default=Solver.LOCAL_SEARCH.value, help="selection strategy (default %(default)s)")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON, help="pairwise-similarity floor before inversion (default %(default)s)")
    p.add_argument("--normalize-terms", action="store_true", help="divide the relevance and diversity sums by their term counts")
    p.add_argument("--seed", type=int, default=0, help="seed echoed into reports; solvers are deterministic")
    if with_window:
        p.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="streaming window budget in tokens (default %(default)s)")
    if with_presample:
        p.add_argument("--presample", type=int, default=None, help="uniformly pre-sample the pool down to this many tokens before solving")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reldiv",
        description="Relevance-diversity subset selection over timed embedding tokens.",
        epilog=(
            "Reference operating points: --alpha 0.9 and --window 1000 are the "
            "defaults; common token budgets are --k 16 (hour-long multiple-choice QA), "
            "--k 256 (movie-length open QA), and --k 200/450 (egocentric grounding). "
            "Tracklet rules l_min=8/l_max=16 (or 16/32 for egocentric footage) pair "
            "with these budgets."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic token file with planted ground truth")
    p.add_argument("--out", required=True, help="token file to write")
    p.add_argument("--truth-out", required=True, help="ground-truth JSON to write")
    p.add_argument("--num-tokens", type=int, default=200)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--clusters", type=int, default=8)
    p.add_argument("--spread", type=float, default=0.25)
    p.add_argument("--planted", type=int, default=8)
    p.add_argument("--margin", type=float, default=0.2)
    p.add_argument("--video-length", type=float, default=600.0)
    p.add_argument("--kind-mix", default=",".join(str(v) for v in DEFAULT_KIND_MIX))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("select", help="one global selection over a token file")
    p.add_argument("--tokens", required=True)
    p.add_argument("--query", required=True, help="truth JSON or bare {id, embedding} JSON")
    _add_selection_flags(p, with_presample=True)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("stream", help="streaming selection over consecutive windows")
    p.add_argument("--tokens", required=True)
    p.add_argument("--query", required=True)
    _add_selection_flags(p, with_window=True)
    p.set_defaults(func=_cmd_stream)

    p = sub.add_parser("ground-eval", help="baseline grounding plus Recall@K against a truth file")
    p.add_argument("--tokens", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--thresholds", default="0.3,0.5")
    p.set_defaults(func=_cmd_ground_eval)

    p = sub.add_parser("sweep-alpha", help="repeat selection across an alpha grid")
    p.add_argument("--tokens", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--truth", default=None, help="optional truth JSON for recovery rates")
    p.add_argument(
        "--alphas", default="0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"
    )
    _add_selection_flags(p, with_presample=True)
    p.set_defaults(func=_cmd_sweep_alpha)
    return parser


def main(argv=None) -> int:
    """Entry point: 0 on success, 1 on data errors, 2 on usage errors."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        return args.func(args, started)
    except (RelDivError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
