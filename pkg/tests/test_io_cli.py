import json

import numpy as np
import pytest

from reldiv.errors import DimensionMismatch, ParseError, ZeroVector
from reldiv.io_cli import (
    load_query,
    load_tokens,
    load_truth,
    main,
    save_tokens,
    save_truth,
)
from reldiv.simulator import SimConfig, generate
from reldiv.token_model import VideoMeta


def write_lines(path, lines):
    path.write_text("\n".join(json.dumps(obj) for obj in lines) + "\n")


def record(i, dim=4, **kw):
    rec = {
        "id": f"t{i}",
        "kind": "scene",
        "t_start": float(i),
        "t_end": float(i + 1),
        "embedding": [1.0] + [0.0] * (dim - 1),
    }
    rec.update(kw)
    return rec


def test_load_basic(tmp_path):
    p = tmp_path / "toks.jsonl"
    write_lines(p, [record(0), record(1), record(2)])
    tokens, meta = load_tokens(p)
    assert len(tokens) == 3
    assert meta.length_seconds == 3.0  # max t_end
    assert meta.fps == 1.0
    assert tokens[0].embedding.shape == (4,)


def test_load_header_meta(tmp_path):
    p = tmp_path / "toks.jsonl"
    write_lines(
        p,
        [
            {"meta": True, "video_length": 50.0, "fps": 2.0, "dim": 4},
            record(0),
        ],
    )
    tokens, meta = load_tokens(p)
    assert meta.length_seconds == 50.0
    assert meta.fps == 2.0
    assert meta.frame_count == 100


def test_load_sorts_by_t_start(tmp_path):
    p = tmp_path / "toks.jsonl"
    write_lines(p, [record(5), record(1), record(3)])
    tokens, _ = load_tokens(p)
    assert [t.id for t in tokens] == ["t1", "t3", "t5"]


def test_load_normalizes_embeddings(tmp_path):
    p = tmp_path / "toks.jsonl"
    write_lines(p, [record(0, embedding=[3.0, 4.0, 0.0, 0.0])])
    tokens, _ = load_tokens(p)
    assert np.allclose(tokens[0].embedding, [0.6, 0.8, 0.0, 0.0])


def test_load_dimension_mismatch_line(tmp_path):
    p = tmp_path / "toks.jsonl"
    write_lines(p, [record(0, dim=8), record(1, dim=7)])
    with pytest.raises(DimensionMismatch) as err:
        load_tokens(p)
    assert err.value.line == 2


def test_load_zero_vector_line(tmp_path):
    p = tmp_path / "toks.jsonl"
    write_lines(p, [record(0), record(1, embedding=[0.0, 0.0, 0.0, 0.0])])
    with pytest.raises(ZeroVector) as err:
        load_tokens(p)
    assert err.value.line == 2


def test_load_parse_error_line(tmp_path):
    p = tmp_path / "toks.jsonl"
    p.write_text('{"id": "a", "kind": "scene"}\nnot json\n')
    with pytest.raises(ParseError) as err:
        load_tokens(p)
    assert err.value.line == 1  # missing fields reported first


def test_load_duplicate_id(tmp_path):
    p = tmp_path / "toks.jsonl"
    write_lines(p, [record(0), record(0)])
    with pytest.raises(ParseError) as err:
        load_tokens(p)
    assert "duplicate" in str(err.value)


def test_load_bad_kind(tmp_path):
    p = tmp_path / "toks.jsonl"
    write_lines(p, [record(0, kind="scenery")])
    with pytest.raises(ParseError):
        load_tokens(p)


def test_round_trip_simulate_save_load(tmp_path):
    cfg = SimConfig(num_tokens=40, dim=16, planted_size=4, seed=11)
    tokens, query, truth = generate(cfg)
    meta = VideoMeta(length_seconds=cfg.video_length, fps=1.0, frame_count=600)
    p = tmp_path / "toks.jsonl"
    save_tokens(p, tokens, meta)
    loaded, meta2 = load_tokens(p)
    assert meta2.length_seconds == cfg.video_length
    assert [t.id for t in loaded] == [t.id for t in tokens]
    assert [t.kind for t in loaded] == [t.kind for t in tokens]
    assert [t.span for t in loaded] == [t.span for t in tokens]
    assert [t.bbox for t in loaded] == [t.bbox for t in tokens]
    for a, b in zip(loaded, tokens):
        assert np.max(np.abs(a.embedding - b.embedding)) < 1e-9

    tp = tmp_path / "truth.json"
    save_truth(tp, query, truth)
    q2, truth2 = load_truth(tp)
    assert truth2.relevant_ids == truth.relevant_ids
    assert truth2.moment == pytest.approx(truth.moment)
    assert np.max(np.abs(q2.embedding - query.embedding)) < 1e-9
    q3 = load_query(tp)
    assert np.array_equal(q3.embedding, q2.embedding)


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def simulate_files(tmp_path, capsys, seed=42, extra=()):
    toks = tmp_path / "toks.jsonl"
    truth = tmp_path / "truth.json"
    code, report = run_cli(
        capsys,
        [
            "simulate",
            "--out", str(toks),
            "--truth-out", str(truth),
            "--num-tokens", "60",
            "--dim", "16",
            "--planted", "4",
            "--seed", str(seed),
            *extra,
        ],
    )
    assert code == 0
    return toks, truth, report


def test_cli_simulate_select_pipeline(tmp_path, capsys):
    toks, truth, sim_report = simulate_files(tmp_path, capsys)
    assert sim_report["tokens_written"] == 60
    code, report = run_cli(
        capsys,
        ["select", "--tokens", str(toks), "--query", str(truth), "--k", "4",
         "--alpha", "1.0", "--solver", "greedy"],
    )
    assert code == 0
    assert len(report["selected_ids"]) == 4
    assert set(report["selected_ids"]) == set(sim_report["planted_ids"])
    assert report["per_kind_counts"]["scene"] + report["per_kind_counts"][
        "object"
    ] + report["per_kind_counts"]["action"] == 4
    assert "wall_clock_ms" in report


def test_cli_select_k16(tmp_path, capsys):
    toks = tmp_path / "toks.jsonl"
    truth = tmp_path / "truth.json"
    code, _ = run_cli(
        capsys,
        ["simulate", "--out", str(toks), "--truth-out", str(truth),
         "--num-tokens", "400", "--dim", "16", "--planted", "16", "--seed", "3"],
    )
    assert code == 0
    code, report = run_cli(
        capsys,
        ["select", "--tokens", str(toks), "--query", str(truth), "--k", "16"],
    )
    assert code == 0
    assert len(report["selected_ids"]) == 16


def test_cli_stream(tmp_path, capsys):
    toks, truth, _ = simulate_files(tmp_path, capsys)
    code, report = run_cli(
        capsys,
        ["stream", "--tokens", str(toks), "--query", str(truth), "--k", "4",
         "--window", "25"],
    )
    assert code == 0
    assert report["steps"] == 3  # 60 tokens in windows of 25
    assert len(report["selected_ids"]) == 4


def test_cli_stream_default_window_is_1000(capsys):
    from reldiv.io_cli import build_parser

    args = build_parser().parse_args(["stream", "--tokens", "x", "--query", "y", "--k", "2"])
    assert args.window == 1000
    assert args.alpha == 0.9


def test_cli_ground_eval(tmp_path, capsys):
    toks, truth, _ = simulate_files(tmp_path, capsys)
    code, report = run_cli(
        capsys,
        ["ground-eval", "--tokens", str(toks), "--truth", str(truth), "--top-k", "5"],
    )
    assert code == 0
    grounding = report["grounding"]
    assert grounding["num_queries"] == 1
    assert set(grounding["recall"]) == {"R@1@0.3", "R@1@0.5", "R@5@0.3", "R@5@0.5"}


def test_cli_sweep_alpha(tmp_path, capsys):
    toks, truth, _ = simulate_files(tmp_path, capsys)
    code, report = run_cli(
        capsys,
        ["sweep-alpha", "--tokens", str(toks), "--query", str(truth), "--truth",
         str(truth), "--k", "4", "--alphas", "0.0,0.9,1.0"],
    )
    assert code == 0
    assert [row["alpha"] for row in report["sweep"]] == [0.0, 0.9, 1.0]
    assert report["sweep"][-1]["recovery"] == 1.0
    assert all("objective" in row for row in report["sweep"])


def test_cli_usage_error_exit_2(capsys):
    assert main(["select"]) == 2  # missing required flags
    capsys.readouterr()
    assert main(["no-such-command"]) == 2
    capsys.readouterr()


def test_cli_data_error_exit_1(tmp_path, capsys):
    missing = tmp_path / "missing.jsonl"
    code = main(["select", "--tokens", str(missing), "--query", str(missing), "--k", "2"])
    assert code == 1
    err = capsys.readouterr().err
    assert "error:" in err


def test_cli_bad_file_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.jsonl"
    p.write_text("this is not json\n")
    q = tmp_path / "q.json"
    q.write_text(json.dumps({"id": "q", "embedding": [1.0, 0.0]}))
    code = main(["select", "--tokens", str(p), "--query", str(q), "--k", "2"])
    assert code == 1
    assert "line 1" in capsys.readouterr().err


def strip_wall_clock(text):
    return "\n".join(
        line for line in text.splitlines() if '"wall_clock_ms"' not in line
    )


def test_cli_reports_deterministic(tmp_path, capsys):
    outputs = []
    for run in ("a", "b"):
        d = tmp_path / run
        d.mkdir()
        toks = d / "toks.jsonl"
        truth = d / "truth.json"
        assert main(
            ["simulate", "--out", str(toks), "--truth-out", str(truth),
             "--num-tokens", "50", "--dim", "16", "--planted", "4", "--seed", "42"]
        ) == 0
        sim_out = capsys.readouterr().out
        assert main(
            ["select", "--tokens", str(toks), "--query", str(truth), "--k", "4"]
        ) == 0
        sel_out = capsys.readouterr().out
        assert main(
            ["ground-eval", "--tokens", str(toks), "--truth", str(truth)]
        ) == 0
        ge_out = capsys.readouterr().out
        outputs.append(
            (
                strip_wall_clock(sim_out.replace(str(d), "DIR")),
                strip_wall_clock(sel_out.replace(str(d), "DIR")),
                strip_wall_clock(ge_out.replace(str(d), "DIR")),
            )
        )
        # written files are byte-identical across runs
        outputs[-1] += (toks.read_bytes(), truth.read_bytes())
    assert outputs[0] == outputs[1]


def test_cli_version(capsys):
    assert main(["--version"]) == 0
