#!/usr/bin/env python3
"""Benchmark the compiled selection kernels against the NumPy fallback.

Times the raw hot kernels (greedy gains, swap search, QP ascent) on shared
precomputed instance arrays, so the comparison isolates the compiled loops
from the NumPy instance build that both backends share. Also verifies that
both backends return identical index sets through the public solver API.
Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import argparse
import time

import numpy as np

from reldiv import _kernels
from reldiv.similarity import ObjectiveParams
from reldiv.solvers import (
    SelectionConfig,
    _scaled_arrays,
    project_capped_simplex,
    select_greedy,
    select_local_search,
    select_qp_relax,
)
from reldiv.token_model import Query, Token, TokenKind, normalize_embedding

SIZES = [(200, 16), (500, 32), (1000, 64)]


def make_instance(n, dim, seed):
    rng = np.random.default_rng(seed)
    tokens = [
        Token(
            id=f"t{i:05d}",
            kind=TokenKind.SCENE,
            embedding=normalize_embedding(rng.standard_normal(dim)),
            span=(float(i), float(i + 1)),
        )
        for i in range(n)
    ]
    query = Query(id="q", embedding=normalize_embedding(rng.standard_normal(dim)))
    return tokens, query


def best_of(repeats, fn):
    best, value = float("inf"), None
    for _ in range(repeats):
        started = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - started)
    return best, value


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--dim", type=int, default=32)
    parser.add_argument("--alpha", type=float, default=0.9)
    parser.add_argument("--qp-steps", type=int, default=200)
    args = parser.parse_args()

    backends = sorted(_kernels.available())
    if "cython" not in backends:
        print("compiled kernels unavailable; showing the fallback alone")
    params = ObjectiveParams(alpha=args.alpha)
    print(f"backends: {backends}  alpha={args.alpha}  dim={args.dim}  repeats={args.repeats}")
    header = f"{'instance':>14}  {'kernel':>7}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)

    for n, k in SIZES:
        tokens, query = make_instance(n, args.dim, seed=n)
        build_time, (rbar, wbar) = best_of(
            args.repeats, lambda: _scaled_arrays(tokens, query, params)
        )
        print(f"{f'n={n} k={k}':>14}  {'(build)':>7}  shared instance arrays: {build_time * 1000:.1f}ms")
        mods = {name: _kernels.available()[name] for name in backends}
        init_picks, _ = mods[backends[0]].greedy(rbar, wbar, k, False)
        x0 = np.full(n, k / n)
        project = lambda raw: project_capped_simplex(raw, k)

        kernel_calls = {
            "greedy": lambda m: m.greedy(rbar, wbar, k, False),
            "local": lambda m: m.local_search(rbar, wbar, k, list(init_picks), 100, False),
            "qp": lambda m: m.qp_ascent(rbar, wbar, x0, args.qp_steps, 0.001, project),
        }
        for name, call in kernel_calls.items():
            times, outputs = {}, {}
            for backend in backends:
                mod = mods[backend]
                times[backend], outputs[backend] = best_of(args.repeats, lambda m=mod: call(m))
            row = f"{'':>14}  {name:>7}  " + "".join(f"{times[b] * 1000:>10.1f}ms" for b in backends)
            if len(backends) == 2:
                row += f"  {times['python'] / times['cython']:>7.1f}x"
            print(row)

    # end-to-end agreement through the public API
    if len(backends) == 2:
        previous = _kernels.active_name()
        try:
            for n, k in SIZES:
                tokens, query = make_instance(n, args.dim, seed=n)
                cfg = SelectionConfig(
                    k=k, params=params, qp_steps=args.qp_steps
                )
                for fn in (select_greedy, select_local_search, select_qp_relax):
                    picked = {}
                    for backend in backends:
                        _kernels.use(backend)
                        picked[backend] = fn(tokens, query, cfg).indices
                    assert picked["python"] == picked["cython"], (
                        f"{fn.__name__} disagrees on n={n} k={k}"
                    )
        finally:
            _kernels.use(previous)
        print("selections identical across backends for every solver and size")


if __name__ == "__main__":
    main()
