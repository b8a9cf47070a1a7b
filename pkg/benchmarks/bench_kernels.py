#!/usr/bin/env python3
"""Time the hot kernels under the numba and pure-numpy backends.

The backend is fixed at interpreter startup by FISHERDOC_NUMBA, so this
script re-executes itself once per backend and collates the results:

    python3 benchmarks/bench_kernels.py [--scale N] [--repeats R]

Workloads are synthetic but shaped like the replication corpora.  The first
call of each kernel is discarded so numba's compile time never pollutes the
numbers (pass --show-compile to report it separately).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _workload_cbow(scale, rng):
    from fisherdoc.embeddings.sgd_kernels import cbow_epoch

    n_docs, doc_len, vocab, d = 150 * scale, 40, 2000, 50
    tokens = rng.integers(0, vocab, size=n_docs * doc_len).astype(np.int64)
    offsets = np.arange(0, n_docs * doc_len + 1, doc_len, dtype=np.int64)
    w_in = (rng.random((vocab, d)) - 0.5) / d
    w_out = np.zeros((vocab, d))
    win_draws = rng.integers(1, 6, size=tokens.size).astype(np.int64)
    neg_draws = rng.integers(0, vocab, size=(tokens.size, 5)).astype(np.int64)

    def run():
        cbow_epoch(tokens, offsets, w_in.copy(), w_out.copy(), win_draws,
                   neg_draws, 0.05, 0.0001, 0, tokens.size)

    return run


def _workload_gibbs(scale, rng):
    from fisherdoc.baselines.gibbs_kernels import gibbs_init, gibbs_sweep

    n_tokens, n_docs, vocab, k = 20000 * scale, 400, 3000, 20
    tokens = rng.integers(0, vocab, size=n_tokens).astype(np.int64)
    doc_of_token = np.sort(rng.integers(0, n_docs, size=n_tokens)).astype(np.int64)
    z = np.empty(n_tokens, dtype=np.int64)
    n_dk = np.zeros((n_docs, k))
    n_kt = np.zeros((k, vocab))
    n_k = np.zeros(k)
    gibbs_init(tokens, doc_of_token, z, n_dk, n_kt, n_k, rng.random(n_tokens))
    uniforms = rng.random(n_tokens)

    def run():
        gibbs_sweep(tokens, doc_of_token, z.copy(), n_dk.copy(), n_kt.copy(),
                    n_k.copy(), 0.05, 0.01, uniforms)

    return run


def _workload_bm25(scale, rng):
    from fisherdoc.retrieval.bm25_kernels import bm25_accumulate

    n_docs, n_terms, per_term = 50000, 20, 25000 * scale
    q_starts = np.arange(0, n_terms * per_term, per_term, dtype=np.int64)
    q_ends = q_starts + per_term
    q_idfs = rng.random(n_terms) * 5.0
    post_docs = rng.integers(0, n_docs, size=n_terms * per_term).astype(np.int64)
    post_tfs = rng.integers(1, 8, size=n_terms * per_term).astype(np.float64)
    norm = 1.2 * (1 - 0.75 + 0.75 * rng.random(n_docs) * 2.0)

    def run():
        bm25_accumulate(q_starts, q_ends, q_idfs, post_docs, post_tfs, norm,
                        np.zeros(n_docs))

    return run


WORKLOADS = [
    ("cbow_epoch", _workload_cbow),
    ("gibbs_sweep", _workload_gibbs),
    ("bm25_accumulate", _workload_bm25),
]


def worker(scale, repeats):
    from fisherdoc import accel

    results = {"backend": accel.backend_name(), "kernels": {}}
    for name, build in WORKLOADS:
        run = build(scale, np.random.default_rng(99))
        t0 = time.perf_counter()
        run()  # warm-up; includes jit compile on the numba backend
        compile_s = time.perf_counter() - t0
        best = min(_timed(run) for _ in range(repeats))
        results["kernels"][name] = {"best_s": best, "first_call_s": compile_s}
    print(json.dumps(results))


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _spawn(numba_flag, args):
    env = dict(os.environ, FISHERDOC_NUMBA=numba_flag)
    cmd = [sys.executable, os.path.abspath(__file__), "--worker",
           "--scale", str(args.scale), "--repeats", str(args.repeats)]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True)
    if out.returncode != 0:
        sys.stderr.write(out.stderr)
        raise SystemExit(f"worker with FISHERDOC_NUMBA={numba_flag} failed")
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=1,
                    help="workload size multiplier (default 1)")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timed repetitions per kernel; best is reported")
    ap.add_argument("--show-compile", action="store_true",
                    help="also print each backend's first-call time")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.worker:
        worker(args.scale, args.repeats)
        return

    fast = _spawn("1", args)
    slow = _spawn("0", args)
    if fast["backend"] != "numba":
        print("note: numba unavailable; both columns ran the numpy fallback")

    w = max(len(n) for n, _ in WORKLOADS)
    print(f"{'kernel':<{w}}  {fast['backend']:>10}  {slow['backend']:>10}  {'speedup':>8}")
    for name, _ in WORKLOADS:
        a = fast["kernels"][name]["best_s"]
        b = slow["kernels"][name]["best_s"]
        print(f"{name:<{w}}  {a:>9.4f}s  {b:>9.4f}s  {b / a:>7.1f}x")
    if args.show_compile:
        print()
        for name, _ in WORKLOADS:
            c = fast["kernels"][name]["first_call_s"]
            print(f"{name:<{w}}  first call on {fast['backend']}: {c:.3f}s")


if __name__ == "__main__":
    main()
