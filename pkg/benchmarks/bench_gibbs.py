"""Benchmark the compiled Gibbs kernel against the pure-Python fallback.

Both kernels are bit-identical by contract, so besides timing them this
also verifies the outputs match on every workload.

    python benchmarks/bench_gibbs.py [--iterations N]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from retta import _gibbs_py  # noqa: E402

try:
    from retta import _gibbs as _gibbs_cy
except ImportError:
    _gibbs_cy = None

WORKLOADS = [
    # name, docs, vocab, topics, tokens
    ("tweet-pools", 12, 500, 5, 1_600),
    ("small-corpus", 50, 2_000, 10, 20_000),
    ("mid-corpus", 200, 5_000, 20, 100_000),
]


def make_instance(rng, n_docs, vocab, total_tokens):
    tokens = rng.integers(0, vocab, size=total_tokens).astype(np.int32)
    cuts = np.sort(rng.choice(np.arange(1, total_tokens), size=n_docs - 1, replace=False))
    offsets = np.concatenate([[0], cuts, [total_tokens]]).astype(np.int32)
    return tokens, offsets


def bench(kernel, tokens, offsets, k, vocab, iterations, seed):
    start = time.perf_counter()
    out = kernel.run_gibbs(tokens, offsets, k, vocab, 50.0 / k, 0.01, iterations, seed)
    return time.perf_counter() - start, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--iterations", type=int, default=50)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    if _gibbs_cy is None:
        print("compiled kernel not built (pip install -e . --no-build-isolation)")

    rng = np.random.default_rng(7)
    header = f"{'workload':<14} {'tokens':>9} {'python':>10} {'cython':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, n_docs, vocab, k, total_tokens in WORKLOADS:
        tokens, offsets = make_instance(rng, n_docs, vocab, total_tokens)
        t_py, out_py = bench(_gibbs_py, tokens, offsets, k, vocab, args.iterations, args.seed)
        row = f"{name:<14} {total_tokens:>9,} {t_py:>9.3f}s"
        if _gibbs_cy is not None:
            t_cy, out_cy = bench(_gibbs_cy, tokens, offsets, k, vocab, args.iterations, args.seed)
            for a, b in zip(out_py, out_cy):
                assert np.array_equal(a, b), "kernel outputs diverged"
            row += f" {t_cy:>9.3f}s {t_py / t_cy:>7.1f}x"
        else:
            row += f" {'-':>10} {'-':>8}"
        print(row)
    if _gibbs_cy is not None:
        print("\noutputs verified bit-identical on every workload")


if __name__ == "__main__":
    main()
