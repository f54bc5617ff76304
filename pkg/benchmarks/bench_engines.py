"""Benchmark the compiled round-loop kernel against the pure-Python engine.

Usage: python benchmarks/bench_engines.py [--trials 200]
"""

import argparse
import time

import numpy as np

from icoqkd.protocol import SessionConfig, available_engines, run_experiment
from icoqkd.protocol.engine import run_collection
from icoqkd.protocol.streams import derive_streams


CASES = [
    ("ideal 1990-bit sequences", SessionConfig(n=1990, codec="ideal,1990", p=0.1465)),
    ("concatenated 24x93", SessionConfig(n=264, codec="concat", p=0.1465)),
]


def bench_sessions(config, trials, engine):
    cfg = SessionConfig(**{**config.__dict__, "engine": engine})
    start = time.perf_counter()
    agg = run_experiment(cfg, trials)
    return time.perf_counter() - start, agg


def bench_loop(trials, engine):
    """The collection loop alone: one 1990-bit codeword per party."""
    flip = np.full((2, 2, 2), 0.1465)
    rng = np.random.default_rng(0)
    rounds = 0
    start = time.perf_counter()
    for trial in range(trials):
        streams = derive_streams(SessionConfig(master_seed=1, trial_index=trial))
        z = int(rng.integers(900, 1090))
        targets = np.array([[z, 1990 - z]], dtype=np.int32)
        res = run_collection(targets, targets.copy(), flip, streams, 39_800, engine)
        rounds += res.rounds
    return time.perf_counter() - start, rounds


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=200)
    args = parser.parse_args()

    engines = available_engines()
    print(f"engines available: {engines}; trials per case: {args.trials}\n")

    print(f"{'collection loop only':<28} {'engine':<6} {'total':>9} {'rounds/s':>12}")
    baseline = None
    for engine in engines:
        elapsed, rounds = bench_loop(args.trials, engine)
        note = ""
        if engine == "ext":
            baseline = elapsed
        elif baseline is not None:
            note = f"  ({elapsed / baseline:.1f}x slower than ext)"
        print(f"{'':<28} {engine:<6} {elapsed:8.2f}s {rounds / elapsed:12.0f}{note}")
    print()

    print(f"{'full sessions':<28} {'engine':<6} {'total':>9} {'sessions/s':>12} {'mean rounds':>12}")
    for name, config in CASES:
        baseline = None
        for engine in engines:
            elapsed, agg = bench_sessions(config, args.trials, engine)
            rate = args.trials / elapsed
            note = ""
            if engine == "ext":
                baseline = elapsed
            elif baseline is not None:
                note = f"  ({elapsed / baseline:.1f}x slower than ext)"
            print(
                f"{name:<28} {engine:<6} {elapsed:8.2f}s {rate:12.1f} "
                f"{agg['mean']:12.1f}{note}"
            )
        print()


if __name__ == "__main__":
    main()
