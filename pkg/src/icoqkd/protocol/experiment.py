"""Batched session experiments with deterministic per-trial seeding."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

from .session import run_session
from .types import SessionConfig

__all__ = ["run_trials", "aggregate", "run_experiment"]


def run_trials(config: SessionConfig, start: int, stop: int):
    """Run trials [start, stop); each derives its own streams from the index."""
    rows = []
    for trial in range(start, stop):
        stats = run_session(config.with_trial(trial))
        rows.append((trial, stats.rounds, stats.overhead, stats.success))
    return rows


def aggregate(rows, trials: int) -> dict:
    """Flat summary over the successful sessions' round counts."""
    kept = sorted((r, d) for _, r, d, ok in rows if ok)
    successes = len(kept)
    out = {
        "trials": trials,
        "successes": successes,
        "success_rate": successes / trials if trials else None,
        "min": None,
        "max": None,
        "mean": None,
        "stddev": None,
        "mean_overhead": None,
    }
    if successes:
        rounds = [r for r, _ in kept]
        mean = sum(rounds) / successes
        out["min"] = rounds[0]
        out["max"] = rounds[-1]
        out["mean"] = mean
        out["mean_overhead"] = sum(d for _, d in kept) / successes
        if successes > 1:
            var = sum((r - mean) ** 2 for r in rounds) / (successes - 1)
            out["stddev"] = math.sqrt(var)
    return out


def run_experiment(config: SessionConfig, trials: int, workers: int = 1) -> dict:
    """Fan trials across a worker pool; reduction is ordered by trial index."""
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if trials == 0:
        return aggregate([], 0)
    workers = max(1, int(workers))
    if workers == 1:
        rows = run_trials(config, 0, trials)
    else:
        step = -(-trials // workers)
        spans = [(i, min(i + step, trials)) for i in range(0, trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_trials, config, a, b) for a, b in spans]
            rows = [row for fut in futures for row in fut.result()]
    rows.sort(key=lambda r: r[0])
    return aggregate(rows, trials)
