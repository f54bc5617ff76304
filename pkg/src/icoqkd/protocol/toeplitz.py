"""Toeplitz hashing over GF(2) for privacy amplification.

Bit convention (fixed, wire-compatible): for output length l and input length
n, the matrix entry is T[i][j] = seed[(n-1) + i - j], so seed bit 0 sits at
T[0][n-1], the first row reads seed[n-1] down to seed[0], and the first column
reads seed[n-1] upward.  Input bit 0 multiplies column 0; output bit i is the
parity of row i times the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ToeplitzSpec", "toeplitz_matrix", "toeplitz_extract"]


@dataclass(frozen=True)
class ToeplitzSpec:
    """Output length, input length, and the (l + n - 1)-bit public seed."""

    out_len: int
    in_len: int
    seed: np.ndarray

    def __post_init__(self):
        if self.out_len < 1 or self.in_len < 1:
            raise ValueError("lengths must be positive")
        seed = np.asarray(self.seed, dtype=np.uint8)
        expected = self.out_len + self.in_len - 1
        if seed.shape != (expected,):
            raise ValueError(
                f"seed must have length l + n - 1 = {expected}, got {seed.shape}"
            )
        object.__setattr__(self, "seed", seed)


def toeplitz_matrix(spec: ToeplitzSpec) -> np.ndarray:
    """Materialize T with T[i][j] = seed[(n-1) + i - j]."""
    n = spec.in_len
    i = np.arange(spec.out_len)[:, None]
    j = np.arange(n)[None, :]
    return spec.seed[(n - 1) + i - j]


def toeplitz_extract(spec: ToeplitzSpec, bits) -> np.ndarray:
    """T @ input over GF(2)."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape != (spec.in_len,):
        raise ValueError(f"input must have length {spec.in_len}, got {bits.shape}")
    return (toeplitz_matrix(spec).astype(np.int64) @ bits.astype(np.int64) % 2).astype(
        np.uint8
    )
