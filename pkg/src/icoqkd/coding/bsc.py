"""Binary symmetric channel, plain and two-way controlled."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["BscParams", "bsc_transmit", "bsc_controlled", "bsc_transmit_array"]


@dataclass(frozen=True)
class BscParams:
    """Crossover probability of a binary symmetric channel."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"crossover probability must lie in [0, 1], got {self.p}")


def bsc_transmit(m: int, p: float, rng) -> int:
    """Send one bit: flipped with probability p."""
    BscParams(p)
    return int(m) ^ int(rng.random() < p)


def bsc_controlled(a: int, b: int, b_prime: int, p: float, rng) -> int:
    """Two-way controlled channel: routes a when b'=1, b when b'=0."""
    return bsc_transmit(a if b_prime == 1 else b, p, rng)


def bsc_transmit_array(bits, p: float, rng) -> np.ndarray:
    """Vectorized transmission of a bit array through BSC(p)."""
    BscParams(p)
    bits = np.asarray(bits, dtype=np.uint8)
    flips = (rng.random(bits.shape) < p).astype(np.uint8)
    return bits ^ flips
