"""Majority-vote repetition, the concatenated codec, and block-success math.

The concatenated construction encodes 11 message bits to a 31-bit BCH word and
triples every bit (2232 = 24 x 93 for a 264-bit message).  The protocol engine
transmits one 93-bit unit per codeword.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bch import BchCode, DecodeResult

__all__ = [
    "CodeParams",
    "mvc_encode",
    "mvc_decode",
    "mvc_effective_ber",
    "block_success_probability",
    "BchCodec",
    "ConcatBlockCodec",
    "IdealCodec",
    "ConcatDecodeResult",
    "concat_encode",
    "concat_decode",
    "parse_codec_spec",
]

CONCAT_MESSAGE_BITS = 264
CONCAT_CODEWORD_BITS = 2232
_CONCAT_BLOCKS = 24


@dataclass(frozen=True)
class CodeParams:
    """(N, K, t) summary of a block code."""

    N: int
    K: int
    t: int

    def __post_init__(self):
        if not 0 < self.K <= self.N:
            raise ValueError(f"require 0 < K <= N, got K={self.K}, N={self.N}")
        if self.t < 0:
            raise ValueError("t must be nonnegative")


def mvc_encode(bits) -> np.ndarray:
    """Triple every bit."""
    return np.repeat(np.asarray(bits, dtype=np.uint8), 3)


def mvc_decode(bits) -> np.ndarray:
    """Majority vote per consecutive triple."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 3:
        raise ValueError(f"length must be divisible by 3, got {bits.size}")
    return (bits.reshape(-1, 3).sum(axis=1) >= 2).astype(np.uint8)


def mvc_effective_ber(p: float) -> float:
    """Residual error rate after 2-of-3 majority: 3 p^2 (1-p) + p^3."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return 3.0 * p * p * (1.0 - p) + p**3


def block_success_probability(n: int, t: int, p: float) -> float:
    """P(at most t errors in n independent BSC(p) uses)."""
    if not 0 <= t <= n:
        raise ValueError(f"require 0 <= t <= n, got t={t}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return float(
        sum(math.comb(n, k) * p**k * (1.0 - p) ** (n - k) for k in range(t + 1))
    )


class BchCodec:
    """Protocol-facing wrapper over a BCH block code."""

    is_ideal = False

    def __init__(self, n: int, k: int):
        self.code = BchCode.from_params(n, k)
        self.N = self.code.n
        self.K = self.code.k
        self.t = self.code.t
        self.name = f"bch,{n},{k}"

    @property
    def params(self) -> CodeParams:
        return CodeParams(self.N, self.K, self.t)

    def encode(self, message) -> np.ndarray:
        return self.code.encode(message)

    def decode(self, word) -> DecodeResult:
        return self.code.decode(word)


class ConcatBlockCodec:
    """One 93-bit unit of the concatenation: BCH(31,11) inside MVC(2,3).

    Any pattern of up to 11 raw flips is guaranteed correctable (at least six
    triples must take two hits each to defeat the BCH stage).
    """

    is_ideal = False
    N = 93
    K = 11
    t = 11
    name = "concat"

    def __init__(self):
        self.inner = BchCode.from_params(31, 11)

    @property
    def params(self) -> CodeParams:
        return CodeParams(self.N, self.K, self.t)

    def encode(self, message) -> np.ndarray:
        return mvc_encode(self.inner.encode(message))

    def decode(self, word) -> DecodeResult:
        word = np.asarray(word, dtype=np.uint8)
        if word.shape != (self.N,):
            raise ValueError(f"expected {self.N} bits, got {word.shape}")
        return self.inner.decode(mvc_decode(word))


class IdealCodec:
    """Placeholder for a capacity-approaching code: rate 1, oracle decoding.

    The session engine resolves decoding against the sender's true word, which
    models a code whose failure probability is negligible at the configured
    blocklength; it exists so round-count experiments can run without a real
    codec in the loop.
    """

    is_ideal = True
    t = 0

    def __init__(self, n: int):
        self.N = n
        self.K = n
        self.name = f"ideal,{n}"

    @property
    def params(self) -> CodeParams:
        return CodeParams(self.N, self.K, self.t)

    def encode(self, message) -> np.ndarray:
        message = np.asarray(message, dtype=np.uint8)
        if message.shape != (self.K,):
            raise ValueError(f"message must have length {self.K}")
        return message.copy()

    def decode(self, word) -> DecodeResult:
        return DecodeResult(np.asarray(word, dtype=np.uint8).copy(), 0, "ok")


@dataclass(frozen=True)
class ConcatDecodeResult:
    """Whole-message decode outcome with per-block reporting."""

    message: np.ndarray
    corrected_errors: int
    status: str
    block_statuses: tuple
    failed_blocks: tuple

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def concat_encode(message) -> np.ndarray:
    """264 bits -> 24 BCH(31,11) blocks -> tripled to 2232 bits."""
    message = np.asarray(message, dtype=np.uint8)
    if message.shape != (CONCAT_MESSAGE_BITS,):
        raise ValueError(f"message must have length {CONCAT_MESSAGE_BITS}")
    codec = ConcatBlockCodec()
    return np.concatenate(
        [codec.encode(message[i * 11 : (i + 1) * 11]) for i in range(_CONCAT_BLOCKS)]
    )


def concat_decode(word) -> ConcatDecodeResult:
    """Majority-vote each triple, then BCH-decode each of the 24 blocks."""
    word = np.asarray(word, dtype=np.uint8)
    if word.shape != (CONCAT_CODEWORD_BITS,):
        raise ValueError(f"word must have length {CONCAT_CODEWORD_BITS}")
    codec = ConcatBlockCodec()
    messages, statuses, failed = [], [], []
    corrected = 0
    for i in range(_CONCAT_BLOCKS):
        res = codec.decode(word[i * 93 : (i + 1) * 93])
        messages.append(res.message)
        statuses.append(res.status)
        corrected += res.corrected_errors
        if not res.ok:
            failed.append(i)
    status = "ok" if not failed else "uncorrectable"
    return ConcatDecodeResult(
        np.concatenate(messages), corrected, status, tuple(statuses), tuple(failed)
    )


def parse_codec_spec(spec: str, n: int | None = None):
    """Build a codec from a CLI-style spec: 'bch,N,K', 'concat', or 'ideal[,N]'."""
    parts = [p.strip() for p in str(spec).split(",")]
    family = parts[0].lower()
    if family == "bch":
        if len(parts) != 3:
            raise ValueError("bch spec must be 'bch,N,K'")
        return BchCodec(int(parts[1]), int(parts[2]))
    if family == "concat":
        if len(parts) != 1:
            raise ValueError("concat spec takes no parameters")
        return ConcatBlockCodec()
    if family == "ideal":
        if len(parts) == 2:
            return IdealCodec(int(parts[1]))
        if len(parts) == 1 and n is not None:
            return IdealCodec(int(n))
        raise ValueError("ideal spec must be 'ideal,N' (or pass a sequence length)")
    raise ValueError(f"unknown codec family {family!r}")
