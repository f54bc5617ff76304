"""Engine selection and the shared collection driver.

The compiled kernel is preferred when importable; `ICOQKD_ENGINE=py` (or
engine="py") forces the pure-Python loop.  Both engines consume identical
random chunks, so results are byte-identical across them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _pyloop
from .streams import SessionStreams

try:  # compiled kernel is optional
    from . import _roundloop as _extloop
except ImportError:  # pragma: no cover - depends on build environment
    _extloop = None

__all__ = ["available_engines", "get_engine", "CollectionResult", "run_collection"]

_STATE_LEN = 10
_ROUNDS, _CAP = 8, 9
_DONE_A, _DONE_B = 3, 7


def available_engines() -> tuple:
    return ("ext", "py") if _extloop is not None else ("py",)


def get_engine(name: str = "auto"):
    """Resolve an engine module by name, honoring the ICOQKD_ENGINE override."""
    if name in (None, "", "auto"):
        name = os.environ.get("ICOQKD_ENGINE", "auto")
    if name in (None, "", "auto"):
        name = "ext" if _extloop is not None else "py"
    if name == "ext":
        if _extloop is None:
            raise RuntimeError(
                "compiled engine requested but the extension is not built"
            )
        return _extloop
    if name == "py":
        return _pyloop
    raise ValueError(f"unknown engine {name!r}; expected 'auto', 'ext', or 'py'")


@dataclass
class CollectionResult:
    """Per-round log of a collection phase plus the completion flag."""

    rounds: int
    dirs: np.ndarray  # 1 = Alice sent
    sender_bits: np.ndarray
    recv_bits: np.ndarray
    completed: bool

    def compliance(self) -> float:
        return float(np.mean(self.sender_bits == self.recv_bits)) if self.rounds else 1.0


def run_collection(
    targets_a,
    targets_b,
    flip_table,
    streams: SessionStreams,
    round_cap: int,
    engine="auto",
    prior_rounds: int = 0,
) -> CollectionResult:
    """Run rounds until both parties filled every codeword quota (or cap).

    `flip_table[a, b, dir]` is the probability the receiver reads the sender's
    bit flipped; it is the only place the channel enters the round loop.
    `prior_rounds` continues a session (retransmissions) without resetting the
    cap accounting.
    """
    mod = get_engine(engine)
    targets_a = np.ascontiguousarray(targets_a, dtype=np.int32).reshape(-1, 2)
    targets_b = np.ascontiguousarray(targets_b, dtype=np.int32).reshape(-1, 2)
    flip_table = np.asarray(flip_table, dtype=np.float64).reshape(2, 2, 2)
    state = np.zeros(_STATE_LEN, dtype=np.int64)
    state[_CAP] = int(round_cap)
    state[_ROUNDS] = int(prior_rounds)
    state[_DONE_A] = 1 if targets_a.shape[0] == 0 else 0
    state[_DONE_B] = 1 if targets_b.shape[0] == 0 else 0

    dirs_parts, sender_parts, recv_parts = [], [], []
    while True:
        if (state[_DONE_A] and state[_DONE_B]) or state[_ROUNDS] >= state[_CAP]:
            break
        a_bits, b_bits, dirs, chan = streams.draw_chunk()
        consumed = mod.consume(state, targets_a, targets_b, dirs, a_bits, b_bits)
        if consumed:
            d = dirs[:consumed]
            sender = np.where(d == 1, a_bits[:consumed], b_bits[:consumed])
            flips = chan[:consumed] < flip_table[
                a_bits[:consumed], b_bits[:consumed], d
            ]
            dirs_parts.append(d)
            sender_parts.append(sender.astype(np.uint8))
            recv_parts.append((sender ^ flips).astype(np.uint8))

    def _cat(parts):
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)

    return CollectionResult(
        rounds=int(state[_ROUNDS]) - int(prior_rounds),
        dirs=_cat(dirs_parts),
        sender_bits=_cat(sender_parts),
        recv_bits=_cat(recv_parts),
        completed=bool(state[_DONE_A] and state[_DONE_B]),
    )
