"""Protocol state, configuration, and result types."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..quantum import GAME_OPTIMUM

__all__ = [
    "SetupError",
    "InsufficientIndicesError",
    "ProtocolDesyncError",
    "PartyState",
    "PermutationMessage",
    "SessionConfig",
    "SessionStats",
]


class SetupError(ValueError):
    """Configuration or state that cannot start a session."""


class InsufficientIndicesError(RuntimeError):
    """A permutation was requested before enough indices were collected."""


class ProtocolDesyncError(RuntimeError):
    """A permutation references a round the receiver never recorded."""


@dataclass
class PartyState:
    """Per-party bookkeeping for the reference (round-at-a-time) engine.

    `zero_set`/`one_set` collect round indices for the codeword currently being
    transmitted; they may overshoot the targets (only the quota is ever drawn
    into a permutation).  `received` maps round index -> bit read as receiver.
    """

    role: str
    codec: object
    seed: np.ndarray
    codewords: list
    targets: list  # (ones_j, zeros_j) per codeword
    zero_set: list = field(default_factory=list)
    one_set: list = field(default_factory=list)
    received: dict = field(default_factory=dict)
    current_codeword: int = 0
    decoded_peer_messages: list = field(default_factory=list)

    @property
    def seed_ecc(self) -> np.ndarray:
        return np.concatenate(self.codewords) if self.codewords else np.zeros(0, np.uint8)

    @property
    def done(self) -> bool:
        return self.current_codeword >= len(self.codewords)

    @property
    def ready(self) -> bool:
        """True when the current codeword's quotas are both met."""
        if self.done:
            return False
        ones, zeros = self.targets[self.current_codeword]
        return len(self.zero_set) >= zeros and len(self.one_set) >= ones


@dataclass(frozen=True)
class PermutationMessage:
    """Ordered round indices whose true bit values spell one codeword."""

    codeword_index: int
    indices: tuple
    sender: str

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("permutation indices must be pairwise distinct")


@dataclass(frozen=True)
class SessionConfig:
    """Everything needed to run one key-agreement session deterministically."""

    n: int = 1990
    codec: str = "ideal,1990"
    channel: str = "bsc"  # "bsc" | "quantum"
    p: float = 0.1465
    process: str = "wcns"  # quantum mode: wcns | white-noise | comb-a-b | comb-b-a
    q0: float = 0.8334
    master_seed: int = 0
    trial_index: int = 0
    seed_alice: int | None = None
    seed_bob: int | None = None
    seed_channel: int | None = None
    pa_length: int | None = None
    retry_uncorrectable: bool = False
    round_cap_multiplier: float = 10.0
    engine: str = "auto"

    def __post_init__(self):
        if self.n < 1:
            raise SetupError("n must be positive")
        if self.channel not in ("bsc", "quantum"):
            raise SetupError(f"unknown channel mode {self.channel!r}")
        if not 0.0 <= self.p <= 1.0:
            raise SetupError("p must lie in [0, 1]")
        if not 0.5 <= self.q0 < GAME_OPTIMUM:
            raise SetupError(
                f"acceptance level must lie in [0.5, {GAME_OPTIMUM:.6f}), got {self.q0}"
            )
        if self.round_cap_multiplier <= 1.0:
            raise SetupError("round cap multiplier must exceed 1")

    def with_trial(self, index: int) -> "SessionConfig":
        return replace(self, trial_index=index)


@dataclass
class SessionStats:
    """Outcome summary of one session."""

    rounds: int
    encoded_length: int  # l = (n/K) N per party
    overhead: int  # rounds - 2l
    bit_overhead: dict  # per party: received-table entries beyond codeword needs
    codeword_errors: dict  # role -> observed error count per transmitted codeword
    compliance: float | None
    eavesdrop: bool
    success: bool
    failure_reason: str | None
    keys_match: bool
    keys: dict | None  # {"k0": hex, "k1": hex} from Alice's view
    engine: str
    trial_index: int = 0

    def to_json(self) -> dict:
        return {
            "rounds": self.rounds,
            "encoded_length": self.encoded_length,
            "overhead": self.overhead,
            "bit_overhead": self.bit_overhead,
            "codeword_errors": self.codeword_errors,
            "compliance": self.compliance,
            "eavesdrop": self.eavesdrop,
            "success": self.success,
            "failure_reason": self.failure_reason,
            "keys_match": self.keys_match,
            "keys": self.keys,
            "engine": self.engine,
            "trial_index": self.trial_index,
        }
