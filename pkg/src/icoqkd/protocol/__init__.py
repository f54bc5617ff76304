"""Key-agreement engine: parties, permutation transmission, sessions, experiments."""

from .engine import available_engines, get_engine, run_collection
from .experiment import aggregate, run_experiment, run_trials
from .party import (
    DetectionReport,
    build_permutation,
    decode_and_verify,
    detect_eavesdropping,
    finalize_keys,
    setup_party,
)
from .session import (
    BscChannel,
    QuantumChannel,
    channel_flip_table,
    execute_round,
    process_by_name,
    run_session,
)
from .toeplitz import ToeplitzSpec, toeplitz_extract, toeplitz_matrix
from .types import (
    InsufficientIndicesError,
    PartyState,
    PermutationMessage,
    ProtocolDesyncError,
    SessionConfig,
    SessionStats,
    SetupError,
)

__all__ = [
    "BscChannel",
    "DetectionReport",
    "InsufficientIndicesError",
    "PartyState",
    "PermutationMessage",
    "ProtocolDesyncError",
    "QuantumChannel",
    "SessionConfig",
    "SessionStats",
    "SetupError",
    "ToeplitzSpec",
    "aggregate",
    "available_engines",
    "build_permutation",
    "channel_flip_table",
    "decode_and_verify",
    "detect_eavesdropping",
    "execute_round",
    "finalize_keys",
    "get_engine",
    "process_by_name",
    "run_collection",
    "run_experiment",
    "run_session",
    "run_trials",
    "setup_party",
    "toeplitz_extract",
    "toeplitz_matrix",
]
