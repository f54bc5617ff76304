"""Party-level protocol operations: setup, permutation transmission, decoding,
eavesdropping detection, and key finalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .toeplitz import toeplitz_extract
from .types import (
    InsufficientIndicesError,
    PartyState,
    PermutationMessage,
    ProtocolDesyncError,
    SetupError,
)

__all__ = [
    "setup_party",
    "build_permutation",
    "recover_codeword",
    "decode_and_verify",
    "DetectionReport",
    "detect_eavesdropping",
    "finalize_keys",
]


def setup_party(seed, codec, role: str = "alice") -> PartyState:
    """Encode the party's secret component and count each codeword's 1s and 0s."""
    seed = np.asarray(seed, dtype=np.uint8)
    n = seed.size
    if n == 0 or n % codec.K:
        raise SetupError(f"component length {n} is not a multiple of K={codec.K}")
    codewords, targets = [], []
    for i in range(n // codec.K):
        word = codec.encode(seed[i * codec.K : (i + 1) * codec.K])
        ones = int(word.sum())
        codewords.append(word)
        targets.append((ones, codec.N - ones))
    return PartyState(role=role, codec=codec, seed=seed, codewords=codewords, targets=targets)


def build_permutation(codeword, zero_set, one_set, rng, *, codeword_index=0, sender="") -> PermutationMessage:
    """Spell the codeword as round indices drawn without replacement.

    For each bit, one index is pulled at a random position of the matching pool
    (ordered ascending at entry); pools may hold more indices than needed.
    """
    codeword = np.asarray(codeword, dtype=np.uint8)
    zeros_needed = int(np.sum(codeword == 0))
    ones_needed = int(codeword.size - zeros_needed)
    zero_pool = sorted(int(i) for i in zero_set)
    one_pool = sorted(int(i) for i in one_set)
    if len(zero_pool) < zeros_needed or len(one_pool) < ones_needed:
        raise InsufficientIndicesError(
            f"need {zeros_needed} zero and {ones_needed} one indices, have "
            f"{len(zero_pool)} and {len(one_pool)}"
        )
    out = []
    for bit in codeword:
        pool = one_pool if bit else zero_pool
        out.append(pool.pop(int(rng.integers(len(pool)))))
    return PermutationMessage(codeword_index, tuple(out), sender)


def recover_codeword(perm: PermutationMessage, received: dict) -> np.ndarray:
    """Read the codeword off the received-bit table through the permutation."""
    missing = [i for i in perm.indices if i not in received]
    if missing:
        raise ProtocolDesyncError(
            f"permutation references rounds absent from the received table: {missing[:5]}"
        )
    return np.array([received[i] for i in perm.indices], dtype=np.uint8)


def decode_and_verify(sender_codeword, recovered, codec):
    """Decode the recovered word and count the observed channel errors.

    Returns (message, observed_errors, status).  On a successful decode the
    message is re-encoded and compared against the recovered word; the mismatch
    count is the per-codeword error observation fed to eavesdropping detection.
    The rate-1 placeholder codec resolves against the sender's exact word (its
    decode failure probability is modeled as negligible).
    """
    sender_codeword = np.asarray(sender_codeword, dtype=np.uint8)
    recovered = np.asarray(recovered, dtype=np.uint8)
    if sender_codeword.shape != recovered.shape:
        raise ValueError("codeword length mismatch")
    if getattr(codec, "is_ideal", False):
        errors = int(np.sum(recovered != sender_codeword))
        return sender_codeword.copy(), errors, "ok"
    result = codec.decode(recovered)
    if not result.ok:
        return None, None, "uncorrectable"
    reencoded = codec.encode(result.message)
    errors = int(np.sum(recovered != reencoded))
    return result.message, errors, "ok"


@dataclass(frozen=True)
class DetectionReport:
    accept: bool
    compliance: float
    observed_bits: int
    observed_errors: int


def detect_eavesdropping(observations, q0: float) -> DetectionReport:
    """Accept when estimated compliance 1 - errors/bits reaches the acceptance level.

    `observations` is an iterable of (errors, bits) pairs, one per verified
    codeword.  The boundary is inclusive: compliance exactly q0 is accepted.
    """
    obs = [(int(e), int(b)) for e, b in observations]
    if not obs:
        raise ValueError("need at least one codeword observation")
    errors = sum(e for e, _ in obs)
    bits = sum(b for _, b in obs)
    compliance = 1.0 - errors / bits
    return DetectionReport(compliance >= q0, compliance, bits, errors)


def finalize_keys(comp_a, comp_b, pa=None):
    """Split each component into halves and cross-concatenate into two keys.

    With privacy amplification enabled, `pa` is a pair of Toeplitz specs (one
    per component) applied before the split.  K0 = A_low || B_low and
    K1 = A_high || B_high.
    """
    comp_a = np.asarray(comp_a, dtype=np.uint8)
    comp_b = np.asarray(comp_b, dtype=np.uint8)
    if comp_a.size != comp_b.size:
        raise ValueError("components must have equal length")
    if pa is not None:
        spec_a, spec_b = pa
        comp_a = toeplitz_extract(spec_a, comp_a)
        comp_b = toeplitz_extract(spec_b, comp_b)
    if comp_a.size % 2:
        raise ValueError("component length must be even to split into halves")
    half = comp_a.size // 2
    k0 = np.concatenate([comp_a[:half], comp_b[:half]])
    k1 = np.concatenate([comp_a[half:], comp_b[half:]])
    return k0, k1
