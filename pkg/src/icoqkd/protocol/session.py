"""Full key-agreement sessions: collection rounds, permutation transmission,
decoding, eavesdropping detection, and key finalization."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .. import quantum
from ..coding import bsc_controlled, parse_codec_spec
from .engine import get_engine, run_collection
from .party import (
    DetectionReport,
    decode_and_verify,
    detect_eavesdropping,
    finalize_keys,
    setup_party,
)
from .streams import derive_streams
from .toeplitz import ToeplitzSpec
from .types import PartyState, SessionConfig, SessionStats, SetupError

__all__ = [
    "BscChannel",
    "QuantumChannel",
    "execute_round",
    "process_by_name",
    "channel_flip_table",
    "run_session",
]


def process_by_name(name: str) -> quantum.ProcessMatrix:
    table = {
        "wcns": quantum.make_wcns,
        "white-noise": quantum.make_white_noise,
        "comb-a-b": lambda: quantum.make_identity_comb("A<B"),
        "comb-b-a": lambda: quantum.make_identity_comb("B<A"),
    }
    if name not in table:
        raise SetupError(f"unknown process {name!r}; choose from {sorted(table)}")
    return table[name]()


class BscChannel:
    """Classical round channel: the receiver reads the sender's bit via BSC(p)."""

    def __init__(self, p: float):
        self.p = p

    def transmit(self, a, b, b_prime, rng):
        sender_bit = a if b_prime == 1 else b
        return sender_bit, bsc_controlled(a, b, b_prime, self.p, rng)


class QuantumChannel:
    """Exact round channel: samples the full outcome law of the process."""

    def __init__(self, process: quantum.ProcessMatrix):
        self.process = process

    def transmit(self, a, b, b_prime, rng):
        out = quantum.sample_round(self.process, a, b, b_prime, rng)
        sender_bit = a if b_prime == 1 else b
        received = out.y if b_prime == 1 else out.x
        return sender_bit, received


def execute_round(alice: PartyState, bob: PartyState, channel, rng) -> dict:
    """Advance both parties by one round (reference, round-at-a-time engine).

    Draws fresh data bits and the direction, runs the channel, stores the round
    index on the sender side and the received bit on the receiver side.
    Returns the round record for auditing.
    """
    # every round stores exactly one received entry, so the table sizes count rounds
    i = len(alice.received) + len(bob.received)
    a = int(rng.integers(2))
    b = int(rng.integers(2))
    b_prime = int(rng.integers(2))
    sender, receiver = (alice, bob) if b_prime == 1 else (bob, alice)
    sender_bit, received = channel.transmit(a, b, b_prime, rng)
    if not sender.done:
        (sender.one_set if sender_bit else sender.zero_set).append(i)
    receiver.received[i] = int(received)
    return {
        "round": i,
        "b_prime": b_prime,
        "sender": sender.role,
        "stored_set": "I" if sender_bit else "O",
        "received_bit": int(received),
    }


def channel_flip_table(config: SessionConfig) -> np.ndarray:
    """The per-(a, b, direction) flip law consumed by the batch engines."""
    if config.channel == "bsc":
        return np.full((2, 2, 2), config.p)
    return quantum.flip_probability_table(process_by_name(config.process))


def _segment_windows(dirs, sender_bits, targets, party_flag):
    """Split one party's send sequence into per-codeword collection windows.

    Returns, per codeword, (zero_indices, one_indices, completion_round) with
    indices as global round numbers.  Mirrors the engines' sequential quota
    rule exactly (cumulative-count thresholds with carried offsets).
    """
    send_rounds = np.flatnonzero(dirs == party_flag)
    bits = sender_bits[send_rounds]
    cz = np.cumsum(bits == 0)
    co = np.cumsum(bits == 1)
    windows = []
    pos, z_prev, o_prev = 0, 0, 0
    for zeros_needed, ones_needed in targets:
        t_z = int(np.searchsorted(cz, z_prev + zeros_needed, side="left"))
        t_o = int(np.searchsorted(co, o_prev + ones_needed, side="left"))
        t_done = max(t_z, t_o, pos)
        if t_done >= len(bits):
            raise RuntimeError("collection log ended before all quotas were met")
        window_rounds = send_rounds[pos : t_done + 1]
        window_bits = bits[pos : t_done + 1]
        windows.append(
            (
                window_rounds[window_bits == 0],
                window_rounds[window_bits == 1],
                int(send_rounds[t_done]),
            )
        )
        pos = t_done + 1
        z_prev = int(cz[t_done])
        o_prev = int(co[t_done])
    return windows


def _batch_permutation(codeword, zero_idx, one_idx, rng):
    """Vectorized equivalent of build_permutation's sequential random pops."""
    zeros_needed = int(np.sum(codeword == 0))
    ones_needed = codeword.size - zeros_needed
    zperm = zero_idx[rng.permutation(zero_idx.size)][:zeros_needed]
    operm = one_idx[rng.permutation(one_idx.size)][:ones_needed]
    out = np.empty(codeword.size, dtype=np.int64)
    out[codeword == 0] = zperm
    out[codeword == 1] = operm
    return out


@dataclass
class _Phase:
    """One collection phase (initial transmission or a retransmission)."""

    offset: int
    dirs: np.ndarray
    sender_bits: np.ndarray
    recv_bits: np.ndarray


def _targets_array(party: PartyState, indices=None) -> np.ndarray:
    rows = []
    idx = range(len(party.targets)) if indices is None else indices
    for j in idx:
        ones, zeros = party.targets[j]
        rows.append((zeros, ones))
    return np.asarray(rows, dtype=np.int32).reshape(-1, 2)


def run_session(config: SessionConfig, transcript=None) -> SessionStats:
    """Run one full session; deterministic given the config seeds.

    `transcript` is an optional writable text stream receiving line-delimited
    JSON round records and permutation messages.
    """
    codec = parse_codec_spec(config.codec, n=config.n)
    if config.n % codec.K:
        raise SetupError(f"n={config.n} is not a multiple of the codec K={codec.K}")
    out_len = config.pa_length if config.pa_length is not None else config.n
    if out_len % 2:
        raise SetupError("final component length must be even to form the two keys")

    streams = derive_streams(config)
    seed_a = streams.alice_data.integers(0, 2, config.n, dtype=np.uint8)
    seed_b = streams.bob_data.integers(0, 2, config.n, dtype=np.uint8)
    alice = setup_party(seed_a, codec, "alice")
    bob = setup_party(seed_b, codec, "bob")
    blocks = config.n // codec.K
    encoded_len = blocks * codec.N
    round_cap = int(config.round_cap_multiplier * 2 * encoded_len)
    flip_table = channel_flip_table(config)
    engine_name = get_engine(config.engine).NAME

    phases: list[_Phase] = []
    rounds_total = 0

    def collect(ta, tb):
        nonlocal rounds_total
        res = run_collection(
            ta, tb, flip_table, streams, round_cap, config.engine, rounds_total
        )
        phases.append(
            _Phase(rounds_total, res.dirs, res.sender_bits, res.recv_bits)
        )
        rounds_total += res.rounds
        return res

    result = collect(_targets_array(alice), _targets_array(bob))

    def finish(success, reason, detection=None, keys=None, keys_match=False, errors=None):
        sends_a = sum(int(np.sum(ph.dirs == 1)) for ph in phases)
        return SessionStats(
            rounds=rounds_total,
            encoded_length=encoded_len,
            overhead=rounds_total - 2 * encoded_len,
            bit_overhead={
                "alice": rounds_total - sends_a - encoded_len,
                "bob": sends_a - encoded_len,
            },
            codeword_errors=errors or {"alice": [], "bob": []},
            compliance=None if detection is None else detection.compliance,
            eavesdrop=bool(detection is not None and not detection.accept),
            success=success,
            failure_reason=reason,
            keys_match=keys_match,
            keys=keys,
            engine=engine_name,
            trial_index=config.trial_index,
        )

    if not result.completed:
        return finish(False, "timeout")

    # permutation transmission + decoding, with optional retransmission
    perm_rngs = {"alice": streams.perm_alice, "bob": streams.perm_bob}
    parties = {"alice": alice, "bob": bob}
    pending = {"alice": list(range(blocks)), "bob": list(range(blocks))}
    decoded = {"alice": [None] * blocks, "bob": [None] * blocks}
    observed = {"alice": [None] * blocks, "bob": [None] * blocks}
    permutations = {"alice": [None] * blocks, "bob": [None] * blocks}
    completion = {"alice": [None] * blocks, "bob": [None] * blocks}

    def process_phase(role, phase, codeword_indices):
        # phases are round-contiguous, so the concatenated logs index globally
        recv_all = np.concatenate([ph.recv_bits for ph in phases])
        party = parties[role]
        flag = 1 if role == "alice" else 0
        targets = [(party.targets[j][1], party.targets[j][0]) for j in codeword_indices]
        windows = _segment_windows(phase.dirs, phase.sender_bits, targets, flag)
        failed = []
        for j, (zero_idx, one_idx, done_at) in zip(codeword_indices, windows):
            word = party.codewords[j]
            perm = _batch_permutation(word, zero_idx + phase.offset, one_idx + phase.offset, perm_rngs[role])
            permutations[role][j] = perm
            completion[role][j] = done_at + phase.offset
            recovered = recv_all[perm]
            message, errors, status = decode_and_verify(word, recovered, codec)
            if status == "ok":
                decoded[role][j] = message
                observed[role][j] = errors
            else:
                failed.append(j)
        return failed

    for role in ("alice", "bob"):
        pending[role] = process_phase(role, phases[0], pending[role])

    while config.retry_uncorrectable and (pending["alice"] or pending["bob"]):
        ta = _targets_array(alice, pending["alice"])
        tb = _targets_array(bob, pending["bob"])
        res = collect(ta, tb)
        if not res.completed:
            return finish(False, "timeout")
        for role in ("alice", "bob"):
            if pending[role]:
                pending[role] = process_phase(role, phases[-1], pending[role])

    errors_out = {
        role: [observed[role][j] for j in range(blocks)] for role in ("alice", "bob")
    }
    if transcript is not None:
        _write_transcript(transcript, phases, permutations, completion, parties)

    if pending["alice"] or pending["bob"]:
        detection = _detect(observed, codec, config.q0)
        return finish(False, "uncorrectable", detection, errors=errors_out)

    detection = _detect(observed, codec, config.q0)

    # assemble both views of the two components
    comp_a_at_bob = np.concatenate(decoded["alice"])
    comp_b_at_alice = np.concatenate(decoded["bob"])
    pa = None
    if config.pa_length is not None:
        seed_bits_a = streams.pa.integers(
            0, 2, config.pa_length + config.n - 1, dtype=np.uint8
        )
        seed_bits_b = streams.pa.integers(
            0, 2, config.pa_length + config.n - 1, dtype=np.uint8
        )
        pa = (
            ToeplitzSpec(config.pa_length, config.n, seed_bits_a),
            ToeplitzSpec(config.pa_length, config.n, seed_bits_b),
        )
    alice_keys = finalize_keys(seed_a, comp_b_at_alice, pa)
    bob_keys = finalize_keys(comp_a_at_bob, seed_b, pa)
    keys_match = all(
        np.array_equal(ka, kb) for ka, kb in zip(alice_keys, bob_keys)
    )
    keys = {
        "k0": np.packbits(alice_keys[0]).tobytes().hex(),
        "k1": np.packbits(alice_keys[1]).tobytes().hex(),
    }

    if not detection.accept:
        return finish(False, "eavesdrop", detection, keys, keys_match, errors_out)
    if not keys_match:
        return finish(False, "key_mismatch", detection, keys, keys_match, errors_out)
    return finish(True, None, detection, keys, True, errors_out)


def _detect(observed, codec, q0) -> DetectionReport | None:
    obs = [
        (e, codec.N)
        for role in ("alice", "bob")
        for e in observed[role]
        if e is not None
    ]
    return detect_eavesdropping(obs, q0) if obs else None


def _write_transcript(stream, phases, permutations, completion, parties):
    """Line-delimited audit log: every round record, permutations interleaved."""
    perm_at = {}
    for role in ("alice", "bob"):
        for j, (perm, done_at) in enumerate(
            zip(permutations[role], completion[role])
        ):
            if perm is not None:
                perm_at.setdefault(done_at, []).append(
                    {"sender": role, "codeword": j, "indices": [int(i) for i in perm]}
                )
    for ph in phases:
        for i in range(len(ph.dirs)):
            g = ph.offset + i
            sender = "alice" if ph.dirs[i] else "bob"
            stream.write(
                json.dumps(
                    {
                        "round": g,
                        "b_prime": int(ph.dirs[i]),
                        "sender": sender,
                        "stored_set": "I" if ph.sender_bits[i] else "O",
                        "received_bit": int(ph.recv_bits[i]),
                    },
                    sort_keys=True,
                )
                + "\n"
            )
            for msg in perm_at.get(g, ()):
                stream.write(json.dumps({"permutation": msg}, sort_keys=True) + "\n")
