"""Deterministic random streams for sessions.

One session owns seven independent PCG64 streams, derived from
SeedSequence([master_seed, trial_index]) unless per-party seeds are given:

    alice root  -> data bits, permutation draws
    bob root    -> data bits, direction bits, permutation draws
    channel     -> one uniform per round (flip decisions)
    pa          -> Toeplitz seeds (public)

Consumption contract (identical for both engines): the party secret components
are drawn first (n bits from each data stream); the round phase then draws, per
chunk of CHUNK rounds, the Alice data chunk, the Bob data chunk, the direction
chunk, and the channel chunk, in that order; unused tail values of the final
chunk are discarded.  Permutation draws consume the per-party permutation
streams only after the round phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["CHUNK", "SessionStreams", "derive_streams"]

CHUNK = 4096


@dataclass
class SessionStreams:
    alice_data: np.random.Generator
    bob_data: np.random.Generator
    direction: np.random.Generator
    channel: np.random.Generator
    perm_alice: np.random.Generator
    perm_bob: np.random.Generator
    pa: np.random.Generator

    def draw_chunk(self):
        a_bits = self.alice_data.integers(0, 2, CHUNK, dtype=np.uint8)
        b_bits = self.bob_data.integers(0, 2, CHUNK, dtype=np.uint8)
        dirs = self.direction.integers(0, 2, CHUNK, dtype=np.uint8)
        chan = self.channel.random(CHUNK)
        return a_bits, b_bits, dirs, chan


def _gen(seed_seq) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_seq))


def derive_streams(config) -> SessionStreams:
    base = np.random.SeedSequence([int(config.master_seed), int(config.trial_index)])
    alice_root, bob_root, chan_root, pa_root = base.spawn(4)
    if config.seed_alice is not None:
        alice_root = np.random.SeedSequence([int(config.seed_alice)])
    if config.seed_bob is not None:
        bob_root = np.random.SeedSequence([int(config.seed_bob)])
    if config.seed_channel is not None:
        chan_root = np.random.SeedSequence([int(config.seed_channel)])
    a_data, a_perm = alice_root.spawn(2)
    b_data, b_dir, b_perm = bob_root.spawn(3)
    return SessionStreams(
        alice_data=_gen(a_data),
        bob_data=_gen(b_data),
        direction=_gen(b_dir),
        channel=_gen(chan_root),
        perm_alice=_gen(a_perm),
        perm_bob=_gen(b_perm),
        pa=_gen(pa_root),
    )
