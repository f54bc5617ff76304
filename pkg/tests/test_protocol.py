"""Tests for party-level operations: setup, permutations, decoding, detection,
Toeplitz extraction, and key finalization."""

import numpy as np
import pytest

from icoqkd.coding import BchCodec, IdealCodec, bsc_transmit_array
from icoqkd.protocol import (
    InsufficientIndicesError,
    ProtocolDesyncError,
    SetupError,
    ToeplitzSpec,
    build_permutation,
    decode_and_verify,
    detect_eavesdropping,
    finalize_keys,
    setup_party,
    toeplitz_extract,
    toeplitz_matrix,
)
from icoqkd.protocol.party import recover_codeword


class ScriptedRng:
    """Stand-in rng whose integers() calls replay a fixed pick sequence."""

    def __init__(self, picks):
        self.picks = list(picks)

    def integers(self, n):
        pick = self.picks.pop(0)
        assert 0 <= pick < n
        return pick


class TestSetupParty:
    def test_single_codeword_targets(self):
        codec = BchCodec(7, 4)
        state = setup_party(np.array([0, 0, 1, 0], dtype=np.uint8), codec)
        assert len(state.codewords) == 1
        ones, zeros = state.targets[0]
        assert ones + zeros == 7
        assert ones == int(state.codewords[0].sum())

    def test_worked_codeword_counts(self):
        # a codeword with three 1s and four 0s yields targets (3, 4)
        word = np.array([0, 0, 1, 1, 0, 1, 0], dtype=np.uint8)
        assert (int(word.sum()), int(7 - word.sum())) == (3, 4)
        codec = IdealCodec(7)
        state = setup_party(word, codec)
        assert state.targets == [(3, 4)]

    def test_indivisible_length_rejected(self):
        with pytest.raises(SetupError):
            setup_party(np.zeros(5, dtype=np.uint8), BchCodec(7, 4))

    def test_multi_codeword_layout(self):
        codec = BchCodec(7, 4)
        state = setup_party(np.arange(12) % 2, codec)
        assert len(state.codewords) == 3
        assert state.seed_ecc.size == 21


class TestBuildPermutation:
    def test_worked_example_scripted_draws(self):
        """The pen-and-paper draw sequence reproduces (2, 0, 3, 9, 7, 12, 13)."""
        codeword = [0, 0, 1, 1, 0, 1, 0]
        zero_set = {0, 2, 7, 13}
        one_set = {3, 6, 9, 12}
        # pools are sorted ascending; picks are positions in the shrinking pools
        rng = ScriptedRng([1, 0, 0, 1, 0, 1, 0])
        perm = build_permutation(codeword, zero_set, one_set, rng, sender="bob")
        assert perm.indices == (2, 0, 3, 9, 7, 12, 13)

    def test_all_zero_codeword_draws_from_zero_pool(self):
        rng = np.random.default_rng(1)
        perm = build_permutation([0, 0, 0], {10, 20, 30, 40}, {5}, rng)
        assert set(perm.indices) <= {10, 20, 30, 40}

    def test_true_bit_property(self):
        rng = np.random.default_rng(2)
        truth = {}
        zeros, ones = [], []
        for i in range(40):
            bit = int(rng.integers(2))
            truth[i] = bit
            (ones if bit else zeros).append(i)
        codeword = rng.integers(0, 2, 12)
        perm = build_permutation(codeword, zeros, ones, rng)
        for k, idx in enumerate(perm.indices):
            assert truth[idx] == codeword[k]

    def test_insufficient_indices(self):
        with pytest.raises(InsufficientIndicesError):
            build_permutation([0, 0, 1], {4}, {9}, np.random.default_rng(0))


class TestRecoverCodeword:
    TABLE = {0: 1, 2: 0, 3: 1, 6: 1, 7: 0, 9: 1, 12: 1, 13: 0}

    def test_worked_example(self):
        rng = ScriptedRng([1, 0, 0, 1, 0, 1, 0])
        perm = build_permutation(
            [0, 0, 1, 1, 0, 1, 0], {0, 2, 7, 13}, {3, 6, 9, 12}, rng, sender="bob"
        )
        recovered = recover_codeword(perm, self.TABLE)
        assert recovered.tolist() == [0, 1, 1, 1, 0, 1, 0]

    def test_missing_round_raises(self):
        rng = ScriptedRng([0, 0, 0])
        perm = build_permutation([0, 1, 0], {1, 2}, {99}, rng)
        with pytest.raises(ProtocolDesyncError):
            recover_codeword(perm, {1: 0, 2: 1})

    def test_noiseless_channel_recovers_exactly(self):
        rng = np.random.default_rng(3)
        codec = BchCodec(7, 4)
        word = codec.encode(np.array([1, 0, 1, 1], dtype=np.uint8))
        truth, zeros, ones = {}, [], []
        for i, bit in enumerate(np.repeat(word, 2)):  # overshooting pools
            truth[i] = int(bit)
            (ones if bit else zeros).append(i)
        perm = build_permutation(word, zeros, ones, rng)
        assert np.array_equal(recover_codeword(perm, truth), word)

    def test_channel_noise_hamming_distance(self):
        """Recovered words sit at Binomial(N, p) distance from the sender's."""
        rng = np.random.default_rng(4)
        codec = IdealCodec(64)
        p, trials = 0.1465, 10_000
        total = 0
        word = rng.integers(0, 2, 64).astype(np.uint8)
        zeros = [i for i in range(128) if i % 2 == 0]
        ones = [i for i in range(128) if i % 2 == 1]
        truth = {i: i % 2 for i in range(128)}
        for _ in range(trials):
            perm = build_permutation(word, zeros, ones, rng)
            clean = recover_codeword(perm, truth)
            noisy = bsc_transmit_array(clean, p, rng)
            total += int(np.sum(noisy != word))
        mean = total / trials
        assert mean == pytest.approx(64 * p, abs=0.15)


class TestDecodeAndVerify:
    def test_shared_word_example(self):
        codec = BchCodec(7, 4)
        sender_word = np.array([0, 0, 1, 1, 0, 1, 0], dtype=np.uint8)
        recovered = np.array([0, 1, 1, 1, 0, 1, 0], dtype=np.uint8)
        msg_bob, _, status_b = decode_and_verify(sender_word, sender_word, codec)
        msg_alice, errors, status_a = decode_and_verify(sender_word, recovered, codec)
        assert status_a == status_b == "ok"
        assert np.array_equal(msg_alice, msg_bob)
        assert errors == 1

    def test_zero_errors(self):
        codec = BchCodec(7, 4)
        word = codec.encode(np.array([0, 1, 1, 0], dtype=np.uint8))
        _, errors, status = decode_and_verify(word, word, codec)
        assert status == "ok" and errors == 0

    def test_uncorrectable_reported(self):
        codec = BchCodec(31, 11)
        rng = np.random.default_rng(8)
        word = codec.encode(rng.integers(0, 2, 11).astype(np.uint8))
        for _ in range(50):
            noisy = word ^ (
                np.bincount(rng.choice(31, 8, replace=False), minlength=31) % 2
            ).astype(np.uint8)
            message, errors, status = decode_and_verify(word, noisy, codec)
            if status == "uncorrectable":
                assert message is None and errors is None
                return
        pytest.fail("never saw an uncorrectable pattern")

    def test_error_counts_match_binomial_oracle(self):
        codec = BchCodec(7, 4)
        rng = np.random.default_rng(9)
        p, trials = 0.1465, 20_000
        word = codec.encode(np.array([1, 1, 0, 0], dtype=np.uint8))
        counts = np.zeros(8)
        kept = 0
        for _ in range(trials):
            noisy = bsc_transmit_array(word, p, rng)
            message, errors, status = decode_and_verify(word, noisy, codec)
            if status == "ok" and np.array_equal(message, [1, 1, 0, 0]):
                counts[errors] += 1
                kept += 1
        # conditioned on a correct decode, observed errors = true flips (0 or 1)
        import math

        p0 = (1 - p) ** 7
        p1 = 7 * p * (1 - p) ** 6
        assert counts[0] / kept == pytest.approx(p0 / (p0 + p1), abs=0.02)
        assert counts[1] / kept == pytest.approx(p1 / (p0 + p1), abs=0.02)

    def test_ideal_codec_counts_true_channel_errors(self):
        codec = IdealCodec(16)
        sender = np.zeros(16, dtype=np.uint8)
        recovered = sender.copy()
        recovered[[3, 7, 11]] ^= 1
        message, errors, status = decode_and_verify(sender, recovered, codec)
        assert status == "ok"
        assert errors == 3
        assert np.array_equal(message, sender)


class TestDetection:
    def test_ideal_channel_accepts(self):
        report = detect_eavesdropping([(293, 2000)], 0.8334)  # compliance 0.8535
        assert report.accept

    def test_boundary_inclusive(self):
        report = detect_eavesdropping([(1666, 10000)], 0.8334)
        assert report.compliance == pytest.approx(0.8334)
        assert report.accept

    def test_below_threshold_rejected(self):
        report = detect_eavesdropping([(1667, 10000)], 0.8334)
        assert not report.accept

    def test_intercept_resend_rejected_with_high_probability(self):
        """Error rates at 0.2113 push compliance to 0.7887, far below 0.8334."""
        rng = np.random.default_rng(77)
        rejects = 0
        for _ in range(200):
            errors = int(np.sum(rng.random(2232) < 0.2113))
            if not detect_eavesdropping([(errors, 2232)], 0.8334).accept:
                rejects += 1
        assert rejects == 200

    def test_requires_observations(self):
        with pytest.raises(ValueError):
            detect_eavesdropping([], 0.8334)


class TestToeplitz:
    def test_zero_seed_zero_output(self):
        spec = ToeplitzSpec(4, 6, np.zeros(9, dtype=np.uint8))
        out = toeplitz_extract(spec, np.ones(6, dtype=np.uint8))
        assert not out.any()

    def test_one_by_one(self):
        for s in (0, 1):
            for m in (0, 1):
                spec = ToeplitzSpec(1, 1, np.array([s], dtype=np.uint8))
                assert toeplitz_extract(spec, [m])[0] == (s & m)

    def test_bit_convention(self):
        # T[0][n-1] = seed[0]; first row reads seed[n-1] down to seed[0]
        n, l = 5, 3
        seed = np.arange(l + n - 1) % 2
        spec = ToeplitzSpec(l, n, seed.astype(np.uint8))
        t = toeplitz_matrix(spec)
        assert t[0, n - 1] == seed[0]
        assert np.array_equal(t[0], seed[n - 1 :: -1])
        assert np.array_equal(t[:, 0], seed[n - 1 : n - 1 + l])

    def test_matches_brute_force_matrix_oracle(self):
        rng = np.random.default_rng(55)
        for _ in range(200):
            l = int(rng.integers(1, 9))
            n = int(rng.integers(1, 17))
            seed = rng.integers(0, 2, l + n - 1).astype(np.uint8)
            x = rng.integers(0, 2, n).astype(np.uint8)
            spec = ToeplitzSpec(l, n, seed)
            expect = np.zeros(l, dtype=np.uint8)
            for i in range(l):
                acc = 0
                for j in range(n):
                    acc ^= int(seed[(n - 1) + i - j]) & int(x[j])
                expect[i] = acc
            assert np.array_equal(toeplitz_extract(spec, x), expect)

    def test_seed_length_validated(self):
        with pytest.raises(ValueError):
            ToeplitzSpec(4, 6, np.zeros(8, dtype=np.uint8))


class TestFinalizeKeys:
    def test_plain_concatenation(self):
        k0, k1 = finalize_keys([0, 0, 1, 1], [1, 1, 0, 0])
        assert k0.tolist() == [0, 0, 1, 1]
        assert k1.tolist() == [1, 1, 0, 0]

    def test_extraction_path_538_to_256(self):
        rng = np.random.default_rng(6)
        comp_a = rng.integers(0, 2, 538).astype(np.uint8)
        comp_b = rng.integers(0, 2, 538).astype(np.uint8)
        pa = (
            ToeplitzSpec(256, 538, rng.integers(0, 2, 256 + 538 - 1).astype(np.uint8)),
            ToeplitzSpec(256, 538, rng.integers(0, 2, 256 + 538 - 1).astype(np.uint8)),
        )
        k0, k1 = finalize_keys(comp_a, comp_b, pa)
        assert k0.size == 256 and k1.size == 256

    def test_same_inputs_same_keys(self):
        rng = np.random.default_rng(7)
        a = rng.integers(0, 2, 64).astype(np.uint8)
        b = rng.integers(0, 2, 64).astype(np.uint8)
        assert all(
            np.array_equal(x, y)
            for x, y in zip(finalize_keys(a, b), finalize_keys(a.copy(), b.copy()))
        )

    def test_odd_length_rejected(self):
        with pytest.raises(ValueError):
            finalize_keys([0, 1, 1], [1, 0, 1])

    def test_unequal_lengths_rejected(self):
        with pytest.raises(ValueError):
            finalize_keys([0, 1], [1, 0, 1, 1])
