"""Tests for the process-matrix core: projector, validity, game, sampling."""

import math

import numpy as np
import pytest

from icoqkd import quantum as q


RNG = np.random.default_rng(5226)


def random_hermitian(rng, labels=("A_I", "A_O", "B_I", "B_O")):
    side = 2 ** len(labels)
    m = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
    return q.LabeledOperator(tuple(labels), (m + m.conj().T) / 2)


def brute_force_conditional_expectation(op, targets):
    """Index-summation oracle for the normalized-identity replacement."""
    dims = op.dims
    k = len(dims)
    t_axes = [op.names.index(n) for n in targets]
    tensor = op.matrix.reshape(dims + dims)
    out = np.zeros_like(tensor)
    dim_x = int(np.prod([dims[ax] for ax in t_axes]))
    ranges = [range(d) for d in dims]
    import itertools

    for row in itertools.product(*ranges):
        for col in itertools.product(*ranges):
            # entries with target row != target col vanish; diagonal entries get
            # the average over the traced indices
            if any(row[ax] != col[ax] for ax in t_axes):
                continue
            acc = 0.0
            for sub in itertools.product(*[range(dims[ax]) for ax in t_axes]):
                r = list(row)
                c = list(col)
                for ax, s in zip(t_axes, sub):
                    r[ax] = s
                    c[ax] = s
                acc += tensor[tuple(r) + tuple(c)]
            out[row + col] = acc / dim_x
    side = op.side
    return q.LabeledOperator(op.labels, out.reshape(side, side))


class TestConditionalExpectation:
    def test_identity_invariant(self):
        op = q.make_white_noise().operator
        res = q.conditional_expectation(op, {"A_O"})
        assert res.allclose(op, 1e-12)

    def test_traceless_factor_killed(self):
        sz = np.diag([1.0, -1.0]).astype(complex)
        op = (
            q.LabeledOperator(("A_I",), np.eye(2, dtype=complex))
            .tensor(q.LabeledOperator(("A_O",), sz))
            .tensor(q.LabeledOperator(("B_I",), sz))
            .tensor(q.LabeledOperator(("B_O",), np.eye(2, dtype=complex)))
        )
        res = q.conditional_expectation(op, {"A_O"})
        assert np.linalg.norm(res.matrix) < 1e-12

    def test_matches_brute_force_oracle(self):
        op = random_hermitian(RNG)
        res = q.conditional_expectation(op, {"A_I", "A_O"})
        oracle = brute_force_conditional_expectation(op, {"A_I", "A_O"})
        assert res.allclose(oracle, 1e-10)

    def test_trace_preserved(self):
        op = random_hermitian(RNG)
        res = q.conditional_expectation(op, {"B_I"})
        assert abs(res.trace() - op.trace()) < 1e-10

    def test_unknown_label_raises(self):
        op = random_hermitian(RNG)
        with pytest.raises(q.LabelingError):
            q.conditional_expectation(op, {"E"})


class TestLvProjector:
    def test_white_noise_fixed(self):
        op = q.make_white_noise().operator
        assert q.lv_project(op).allclose(op, 1e-12)

    def test_wcns_fixed(self):
        op = q.make_wcns().operator
        assert q.lv_project(op).allclose(op, 1e-12)

    def test_idempotent_and_trace_preserving(self):
        for _ in range(5):
            op = random_hermitian(RNG)
            once = q.lv_project(op)
            twice = q.lv_project(once)
            assert twice.allclose(once, 1e-10)
            assert abs(once.trace() - op.trace()) < 1e-10

    def test_hermiticity_preserved(self):
        op = random_hermitian(RNG)
        assert q.lv_project(op).hermiticity_residual() < 1e-10

    def test_wrong_subsystems_rejected(self):
        op = q.LabeledOperator(("A_I", "A_O"), np.eye(4, dtype=complex))
        with pytest.raises(q.LabelingError):
            q.lv_project(op)


class TestValidation:
    def test_wcns_passes(self):
        report = q.validate_process_matrix(q.make_wcns().operator)
        assert report.passed
        assert report.residuals["lv_fixed_point"] < 1e-10
        assert report.residuals["min_eigenvalue"] >= -1e-10
        assert report.residuals["trace"] < 1e-10

    def test_white_noise_passes(self):
        assert q.validate_process_matrix(q.make_white_noise().operator).passed

    def test_scaled_wcns_fails_trace(self):
        op = q.make_wcns().operator
        doubled = q.LabeledOperator(op.labels, op.matrix * 2)
        report = q.validate_process_matrix(doubled)
        assert not report.passed
        assert report.residuals["trace"] == pytest.approx(4.0)

    def test_wcns_eigenvalues_match_dense_diagonalization(self):
        eigs = np.linalg.eigvalsh(q.make_wcns().matrix)
        assert eigs.min() >= -1e-12
        # spectrum is {0, 1/2}, each eightfold
        assert np.allclose(np.sort(eigs), [0.0] * 8 + [0.5] * 8, atol=1e-12)


class TestCombs:
    def test_white_noise_is_comb_both_ways(self):
        op = q.make_white_noise().operator
        assert q.validate_comb(op, "A<B").passed
        assert q.validate_comb(op, "B<A").passed

    def test_identity_comb_passes_its_order_only(self):
        comb = q.make_identity_comb("A<B").operator
        assert q.validate_process_matrix(comb).passed
        assert q.validate_comb(comb, "A<B").passed
        assert not q.validate_comb(comb, "B<A").passed

    def test_wcns_fails_both_orders(self):
        op = q.make_wcns().operator
        assert not q.validate_comb(op, "A<B").passed
        assert not q.validate_comb(op, "B<A").passed


class TestLinkProduct:
    def test_normalized_trace_is_scalar_one(self):
        a = q.LabeledOperator(("B_I",), np.eye(2, dtype=complex) / 2)
        b = q.LabeledOperator(("B_I",), np.eye(2, dtype=complex))
        res = q.link_product(a, b, {"B_I"})
        assert res.labels == ()
        assert res.matrix[0, 0] == pytest.approx(1.0)

    def test_identity_channel_link_relabels(self):
        rng = np.random.default_rng(11)
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = q.LabeledOperator(("A_O",), (m + m.conj().T) / 2)
        phi = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                phi[i * 2 + i, j * 2 + j] = 1.0
        choi = q.LabeledOperator(("A_O", "B_I"), phi)
        res = q.link_product(rho, choi, {"A_O"})
        assert res.names == ("B_I",)
        assert np.allclose(res.matrix, rho.matrix, atol=1e-12)

    @staticmethod
    def brute_force_link(a, b, shared):
        """Literal evaluation of tr_Z[(1l (x) B^{T_Z})(A (x) 1l)] with raw numpy.

        Works on a fixed full-space ordering (shared, rest of A, rest of B) and
        uses explicit axis transposes, independent of the library's einsum path.
        """
        shared_list = sorted(shared)
        keep_a = [n for n in a.names if n not in shared]
        keep_b = [n for n in b.names if n not in shared]
        full = shared_list + keep_a + keep_b
        k = len(full)

        def extend(op, present):
            # tensor with identity on the missing subsystems, then order as `full`
            missing = [n for n in full if n not in present]
            mat = np.kron(op, np.eye(2 ** len(missing), dtype=complex))
            cur = present + missing
            perm = [cur.index(n) for n in full]
            tensor = mat.reshape((2,) * (2 * k)).transpose(
                perm + [p + k for p in perm]
            )
            return tensor.reshape(2**k, 2**k)

        # B^{T_Z}: transpose shared axes of b
        kb = len(b.names)
        tb = b.matrix.reshape((2,) * (2 * kb))
        order = list(range(2 * kb))
        for n in shared_list:
            ax = b.names.index(n)
            order[ax], order[ax + kb] = order[ax + kb], order[ax]
        b_t = tb.transpose(order).reshape(b.matrix.shape)

        big = extend(b_t, list(b.names)) @ extend(a.matrix, list(a.names))
        tensor = big.reshape((2,) * (2 * k))
        for _ in shared_list:
            tensor = np.trace(tensor, axis1=0, axis2=tensor.ndim // 2)
        names = keep_a + keep_b
        side = 2 ** len(names)
        return q.LabeledOperator(tuple(names), tensor.reshape(side, side))

    def test_matches_brute_force_on_random_operands(self):
        rng = np.random.default_rng(17)
        for names_a, names_b, shared in [
            (("A_I", "B_I"), ("B_I", "B_O"), {"B_I"}),
            (("A_I", "A_O", "B_I"), ("B_I", "B_O"), {"B_I"}),
            (("A_O", "B_I"), ("A_O", "B_I"), {"A_O", "B_I"}),
        ]:
            ma = rng.normal(size=(2 ** len(names_a),) * 2) + 1j * rng.normal(
                size=(2 ** len(names_a),) * 2
            )
            mb = rng.normal(size=(2 ** len(names_b),) * 2) + 1j * rng.normal(
                size=(2 ** len(names_b),) * 2
            )
            a = q.LabeledOperator(names_a, (ma + ma.conj().T) / 2)
            b = q.LabeledOperator(names_b, (mb + mb.conj().T) / 2)
            res = q.link_product(a, b, shared)
            oracle = self.brute_force_link(a, b, shared)
            if res.labels:
                assert res.allclose(oracle.permuted(res.names), 1e-10)
            else:
                assert abs(res.matrix[0, 0] - oracle.matrix[0, 0]) < 1e-10

    def test_dimension_mismatch_rejected(self):
        a = q.LabeledOperator((q.SubsystemLabel("E", 4),), np.eye(4, dtype=complex))
        b = q.LabeledOperator((q.SubsystemLabel("E", 2),), np.eye(2, dtype=complex))
        with pytest.raises(ValueError):
            q.link_product(a, b, {"E"})


class TestInstruments:
    def test_alice_family_trace_preserving(self):
        for a in (0, 1):
            total = sum(e.operator.matrix for e in q.alice_instrument(a))
            reduced = q.LabeledOperator(("A_I", "A_O"), total).partial_trace({"A_O"})
            assert np.allclose(reduced.matrix, np.eye(2), atol=1e-12)

    def test_bob_family_trace_preserving_and_rank_one(self):
        for b in (0, 1):
            for bp in (0, 1):
                elems = q.bob_instrument(b, bp)
                total = sum(e.operator.matrix for e in elems)
                reduced = q.LabeledOperator(("B_I", "B_O"), total).partial_trace(
                    {"B_O"}
                )
                assert np.allclose(reduced.matrix, np.eye(2), atol=1e-12)
                for e in elems:
                    eigs = np.linalg.eigvalsh(e.operator.matrix)
                    assert eigs.min() > -1e-12
                    assert np.sum(eigs > 1e-9) == 1  # rank-1 (x) rank-1


class TestRoundDistribution:
    def test_wcns_direction_one_matches_optimum(self):
        w = q.make_wcns()
        for a in (0, 1):
            for b in (0, 1):
                p = q.round_distribution(w, a, b, 1)
                assert p[:, a].sum() == pytest.approx(q.GAME_OPTIMUM, abs=1e-12)

    def test_wcns_direction_zero_matches_optimum(self):
        w = q.make_wcns()
        for a in (0, 1):
            for b in (0, 1):
                p = q.round_distribution(w, a, b, 0)
                assert p[b, :].sum() == pytest.approx(q.GAME_OPTIMUM, abs=1e-12)

    def test_white_noise_uniform(self):
        w = q.make_white_noise()
        for bp in (0, 1):
            p = q.round_distribution(w, 0, 1, bp)
            assert np.allclose(p, 0.25, atol=1e-12)

    def test_normalized_for_all_inputs(self):
        w = q.make_wcns()
        for a in (0, 1):
            for b in (0, 1):
                for bp in (0, 1):
                    p = q.round_distribution(w, a, b, bp)
                    assert p.min() >= 0
                    assert p.sum() == pytest.approx(1.0, abs=1e-9)

    def test_marginal_non_signaling(self):
        # distribution of x cannot depend on b when b'=1
        w = q.make_wcns()
        for a in (0, 1):
            px_b0 = q.round_distribution(w, a, 0, 1).sum(axis=1)
            px_b1 = q.round_distribution(w, a, 1, 1).sum(axis=1)
            assert np.allclose(px_b0, px_b1, atol=1e-12)


class TestGame:
    def test_wcns_value(self):
        assert q.game_success_probability(q.make_wcns()) == pytest.approx(
            q.GAME_OPTIMUM, abs=1e-9
        )

    def test_white_noise_value(self):
        assert q.game_success_probability(q.make_white_noise()) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_identity_comb_value(self):
        # perfect when the wire matches the announced direction, coin flip when
        # it does not; the fixed strategy is adapted to A-before-B
        assert q.game_success_probability(q.make_identity_comb("A<B")) == pytest.approx(
            0.75, abs=1e-12
        )
        assert q.game_success_probability(q.make_identity_comb("B<A")) == pytest.approx(
            0.5, abs=1e-12
        )


class TestSampling:
    def test_deterministic_replay(self):
        w = q.make_wcns()
        out1 = [
            q.sample_round(w, 1, 0, 1, np.random.default_rng(99)) for _ in range(3)
        ]
        out2 = [
            q.sample_round(w, 1, 0, 1, np.random.default_rng(99)) for _ in range(3)
        ]
        assert out1 == out2

    def test_outcome_key_logic(self):
        out = q.RoundOutcome(a=1, b=0, b_prime=0, x=0, y=1)
        assert out.z == 1  # (1-b')y xor b
        assert out.k_a == out.x
        assert out.k_b == out.b
        out = q.RoundOutcome(a=1, b=0, b_prime=1, x=0, y=1)
        assert out.z == 0
        assert out.k_a == out.a
        assert out.k_b == out.y

    def test_empirical_compliance_wcns(self):
        w = q.make_wcns()
        rng = np.random.default_rng(1234)
        n = 1_000_000
        a = rng.integers(0, 2, n)
        b = rng.integers(0, 2, n)
        bp = rng.integers(0, 2, n)
        x, y = q.sample_rounds(w, a, b, bp, rng)
        k_a = np.where(bp == 1, a, x)
        k_b = np.where(bp == 1, y, b)
        rate = float(np.mean(k_a == k_b))
        assert rate == pytest.approx(q.GAME_OPTIMUM, abs=0.002)

    def test_empirical_compliance_white_noise(self):
        w = q.make_white_noise()
        rng = np.random.default_rng(4321)
        n = 1_000_000
        a = rng.integers(0, 2, n)
        b = rng.integers(0, 2, n)
        bp = rng.integers(0, 2, n)
        x, y = q.sample_rounds(w, a, b, bp, rng)
        k_a = np.where(bp == 1, a, x)
        k_b = np.where(bp == 1, y, b)
        assert float(np.mean(k_a == k_b)) == pytest.approx(0.5, abs=0.002)

    def test_flip_table_matches_game(self):
        table = q.flip_probability_table(q.make_wcns())
        assert np.allclose(table, 1.0 - q.GAME_OPTIMUM, atol=1e-12)
        comb = q.flip_probability_table(q.make_identity_comb("A<B"))
        assert np.allclose(comb[:, :, 1], 0.0, atol=1e-12)  # wired direction exact
        assert np.allclose(comb[:, :, 0], 0.5, atol=1e-12)  # reverse is noise


class TestSerialization:
    def test_round_trip(self):
        op = q.make_wcns().operator
        rec = q.operator_to_json(op)
        back = q.operator_from_json(rec)
        assert back.names == op.names
        assert np.allclose(back.matrix, op.matrix, atol=0)

    def test_fixture_contents(self, tmp_path):
        path = tmp_path / "fixture.json"
        fixture = q.export_fixture(path)
        assert path.exists()
        assert fixture["game_success"] == pytest.approx(q.GAME_OPTIMUM, abs=1e-12)
        assert set(fixture["alice"]) == {"a0_x0", "a0_x1", "a1_x0", "a1_x1"}
        assert len(fixture["bob"]) == 8
