"""Process-matrix core: validity projector, the causal game, and round sampling.

Operators live on labeled two-level subsystems (A_I, A_O, B_I, B_O, and E for an
eavesdropper ancilla).  A process matrix W on the four party subsystems encodes
the correlations the two labs can extract without assuming which lab acts first;
the fixed local strategy below turns one use of W into one exchanged key bit.

Conventions
-----------
* Subsystem order is canonical: (A_I, A_O, B_I, B_O, E).  Constructors emit this
  order and every ingested operator is permuted to it.
* An instrument element for a map input -> output is the positive operator on
  input (x) output whose partial trace over the output equals the identity on
  the input when summed over outcomes (trace preservation).  The convention is
  pinned by the self-calibrating requirement that the causal game below succeeds
  with probability (2 + sqrt(2))/4 on the non-separable process.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CANONICAL_ORDER",
    "GAME_OPTIMUM",
    "LabelingError",
    "SubsystemLabel",
    "LabeledOperator",
    "ProcessMatrix",
    "InstrumentElement",
    "RoundOutcome",
    "ValidationReport",
    "conditional_expectation",
    "lv_project",
    "validate_process_matrix",
    "validate_comb",
    "make_wcns",
    "make_white_noise",
    "make_identity_comb",
    "link_product",
    "alice_instrument",
    "bob_instrument",
    "round_distribution",
    "game_success_probability",
    "flip_probability_table",
    "sample_round",
    "sample_rounds",
    "operator_to_json",
    "operator_from_json",
    "export_fixture",
]

CANONICAL_ORDER = ("A_I", "A_O", "B_I", "B_O", "E")

#: Success probability of the causal game on the non-separable process.
GAME_OPTIMUM = (2.0 + math.sqrt(2.0)) / 4.0

_EYE2 = np.eye(2, dtype=complex)
_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_KET = (
    np.array([1.0, 0.0], dtype=complex),
    np.array([0.0, 1.0], dtype=complex),
)
_KET_X = (
    np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
)


class LabelingError(ValueError):
    """Raised when an operation refers to subsystems an operator does not carry."""


@dataclass(frozen=True)
class SubsystemLabel:
    """A named tensor factor with its dimension."""

    name: str
    dimension: int = 2

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")


def _canonical_rank(name: str) -> int:
    try:
        return CANONICAL_ORDER.index(name)
    except ValueError:
        return len(CANONICAL_ORDER)


class LabeledOperator:
    """A square complex matrix factored into named subsystems.

    The matrix side equals the product of the subsystem dimensions, ordered as
    ``labels``.  Instances are immutable; all operations return new objects.
    """

    __slots__ = ("labels", "matrix")

    def __init__(self, labels, matrix):
        labels = tuple(
            lab if isinstance(lab, SubsystemLabel) else SubsystemLabel(str(lab))
            for lab in labels
        )
        names = [lab.name for lab in labels]
        if len(set(names)) != len(names):
            raise LabelingError(f"duplicate subsystem labels: {names}")
        matrix = np.asarray(matrix, dtype=complex)
        side = 1
        for lab in labels:
            side *= lab.dimension
        if matrix.shape != (side, side):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match subsystem dims "
                f"{[lab.dimension for lab in labels]}"
            )
        matrix = matrix.copy()
        matrix.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("LabeledOperator is immutable")

    @property
    def names(self):
        return tuple(lab.name for lab in self.labels)

    @property
    def dims(self):
        return tuple(lab.dimension for lab in self.labels)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise LabelingError(f"operator has no subsystem {name!r}; has {self.names}")

    def _require(self, names) -> list[int]:
        return [self.axis(n) for n in names]

    def tensor_view(self) -> np.ndarray:
        """Reshape to a 2k-axis tensor (row indices first, then column indices)."""
        return self.matrix.reshape(self.dims + self.dims)

    def permuted(self, new_names) -> "LabeledOperator":
        """Reorder subsystems to ``new_names`` (a permutation of the current names)."""
        new_names = tuple(new_names)
        if sorted(new_names) != sorted(self.names):
            raise LabelingError(f"{new_names} is not a permutation of {self.names}")
        if new_names == self.names:
            return self
        k = len(self.labels)
        perm = [self.names.index(n) for n in new_names]
        axes = perm + [p + k for p in perm]
        tensor = self.tensor_view().transpose(axes)
        labels = tuple(self.labels[p] for p in perm)
        side = self.side
        return LabeledOperator(labels, tensor.reshape(side, side))

    def canonical(self) -> "LabeledOperator":
        """Permute subsystems into the canonical (A_I, A_O, B_I, B_O, E) order."""
        order = tuple(sorted(self.names, key=lambda n: (_canonical_rank(n), n)))
        return self.permuted(order)

    def tensor(self, other: "LabeledOperator") -> "LabeledOperator":
        """Tensor product; label sets must be disjoint."""
        overlap = set(self.names) & set(other.names)
        if overlap:
            raise LabelingError(f"tensor operands share labels {sorted(overlap)}")
        return LabeledOperator(
            self.labels + other.labels, np.kron(self.matrix, other.matrix)
        )

    def partial_trace(self, names) -> "LabeledOperator":
        """Trace out the given subsystems; the result keeps the remaining order."""
        drop = set(names)
        axes = self._require(drop)
        k = len(self.labels)
        tensor = self.tensor_view()
        for ax in sorted(axes, reverse=True):
            tensor = np.trace(tensor, axis1=ax, axis2=ax + tensor.ndim // 2)
        keep = [lab for lab in self.labels if lab.name not in drop]
        side = 1
        for lab in keep:
            side *= lab.dimension
        return LabeledOperator(keep, tensor.reshape(side, side))

    def partial_transpose(self, names) -> "LabeledOperator":
        """Transpose the given subsystems in place of their row/column indices."""
        axes = self._require(set(names))
        k = len(self.labels)
        order = list(range(2 * k))
        for ax in axes:
            order[ax], order[ax + k] = order[ax + k], order[ax]
        tensor = self.tensor_view().transpose(order)
        return LabeledOperator(self.labels, tensor.reshape(self.side, self.side))

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_residual(self) -> float:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)[0])

    def allclose(self, other: "LabeledOperator", tol: float = 1e-10) -> bool:
        if self.names != other.names:
            other = other.permuted(self.names)
        return bool(np.linalg.norm(self.matrix - other.matrix) <= tol)

    def __repr__(self):
        return f"LabeledOperator(labels={self.names}, side={self.side})"


def conditional_expectation(op: LabeledOperator, targets) -> LabeledOperator:
    """Replace the target subsystems by normalized identities.

    Returns (1l_X / dim X) (x) tr_X W with the identity factors re-embedded at
    the original positions, so labels and trace are preserved.
    """
    targets = {t if isinstance(t, str) else t.name for t in targets}
    op._require(targets)
    if not targets:
        return op
    traced = op.partial_trace(targets)
    dim_x = 1
    ident_labels = []
    for lab in op.labels:
        if lab.name in targets:
            dim_x *= lab.dimension
            ident_labels.append(lab)
    ident = LabeledOperator(ident_labels, np.eye(dim_x, dtype=complex) / dim_x)
    if not traced.labels:
        scalar = complex(traced.matrix[0, 0]) if traced.matrix.size else 0.0
        return LabeledOperator(ident.labels, ident.matrix * scalar).permuted(
            [lab.name for lab in op.labels]
        )
    return traced.tensor(ident).permuted(op.names)


_PARTY_NAMES = ("A_I", "A_O", "B_I", "B_O")

# Signed term list of the validity projector: (+/-1, subsystems replaced by
# normalized identity).
_LV_TERMS = (
    (+1, ("A_O",)),
    (+1, ("B_O",)),
    (-1, ("A_O", "B_O")),
    (-1, ("B_I", "B_O")),
    (+1, ("A_O", "B_I", "B_O")),
    (-1, ("A_I", "A_O")),
    (+1, ("A_I", "A_O", "B_O")),
)


def _require_party_labels(op: LabeledOperator):
    if sorted(op.names) != sorted(_PARTY_NAMES):
        raise LabelingError(
            f"expected exactly the subsystems {_PARTY_NAMES}, got {op.names}"
        )


def lv_project(op: LabeledOperator) -> LabeledOperator:
    """Project onto the linear span of valid process matrices (seven-term map)."""
    _require_party_labels(op)
    acc = np.zeros_like(op.matrix)
    for sign, targets in _LV_TERMS:
        acc = acc + sign * conditional_expectation(op, targets).matrix
    return LabeledOperator(op.labels, acc)


@dataclass(frozen=True)
class ValidationReport:
    """Pass flag plus per-condition residuals of a validity check."""

    passed: bool
    residuals: dict = field(default_factory=dict)
    tol: float = 1e-10

    def __str__(self):
        parts = ", ".join(f"{k}={v:.3e}" for k, v in self.residuals.items())
        return f"{'pass' if self.passed else 'FAIL'} ({parts}; tol={self.tol:g})"


def validate_process_matrix(op: LabeledOperator, tol: float = 1e-10) -> ValidationReport:
    """Check Hermiticity, positivity, the projector fixed point, and trace = 4."""
    _require_party_labels(op)
    herm = op.hermiticity_residual()
    min_eig = op.min_eigenvalue()
    lv_res = float(np.linalg.norm(op.matrix - lv_project(op).matrix))
    d_out = op.labels[op.axis("A_O")].dimension * op.labels[op.axis("B_O")].dimension
    trace_res = abs(op.trace() - d_out)
    residuals = {
        "hermiticity": herm,
        "min_eigenvalue": min_eig,
        "lv_fixed_point": lv_res,
        "trace": trace_res,
    }
    passed = (
        herm <= tol and min_eig >= -tol and lv_res <= tol and trace_res <= tol
    )
    return ValidationReport(passed, residuals, tol)


def validate_comb(op: LabeledOperator, order: str, tol: float = 1e-10) -> ValidationReport:
    """Check the one-way-signaling (comb) marginal conditions for A<B or B<A."""
    _require_party_labels(op)
    if order in ("A<B", "A≺B", "a<b"):
        last_out, first_pair, first_out = "B_O", ("B_I", "B_O"), "A_O"
    elif order in ("B<A", "B≺A", "b<a"):
        last_out, first_pair, first_out = "A_O", ("A_I", "A_O"), "B_O"
    else:
        raise ValueError(f"order must be 'A<B' or 'B<A', got {order!r}")
    # W = W' (x) 1l on the later party's output
    factor_res = float(
        np.linalg.norm(op.matrix - conditional_expectation(op, (last_out,)).matrix)
    )
    # tr over the later party of W' factorizes as W'' (x) 1l on the earlier output
    reduced = op.partial_trace(first_pair)
    reduced = LabeledOperator(reduced.labels, reduced.matrix / 2.0)
    marginal_res = float(
        np.linalg.norm(
            reduced.matrix - conditional_expectation(reduced, (first_out,)).matrix
        )
    )
    residuals = {"factorization": factor_res, "marginal": marginal_res}
    return ValidationReport(factor_res <= tol and marginal_res <= tol, residuals, tol)


@dataclass(frozen=True)
class ProcessMatrix:
    """A validated process matrix on (A_I, A_O, B_I, B_O)."""

    operator: LabeledOperator
    tol: float = 1e-10

    def __post_init__(self):
        op = self.operator.canonical()
        object.__setattr__(self, "operator", op)
        report = validate_process_matrix(op, self.tol)
        if not report.passed:
            raise ValueError(f"not a valid process matrix: {report}")

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix


def _party_labels():
    return tuple(SubsystemLabel(n) for n in _PARTY_NAMES)


def make_wcns() -> ProcessMatrix:
    """The causally non-separable process used by the protocol.

    (1/4) [1l + (sigma_z^{A_O} sigma_z^{B_I} + sigma_z^{A_I} sigma_x^{B_I}
    sigma_z^{B_O}) / sqrt(2)], with identity padding on the remaining factors.
    """
    term1 = np.kron(np.kron(_EYE2, _SIGMA_Z), np.kron(_SIGMA_Z, _EYE2))
    term2 = np.kron(np.kron(_SIGMA_Z, _EYE2), np.kron(_SIGMA_X, _SIGMA_Z))
    w = 0.25 * (np.eye(16, dtype=complex) + (term1 + term2) / math.sqrt(2.0))
    return ProcessMatrix(LabeledOperator(_party_labels(), w))


def make_white_noise() -> ProcessMatrix:
    """The fully mixed process: uniform outcomes, no correlations."""
    return ProcessMatrix(
        LabeledOperator(_party_labels(), np.eye(16, dtype=complex) / 4.0)
    )


def _identity_choi(label_in: str, label_out: str) -> LabeledOperator:
    """Unnormalized Choi operator of the identity channel (trace 2)."""
    mat = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            mat[i * 2 + i, j * 2 + j] = 1.0
    return LabeledOperator((SubsystemLabel(label_in), SubsystemLabel(label_out)), mat)


def make_identity_comb(order: str = "A<B") -> ProcessMatrix:
    """A fixed-order process wiring the earlier party's output to the later input.

    For A<B: maximally mixed state on A_I, identity channel A_O -> B_I, identity
    on B_O.  Saturates the game only in the matching direction.
    """
    if order in ("A<B", "A≺B", "a<b"):
        mixed, wire_in, wire_out, free = "A_I", "A_O", "B_I", "B_O"
    elif order in ("B<A", "B≺A", "b<a"):
        mixed, wire_in, wire_out, free = "B_I", "B_O", "A_I", "A_O"
    else:
        raise ValueError(f"order must be 'A<B' or 'B<A', got {order!r}")
    op = (
        LabeledOperator((SubsystemLabel(mixed),), _EYE2 / 2.0)
        .tensor(_identity_choi(wire_in, wire_out))
        .tensor(LabeledOperator((SubsystemLabel(free),), _EYE2))
    )
    return ProcessMatrix(op.canonical())


def link_product(a: LabeledOperator, b: LabeledOperator, shared=None) -> LabeledOperator:
    """Compose Choi-represented maps: contract shared subsystems with a partial
    transpose on the second operand.

    Equals tr_Z[(1l (x) B^{T_Z})(A (x) 1l)] for shared subsystems Z; the result
    lives on the union of the non-shared subsystems, in canonical order.
    """
    if shared is None:
        shared = set(a.names) & set(b.names)
    shared = {s if isinstance(s, str) else s.name for s in shared}
    for name in shared:
        da = a.labels[a.axis(name)].dimension
        db = b.labels[b.axis(name)].dimension
        if da != db:
            raise ValueError(f"shared subsystem {name} has dims {da} != {db}")
    overlap = (set(a.names) & set(b.names)) - shared
    if overlap:
        raise LabelingError(
            f"operands share unlisted subsystems {sorted(overlap)}; include them "
            "in `shared`"
        )
    b_t = b.partial_transpose(shared)
    ka, kb = len(a.labels), len(b.labels)
    ta = a.tensor_view()
    tb = b_t.tensor_view()
    # result[ya, yb; ya', yb'] = sum_z,z' A[z ya, z' ya'] B^T_Z[z' yb, z yb']
    a_row = [f"r{n}" if n in shared else f"p{n}" for n in a.names]
    a_col = [f"c{n}" if n in shared else f"q{n}" for n in a.names]
    b_row = [f"c{n}" if n in shared else f"p{n}" for n in b.names]
    b_col = [f"r{n}" if n in shared else f"q{n}" for n in b.names]
    keep_a = [lab for lab in a.labels if lab.name not in shared]
    keep_b = [lab for lab in b.labels if lab.name not in shared]
    out_labels = keep_a + keep_b
    out_row = [f"p{lab.name}" for lab in out_labels]
    out_col = [f"q{lab.name}" for lab in out_labels]
    # map index names to einsum letters
    letters = {}

    def enc(idx_names):
        out = []
        for n in idx_names:
            if n not in letters:
                letters[n] = chr(ord("a") + len(letters))
            out.append(letters[n])
        return "".join(out)

    expr = (
        enc(a_row + a_col) + "," + enc(b_row + b_col) + "->" + enc(out_row + out_col)
    )
    tensor = np.einsum(expr, ta, tb)
    side = 1
    for lab in out_labels:
        side *= lab.dimension
    if not out_labels:
        return LabeledOperator((), tensor.reshape(1, 1))
    result = LabeledOperator(out_labels, tensor.reshape(side, side))
    return result.canonical()


@dataclass(frozen=True)
class InstrumentElement:
    """One outcome branch of a party's local measure-and-prepare operation."""

    party: str
    inputs: tuple
    outcome: int
    operator: LabeledOperator


def _proj(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def alice_instrument(a: int):
    """Measure A_I in the Z basis (outcome x), prepare |a> on A_O."""
    ops = []
    for x in (0, 1):
        mat = np.kron(_proj(_KET[x]), _proj(_KET[a]))
        op = LabeledOperator((SubsystemLabel("A_I"), SubsystemLabel("A_O")), mat)
        ops.append(InstrumentElement("Alice", (a,), x, op))
    return tuple(ops)


def bob_instrument(b: int, b_prime: int):
    """Measure B_I in Z (b'=1) or X (b'=0) for outcome y, prepare |z> on B_O.

    The announced bit z = (1-b')y XOR b is what Bob feeds back into the process.
    """
    ops = []
    for y in (0, 1):
        meas = _proj(_KET[y]) if b_prime == 1 else _proj(_KET_X[y])
        z = ((1 - b_prime) * y) ^ b
        mat = np.kron(meas, _proj(_KET[z]))
        op = LabeledOperator((SubsystemLabel("B_I"), SubsystemLabel("B_O")), mat)
        ops.append(InstrumentElement("Bob", (b, b_prime), y, op))
    return tuple(ops)


def round_distribution(process: ProcessMatrix, a: int, b: int, b_prime: int) -> np.ndarray:
    """Joint outcome distribution P[x, y] for one exchange round.

    Entries are tr[W (A_{a,x} (x) B_{b,b',y})]; nonnegative and normalized.
    """
    w = process.operator.permuted(_PARTY_NAMES).matrix
    out = np.zeros((2, 2))
    alice = alice_instrument(a)
    bob = bob_instrument(b, b_prime)
    for x in (0, 1):
        for y in (0, 1):
            joint = np.kron(alice[x].operator.matrix, bob[y].operator.matrix)
            out[x, y] = float(np.trace(w @ joint).real)
    if out.min() < -1e-9 or abs(out.sum() - 1.0) > 1e-9:
        raise ValueError(f"invalid distribution from process: {out}")
    return np.clip(out, 0.0, None)


def game_success_probability(process: ProcessMatrix) -> float:
    """Mean success of the direction-guessing game under the fixed strategy.

    (1/2) P(x=b | b'=0) + (1/2) P(y=a | b'=1), averaged uniformly over a, b.
    """
    total = 0.0
    for a in (0, 1):
        for b in (0, 1):
            total += 0.5 * round_distribution(process, a, b, 0)[b, :].sum()
            total += 0.5 * round_distribution(process, a, b, 1)[:, a].sum()
    return total / 4.0


def flip_probability_table(process: ProcessMatrix) -> np.ndarray:
    """P(receiver reads the sender's bit flipped), indexed [a, b, b'].

    When b'=1 Alice sends a and Bob reads y; when b'=0 Bob sends b and Alice
    reads x.  This is the exact per-round law the protocol engine consumes.
    """
    table = np.zeros((2, 2, 2))
    for a in (0, 1):
        for b in (0, 1):
            p0 = round_distribution(process, a, b, 0)
            p1 = round_distribution(process, a, b, 1)
            table[a, b, 0] = p0[1 - b, :].sum()
            table[a, b, 1] = p1[:, 1 - a].sum()
    return table


@dataclass(frozen=True)
class RoundOutcome:
    """All classical data produced by one bit-exchange round."""

    a: int
    b: int
    b_prime: int
    x: int
    y: int

    @property
    def z(self) -> int:
        return ((1 - self.b_prime) * self.y) ^ self.b

    @property
    def k_a(self) -> int:
        return self.a if self.b_prime == 1 else self.x

    @property
    def k_b(self) -> int:
        return self.y if self.b_prime == 1 else self.b


def sample_round(process: ProcessMatrix, a: int, b: int, b_prime: int, rng) -> RoundOutcome:
    """Draw one (x, y) pair from the round distribution."""
    probs = round_distribution(process, a, b, b_prime).reshape(-1)
    idx = int(rng.choice(4, p=probs / probs.sum()))
    return RoundOutcome(a, b, b_prime, idx // 2, idx % 2)


def sample_rounds(process: ProcessMatrix, a, b, b_prime, rng):
    """Vectorized sampling: arrays of (x, y) for arrays of round inputs."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    b_prime = np.asarray(b_prime, dtype=np.int64)
    cumdists = np.zeros((2, 2, 2, 4))
    for ai in (0, 1):
        for bi in (0, 1):
            for bp in (0, 1):
                p = round_distribution(process, ai, bi, bp).reshape(-1)
                cumdists[ai, bi, bp] = np.cumsum(p / p.sum())
    u = rng.random(a.shape)
    cuts = cumdists[a, b, b_prime]
    idx = (u[..., None] > cuts).sum(axis=-1)
    return (idx // 2).astype(np.uint8), (idx % 2).astype(np.uint8)


# ---------------------------------------------------------------------------
# JSON serialization (debugging / cross-component fixture)
# ---------------------------------------------------------------------------


def operator_to_json(op: LabeledOperator) -> dict:
    """Serialize to {labels, dims, real[], imag[]} with row-major flat entries."""
    return {
        "labels": list(op.names),
        "dims": list(op.dims),
        "real": [float(v) for v in op.matrix.real.reshape(-1)],
        "imag": [float(v) for v in op.matrix.imag.reshape(-1)],
    }


def operator_from_json(record: dict) -> LabeledOperator:
    labels = tuple(
        SubsystemLabel(n, d) for n, d in zip(record["labels"], record["dims"])
    )
    side = 1
    for d in record["dims"]:
        side *= d
    mat = (
        np.asarray(record["real"], dtype=float)
        + 1j * np.asarray(record["imag"], dtype=float)
    ).reshape(side, side)
    return LabeledOperator(labels, mat)


def export_fixture(path=None) -> dict:
    """Export the numeric constants shared with the attack-curve component.

    The fixture pins the operator convention: the consumer can re-derive the
    game value and must reproduce GAME_OPTIMUM with these exact matrices.
    """
    wcns = make_wcns()
    fixture = {
        "format": "icoqkd-quantum-fixture-v1",
        "subsystem_order": list(_PARTY_NAMES),
        "game_success": game_success_probability(wcns),
        "wcns": operator_to_json(wcns.operator),
        "identity_choi": operator_to_json(_identity_choi("Z_in", "Z_out")),
        "alice": {},
        "bob": {},
    }
    for a in (0, 1):
        for elem in alice_instrument(a):
            fixture["alice"][f"a{a}_x{elem.outcome}"] = operator_to_json(elem.operator)
    for b in (0, 1):
        for bp in (0, 1):
            for elem in bob_instrument(b, bp):
                key = f"b{b}_bp{bp}_y{elem.outcome}"
                fixture["bob"][key] = operator_to_json(elem.operator)
    if path is not None:
        with open(path, "w") as fh:
            json.dump(fixture, fh, indent=1, sort_keys=True)
    return fixture
