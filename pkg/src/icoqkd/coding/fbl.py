"""Binary-symmetric-channel calculators: capacity, dispersion, normal-approximation
payload, and the secret-key-length bound.  All logarithms are base 2."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "FblInputs",
    "binary_entropy",
    "channel_capacity",
    "channel_dispersion",
    "gaussian_q",
    "gaussian_q_inv",
    "ppv_max_payload",
    "secrecy_capacity",
    "extractable_key_length",
]


def _check_probability(p: float, name: str = "p"):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")


def binary_entropy(p: float) -> float:
    """-p log2 p - (1-p) log2 (1-p), with the 0 log 0 := 0 convention."""
    _check_probability(p)
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def channel_capacity(p: float) -> float:
    """C = 1 - h(p) bits per use."""
    return 1.0 - binary_entropy(p)


def channel_dispersion(p: float) -> float:
    """V = p (1-p) [log2((1-p)/p)]^2; zero at the deterministic and symmetric points."""
    _check_probability(p)
    if p in (0.0, 1.0, 0.5):
        return 0.0
    return p * (1.0 - p) * math.log2((1.0 - p) / p) ** 2


def gaussian_q(x: float) -> float:
    """Gaussian tail function Q(x) = 1 - Phi(x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


# Acklam's rational approximation of the inverse normal CDF.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


def _inv_norm_cdf(p: float) -> float:
    p_low, p_high = 0.02425, 1.0 - 0.02425
    if p < p_low:
        t = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]) / (
            (((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0
        )
    if p > p_high:
        t = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]) / (
            (((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0
        )
    t = p - 0.5
    r = t * t
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * t / (
        ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    )


def gaussian_q_inv(eps: float) -> float:
    """Inverse of the Gaussian tail function, |error| <= 1e-9.

    Rational approximation refined by Newton steps on Q(x) - eps using the
    exact erfc-based tail.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    x = -_inv_norm_cdf(eps)
    for _ in range(2):
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf == 0.0:
            break
        x += (gaussian_q(x) - eps) / pdf
    return x


def ppv_max_payload(n: int, eps: float, p: float) -> float:
    """Normal-approximation bound on the reliably decodable payload, in bits.

    n C - sqrt(n V) Q^{-1}(eps) + (1/2) log2 n for blocklength n and block error
    probability eps over a crossover-p channel.
    """
    if n < 1:
        raise ValueError(f"blocklength must be >= 1, got {n}")
    _check_probability(p)
    c = channel_capacity(p)
    v = channel_dispersion(p)
    return n * c - math.sqrt(n * v) * gaussian_q_inv(eps) + 0.5 * math.log2(n)


def secrecy_capacity(p: float, p_eve: float) -> float:
    """h(p_E) - h(p): the per-use entropy advantage over the eavesdropper."""
    _check_probability(p)
    _check_probability(p_eve, "p_eve")
    return binary_entropy(p_eve) - binary_entropy(p)


@dataclass(frozen=True)
class FblInputs:
    """Inputs of the finite-blocklength secret-key bound."""

    n: int
    eps: float
    delta: float
    p: float
    p_eve: float
    k: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 <= self.p <= self.p_eve <= 0.5:
            raise ValueError("require 0 <= p <= p_eve <= 1/2")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be a positive integer")

    @property
    def uses(self) -> int:
        return self.n if self.k is None else self.k


def extractable_key_length(k: int, eps: float, delta: float, p: float, p_eve: float) -> float:
    """Second-order bound on the extractable secret key length, in bits.

    k C_S - sqrt(k V) Q^{-1}(eps) - sqrt(k V_E) Q^{-1}(delta) + (1/2) log2 k,
    where V is the main-channel dispersion and V_E the eavesdropper's.
    """
    inputs = FblInputs(n=k, eps=eps, delta=delta, p=p, p_eve=p_eve)
    c_s = secrecy_capacity(inputs.p, inputs.p_eve)
    v = channel_dispersion(inputs.p)
    v_e = channel_dispersion(inputs.p_eve)
    return (
        k * c_s
        - math.sqrt(k * v) * gaussian_q_inv(eps)
        - math.sqrt(k * v_e) * gaussian_q_inv(delta)
        + 0.5 * math.log2(k)
    )
