"""Narrow-sense binary BCH codecs over GF(2^m).

Bit conventions: a word (b_0, ..., b_{n-1}) represents the polynomial
sum_i b_i x^i.  Encoding is systematic with the message in the high-degree
positions; decoding is strict bounded-distance via syndromes, Berlekamp-Massey,
and a Chien search (anything beyond the design radius reports `uncorrectable`
or silently lands on a wrong nearby codeword, as any bounded-distance decoder
does).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["DecodeResult", "GF2m", "BchCode", "smallest_primitive_poly"]


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of one block decode."""

    message: np.ndarray
    corrected_errors: int
    status: str  # "ok" | "uncorrectable"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@lru_cache(maxsize=None)
def smallest_primitive_poly(m: int) -> int:
    """Lexicographically smallest degree-m primitive polynomial over GF(2).

    Encoded as an integer with bit i = coefficient of x^i.  Found by direct
    search: x must have multiplicative order 2^m - 1 modulo the candidate.
    """
    if m < 2:
        raise ValueError("need m >= 2")
    n = (1 << m) - 1
    for cand in range((1 << m) + 1, 1 << (m + 1), 2):
        a = 1
        order = 0
        for i in range(1, n + 1):
            a <<= 1
            if a & (1 << m):
                a ^= cand
            if a == 1:
                order = i
                break
        if order == n:
            return cand
    raise RuntimeError(f"no primitive polynomial of degree {m} found")


class GF2m:
    """Log/antilog tables for GF(2^m) with a primitive element alpha = x."""

    def __init__(self, m: int, prim_poly: int | None = None):
        self.m = m
        self.n = (1 << m) - 1
        self.prim_poly = prim_poly if prim_poly is not None else smallest_primitive_poly(m)
        exp = [0] * (2 * self.n)
        log = [0] * (1 << m)
        a = 1
        for i in range(self.n):
            exp[i] = a
            log[a] = i
            a <<= 1
            if a & (1 << m):
                a ^= self.prim_poly
        if a != 1:
            raise ValueError(f"0b{self.prim_poly:b} is not primitive for m={m}")
        for i in range(self.n, 2 * self.n):
            exp[i] = exp[i - self.n]
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(2^m)")
        return self.exp[self.n - self.log[a]]


def _poly_mul_bits(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _poly_mod_bits(a: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while a.bit_length() - 1 >= dm and a:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


class BchCode:
    """A narrow-sense binary BCH code of length 2^m - 1 correcting t errors."""

    def __init__(self, m: int, t: int, prim_poly: int | None = None):
        self.field = GF2m(m, prim_poly)
        self.n = self.field.n
        self.t = t
        self.generator = self._build_generator()
        self.k = self.n - (self.generator.bit_length() - 1)
        if self.k <= 0:
            raise ValueError(f"design radius t={t} leaves no message bits at m={m}")

    @classmethod
    def from_params(cls, n: int, k: int) -> "BchCode":
        """Construct the narrow-sense code with the given (n, k), if one exists.

        Consecutive design radii can share a generator (the extra roots already
        lie in covered conjugacy classes), so keep the largest t for the k.
        """
        m = n.bit_length()
        if n != (1 << m) - 1:
            raise ValueError(f"supported lengths are 2^m - 1, got {n}")
        best = None
        for t in range(1, n // 2 + 1):
            code = cls(m, t)
            if code.k == k:
                best = code
            if code.k < k:
                break
        if best is None:
            raise ValueError(f"no narrow-sense BCH code with n={n}, k={k}")
        return best

    def _build_generator(self) -> int:
        gf = self.field
        seen: set[int] = set()
        g = 1
        for i in range(1, 2 * self.t + 1):
            if i in seen:
                continue
            # conjugacy class of alpha^i
            cls, c = [], i
            while c not in seen:
                seen.add(c)
                cls.append(c)
                c = (c * 2) % gf.n
            # minimal polynomial: prod (x - alpha^c), coefficients land in GF(2)
            poly = [1]
            for c in cls:
                root = gf.exp[c]
                nxt = [0] * (len(poly) + 1)
                for j, co in enumerate(poly):
                    nxt[j + 1] ^= co
                    if co:
                        nxt[j] ^= gf.mul(co, root)
                poly = nxt
            if any(co not in (0, 1) for co in poly):
                raise RuntimeError("minimal polynomial not binary")
            bits = 0
            for j, co in enumerate(poly):
                bits |= co << j
            g = _poly_mul_bits(g, bits)
        return g

    def encode(self, message) -> np.ndarray:
        """Systematic encoding: parity in positions [0, n-k), message above."""
        message = np.asarray(message, dtype=np.uint8)
        if message.shape != (self.k,):
            raise ValueError(f"message must have length {self.k}, got {message.shape}")
        r = self.n - self.k
        m_bits = 0
        for j, bit in enumerate(message):
            if bit:
                m_bits |= 1 << (r + j)
        parity = _poly_mod_bits(m_bits, self.generator)
        word = m_bits | parity
        return np.array([(word >> i) & 1 for i in range(self.n)], dtype=np.uint8)

    def _syndromes(self, positions) -> list[int]:
        gf = self.field
        out = []
        for i in range(1, 2 * self.t + 1):
            s = 0
            for j in positions:
                s ^= gf.exp[(i * j) % gf.n]
            out.append(s)
        return out

    def decode(self, received) -> DecodeResult:
        """Strict bounded-distance decoding; never corrects more than t flips."""
        received = np.asarray(received, dtype=np.uint8)
        if received.shape != (self.n,):
            raise ValueError(f"received word must have length {self.n}")
        positions = [int(j) for j in np.nonzero(received)[0]]
        synd = self._syndromes(positions)
        r = self.n - self.k
        if not any(synd):
            return DecodeResult(received[r:].copy(), 0, "ok")

        locator, deg = self._berlekamp_massey(synd)
        if deg > self.t:
            return DecodeResult(received[r:].copy(), 0, "uncorrectable")
        error_positions = self._chien_search(locator)
        if len(error_positions) != deg:
            return DecodeResult(received[r:].copy(), 0, "uncorrectable")
        corrected = received.copy()
        for pos in error_positions:
            corrected[pos] ^= 1
        if any(self._syndromes([int(j) for j in np.nonzero(corrected)[0]])):
            return DecodeResult(received[r:].copy(), 0, "uncorrectable")
        return DecodeResult(corrected[r:].copy(), len(error_positions), "ok")

    def _berlekamp_massey(self, synd):
        gf = self.field
        c_poly = [1]
        b_poly = [1]
        length = 0
        gap = 1
        b_disc = 1
        for step in range(2 * self.t):
            d = synd[step]
            for i in range(1, length + 1):
                if i < len(c_poly) and c_poly[i] and synd[step - i]:
                    d ^= gf.mul(c_poly[i], synd[step - i])
            if d == 0:
                gap += 1
                continue
            coef = gf.mul(d, gf.inv(b_disc))
            shifted = [0] * gap + [gf.mul(coef, co) for co in b_poly]
            if 2 * length <= step:
                prev = c_poly[:]
                c_poly = [
                    (c_poly[i] if i < len(c_poly) else 0)
                    ^ (shifted[i] if i < len(shifted) else 0)
                    for i in range(max(len(c_poly), len(shifted)))
                ]
                length = step + 1 - length
                b_poly = prev
                b_disc = d
                gap = 1
            else:
                c_poly = [
                    (c_poly[i] if i < len(c_poly) else 0)
                    ^ (shifted[i] if i < len(shifted) else 0)
                    for i in range(max(len(c_poly), len(shifted)))
                ]
                gap += 1
        while len(c_poly) > 1 and c_poly[-1] == 0:
            c_poly.pop()
        return c_poly, length

    def _chien_search(self, locator) -> list[int]:
        gf = self.field
        roots = []
        for i in range(gf.n):
            acc = 0
            for j, co in enumerate(locator):
                if co:
                    acc ^= gf.exp[(gf.log[co] + j * ((gf.n - i) % gf.n)) % gf.n]
            if acc == 0:
                roots.append(i)
        return roots
