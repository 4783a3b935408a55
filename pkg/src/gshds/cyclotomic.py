"""Exact arithmetic in the cyclotomic integers Z[eta_N], N = p^s.

Values are kept in the power basis 1, eta, ..., eta^(phi(N)-1) after
reduction by Phi_N(x) = sum_{j<p} x^(j p^(s-1)).  Intermediate work happens
in Z[x]/(x^N - 1) ("full" vectors of length N), which maps onto Z[eta_N]
by that reduction, so arrays of full vectors can be multiplied with cheap
cyclic convolutions and reduced once at the end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pgroup import legendre


def _prime_of(level: int) -> int:
    if level == 1:
        return 1
    q = 2
    while level % q:
        q += 1
    return q


def phi(level: int) -> int:
    if level == 1:
        return 1
    p = _prime_of(level)
    return level - level // p


def reduce_full(arr: np.ndarray, level: int) -> np.ndarray:
    """Reduce full vectors (last axis of length ``level``) to the power basis."""
    arr = np.asarray(arr)
    if level == 1:
        return arr.sum(axis=-1, keepdims=True)
    p = _prime_of(level)
    m = level // p
    f = level - m
    out = arr[..., :f].copy()
    tail = arr[..., f:]
    for j in range(p - 1):
        out[..., j * m:(j + 1) * m] -= tail
    return out


def full_from_reduced(vec: np.ndarray, level: int) -> np.ndarray:
    vec = np.asarray(vec)
    pad = [(0, 0)] * (vec.ndim - 1) + [(0, level - vec.shape[-1])]
    return np.pad(vec, pad)


def conj_full(arr: np.ndarray) -> np.ndarray:
    """Complex conjugation eta -> eta^-1 on full vectors."""
    N = arr.shape[-1]
    idx = (-np.arange(N)) % N
    return arr[..., idx]


def galois_full(arr: np.ndarray, n: int) -> np.ndarray:
    """The automorphism eta -> eta^n on full vectors (n a unit mod N)."""
    N = arr.shape[-1]
    out = np.zeros_like(arr)
    idx = (np.arange(N) * n) % N
    # idx is a permutation since gcd(n, N) = 1
    out[..., idx] = arr
    return out


def cyclic_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of full vectors in Z[x]/(x^N - 1), broadcasting leading axes."""
    N = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    for e in range(N):
        if np.any(a[..., e]):
            out += a[..., e:e + 1] * np.roll(b, e, axis=-1)
    return out


def cyc_matmul(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Matrix product of arrays of full vectors: (R,C,N) x (C,K,N) -> (R,K,N)."""
    N = X.shape[-1]
    out = np.zeros((X.shape[0], Y.shape[1], N), dtype=np.result_type(X, Y))
    for e in range(N):
        Xe = X[:, :, e]
        if not Xe.any():
            continue
        out += np.roll(np.einsum("ij,jkn->ikn", Xe, Y), e, axis=-1)
    return out


@dataclass(frozen=True)
class CyclotomicInt:
    """An element of Z[eta_level] in the reduced power basis."""

    level: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != phi(self.level):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def from_full(cls, full, level: int) -> "CyclotomicInt":
        full = np.asarray(full, dtype=object)
        if full.shape != (level,):
            raise ValueError("full vector has the wrong length")
        red = reduce_full(full, level)
        return cls(level, tuple(int(c) for c in red))

    @classmethod
    def from_exponents(cls, exponents, level: int, weights=None) -> "CyclotomicInt":
        """sum_i w_i eta^(e_i)."""
        exponents = np.asarray(exponents, dtype=np.int64).ravel() % level
        w = np.ones_like(exponents) if weights is None else np.asarray(weights, dtype=np.int64).ravel()
        full = np.zeros(level, dtype=np.int64)
        np.add.at(full, exponents, w)
        return cls.from_full([int(x) for x in full], level)

    @classmethod
    def integer(cls, n: int, level: int) -> "CyclotomicInt":
        return cls(level, (int(n),) + (0,) * (phi(level) - 1))

    @classmethod
    def eta(cls, level: int, e: int = 1) -> "CyclotomicInt":
        full = [0] * level
        full[e % level] = 1
        return cls.from_full(full, level)

    @property
    def full(self) -> np.ndarray:
        return full_from_reduced(np.array(self.coeffs, dtype=object), self.level)

    def _common(self, other):
        if isinstance(other, (int, np.integer)):
            other = int(other)
            other = CyclotomicInt.integer(other, self.level)
        if not isinstance(other, CyclotomicInt):
            return None, None
        level = max(self.level, other.level)
        return self.lift(level), other.lift(level)

    def __add__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return CyclotomicInt(a.level, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInt(self.level, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            other = int(other)
            return CyclotomicInt(self.level, tuple(other * x for x in self.coeffs))
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        prod = cyclic_mul(a.full, b.full)
        return CyclotomicInt.from_full(prod, a.level)

    __rmul__ = __mul__

    def __eq__(self, other):
        a, b = self._common(other)
        if a is None:
            return NotImplemented
        return a.coeffs == b.coeffs

    def __hash__(self):
        c = self.canonical()
        return hash((c.level, c.coeffs))

    def canonical(self) -> "CyclotomicInt":
        """The same value at the smallest level containing it."""
        a = self
        while a.level > 1:
            p = _prime_of(a.level)
            nz = [e for e, c in enumerate(a.coeffs) if c]
            if a.level == p:
                if nz and nz != [0]:
                    break
                return CyclotomicInt(1, (a.coeffs[0],))
            if any(e % p for e in nz):
                break
            low = a.level // p
            a = CyclotomicInt(low, tuple(a.coeffs[e * p] for e in range(phi(low))))
        return a

    def lift(self, level: int) -> "CyclotomicInt":
        """Embed Z[eta_self.level] into Z[eta_level] via eta -> eta^(level/self.level)."""
        if level == self.level:
            return self
        if level % self.level:
            raise ValueError(f"cannot embed level {self.level} into level {level}")
        step = level // self.level
        full = [0] * level
        for e, c in enumerate(self.full):
            full[e * step] += c
        return CyclotomicInt.from_full(full, level)

    def galois(self, n: int) -> "CyclotomicInt":
        if np.gcd(n, self.level) != 1:
            raise ValueError(f"{n} is not a unit mod {self.level}")
        return CyclotomicInt.from_full(galois_full(self.full, n % self.level), self.level)

    def conj(self) -> "CyclotomicInt":
        return self.galois(-1)

    def is_integer(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def __int__(self):
        if not self.is_integer():
            raise ValueError(f"{self} is not a rational integer")
        return self.coeffs[0]

    def __repr__(self):
        return f"CyclotomicInt(level={self.level}, coeffs={list(self.coeffs)})"


def cyc_reduce(full, level: int) -> CyclotomicInt:
    return CyclotomicInt.from_full(full, level)


def cyc_mul(a: CyclotomicInt, b: CyclotomicInt) -> CyclotomicInt:
    return a * b


def cyc_galois(a: CyclotomicInt, n: int) -> CyclotomicInt:
    return a.galois(n)


def gauss_periods(p: int, level: int | None = None) -> tuple[CyclotomicInt, CyclotomicInt]:
    """omega = sum of eta_p^n over residues n, and its n0-conjugate over non-residues.

    eta_p is taken to be eta_level^(level/p), so both live in Z[eta_level].
    """
    level = level or p
    step = level // p
    res = [n * step for n in range(1, p) if legendre(n, p) == 1]
    non = [n * step for n in range(1, p) if legendre(n, p) == -1]
    return CyclotomicInt.from_exponents(res, level), CyclotomicInt.from_exponents(non, level)


def sqrt_star(p: int, level: int | None = None) -> CyclotomicInt:
    """The distinguished square root of (-1|p) p, namely omega - omega^(n0)."""
    w, w0 = gauss_periods(p, level)
    return w - w0


def divide_integer(a: CyclotomicInt, n: int) -> CyclotomicInt:
    if any(c % n for c in a.coeffs):
        raise ValueError(f"{a} is not divisible by {n}")
    return CyclotomicInt(a.level, tuple(c // n for c in a.coeffs))
