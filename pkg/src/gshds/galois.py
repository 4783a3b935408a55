"""Finite fields F_q and Galois rings GR(p^2, beta) as Z/p^k[x]/(f).

Elements are coefficient vectors (constant term first) of length beta.  The
modulus f is monic with coefficients in [0, p) and primitive mod p, so the
same polynomial defines F_q (k=1) and its unramified lift GR(p^2, beta).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sympy import factorint, isprime

from .galgebra import AlgebraElement, Pairing
from .pgroup import GroupSpec, legendre


def _poly_mulmod(a, b, f, mod):
    """Product of two length-n vectors modulo the monic f (length n+1) and mod."""
    n = len(f) - 1
    prod = [0] * (2 * n - 1) if n else [0]
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for d in range(len(prod) - 1, n - 1, -1):
        c = prod[d] % mod
        if c:
            for i in range(n):
                prod[d - n + i] -= c * f[i]
        prod[d] = 0
    return tuple(c % mod for c in prod[:n])


@dataclass(frozen=True)
class RingSpec:
    """GR(p^k, beta) = Z/p^k[x]/(f) with f primitive mod p."""

    p: int
    k: int
    beta: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "modulus", tuple(int(c) for c in self.modulus))
        if self.k not in (1, 2):
            raise ValueError("only k = 1 (fields) and k = 2 are supported")
        if len(self.modulus) != self.beta + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree beta")

    @property
    def q(self) -> int:
        return self.p ** self.beta

    @property
    def mod(self) -> int:
        return self.p ** self.k

    def __str__(self):
        return f"GR({self.p}^{self.k}, {self.beta}; modulus=[{','.join(map(str, self.modulus))}])"

    @property
    def group(self) -> GroupSpec:
        """The additive group (Z/p^k)^beta."""
        return GroupSpec(self.p, (self.k,) * self.beta)

    # -- elements -------------------------------------------------------------

    def elem(self, coeffs) -> "RingElement":
        coeffs = tuple(int(c) % self.mod for c in coeffs)
        if len(coeffs) != self.beta:
            raise ValueError(f"expected {self.beta} coefficients")
        return RingElement(self, coeffs)

    def const(self, n: int) -> "RingElement":
        return self.elem((n,) + (0,) * (self.beta - 1))

    @property
    def zero(self) -> "RingElement":
        return self.const(0)

    @property
    def one(self) -> "RingElement":
        return self.const(1)

    @property
    def x(self) -> "RingElement":
        """The class of x, a root of the modulus."""
        if self.beta == 1:
            return self.const(-self.modulus[0])
        return self.elem((0, 1) + (0,) * (self.beta - 2))

    def elements(self):
        for c in itertools.product(range(self.mod), repeat=self.beta):
            yield RingElement(self, c)

    def units(self):
        return (g for g in self.elements() if g.is_unit())

    def reduce_to_field(self) -> "RingSpec":
        return RingSpec(self.p, 1, self.beta, self.modulus)

    def lift_to_ring(self) -> "RingSpec":
        return RingSpec(self.p, 2, self.beta, self.modulus)

    @cached_property
    def trace_vector(self) -> tuple[int, ...]:
        """Tr(x^i) for the basis 1, x, ..., x^(beta-1); Tr is Z/p^k-linear."""
        out, e = [], self.one
        for _ in range(self.beta):
            out.append(trace(e))
            e = e * self.x
        return tuple(out)

    def fast_trace(self, g: "RingElement") -> int:
        return sum(a * t for a, t in zip(g.coeffs, self.trace_vector)) % self.mod


@dataclass(frozen=True)
class RingElement:
    ring: RingSpec
    coeffs: tuple[int, ...]

    def _other(self, other):
        if isinstance(other, (int, np.integer)):
            return self.ring.const(int(other))
        if other.ring != self.ring:
            raise ValueError("elements of different rings")
        return other

    def __add__(self, other):
        other = self._other(other)
        m = self.ring.mod
        return RingElement(self.ring, tuple((a + b) % m for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        m = self.ring.mod
        return RingElement(self.ring, tuple(-a % m for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._other(other))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            m = self.ring.mod
            return RingElement(self.ring, tuple(int(other) * a % m for a in self.coeffs))
        other = self._other(other)
        R = self.ring
        return RingElement(R, _poly_mulmod(self.coeffs, other.coeffs, R.modulus, R.mod))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result, base = self.ring.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        return any(c % self.ring.p for c in self.coeffs)

    def mod_p(self) -> "RingElement":
        """Image in the residue field F_q."""
        F = self.ring.reduce_to_field()
        return F.elem(self.coeffs)

    def lift(self) -> "RingElement":
        """The same coefficient vector read in GR(p^2, beta)."""
        return self.ring.lift_to_ring().elem(self.coeffs)

    def __lt__(self, other):
        return self.coeffs < other.coeffs

    def __repr__(self):
        return f"<{list(self.coeffs)} in GR({self.ring.p}^{self.ring.k},{self.ring.beta})>"


# -- primitive polynomials ------------------------------------------------------------


def _is_primitive(p: int, coeffs: tuple[int, ...]) -> bool:
    F = RingSpec(p, 1, len(coeffs) - 1, coeffs)
    if coeffs[0] % p == 0:
        return False
    n = F.q - 1
    x = F.x
    if x ** n != F.one:
        return False
    return all(x ** (n // r) != F.one for r in factorint(n))


def primitive_polynomials(p: int, beta: int):
    """Monic primitive polynomials of degree beta over F_p in lexicographic order.

    Polynomials are coefficient tuples (c0, ..., c_{beta-1}, 1) and the order
    compares c0 first.
    """
    for low in itertools.product(range(p), repeat=beta):
        coeffs = low + (1,)
        if _is_primitive(p, coeffs):
            yield coeffs


def _nth_primitive(p: int, beta: int, index: int) -> tuple[int, ...]:
    for i, f in enumerate(primitive_polynomials(p, beta)):
        if i == index:
            return f
    raise ValueError(f"there are fewer than {index + 1} primitive polynomials")


def _check_p(p: int, beta: int):
    if p % 2 == 0 or not isprime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if beta < 1:
        raise ValueError("beta must be positive")


def make_field(p: int, beta: int, index: int = 0, modulus=None) -> RingSpec:
    """F_{p^beta}; ``index`` picks the index-th primitive modulus in lex order."""
    _check_p(p, beta)
    if modulus is None:
        modulus = _nth_primitive(p, beta, index)
    elif not _is_primitive(p, tuple(modulus)):
        raise ValueError(f"{modulus} is not primitive over F_{p}")
    return RingSpec(p, 1, beta, tuple(modulus))


def make_ring(p: int, beta: int, index: int = 0, modulus=None) -> RingSpec:
    """GR(p^2, beta) built on the same primitive modulus as make_field."""
    return make_field(p, beta, index, modulus).lift_to_ring()


_RING_RE = re.compile(r"^\s*GR\(\s*(\d+)\^(\d+)\s*,\s*(\d+)\s*;\s*modulus=\[([\d,\s]*)\]\s*\)\s*$")


def parse_ring(text: str) -> RingSpec:
    m = _RING_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse ring spec {text!r}")
    p, k, beta = int(m.group(1)), int(m.group(2)), int(m.group(3))
    modulus = tuple(int(t) for t in m.group(4).replace(" ", "").split(",") if t)
    if not _is_primitive(p, modulus):
        raise ValueError(f"{list(modulus)} is not primitive over F_{p}")
    return RingSpec(p, k, beta, modulus)


# -- Teichmuller units, Frobenius and trace --------------------------------------------


def teichmuller(g: RingElement) -> RingElement:
    """The (q-1)-th root of unity congruent to g mod p."""
    if not g.is_unit():
        raise ValueError(f"{g} is not a unit")
    q = g.ring.q
    cur = g
    while True:
        nxt = cur ** q
        if nxt == cur:
            return cur
        cur = nxt


def teichmuller_lift(c: RingElement, ring: RingSpec) -> RingElement:
    """Teichmuller representative in ``ring`` of a residue-field element (0 for 0)."""
    g = ring.elem(c.coeffs)
    return ring.zero if not g.is_unit() else teichmuller(g)


def teichmuller_set(R: RingSpec) -> list[RingElement]:
    """mu_{q-1} as the powers of tau(x), x being a primitive root mod p."""
    t = teichmuller(R.x)
    out, e = [], R.one
    for _ in range(R.q - 1):
        out.append(e)
        e = e * t
    return out


def decompose(g: RingElement) -> tuple[RingElement, RingElement]:
    """g = r0 + p r1 with r0, r1 Teichmuller units or zero."""
    R = g.ring
    r0 = teichmuller(g) if g.is_unit() else R.zero
    if R.k == 1:
        return r0, R.zero
    rest = g - r0
    if any(c % R.p for c in rest.coeffs):
        raise AssertionError("r0 does not agree with g mod p")
    delta = R.elem(tuple(c // R.p for c in rest.coeffs))
    r1 = teichmuller(delta) if delta.is_unit() else R.zero
    return r0, r1


def frobenius(g: RingElement) -> RingElement:
    """Fr(r0 + p r1) = r0^p + p r1^p."""
    p = g.ring.p
    r0, r1 = decompose(g)
    if g.ring.k == 1:
        return g ** p
    return r0 ** p + (r1 ** p) * p


def trace(g: RingElement) -> int:
    """Tr(g) = sum_{i < beta} Fr^i(g), an element of Z/p^k."""
    R = g.ring
    acc, cur = R.zero, g
    for _ in range(R.beta):
        acc = acc + cur
        cur = frobenius(cur)
    if any(acc.coeffs[1:]):
        raise AssertionError(f"trace of {g} left the base ring: {acc}")
    return acc.coeffs[0]


def multiplication_matrix(g: RingElement) -> np.ndarray:
    """Matrix of h -> g h in the basis 1, x, ..., x^(beta-1) (columns are images)."""
    R = g.ring
    cols, e = [], R.one
    for _ in range(R.beta):
        cols.append((g * e).coeffs)
        e = e * R.x
    return np.array(cols, dtype=np.int64).T


def matrix_trace(g: RingElement) -> int:
    return int(np.trace(multiplication_matrix(g))) % g.ring.mod


def unit_coordinates(g: RingElement) -> tuple[RingElement, RingElement]:
    """(b0, b1) with g = b0 (1 + p b1), b0 in mu_{q-1} and b1 in F_q."""
    R = g.ring
    b0 = teichmuller(g)
    inv = b0 ** (R.q - 2)
    u = g * inv - 1
    return b0, R.reduce_to_field().elem(tuple(c // R.p for c in u.coeffs))


# -- quadratic characters and the Paley construction ------------------------------------


def qr_symbol(x: RingElement) -> int:
    """Quadratic character of F_q: 0, +1 or -1."""
    F = x.ring
    if F.k != 1:
        x = x.mod_p()
        F = x.ring
    if x.is_zero():
        return 0
    y = x ** ((F.q - 1) // 2)
    if y == F.one:
        return 1
    if y == F.const(-1):
        return -1
    raise AssertionError("x^((q-1)/2) is not +-1")


def paley_set(F: RingSpec) -> list[tuple[int, ...]]:
    """Coefficient vectors of the nonzero squares of F_q."""
    return sorted({(g * g).coeffs for g in F.elements() if not g.is_zero()})


def paley_gshds(p: int, m: int, index: int = 0) -> AlgebraElement:
    """The nonzero squares of F_{p^m} as a subset of (Z/p)^m."""
    if m % 2 == 0:
        raise ValueError("m must be odd")
    F = make_field(p, m, index)
    return AlgebraElement.from_set(F.group, paley_set(F))


# -- the trace pairing and the Galois-ordered orbit representatives ------------------------


def trace_pairing(R: RingSpec) -> Pairing:
    """exponent(g', g) = Tr(g' g) mod p^k on the additive group of R."""
    e = [R.one]
    for _ in range(2 * R.beta - 2):
        e.append(e[-1] * R.x)
    M = tuple(tuple(R.fast_trace(e[i + j]) for j in range(R.beta)) for i in range(R.beta))
    return Pairing("galois-trace", R.group, M, f"trace:{R}")


@dataclass(frozen=True)
class OrbitReps:
    """Orbit representatives of GR(p^2, beta) under (Z/p^2)^*.

    ``l`` lists r' = (q-1)/(p-1) Teichmuller units, one per coset of
    mu_{p-1}; ``lprime`` lists Teichmuller lifts of the residues with zero
    constant term (0 first) and ``k_labels`` their remaining coordinates in
    (Z/p)^(beta-1).  ``h[i][j] = l[i] (1 + p lprime[j])``.
    """

    ring: RingSpec
    l: tuple[RingElement, ...]
    lprime: tuple[RingElement, ...]
    k_labels: tuple[tuple[int, ...], ...]
    h: tuple[tuple[RingElement, ...], ...]
    squares: bool

    @property
    def r_prime(self) -> int:
        return len(self.l)

    def galois_order(self) -> list[tuple[int, ...]]:
        """Group-coordinate reps: p l_1, ..., p l_r', then h_{.,1}, h_{.,2}, ..."""
        p = self.ring.p
        out = [(lv * p).coeffs for lv in self.l]
        for j in range(len(self.lprime)):
            out.extend(self.h[i][j].coeffs for i in range(self.r_prime))
        return out

    def verify_tiling(self) -> bool:
        """Each (Z/p^2)^*-orbit of order-p^2 elements meets the grid once."""
        R = self.ring
        scalars = [n for n in range(1, R.mod) if n % R.p]
        seen = set()
        for row in self.h:
            for g in row:
                orb = {(g * n).coeffs for n in scalars}
                if seen & orb:
                    return False
                seen |= orb
        n_units = R.q ** 2 - R.q
        low = set()
        for lv in self.l:
            orb = {(lv * (R.p * n)).coeffs for n in scalars}
            if low & orb:
                return False
            low |= orb
        return len(seen) == n_units and len(low) == R.q - 1


def orbit_reps(R: RingSpec, squares: bool | None = None) -> OrbitReps:
    """The representative grid; with ``squares`` every l_i is a square.

    l_i = tau(x)^(2i) for odd beta (these are squares and, r' being odd,
    still meet every coset of mu_{p-1}); l_i = tau(x)^i otherwise.
    """
    if R.k != 2:
        raise ValueError("orbit representatives live in GR(p^2, beta)")
    if squares is None:
        squares = R.beta % 2 == 1
    if squares and R.beta % 2 == 0:
        raise ValueError("square representatives need odd beta")
    p, q = R.p, R.q
    rp = (q - 1) // (p - 1)
    t = teichmuller(R.x)
    step = t * t if squares else t
    ls, e = [], R.one
    for _ in range(rp):
        ls.append(e)
        e = e * step
    F = R.reduce_to_field()
    labels = list(itertools.product(range(p), repeat=R.beta - 1))
    lprime = [teichmuller_lift(F.elem((0,) + lab), R) for lab in labels]
    h = tuple(tuple(lv * (lp * p + 1) for lp in lprime) for lv in ls)
    return OrbitReps(R, tuple(ls), tuple(lprime), tuple(labels), h, squares)


def field_square_check(p: int, beta: int) -> bool:
    """Every element of F_p^* is a square in F_{p^beta} iff beta is even."""
    F = make_field(p, beta)
    all_sq = all(qr_symbol(F.const(n)) == 1 for n in range(1, p))
    if beta % 2 == 0:
        return all_sq
    return all(qr_symbol(F.const(n)) == legendre(n, p) for n in range(1, p))
