"""The integral group algebra Z[G], symmetric pairings and exact characters.

An :class:`AlgebraElement` presents itself as a map element -> integer but
stores a dense coefficient vector indexed like ``GroupSpec.elements()``.
Convolution shifts the denser operand along the support of the sparser one
with ``np.roll`` on the group's box shape, so it is exact and quick for the
few-thousand-element groups this package targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .cyclotomic import CyclotomicInt, reduce_full, full_from_reduced
from .pgroup import Element, GroupSpec, Quotient, Subgroup

_SAFE = 2 ** 62


def _dtype_for(bound: int):
    return np.int64 if bound < _SAFE else object


class AlgebraElement:
    """An element sum_g c_g x^g of Z[G]."""

    __slots__ = ("group", "vec", "__weakref__")

    def __init__(self, group: GroupSpec, vec):
        vec = np.asarray(vec)
        if vec.shape != (group.v,):
            raise ValueError(f"coefficient vector must have length {group.v}")
        if vec.dtype != object:
            vec = vec.astype(np.int64)
        self.group = group
        self.vec = vec

    # -- construction --------------------------------------------------------

    @classmethod
    def zero(cls, G: GroupSpec) -> "AlgebraElement":
        return cls(G, np.zeros(G.v, dtype=np.int64))

    @classmethod
    def from_dict(cls, G: GroupSpec, coeffs: Mapping[Element, int]) -> "AlgebraElement":
        big = any(abs(int(c)) >= _SAFE for c in coeffs.values())
        vec = np.zeros(G.v, dtype=object if big else np.int64)
        for g, c in coeffs.items():
            if not G.is_element(tuple(g)):
                raise ValueError(f"{g} is not an element of {G}")
            vec[G.index(tuple(g))] += int(c)
        return cls(G, vec)

    @classmethod
    def from_set(cls, G: GroupSpec, elems: Iterable[Element]) -> "AlgebraElement":
        vec = np.zeros(G.v, dtype=np.int64)
        for g in elems:
            vec[G.index(G.element(g))] += 1
        return cls(G, vec)

    @classmethod
    def identity(cls, G: GroupSpec) -> "AlgebraElement":
        """The unit [1] = x^0."""
        vec = np.zeros(G.v, dtype=np.int64)
        vec[0] = 1
        return cls(G, vec)

    @classmethod
    def whole(cls, G: GroupSpec) -> "AlgebraElement":
        """G(x), the sum of all group elements."""
        return cls(G, np.ones(G.v, dtype=np.int64))

    # -- map-like view -------------------------------------------------------

    @property
    def coeffs(self) -> dict:
        els = self.group._elements
        return {els[i]: int(self.vec[i]) for i in np.flatnonzero(self.vec)}

    def __getitem__(self, g: Element) -> int:
        return int(self.vec[self.group.index(g)])

    def support(self) -> list[Element]:
        els = self.group._elements
        return [els[i] for i in np.flatnonzero(self.vec)]

    def total(self) -> int:
        """Principal character value: the sum of coefficients."""
        return int(self.vec.sum())

    def is_set(self) -> bool:
        return bool(np.all((self.vec == 0) | (self.vec == 1)))

    def norm1(self) -> int:
        return int(np.abs(self.vec).sum())

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError("expected an AlgebraElement")
        if other.group != self.group:
            raise ValueError(f"group mismatch: {self.group} vs {other.group}")

    def __add__(self, other):
        if isinstance(other, (int, np.integer)):
            return self + other * AlgebraElement.identity(self.group)
        self._check(other)
        return AlgebraElement(self.group, self.vec + other.vec)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.group, -self.vec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return AlgebraElement(self.group, self.vec * int(other))
        return convolve(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return AlgebraElement(self.group, self.vec * int(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.group == other.group and bool(np.all(self.vec == other.vec))

    def __hash__(self):
        return hash((self.group, tuple(int(c) for c in self.vec)))

    def __repr__(self):
        items = sorted(self.coeffs.items())
        body = " + ".join(f"{c}*x^{g}" for g, c in items[:8])
        if len(items) > 8:
            body += f" + ... ({len(items)} terms)"
        return f"AlgebraElement({self.group}: {body or '0'})"

    def power(self, n: int) -> "AlgebraElement":
        """A(x)^n by repeated squaring."""
        if n < 0:
            raise ValueError("negative powers are not defined in Z[G]")
        result = AlgebraElement.identity(self.group)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result


def convolve(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    """The group-algebra product: (AB)(g) = sum_h A(h) B(g - h)."""
    A._check(B)
    G = A.group
    if np.count_nonzero(A.vec) > np.count_nonzero(B.vec):
        A, B = B, A
    bound = A.norm1() * B.norm1()
    dt = _dtype_for(bound)
    if G.rank == 0:
        return AlgebraElement(G, (A.vec * B.vec).astype(dt))
    shape = G.moduli
    box = B.vec.astype(dt).reshape(shape)
    out = np.zeros(shape, dtype=dt)
    axes = tuple(range(G.rank))
    els = G._elements
    for i in np.flatnonzero(A.vec):
        c = A.vec[i]
        out += (int(c) if dt is object else c) * np.roll(box, els[i], axis=axes)
    return AlgebraElement(G, out.reshape(G.v))


def power_map(A: AlgebraElement, n: int) -> AlgebraElement:
    """A(x^n): the coefficient of g moves to n*g."""
    G = A.group
    out = np.zeros(G.v, dtype=A.vec.dtype)
    np.add.at(out, G.scale_indices(n), A.vec)
    return AlgebraElement(G, out)


def restrict(A: AlgebraElement, L: Subgroup) -> AlgebraElement:
    """Coefficients of A on the subgroup L, as an element of Z[L]."""
    if A.group != L.parent:
        raise ValueError("subgroup does not belong to the element's group")
    if L.spec is None:
        raise ValueError("restriction needs a subgroup with a coordinate description")
    spec = L.spec
    vec = np.zeros(spec.v, dtype=A.vec.dtype)
    for h in spec.elements():
        vec[spec.index(h)] = A.vec[A.group.index(L.embed(h))]
    return AlgebraElement(spec, vec)


def project(A: AlgebraElement, q: Quotient) -> AlgebraElement:
    """Push A forward along the canonical projection G -> G/L."""
    if A.group != q.group:
        raise ValueError("quotient does not belong to the element's group")
    vec = np.zeros(q.H.v, dtype=A.vec.dtype)
    np.add.at(vec, q.projection_indices, A.vec)
    return AlgebraElement(q.H, vec)


# -- pairings -----------------------------------------------------------------------


@dataclass(frozen=True)
class Pairing:
    """A symmetric bilinear pairing theta: G x G -> Z/p^s, read as characters.

    theta(g')(g) = eta^(g'^T M g) with eta a primitive p^s-th root of unity.
    """

    kind: str
    group: GroupSpec
    matrix: tuple[tuple[int, ...], ...]
    tag: str = ""

    @property
    def level(self) -> int:
        return self.group.exp

    @cached_property
    def M(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.group.rank, self.group.rank)

    def exponent(self, g1: Element, g2: Element) -> int:
        return int(np.asarray(g1, dtype=np.int64) @ self.M @ np.asarray(g2, dtype=np.int64)) % self.level

    def exponents_against(self, g: Element) -> np.ndarray:
        """theta(g)(h) exponents for every h, in element-index order."""
        col = (self.M.T @ np.asarray(g, dtype=np.int64)) % self.level
        return (self.group.coords_array @ col) % self.level

    def table(self) -> np.ndarray:
        """The full v x v exponent table E[g', g]."""
        C = self.group.coords_array
        return ((C @ self.M) % self.level @ C.T) % self.level

    def is_symmetric(self) -> bool:
        N, G = self.level, self.group
        for i in range(G.rank):
            for j in range(G.rank):
                if (self.M[i, j] - self.M[j, i]) % N:
                    return False
                # well defined on Z/p^a_j in the second slot
                if (self.M[i, j] * G.moduli[j]) % N:
                    return False
        return True

    def is_nondegenerate(self) -> bool:
        """theta is injective: only g' = 0 pairs trivially with every basis vector."""
        G = self.group
        if G.rank == 0:
            return True
        images = (G.coords_array @ self.M) % self.level
        return int(np.count_nonzero(~images.any(axis=1))) == 1

    def __call__(self, g1: Element):
        return lambda g2: self.exponent(g1, g2)


def diagonal_pairing(G: GroupSpec) -> Pairing:
    """exponent(g', g) = sum_i p^(s - a_i) g'_i g_i mod p^s."""
    s = G.s
    M = tuple(tuple(G.p ** (s - a) if i == j else 0 for j in range(G.rank))
              for i, a in enumerate(G.exponents))
    return Pairing("diagonal", G, M, "diagonal")


def check_pairing(pairing: Pairing) -> Pairing:
    if not pairing.is_symmetric():
        raise ValueError(f"pairing {pairing.tag!r} is not symmetric")
    if not pairing.is_nondegenerate():
        raise ValueError(f"pairing {pairing.tag!r} is degenerate")
    return pairing


# -- characters ---------------------------------------------------------------------


def char_value(A: AlgebraElement, g: Element, pairing: Pairing | None = None) -> CyclotomicInt:
    """theta(g)(A) = sum_h A(h) eta^(theta(g)(h)) as an exact cyclotomic integer."""
    pairing = pairing or diagonal_pairing(A.group)
    N = pairing.level
    if all(c == 0 for c in g):
        return CyclotomicInt.integer(A.total(), N)
    e = pairing.exponents_against(g)
    nz = np.flatnonzero(A.vec)
    full = np.zeros(N, dtype=object)
    for ex, c in zip(e[nz], A.vec[nz]):
        full[ex] += int(c)
    return CyclotomicInt.from_full(full, N)


def char_values_full(A: AlgebraElement, pairing: Pairing | None = None,
                     rows: np.ndarray | None = None) -> np.ndarray:
    """Unreduced character values for many characters at once.

    Returns an array of shape (len(rows), N) of full vectors in Z[x]/(x^N - 1);
    ``rows`` are element indices of the characters (default: all of G).
    """
    G = A.group
    pairing = pairing or diagonal_pairing(G)
    N = pairing.level
    C = G.coords_array
    rows = np.arange(G.v) if rows is None else np.asarray(rows)
    dt = _dtype_for(A.norm1())
    vec = A.vec.astype(dt)
    out = np.zeros((len(rows), N), dtype=dt)
    chunk = max(1, 2 ** 22 // max(G.v, 1))
    for lo in range(0, len(rows), chunk):
        sel = rows[lo:lo + chunk]
        E = ((C[sel] @ pairing.M) % N @ C.T) % N
        for e in range(N):
            mask = E == e
            if mask.any():
                out[lo:lo + chunk, e] = mask.astype(dt) @ vec
    return out


def char_table(A: AlgebraElement, pairing: Pairing | None = None) -> list[CyclotomicInt]:
    """Exact character values at every theta(g), g in element-index order."""
    pairing = pairing or diagonal_pairing(A.group)
    N = pairing.level
    red = reduce_full(char_values_full(A, pairing), N)
    return [CyclotomicInt(N, tuple(int(c) for c in row)) for row in red]


def fourier_inverse(values: list[CyclotomicInt], G: GroupSpec,
                    pairing: Pairing | None = None) -> AlgebraElement:
    """Recover A from its character values: A(h) = v^-1 sum_g chi_g(A) conj(chi_g(h))."""
    pairing = pairing or diagonal_pairing(G)
    N = pairing.level
    full = np.stack([full_from_reduced(np.array(x.lift(N).coeffs, dtype=object), N)
                     for x in values])
    E = pairing.table()
    coeffs = np.zeros(G.v, dtype=object)
    for h in range(G.v):
        acc = np.zeros(N, dtype=object)
        for e in range(N):
            mask = E[:, h] == e
            if mask.any():
                acc += np.roll(full[mask].sum(axis=0), -e)
        val = CyclotomicInt.from_full(acc, N)
        if not val.is_integer() or int(val) % G.v:
            raise ValueError("character values are not those of an element of Z[G]")
        coeffs[h] = int(val) // G.v
    return AlgebraElement(G, coeffs)


# -- GSHDS verification -------------------------------------------------------------


@dataclass(frozen=True)
class GshdsCertificate:
    """Outcome of checking D(x) D(x^n0) = (k0 - lambda)[1] + lambda G(x).

    ``lambda_`` is the constant off-identity coefficient of that product, so
    it is (v-3)/4 for a skew Hadamard difference set and (v-1)/4 in the
    Paley partial difference set case.
    """

    v: int
    k: int
    k0: int | None
    lambda_: int | None
    kind: str
    n0: int
    witness: Element | None = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.kind in ("SHDS", "PaleyPDS")

    @property
    def params(self) -> tuple:
        if self.kind == "SHDS":
            return (self.v, self.k, self.lambda_)
        if self.kind == "PaleyPDS":
            return self.pds_params
        return ()

    @property
    def pds_params(self) -> tuple:
        """(v, k, lambda, mu) of the partial difference set."""
        v = self.v
        return (v, self.k, (v - 5) // 4, (v - 1) // 4)


def check_gshds(D: AlgebraElement, n0: int | None = None) -> GshdsCertificate:
    G = D.group
    n0 = G.n0 if n0 is None else n0
    v, k = G.v, D.total()
    if not D.is_set():
        raise ValueError("D must be a 0/1 indicator")
    if D.vec[0]:
        raise ValueError("D must not contain the identity")
    Dn = power_map(D, n0)
    target = np.ones(G.v, dtype=np.int64)
    target[0] = 0
    bad = np.flatnonzero((D.vec + Dn.vec) != target)
    if bad.size:
        g = G._elements[bad[0]]
        return GshdsCertificate(v, k, None, None, "NotGSHDS", n0, g,
                                "skew condition D + D^(n0) = G - [1] fails")
    P = convolve(D, Dn)
    k0 = int(P.vec[0])
    lam = int(P.vec[1]) if G.v > 1 else 0
    bad = np.flatnonzero(P.vec[1:] != lam)
    if bad.size:
        g = G._elements[bad[0] + 1]
        return GshdsCertificate(v, k, k0, None, "NotGSHDS", n0, g,
                                "D(x)D(x^n0) is not constant off the identity")
    if k0 == k:
        kind = "SHDS"
    elif k0 == 0:
        kind = "PaleyPDS"
    else:
        raise AssertionError(f"k0 = {k0} is neither 0 nor k = {k}")
    return GshdsCertificate(v, k, k0, lam, kind, n0)


def difference_multiplicities(D: AlgebraElement) -> AlgebraElement:
    """D(x) D(x^-1): how often each g arises as a difference of two members."""
    return convolve(D, power_map(D, -1))
