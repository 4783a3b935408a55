"""Finite abelian p-groups Z/p^a1 x ... x Z/p^al and their unit-group orbits.

Elements are plain tuples of residues; a :class:`GroupSpec` knows how to add,
scale and index them.  Subgroups are stored as explicit sorted element lists,
which is adequate for the desk-scale groups handled here (|G| up to ~1e5).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from sympy import ZZ, Matrix, isprime
from sympy.matrices.normalforms import smith_normal_decomp

Element = tuple


def legendre(n: int, p: int) -> int:
    """Quadratic residue symbol (n|p), with value 0 when p divides n."""
    n %= p
    if n == 0:
        return 0
    return 1 if pow(n, (p - 1) // 2, p) == 1 else -1


def smallest_qnr(p: int) -> int:
    # a unit mod p^s is a square iff it is a square mod p
    return next(n for n in range(2, p) if legendre(n, p) == -1)


def units(modulus: int, p: int) -> list[int]:
    return [n for n in range(1, modulus) if n % p]


def valuation(n: int, p: int) -> float:
    """p-adic valuation of an integer; ``inf`` for zero."""
    if n == 0:
        return float("inf")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class GroupSpec:
    """The group Z/p^a1 x ... x Z/p^al with a1 >= ... >= al >= 1."""

    p: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(a) for a in self.exponents))
        if self.p < 3 or not isprime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if any(a < 1 for a in self.exponents):
            raise ValueError(f"exponents must be positive, got {self.exponents}")
        if list(self.exponents) != sorted(self.exponents, reverse=True):
            raise ValueError(f"exponents must be descending, got {self.exponents}")

    @property
    def beta(self) -> int:
        return sum(self.exponents)

    @property
    def v(self) -> int:
        return self.p ** self.beta

    @property
    def s(self) -> int:
        return self.exponents[0] if self.exponents else 0

    @property
    def exp(self) -> int:
        return self.p ** self.s

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @cached_property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p ** a for a in self.exponents)

    @cached_property
    def n0(self) -> int:
        return smallest_qnr(self.p)

    def __str__(self):
        if not self.exponents:
            return "1"
        return " x ".join(f"Z/{m}" for m in self.moduli)

    @property
    def dsl(self) -> str:
        return f"p={self.p};exps={','.join(map(str, self.exponents))}"

    # -- element arithmetic -------------------------------------------------

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def element(self, coords: Iterable[int]) -> Element:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {coords}")
        return tuple(c % m for c, m in zip(coords, self.moduli))

    def is_element(self, g) -> bool:
        return len(g) == self.rank and all(0 <= c < m for c, m in zip(g, self.moduli))

    def add(self, g: Element, h: Element) -> Element:
        return tuple((a + b) % m for a, b, m in zip(g, h, self.moduli))

    def sub(self, g: Element, h: Element) -> Element:
        return tuple((a - b) % m for a, b, m in zip(g, h, self.moduli))

    def neg(self, g: Element) -> Element:
        return tuple(-a % m for a, m in zip(g, self.moduli))

    def scale(self, n: int, g: Element) -> Element:
        return tuple(n * a % m for a, m in zip(g, self.moduli))

    def order(self, g: Element) -> int:
        o = 1
        for a, m in zip(g, self.moduli):
            if a:
                o = max(o, m // np.gcd(a, m))
        return int(o)

    # -- enumeration --------------------------------------------------------

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for m in reversed(self.moduli):
            out.append(acc)
            acc *= m
        return tuple(reversed(out))

    def elements(self) -> list[Element]:
        """All elements in lexicographic order (index order)."""
        return list(self._elements)

    @cached_property
    def _elements(self) -> tuple[Element, ...]:
        return tuple(itertools.product(*(range(m) for m in self.moduli)))

    def index(self, g: Element) -> int:
        return sum(a * st for a, st in zip(g, self.strides))

    @cached_property
    def coords_array(self) -> np.ndarray:
        arr = np.array(self._elements, dtype=np.int64)
        return arr.reshape(self.v, self.rank)

    def indices_of(self, coords: np.ndarray) -> np.ndarray:
        coords = np.mod(coords, np.array(self.moduli, dtype=np.int64))
        return coords @ np.array(self.strides, dtype=np.int64)

    def scale_indices(self, n: int) -> np.ndarray:
        """Index of n*g for every g, as an array over element indices."""
        if self.rank == 0:
            return np.zeros(1, dtype=np.int64)
        return self.indices_of(self.coords_array * n)


def make_group(p: int, exponents: Sequence[int]) -> GroupSpec:
    if not exponents:
        raise ValueError("exponents must be nonempty")
    if p % 2 == 0 or not isprime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    return GroupSpec(p, tuple(sorted((int(a) for a in exponents), reverse=True)))


_DSL = re.compile(r"^\s*p\s*=\s*(\d+)\s*;\s*exps\s*=\s*([\d,\s]+)$")


def parse_group(text: str) -> GroupSpec:
    """Parse the group DSL, e.g. ``"p=3; exps=2,2,1"``."""
    m = _DSL.match(text)
    if not m:
        raise ValueError(f"cannot parse group spec {text!r}; expected 'p=3; exps=2,2,1'")
    exps = [int(t) for t in m.group(2).replace(" ", "").split(",") if t]
    return make_group(int(m.group(1)), exps)


def scalar_mul(n: int, g: Element, G: GroupSpec) -> Element:
    return G.scale(n, g)


def elem_order(G: GroupSpec, g: Element) -> int:
    return G.order(g)


# -- unit orbits ----------------------------------------------------------------


@dataclass(frozen=True)
class UnitOrbitTable:
    """G1-orbit representatives of G \\ {0} and their split into G2-orbits.

    ``locate[g] = (j, n)`` records g = n * reps[j] with n a unit mod exp(G).
    """

    group: GroupSpec
    n0: int
    reps: tuple[Element, ...]
    g2_orbits: tuple[tuple[tuple[Element, ...], tuple[Element, ...]], ...]
    orbit_sizes: tuple[int, ...]
    pairing_tag: str
    ordering: str
    locate: dict = field(repr=False, compare=False, hash=False)

    @property
    def r(self) -> int:
        return len(self.reps)

    def omega(self, i: int) -> tuple[Element, ...]:
        a, b = self.g2_orbits[i]
        return tuple(sorted(a + b))

    def sign_of(self, g: Element) -> tuple[int, int]:
        """(j, e) with g in O_{g_j} (e=+1) or O_{g_j}^{(n0)} (e=-1)."""
        j, n = self.locate[g]
        return j, legendre(n, self.group.p)


def orbit_tables(G: GroupSpec, pairing=None, ordering: str = "auto",
                 reps: Sequence[Element] | None = None) -> UnitOrbitTable:
    """Orbits of (Z/p^s)^* on G \\ {0}.

    ``ordering`` is ``"lex"`` (lexicographically smallest representatives in
    lex order), ``"cyclic"`` (reps p^(s-1), ..., p, 1 for a cyclic group) or
    ``"auto"`` (cyclic for rank-one groups, lex otherwise).  Explicit ``reps``
    override both and must meet every orbit exactly once.
    """
    p, N = G.p, G.exp
    U = units(N, p)
    squares = sorted({n * n % N for n in U})
    n0 = G.n0

    assigned: dict = {}
    lex_reps = []
    for g in G.elements():
        if g == G.zero or g in assigned:
            continue
        lex_reps.append(g)
        for n in U:
            assigned.setdefault(G.scale(n, g), None)

    if reps is not None:
        reps = [G.element(g) for g in reps]
        tag = ordering if ordering != "auto" else "explicit"
    elif ordering == "cyclic" or (ordering == "auto" and G.rank == 1):
        if G.rank != 1:
            raise ValueError("cyclic ordering needs a cyclic group")
        reps = [(p ** i,) for i in reversed(range(G.s))]
        tag = "cyclic"
    elif ordering in ("lex", "auto"):
        reps = lex_reps
        tag = "lex"
    else:
        raise ValueError(f"unknown ordering {ordering!r}")

    locate: dict = {}
    g2 = []
    for j, g in enumerate(reps):
        if g == G.zero:
            raise ValueError("zero cannot be an orbit representative")
        for n in U:
            h = G.scale(n, g)
            if h in locate and locate[h][0] != j:
                raise ValueError(f"representatives {reps[locate[h][0]]} and {g} share an orbit")
            locate.setdefault(h, (j, n))
        plus = tuple(sorted({G.scale(n, g) for n in squares}))
        minus = tuple(sorted({G.scale(n0 * n, g) for n in squares}))
        g2.append((plus, minus))
    if len(locate) != G.v - 1:
        raise ValueError("representatives do not cover every orbit")

    tag_p = pairing.tag if pairing is not None else "diagonal"
    return UnitOrbitTable(
        group=G, n0=n0, reps=tuple(reps), g2_orbits=tuple(g2),
        orbit_sizes=tuple(len(a) + len(b) for a, b in g2),
        pairing_tag=tag_p, ordering=tag, locate=locate,
    )


# -- subgroups and quotients -------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of ``parent`` as an explicit sorted element list.

    When the subgroup is a coordinate-wise product (kernels and images of
    multiplication by p^k), ``spec`` is its isomorphism type and ``embed``
    maps coordinates of ``spec`` into the parent.
    """

    parent: GroupSpec
    elements: tuple[Element, ...]
    spec: GroupSpec | None = None
    positions: tuple[int, ...] = ()
    scales: tuple[int, ...] = ()

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self._members

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.elements)

    def embed(self, h: Element) -> Element:
        out = [0] * self.parent.rank
        for pos, sc, c in zip(self.positions, self.scales, h):
            out[pos] = c * sc
        return tuple(out)

    def coords(self, g: Element) -> Element:
        if g not in self:
            raise ValueError(f"{g} is not in the subgroup")
        return tuple(g[pos] // sc for pos, sc in zip(self.positions, self.scales))


def subgroup_from_elements(G: GroupSpec, elems: Iterable[Element]) -> Subgroup:
    members = {G.element(g) for g in elems}
    if G.zero not in members:
        raise ValueError("subgroup must contain zero")
    for a in members:
        for b in members:
            if G.add(a, b) not in members:
                raise ValueError(f"not closed under addition: {a} + {b}")
    return Subgroup(G, tuple(sorted(members)))


def _coordinate_subgroup(G: GroupSpec, new_exps: list[int], scales: list[int]) -> Subgroup:
    keep = [i for i, a in enumerate(new_exps) if a > 0]
    spec = GroupSpec(G.p, tuple(new_exps[i] for i in keep))
    sub = Subgroup(G, (), spec, tuple(keep), tuple(scales[i] for i in keep))
    elems = tuple(sorted(sub.embed(h) for h in spec.elements()))
    return Subgroup(G, elems, spec, sub.positions, sub.scales)


def kernel_image_mu(G: GroupSpec, k: int) -> tuple[Subgroup, Subgroup]:
    """Kernel and image of g -> p^k g."""
    if not 0 <= k <= G.s:
        raise ValueError(f"k must lie in [0, {G.s}], got {k}")
    p = G.p
    ker_exps = [min(a, k) for a in G.exponents]
    ker = _coordinate_subgroup(G, ker_exps, [p ** (a - e) for a, e in zip(G.exponents, ker_exps)])
    img_exps = [max(a - k, 0) for a in G.exponents]
    img = _coordinate_subgroup(G, img_exps, [p ** k] * G.rank)
    return ker, img


def _generators(G: GroupSpec, elems: Sequence[Element]) -> list[Element]:
    span = {G.zero}
    gens = []
    for e in elems:
        if e in span:
            continue
        gens.append(e)
        new = set(span)
        frontier = set(span)
        while frontier:
            frontier = {G.add(x, e) for x in frontier} - new
            new |= frontier
        span = new
    return gens


@dataclass(frozen=True)
class Quotient:
    """Canonical projection G -> H = G/L with H in Smith-normal coordinates."""

    group: GroupSpec
    kernel: Subgroup
    H: GroupSpec
    transform: tuple[tuple[int, ...], ...]
    columns: tuple[int, ...]
    coset_reps: tuple[Element, ...]

    def project(self, g: Element) -> Element:
        vals = [sum(g[r] * self.transform[r][c] for r in range(len(g))) for c in self.columns]
        return self.H.element(vals)

    def lift(self, h: Element) -> Element:
        return self.coset_reps[self.H.index(h)]

    @cached_property
    def projection_indices(self) -> np.ndarray:
        G = self.group
        T = np.array(self.transform, dtype=np.int64)[:, list(self.columns)] if self.columns else \
            np.zeros((G.rank, 0), dtype=np.int64)
        if self.H.rank == 0:
            return np.zeros(G.v, dtype=np.int64)
        return self.H.indices_of(G.coords_array @ T)


def quotient_projection(G: GroupSpec, L: Subgroup | Iterable[Element]) -> Quotient:
    if not isinstance(L, Subgroup):
        L = subgroup_from_elements(G, L)
    rows = [[G.moduli[i] if j == i else 0 for j in range(G.rank)] for i in range(G.rank)]
    rows += [list(g) for g in _generators(G, L.elements)]
    D, _, T = smith_normal_decomp(Matrix(rows), domain=ZZ)
    diag = [int(D[i, i]) for i in range(G.rank)]
    cols = [i for i, d in enumerate(diag) if d > 1]
    cols.sort(key=lambda i: -diag[i])
    exps = []
    for i in cols:
        d, e = diag[i], 0
        while d % G.p == 0:
            d //= G.p
            e += 1
        if d != 1:
            raise AssertionError("quotient of a p-group must be a p-group")
        exps.append(e)
    H = GroupSpec(G.p, tuple(exps))
    transform = tuple(tuple(int(T[r, c]) for c in range(T.cols)) for r in range(T.rows))
    q = Quotient(G, L, H, transform, tuple(cols), ())
    if H.v * len(L) != G.v:
        raise AssertionError("index mismatch in quotient construction")
    lifts: dict = {}
    for g in G.elements():
        lifts.setdefault(q.project(g), g)
    reps = tuple(lifts[h] for h in H.elements())
    return Quotient(G, L, H, transform, tuple(cols), reps)
