"""Quadratic residue slices and their difference coefficients.

A QRS is a union of G2-orbits that picks, for every G1-orbit Omega_i, either
O_{g_i} or its n0-image.  Writing d_i = +1 in the first case and -1 in the
second, the difference coefficients are df = A d, and D is a GSHDS exactly
when |G| = p^(2 alpha + 1) and p^alpha divides every entry of df.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .checks import Check
from .cyclotomic import CyclotomicInt, sqrt_star
from .galgebra import AlgebraElement, GshdsCertificate, check_gshds, diagonal_pairing, power_map, project
from .incidence import IncidenceMatrix, build_A
from .pgroup import GroupSpec, Quotient, Subgroup, UnitOrbitTable, legendre, orbit_tables, quotient_projection, valuation


@dataclass(frozen=True)
class DiffCoeffVector:
    values: tuple[int, ...]
    nu_p: float

    @classmethod
    def of(cls, values, p: int) -> "DiffCoeffVector":
        values = tuple(int(x) for x in values)
        g = math.gcd(*values) if values else 0
        return cls(values, valuation(g, p))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str
    diff: DiffCoeffVector
    certificate: GshdsCertificate | None = None
    verified_by: tuple[str, ...] = ()


def alpha_of(G: GroupSpec) -> int | None:
    return (G.beta - 1) // 2 if G.beta % 2 else None


def _orbit_masks(table: UnitOrbitTable) -> tuple[np.ndarray, np.ndarray]:
    G = table.group
    plus = np.zeros((table.r, G.v), dtype=bool)
    minus = np.zeros((table.r, G.v), dtype=bool)
    for i, (a, b) in enumerate(table.g2_orbits):
        plus[i, [G.index(h) for h in a]] = True
        minus[i, [G.index(h) for h in b]] = True
    return plus, minus


def qrs_decode(d, table: UnitOrbitTable) -> AlgebraElement:
    d = np.asarray(d)
    if d.shape != (table.r,) or not np.all(np.abs(d) == 1):
        raise ValueError("sign vector must have one +-1 entry per orbit")
    plus, minus = _orbit_masks(table)
    vec = np.where(d[:, None] > 0, plus, minus).any(axis=0)
    return AlgebraElement(table.group, vec.astype(np.int64))


def qrs_violation(D: AlgebraElement, table: UnitOrbitTable) -> str | None:
    """The first QRS condition D fails, or None."""
    G = D.group
    if not D.is_set():
        return "not a 0/1 indicator"
    if D.total() != (G.v - 1) // 2:
        return f"size {D.total()} is not (v-1)/2 = {(G.v - 1) // 2}"
    for n in range(1, G.exp):
        if n % G.p and legendre(n, G.p) == 1 and power_map(D, n) != D:
            return f"not invariant under multiplication by the square {n}"
    target = np.ones(G.v, dtype=np.int64)
    target[0] = 0
    if not np.array_equal(D.vec + power_map(D, table.n0).vec, target):
        return "D and D^(n0) do not partition G \\ {0}"
    return None


def qrs_encode(D: AlgebraElement, table: UnitOrbitTable) -> np.ndarray:
    why = qrs_violation(D, table)
    if why:
        raise ValueError(f"not a quadratic residue slice: {why}")
    return np.array([1 if D[g] else -1 for g in table.reps], dtype=np.int64)


def diff_coeffs(d, A: IncidenceMatrix) -> DiffCoeffVector:
    return DiffCoeffVector.of(A.entries @ np.asarray(d, dtype=np.int64), A.group.p)


def diff_coeff_from_char(value: CyclotomicInt, p: int) -> int:
    """Solve chi(D) = (-1 + d sqrt((-1|p) p)) / 2 for the integer d."""
    root = sqrt_star(p, value.level)
    w = value * 2 + 1
    t = next(i for i, c in enumerate(root.coeffs) if c)
    d, rem = divmod(w.coeffs[t], root.coeffs[t])
    if rem or root * d != w:
        raise ValueError("character value is not of the form (-1 + d sqrt)/2")
    return d


def is_gshds(d, A: IncidenceMatrix, oracle: bool = True) -> Verdict:
    G = A.group
    diff = diff_coeffs(d, A)
    alpha = alpha_of(G)
    if alpha is None:
        return Verdict(False, "square order: |G| = p^beta with beta even admits no GSHDS", diff)
    ok = diff.nu_p >= alpha
    reason = f"p^{alpha} {'divides' if ok else 'does not divide'} every difference coefficient"
    if not oracle:
        return Verdict(ok, reason, diff, None, ("divisibility",))
    cert = check_gshds(qrs_decode(d, A.table), A.table.n0)
    if cert.ok != ok:
        raise AssertionError(f"divisibility says {ok} but convolution says {cert.kind}")
    return Verdict(ok, reason, diff, cert, ("divisibility", "convolution"))


def dual(d, A: IncidenceMatrix) -> np.ndarray:
    v = is_gshds(d, A, oracle=False)
    if not v.ok:
        raise ValueError(f"dual needs a GSHDS: {v.reason}")
    pa = A.group.p ** alpha_of(A.group)
    db = A.entries @ np.asarray(d, dtype=np.int64)
    if np.any(db % pa):
        raise AssertionError("A d is not divisible by p^alpha")
    db //= pa
    if not np.all(np.abs(db) == 1):
        raise AssertionError(f"dual vector has entries outside +-1: {db}")
    return db


def level_columns(table: UnitOrbitTable, l: int) -> np.ndarray:
    """Orbit indices whose representatives lie in G_l (order dividing p^l)."""
    G = table.group
    return np.array([j for j, g in enumerate(table.reps) if G.order(g) <= G.p ** l], dtype=np.int64)


def restrict_prune(d, A: IncidenceMatrix, l: int) -> np.ndarray:
    """Difference coefficients mod p^l computed from the G_l-part of d alone."""
    G = A.group
    if not 1 <= l <= G.s:
        raise ValueError(f"level must lie in [1, {G.s}]")
    cols = level_columns(A.table, l)
    d = np.asarray(d, dtype=np.int64)
    return (A.entries[:, cols] @ d[cols]) % (G.p ** l)


# -- search ---------------------------------------------------------------------------------


def gray(t: int) -> int:
    return t ^ (t >> 1)


def _bits(code: int, n: int) -> np.ndarray:
    """Sign vector of a Gray code word: bit i set means d_i = -1."""
    return np.array([-1 if (code >> i) & 1 else 1 for i in range(n)], dtype=np.int64)


@dataclass
class SearchResult:
    group: GroupSpec
    r: int
    mode: str
    examined: int
    total: int
    exhaustive: bool
    hits: list = field(default_factory=list)
    nu_hist: dict = field(default_factory=dict)
    pruned: int = 0
    seed: int | None = None
    agreements: int = 0
    next_index: int | None = None


def _scan_range(Ae: np.ndarray, pa: int, lo: int, hi: int, p: int, want_hist: bool,
                oracle_all: bool, table=None, inner=None, base=None):
    """Gray-code scan of codes gray(lo) .. gray(hi-1) over the columns ``inner``.

    ``base`` is the fixed contribution of the other columns.
    """
    r = Ae.shape[1]
    inner = np.arange(r) if inner is None else inner
    cols = Ae[:, inner]
    n = len(inner)
    base = np.zeros(Ae.shape[0], dtype=np.int64) if base is None else base
    code = gray(lo)
    dsub = _bits(code, n)
    df = base + cols @ dsub
    hits, hist, agree = [], {}, 0
    for t in range(lo, hi):
        if t > lo:
            b = (t & -t).bit_length() - 1
            dsub[b] = -dsub[b]
            df += 2 * dsub[b] * cols[:, b]
        ok = pa == 0 or not np.any(df % pa)
        if want_hist:
            v = valuation(math.gcd(*map(int, df)), p)
            hist[v] = hist.get(v, 0) + 1
        if ok:
            hits.append((t, dsub.copy(), df.copy()))
        if oracle_all:
            full = _full_vector(dsub, inner, base_sign=None)
            cert = check_gshds(qrs_decode(full, table), table.n0) if full is not None else None
            if cert is not None and cert.ok != ok:
                raise AssertionError(f"verdicts disagree at code {t}")
            agree += 1
    return hits, hist, agree


def _full_vector(dsub, inner, base_sign):
    if base_sign is None:
        return dsub
    out = base_sign.copy()
    out[inner] = dsub
    return out


def _scan_job(args):
    Ae, pa, lo, hi, p, want_hist = args
    hits, hist, _ = _scan_range(Ae, pa, lo, hi, p, want_hist, False)
    return hits, hist


def exhaustive_search(G: GroupSpec, budget: int | None = None, seed: int | None = None,
                      jobs: int = 1, prune_level: int | None = None, sample: bool = False,
                      oracle_all: bool = False, nu_stats: bool = True,
                      A: IncidenceMatrix | None = None, start: int = 0) -> SearchResult:
    """Enumerate all 2^r quadratic residue slices and report the GSHDS among them.

    Sign vectors are visited in Gray-code order so each step updates A d by
    one column.  With ``sample`` and a budget below 2^r, ``budget`` vectors
    are drawn from a seeded generator instead.  ``prune_level`` l enumerates
    the G_l-part first and skips every completion whose restricted
    coefficients are already incompatible with p^alpha divisibility.
    """
    A = A or build_A(G)
    table = A.table
    r, p = A.r, G.p
    alpha = alpha_of(G)
    pa = p ** alpha if alpha is not None else 0
    total = 2 ** r
    Ae = A.entries
    res = SearchResult(G, r, "exhaustive", 0, total, True, seed=seed)

    def record(hits, hist):
        for key, val in hist.items():
            res.nu_hist[key] = res.nu_hist.get(key, 0) + val
        if alpha is None:
            return
        for t, d, df in hits:
            cert = check_gshds(qrs_decode(d, table), table.n0)
            if not cert.ok:
                raise AssertionError(f"divisibility hit {d.tolist()} fails the convolution check")
            res.hits.append((t, d, df, cert))

    if sample and budget is not None and budget < total:
        res.mode, res.exhaustive = "sample", False
        rng = np.random.default_rng(seed)
        hits, hist = [], {}
        for _ in range(budget):
            d = rng.choice(np.array([-1, 1]), size=r)
            df = Ae @ d
            v = valuation(math.gcd(*map(int, df)), p)
            hist[v] = hist.get(v, 0) + 1
            if alpha is not None and not np.any(df % pa):
                hits.append((-1, d, df))
        record(hits, hist if nu_stats else {})
        res.examined = budget
        return res

    if prune_level is not None and alpha is not None and alpha > 0:
        return _pruned_search(A, prune_level, budget, res, record)

    hi = total if budget is None else min(total, start + budget)
    if jobs > 1 and not oracle_all:
        step = -(-(hi - start) // jobs)
        ranges = [(lo, min(hi, lo + step)) for lo in range(start, hi, step)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_scan_job, [(Ae, pa if alpha is not None else 0, lo, h, p, nu_stats)
                                            for lo, h in ranges]))
        for hits, hist in parts:
            record(hits, hist)
    else:
        hits, hist, agree = _scan_range(Ae, pa if alpha is not None else 0, start, hi, p, nu_stats,
                                        oracle_all and alpha is not None, table)
        res.agreements = agree
        record(hits, hist)
    res.examined = hi - start
    if hi < total or start > 0:
        res.exhaustive = False
        res.mode = "partial"
        res.next_index = hi if hi < total else None
    return res


def _pruned_search(A: IncidenceMatrix, l: int, budget, res: SearchResult, record) -> SearchResult:
    G, p = A.group, A.group.p
    alpha = alpha_of(G)
    outer = level_columns(A.table, l)
    inner = np.setdiff1d(np.arange(A.r), outer)
    mod = p ** min(alpha, l)
    Ae = A.entries
    res.mode = f"pruned(l={l})"
    examined = 0
    n_out = len(outer)
    for t in range(2 ** n_out):
        d_out = _bits(gray(t), n_out)
        partial = Ae[:, outer] @ d_out
        block = 2 ** len(inner)
        if np.any(partial % mod):
            res.pruned += block
            continue
        if budget is not None and examined + block > budget:
            res.exhaustive = False
            res.mode += "-partial"
            res.next_index = t
            break
        hits, hist, _ = _scan_range(Ae, p ** alpha, 0, block, p, False, False, inner=inner, base=partial)
        full_hits = []
        for code, dsub, df in hits:
            d = np.empty(A.r, dtype=np.int64)
            d[outer] = d_out
            d[inner] = dsub
            full_hits.append((t * block + code, d, df))
        record(full_hits, {})
        examined += block
    res.examined = examined
    return res


# -- difference intersection numbers -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NuVector:
    quotient: Quotient
    values: np.ndarray          # nu over every element of H, in index order
    rep_values: np.ndarray      # nu at the H1-orbit representatives
    table: UnitOrbitTable | None
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def lifted_diff_coeffs(D: AlgebraElement, q: Quotient, table: UnitOrbitTable) -> np.ndarray:
    """Difference coefficients of D at the characters theta_H(h_i) o pi, computed in G."""
    G, H = q.group, q.H
    P = diagonal_pairing(H)
    shift = G.p ** (G.s - H.s)
    proj = q.projection_indices
    support = np.flatnonzero(D.vec)
    out = []
    for h in table.reps:
        eH = P.exponents_against(h)
        ex = (eH[proj[support]] * shift) % G.exp
        val = CyclotomicInt.from_exponents(ex, G.exp)
        out.append(diff_coeff_from_char(val, G.p))
    return np.array(out, dtype=np.int64)


def diff_intersection(D: AlgebraElement, L: Subgroup, n0: int | None = None) -> NuVector:
    G = D.group
    n0 = G.n0 if n0 is None else n0
    q = quotient_projection(G, L)
    H = q.H
    X = project(D - power_map(D, n0), q)
    nu = X.vec.astype(np.int64)
    nL = len(L)
    checks = [
        Check("|nu| <= |L|", bool(np.all(np.abs(nu) <= nL))),
        Check("nu = |L| mod 2 off the identity coset", bool(np.all((nu[1:] - nL) % 2 == 0))),
    ]
    if H.rank == 0:
        return NuVector(q, nu, np.zeros(0, dtype=np.int64), None, tuple(checks))
    table = orbit_tables(H)
    reps_nu = np.array([nu[H.index(h)] for h in table.reps], dtype=np.int64)
    cov = all(nu[H.index(H.scale(n, h))] == legendre(n, H.p) * nu[H.index(h)]
              for h in H.elements() for n in range(1, H.exp) if n % H.p)
    checks.append(Check("nu(n h) = (n|p) nu(h)", cov))
    AH = build_A(H, diagonal_pairing(H), table)
    lhs = AH.entries @ reps_nu
    rhs = lifted_diff_coeffs(D, q, table)
    checks.append(Check("A_H nu = df(D) at characters lifted from H", bool(np.array_equal(lhs, rhs)),
                        "" if np.array_equal(lhs, rhs) else f"{lhs.tolist()} vs {rhs.tolist()}"))
    return NuVector(q, nu, reps_nu, table, tuple(checks))


# -- character values of a verified GSHDS -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class Dichotomy:
    values: tuple[CyclotomicInt, ...]      # the distinct nonprincipal values, sorted by coefficient
    coeffs: tuple[int, ...]                # their difference coefficients
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def character_dichotomy(D: AlgebraElement) -> Dichotomy:
    """Every nonprincipal chi(D) is (-1 + e p^alpha sqrt((-1|p) p))/2 with e = +-1."""
    from .galgebra import char_table
    G, p = D.group, D.group.p
    alpha = alpha_of(G)
    vals = char_table(D)[1:]
    coeffs = []
    for v in vals:
        try:
            coeffs.append(diff_coeff_from_char(v, p))
        except ValueError:
            coeffs.append(None)
    formed = all(c is not None for c in coeffs)
    distinct = sorted({c for c in coeffs if c is not None})
    target = p ** alpha if alpha is not None else None
    checks = (
        Check("chi(D) = (-1 + d sqrt((-1|p) p))/2 for every chi != chi_0", formed),
        Check("d = +-p^alpha", formed and target is not None and all(abs(c) == target for c in coeffs),
              f"d in {distinct}"),
        Check("exactly two nonprincipal values", len(distinct) == 2, f"{len(distinct)} values"),
    )
    uniq = {}
    for v, c in zip(vals, coeffs):
        uniq.setdefault(c, v)
    keys = sorted(k for k in uniq if k is not None)
    return Dichotomy(tuple(uniq[k] for k in keys), tuple(keys), checks)
