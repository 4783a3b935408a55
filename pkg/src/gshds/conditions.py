"""Necessary conditions: the lambda matrix and L0, the A/B system, power
coefficients and the exponent-bound report.

The lambda matrix lives on K = (Z/p)^(2 alpha), indexed by the residues
k_t = (c_1, ..., c_{2 alpha}) of the representatives l'_t.  Its entries are

    lambda_{s,t} = sum_j psi(Tr(l_j (1 + p (l'_s + l'_t)))),

with psi(m) = ((m/p) | p) when p divides m and 0 otherwise (this is how the
blocks J_{H,s,t} of the Galois-ordered incidence matrix are normalised).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .checks import Check, first_failure
from .galgebra import AlgebraElement, GshdsCertificate, char_table, check_gshds, convolve, power_map
from .galois import OrbitReps, RingSpec, make_ring, orbit_reps
from .incidence import block_decompose, field_incidence
from .pgroup import GroupSpec, kernel_image_mu, legendre, make_group, orbit_tables, valuation
from .qrs import diff_intersection, qrs_decode


def psi(m: int, p: int) -> int:
    m %= p * p
    return legendre(m // p, p) if m % p == 0 else 0


# -- lambda matrix and L0 ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LambdaMatrix:
    p: int
    alpha: int
    L: np.ndarray
    eps0: int
    ring: RingSpec
    reps: OrbitReps
    checks: tuple[Check, ...] = ()

    @property
    def K(self) -> GroupSpec:
        return GroupSpec(self.p, (1,) * (2 * self.alpha))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _lambda_entries(R: RingSpec, reps: OrbitReps) -> np.ndarray:
    """Uses Tr(l (1 + p w)) = Tr(l) + p Tr(l w), where only w mod p matters."""
    p, beta = R.p, R.beta
    basis = [R.one]
    for _ in range(beta - 1):
        basis.append(basis[-1] * R.x)
    T0 = np.array([R.fast_trace(lv) for lv in reps.l], dtype=np.int64)
    Tl = np.array([[R.fast_trace(lv * b) % p for b in basis] for lv in reps.l], dtype=np.int64)
    W = np.array([(0,) + lab for lab in reps.k_labels], dtype=np.int64)
    n = len(W)
    out = np.zeros((n, n), dtype=np.int64)
    psi_tab = np.array([psi(m, p) for m in range(p * p)], dtype=np.int64)
    for s in range(n):
        w = (W[s][None, :] + W) % p                      # (n, beta)
        inner = (w @ Tl.T) % p                            # (n, r')
        vals = (T0[None, :] + p * inner) % (p * p)
        out[s] = psi_tab[vals].sum(axis=1)
    return out


def lambda_direct(R: RingSpec, reps: OrbitReps, s: int, t: int) -> int:
    """lambda_{s,t} straight from ring arithmetic (slow; used as a cross-check)."""
    p = R.p
    w = (reps.lprime[s] + reps.lprime[t]) * p + 1
    return sum(psi(R.fast_trace(lv * w), p) for lv in reps.l)


def lambda_matrix(p: int, alpha: int, index: int = 0, verify_blocks: bool | None = None) -> LambdaMatrix:
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    R = make_ring(p, 2 * alpha + 1, index)
    reps = orbit_reps(R, squares=True)
    L = _lambda_entries(R, reps)
    A_L = field_incidence(R, reps)
    j = np.ones(A_L.shape[0], dtype=np.int64)
    row = A_L @ j
    pa = p ** alpha
    eps0 = int(row[0] // pa) if row[0] % pa == 0 else 0
    n = L.shape[0]
    checks = [
        Check("A_L j = eps0 p^alpha j", eps0 in (1, -1) and bool(np.all(row == eps0 * pa)),
              f"eps0 = {eps0}"),
        Check("L^T = L", bool(np.array_equal(L, L.T))),
        Check("L^2 = p^(2a-1) (p^(2a) I - J)",
              bool(np.array_equal(L @ L, p ** (2 * alpha - 1) * (p ** (2 * alpha) * np.eye(n, dtype=np.int64)
                                                                - np.ones((n, n), dtype=np.int64))))),
        Check("row sums of L are 0", not L.sum(axis=1).any()),
    ]
    if verify_blocks is None:
        verify_blocks = R.q <= 3 ** 3 or (R.q <= 5 ** 3)
    if verify_blocks:
        bd = block_decompose(R, reps)
        eig = all(np.array_equal(bd.J_blocks[s][t] @ np.ones(bd.m, dtype=np.int64), L[s, t] * np.ones(bd.m, dtype=np.int64))
                  for s in range(n) for t in range(n))
        checks.append(Check("J_{H,s,t} j = lambda_{s,t} j", eig))
        checks.append(Check("A_L agrees with the block border", bool(np.array_equal(bd.A_L, A_L))))
    return LambdaMatrix(p, alpha, L, eps0, R, reps, tuple(checks))


@dataclass(frozen=True, eq=False)
class LZero:
    element: AlgebraElement
    lm: LambdaMatrix
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def provenance(self) -> dict:
        R, reps = self.lm.ring, self.lm.reps
        return {
            "ring": str(R),
            "modulus": list(R.modulus),
            "l_reps": [list(x.coeffs) for x in reps.l],
            "lprime_reps": [list(x.coeffs) for x in reps.lprime],
            "k_labels": [list(k) for k in reps.k_labels],
            "sqrt_convention": "sqrt((-1|p) p) = omega - omega^(n0), eta_p = eta^(p^(s-1))",
        }


def _shift_matrix(K: GroupSpec, g) -> np.ndarray:
    """Permutation matrix of the regular representation: e_k -> e_{k+g}."""
    n = K.v
    P = np.zeros((n, n), dtype=np.int64)
    for k in K.elements():
        P[K.index(K.add(k, g)), K.index(k)] = 1
    return P


def build_L0(lm: LambdaMatrix) -> LZero:
    p, a = lm.p, lm.alpha
    K = lm.K
    L = lm.L
    L0 = AlgebraElement(K, L[0].copy())
    checks = []
    # lambda_{s,t} depends only on k_s + k_t
    labels = [tuple(k) for k in lm.reps.k_labels]
    sums_ok = all(L[s, t] == L0[K.add(labels[s], labels[t])]
                  for s in range(len(labels)) for t in range(len(labels)))
    checks.append(Check("lambda_{s,t} = L0(k_s + k_t)", sums_ok))
    checks.append(Check("chi_0(L0) = 0", L0.total() == 0))
    vals = char_table(L0)
    target = p ** (4 * a - 1)
    mods = [(v * v.conj()) for v in vals[1:]]
    checks.append(Check("chi(L0) conj(chi(L0)) = p^(4a-1) for chi != chi_0",
                        all(m.is_integer() and int(m) == target for m in mods)))
    lhs = convolve(L0, power_map(L0, -1))
    rhs = AlgebraElement.identity(K) * target - AlgebraElement.whole(K) * p ** (2 * a - 1)
    checks.append(Check("L0(x) L0(x^-1) = p^(4a-1)[1] - p^(2a-1) K(x)", lhs == rhs))
    inter = all(np.array_equal(_shift_matrix(K, K.neg(g)) @ L, L @ _shift_matrix(K, g))
                for g in K.elements())
    checks.append(Check("rho_K(-g) L = L rho_K(g)", inter))
    return LZero(L0, lm, tuple(checks))


# -- the A/B system ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ABWitness:
    A: AlgebraElement
    B: AlgebraElement
    a0: int
    b0: int
    eps0: int


@dataclass(frozen=True, eq=False)
class ABResult:
    checks: tuple[Check, ...]
    witness: ABWitness | None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def violation(self) -> str | None:
        bad = first_failure(self.checks)
        return bad.name if bad is not None else None


def check_ab(A, B, a0: int, b0: int, lz: LZero) -> ABResult:
    """Parts 1-7 of the A/B conditions for coefficient vectors over K.

    Parity checks come first since they are the cheapest to test.
    """
    lm = lz.lm
    p, al, e0 = lm.p, lm.alpha, lm.eps0
    K = lm.K
    A = A if isinstance(A, AlgebraElement) else AlgebraElement(K, np.asarray(A, dtype=np.int64))
    B = B if isinstance(B, AlgebraElement) else AlgebraElement(K, np.asarray(B, dtype=np.int64))
    cA, cB = A.total(), B.total()
    W = AlgebraElement.whole(K)
    L0 = lz.element
    checks = (
        Check("A odd", bool(np.all(A.vec % 2 == 1)) and cA % 2 == 1, "coefficients of A and chi_0(A) odd"),
        Check("B odd", bool(np.all(B.vec % 2 == 1)) and cB % 2 == 1, "coefficients of B and chi_0(B) odd"),
        Check("a0, b0 odd", a0 % 2 == 1 and b0 % 2 == 1, "a0 and b0 odd"),
        Check("chi_0(A)", cA == p ** (al - 1) * e0 * b0, "chi_0(A) = p^(a-1) eps0 b0"),
        Check("chi_0(B)", cB == p ** al * e0 * a0, "chi_0(B) = p^a eps0 a0"),
        Check("A relation", A * p ** (2 * al) == W * cA + convolve(L0, power_map(B, -1)),
              "p^(2a) A = chi_0(A) K + L0 B(x^-1)"),
        Check("B relation", B * p ** (2 * al) == W * cB + convolve(L0, power_map(A, -1)) * p,
              "p^(2a) B = chi_0(B) K + p L0 A(x^-1)"),
    )
    ok = all(c.ok for c in checks)
    return ABResult(checks, ABWitness(A, B, a0, b0, e0) if ok else None)


def ab_conditions_check(d_prime, nu_prime, lz: LZero) -> ABResult:
    """Derive (A, B, a0, b0) from block data d', nu' and test every condition.

    ``d_prime`` and ``nu_prime`` are indexed by the Galois-ordered orbits of
    H = (Z/p^2)^(2 alpha + 1): block 0 holds the r' order-p orbits, block t
    the r' orbits h_{., t}.
    """
    lm = lz.lm
    p, al, e0 = lm.p, lm.alpha, lm.eps0
    rp = lm.reps.r_prime
    nK = p ** (2 * al)
    d = np.asarray(d_prime, dtype=np.int64)
    nu = np.asarray(nu_prime, dtype=np.int64)
    size = rp * (nK + 1)
    if d.shape != (size,) or not np.all(np.abs(d) == 1):
        raise ValueError(f"d' must be a +-1 vector of length {size}")
    if nu.shape != (size,) or np.any(nu % 2 == 0) or np.any(np.abs(nu) >= p):
        raise ValueError(f"nu' must hold {size} odd integers in (-{p}, {p})")
    if not np.any(nu % p):
        raise ValueError("nu' entries must not all be divisible by p")
    a_all = d.reshape(nK + 1, rp).sum(axis=1)
    b_all = nu.reshape(nK + 1, rp).sum(axis=1)
    a0, b0 = int(a_all[0]), int(b_all[0])
    a, b = a_all[1:], b_all[1:]
    j = np.ones(nK, dtype=np.int64)
    L = lm.L
    eqs = (
        Check("sum a", int(a.sum()) == p ** (al - 1) * e0 * b0, "<a,j> = p^(a-1) eps0 b0"),
        Check("b vector", bool(np.array_equal(p ** (2 * al - 1) * b, p ** (al - 1) * e0 * a0 * j + L @ a)),
              "p^(2a-1) b = p^(a-1) eps0 a0 j + L a"),
        Check("sum b", int(b.sum()) == p ** al * e0 * a0, "<b,j> = p^a eps0 a0"),
        Check("a vector", bool(np.array_equal(p ** (2 * al) * a, e0 * p ** (al - 1) * b0 * j + L @ b)),
              "p^(2a) a = eps0 p^(a-1) b0 j + L b"),
    )
    res = check_ab(a, b, a0, b0, lz)
    checks = res.checks + eqs
    ok = all(c.ok for c in checks)
    return ABResult(checks, res.witness if ok else None)


@dataclass
class FeasibilityResult:
    p: int
    alpha: int
    bound: int
    values: tuple[int, ...]
    witnesses: list
    exhaustive: bool
    examined: int
    total: int
    resume_token: str | None = None

    @property
    def box(self) -> str:
        n = self.p ** (2 * self.alpha)
        return (f"A, B in {{{', '.join(map(str, self.values))}}}^{n} over K = (Z/{self.p})^{2 * self.alpha}; "
                f"a0 = eps0 chi_0(B)/p^alpha, b0 = eps0 chi_0(A)/p^(alpha-1)")


def _box(values, n):
    return np.array(list(itertools.product(values, repeat=n)), dtype=np.int64)


def parse_resume_token(token: str) -> int:
    if not token.startswith("ab-offset="):
        raise ValueError(f"bad resume token {token!r}")
    return int(token.split("=", 1)[1])


def ab_feasibility_search(p: int, alpha: int, coeff_bound: int, lz: LZero | None = None,
                          budget: int | None = None, resume: str | None = None) -> FeasibilityResult:
    """All (A, B) with odd coefficients in [-bound, bound] meeting every check of check_ab.

    The A relation reads p^(2a) a - chi_0(A) j = L b, so candidates are joined on
    that vector; the survivors are then run through check_ab.  ``budget``
    caps the number of A vectors processed in one call.
    """
    if coeff_bound < 1:
        raise ValueError("coefficient bound must be at least 1")
    lz = lz or build_L0(lambda_matrix(p, alpha))
    lm = lz.lm
    e0 = lm.eps0
    n = p ** (2 * alpha)
    values = tuple(v for v in range(-coeff_bound, coeff_bound + 1) if v % 2)
    total = len(values) ** n
    start = parse_resume_token(resume) if resume else 0
    stop = total if budget is None else min(total, start + budget)
    Bs = _box(values, n)
    keys: dict = {}
    for idx, key in enumerate(Bs @ lm.L.T):
        keys.setdefault(key.tobytes(), []).append(idx)
    witnesses = []
    pa2 = p ** (2 * alpha)
    chunk = 1 << 16
    for lo in range(start, stop, chunk):
        hi = min(stop, lo + chunk)
        As = Bs[lo:hi]
        U = pa2 * As - As.sum(axis=1, keepdims=True)
        for i, u in enumerate(U):
            hits = keys.get(u.tobytes())
            if not hits:
                continue
            a = As[i]
            cA = int(a.sum())
            if cA % p ** (alpha - 1):
                continue
            b0 = e0 * cA // p ** (alpha - 1)
            for bi in hits:
                b = Bs[bi]
                cB = int(b.sum())
                if cB % p ** alpha:
                    continue
                a0 = e0 * cB // p ** alpha
                res = check_ab(a, b, a0, b0, lz)
                if res.ok:
                    witnesses.append(res.witness)
    exhaustive = start == 0 and stop == total
    token = f"ab-offset={stop}" if stop < total else None
    return FeasibilityResult(p, alpha, coeff_bound, values, witnesses, exhaustive,
                             stop - start, total, token)


# -- alpha = 1 refinements ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Alpha1Report:
    gshds: GshdsCertificate
    restriction: GshdsCertificate
    nu: np.ndarray
    d_restriction: np.ndarray | None
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def alpha1_checks(D: AlgebraElement) -> Alpha1Report:
    """For D in (Z/p) x (Z/p^2)^3: D cap L is a GSHDS and nu_{G,H'}(D) = p^2 d_{D cap L}."""
    G = D.group
    p = G.p
    if G.exponents != (2, 2, 2, 1):
        raise ValueError("alpha1_checks expects (Z/p^2)^3 x Z/p")
    n0 = G.n0
    cert = check_gshds(D, n0)
    # L = p.H with H = (Z/p^2)^3 x {0}
    from .pgroup import _coordinate_subgroup
    L = _coordinate_subgroup(G, [1, 1, 1, 0], [p, p, p, 1])
    spec = L.spec
    DL = AlgebraElement(spec, np.array([D[L.embed(h)] for h in spec.elements()], dtype=np.int64))
    rcert = check_gshds(DL, n0)
    checks = [Check("D is a GSHDS", cert.ok, cert.kind),
              Check("D cap L is a GSHDS in L", rcert.ok, rcert.kind)]
    # nu_{G,H'}(g) = (D - D^(n0))(x^p) evaluated at p g
    X = power_map(D - power_map(D, n0), p)
    table = orbit_tables(spec)
    nu = np.array([X[L.embed(h)] for h in table.reps], dtype=np.int64)
    d = None
    try:
        from .qrs import qrs_encode
        d = qrs_encode(DL, table)
    except ValueError as exc:
        checks.append(Check("D cap L is a QRS of L", False, str(exc)))
    if d is not None:
        ok = bool(np.array_equal(nu, p * p * d))
        checks.append(Check("nu_{G,H'}(D) = p^2 d_{D cap L}", ok,
                            "" if ok else f"nu = {nu.tolist()}"))
    return Alpha1Report(cert, rcert, nu, d, tuple(checks))


def synthetic_alpha1_candidate(p: int = 3, signs=None, seed: int | None = 0) -> AlgebraElement:
    """A QRS of (Z/p^2)^3 x Z/p whose trace on L is the Paley set; other orbits are arbitrary."""
    from .galois import paley_gshds
    from .pgroup import _coordinate_subgroup
    G = make_group(p, [2, 2, 2, 1])
    table = orbit_tables(G)
    L = _coordinate_subgroup(G, [1, 1, 1, 0], [p, p, p, 1])
    P = paley_gshds(p, 3)
    rng = np.random.default_rng(seed)
    d = np.empty(table.r, dtype=np.int64)
    for i, g in enumerate(table.reps):
        if g in L:
            d[i] = 1 if P[L.coords(g)] else -1
        elif signs is not None:
            d[i] = signs[i]
        else:
            d[i] = rng.choice([-1, 1])
    return qrs_decode(d, table)


# -- power coefficients ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PowerCoefficients:
    k: int
    c: int
    a: int
    b: int
    closed_form: int
    nu: np.ndarray
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def a_minus_b(self) -> int:
        return self.a - self.b


def power_difference_closed_form(p: int, alpha: int, k: int) -> int:
    """a - b = 2^(1 - p^k) sum_f C(p^k, 2f+1) p^((2 alpha + 1) f) (-1|p)^f."""
    n = p ** k
    e = legendre(-1, p)
    total = sum(math.comb(n, 2 * f + 1) * p ** ((2 * alpha + 1) * f) * e ** f
                for f in range((n - 1) // 2 + 1))
    val = Fraction(total, 2 ** (n - 1))
    if val.denominator != 1:
        raise AssertionError("closed form is not an integer")
    return int(val)


def power_coeffs(D: AlgebraElement, k: int, n0: int | None = None) -> PowerCoefficients:
    G = D.group
    p = G.p
    n0 = G.n0 if n0 is None else n0
    if not 0 <= k <= G.s:
        raise ValueError(f"k must lie in [0, {G.s}]")
    alpha = (G.beta - 1) // 2
    if k == G.s and alpha == 0:
        raise ValueError("k = s needs |G| >= p^3")
    cert = check_gshds(D, n0)
    if not cert.ok:
        raise ValueError("power coefficients need a verified GSHDS")
    Dn = power_map(D, n0)
    P = D.power(p ** k)
    c = int(P.vec[0])
    a_vals = set(int(x) for x in P.vec[D.vec == 1])
    b_vals = set(int(x) for x in P.vec[Dn.vec == 1])
    if len(a_vals) != 1 or len(b_vals) != 1:
        raise AssertionError("D^(p^k) is not constant on D and D^(n0)")
    a, b = a_vals.pop(), b_vals.pop()
    recon = AlgebraElement.identity(G) * c + D * a + Dn * b
    closed = power_difference_closed_form(p, alpha, k)
    checks = [
        Check("D^(p^k) = c[1] + a D + b D^(n0)", P == recon),
        Check("a - b matches the closed form", a - b == closed, f"{a - b} vs {closed}"),
        Check("v_p(a - b) = k", valuation(a - b, p) == k, f"v_p = {valuation(a - b, p)}"),
    ]
    L, H = kernel_image_mu(G, k)
    nv = diff_intersection(D, L, n0)
    nu = nv.values
    checks.append(Check("p^k divides every nu_{G,L}", bool(np.all(nu % p ** k == 0))))
    X = power_map(D - Dn, p ** k)
    proj = nv.quotient.projection_indices
    img = G.scale_indices(p ** k)
    checks.append(Check("mu_{p^k}(D - D^(n0)) carries nu_{G,L}",
                        bool(np.array_equal(X.vec[img], nu[proj]))))
    inH = np.zeros(G.v, dtype=bool)
    inH[[G.index(h) for h in H.elements]] = True
    DH = AlgebraElement(G, D.vec * inH)
    Y = (DH - power_map(DH, n0)) * (a - b)
    checks.append(Check("(a-b)(D_H - D_H^(n0)) = mu_{p^k}(D - D^(n0)) mod p^k",
                        bool(np.all((Y - X).vec % p ** k == 0))))
    return PowerCoefficients(k, c, a, b, closed, nu, tuple(checks))


# -- exponent bounds ------------------------------------------------------------------------------


@dataclass(frozen=True)
class RuleResult:
    rule: str
    status: str          # "excluded" | "passed" | "not applicable"
    detail: str


@dataclass(frozen=True)
class BoundReport:
    group: GroupSpec
    rules: tuple[RuleResult, ...]

    @property
    def excluded(self) -> bool:
        return any(r.status == "excluded" for r in self.rules)

    @property
    def excluded_by(self) -> list[str]:
        return [r.rule for r in self.rules if r.status == "excluded"]


def exponent_bound_report(G: GroupSpec) -> BoundReport:
    beta, s = G.beta, G.s
    exps = G.exponents
    rules = []
    if beta % 2 == 0:
        rules.append(RuleResult("square order", "excluded",
                                f"|G| = {G.p}^{beta} is a square; a GSHDS needs an odd power of p"))
        alpha = None
    else:
        alpha = (beta - 1) // 2
        rules.append(RuleResult("square order", "passed", f"|G| = {G.p}^{beta}, alpha = {alpha}"))
    rules.append(RuleResult("composite order", "not applicable",
                            "every group here is a p-group of prime-power order"))
    if s < 2:
        rules.append(RuleResult("Camion-Mann", "not applicable", "needs exponent p^s with s >= 2"))
    elif len(exps) < 2 or exps[1] != exps[0]:
        a2 = exps[1] if len(exps) > 1 else 0
        rules.append(RuleResult("Camion-Mann", "excluded",
                                f"two top invariants must agree: a1 = {exps[0]}, a2 = {a2}"))
    else:
        rules.append(RuleResult("Camion-Mann", "passed", f"a1 = a2 = {s}"))
    if alpha is None:
        rules.append(RuleResult("Johnsen", "not applicable", "defined for |G| = p^(2 alpha + 1)"))
        rules.append(RuleResult("Chen-Sehgal-Xiang", "not applicable", "defined for |G| = p^(2 alpha + 1)"))
    else:
        ok = s <= alpha + 1
        rules.append(RuleResult("Johnsen", "passed" if ok else "excluded",
                                f"needs s <= alpha + 1: s = {s}, alpha + 1 = {alpha + 1}"))
        if s < 2:
            rules.append(RuleResult("Chen-Sehgal-Xiang", "not applicable",
                                    "rests on the rank-two quotient (Z/p^s)^2 with s >= 2"))
        else:
            ok = 2 * s <= alpha + 1
            rules.append(RuleResult("Chen-Sehgal-Xiang", "passed" if ok else "excluded",
                                    f"needs 2s <= alpha + 1: 2s = {2 * s}, alpha + 1 = {alpha + 1}"))
    return BoundReport(G, tuple(rules))
