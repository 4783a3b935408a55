"""The orbit incidence matrix A_{G,G1}, orbit character tables, and block form.

Rows of A are indexed by characters theta(g'_i), columns by orbit
representatives g_j.  The entry is (n|p) o(p g_j) when theta(g'_i)(g_j) is
the primitive p-th root eta_p^n and 0 otherwise; with this normalisation
A^2 = (|G|/p) I.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .checks import Check
from .cyclotomic import conj_full, cyc_matmul, galois_full, reduce_full, sqrt_star, full_from_reduced
from .galgebra import Pairing, check_pairing, diagonal_pairing
from .galois import OrbitReps, RingSpec, orbit_reps as _orbit_reps, trace_pairing
from .pgroup import GroupSpec, UnitOrbitTable, legendre, orbit_tables


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    entries: np.ndarray
    group: GroupSpec
    table: UnitOrbitTable
    pairing: Pairing

    @property
    def r(self) -> int:
        return self.entries.shape[0]

    @property
    def row_labels(self) -> list[str]:
        return [f"theta{g}" for g in self.table.reps]

    @property
    def col_labels(self) -> list[str]:
        return [str(g) for g in self.table.reps]

    @property
    def pairing_tag(self) -> str:
        return self.pairing.tag

    def __matmul__(self, other):
        return self.entries @ other


def _entry_matrix(G: GroupSpec, pairing: Pairing, rows, cols) -> np.ndarray:
    p, N = G.p, G.exp
    R = np.array(rows, dtype=np.int64).reshape(len(rows), G.rank)
    C = np.array(cols, dtype=np.int64).reshape(len(cols), G.rank)
    E = ((R @ pairing.M) % N @ C.T) % N
    unit = N // p
    prim = (E % unit == 0) & ((E // unit) % p != 0)
    signs = np.vectorize(lambda n: legendre(int(n), p), otypes=[np.int64])(E // unit)
    orders = np.array([G.order(G.scale(p, g)) for g in cols], dtype=np.int64)
    return np.where(prim, signs * orders[None, :], 0).astype(np.int64)


def build_A(G: GroupSpec, pairing: Pairing | None = None,
            table: UnitOrbitTable | None = None) -> IncidenceMatrix:
    pairing = check_pairing(pairing or diagonal_pairing(G))
    table = table or orbit_tables(G, pairing)
    if table.group != G:
        raise ValueError("orbit table belongs to a different group")
    reps = list(table.reps)
    return IncidenceMatrix(_entry_matrix(G, pairing, reps, reps), G, table, pairing)


def check_well_defined(A: IncidenceMatrix) -> Check:
    """Every (g', g) in (Omega_i, Omega_j) yields the entry (n'n|p) A_ij."""
    G, T = A.group, A.table
    members = [[h for h in T.omega(j)] for j in range(T.r)]
    for i in range(T.r):
        rows = members[i]
        for j in range(T.r):
            block = _entry_matrix(G, A.pairing, rows, members[j])
            si = np.array([T.sign_of(h)[1] for h in rows])
            sj = np.array([T.sign_of(h)[1] for h in members[j]])
            expect = A.entries[i, j] * np.outer(si, sj)
            if not np.array_equal(block, expect):
                return Check("well-defined", False, f"orbit pair ({i}, {j})")
    return Check("well-defined", True)


def verify_A_square(A: IncidenceMatrix) -> Check:
    G = A.group
    sq = A.entries @ A.entries
    target = (G.v // G.p) * np.eye(A.r, dtype=np.int64)
    bad = np.argwhere(sq != target)
    if bad.size:
        i, j = bad[0]
        return Check("A^2 = (|G|/p) I", False,
                     f"cell ({i},{j}) is {sq[i, j]}, expected {target[i, j]}")
    return Check("A^2 = (|G|/p) I", True, f"{A.r}x{A.r}, |G|/p = {G.v // G.p}")


def cyclic_canonical_form(p: int, s: int) -> np.ndarray:
    """The antidiagonal matrix with entries p^(s-1), ..., p, 1 from the top row."""
    out = np.zeros((s, s), dtype=np.int64)
    for i in range(s):
        out[i, s - 1 - i] = p ** (s - 1 - i)
    return out


# -- character tables of the orbit schemes -----------------------------------------------


@dataclass(frozen=True, eq=False)
class CharTable:
    """C[i, j] = chi_i(O_j) as full vectors in Z[x]/(x^N - 1), and B = conj(C).

    ``basis`` lists the orbits (tuples of elements); the i-th character is
    theta applied to the first element of basis[i].
    """

    group: GroupSpec
    K: str
    level: int
    basis: tuple[tuple, ...]
    C_full: np.ndarray

    @property
    def B_full(self) -> np.ndarray:
        return conj_full(self.C_full)

    def reduced(self, which: str = "C") -> np.ndarray:
        arr = self.C_full if which == "C" else self.B_full
        return reduce_full(arr, self.level)

    @property
    def size(self) -> int:
        return len(self.basis)


def _orbit_basis(table: UnitOrbitTable, K: str) -> list[tuple]:
    G = table.group
    basis = [(G.zero,)]
    if K == "G1":
        basis += [table.omega(i) for i in range(table.r)]
    elif K == "G2":
        # rep-first ordering inside each orbit keeps the character label at index 0
        plus = [(table.reps[i],) + tuple(h for h in a if h != table.reps[i])
                for i, (a, _) in enumerate(table.g2_orbits)]
        minus = []
        for i, (_, b) in enumerate(table.g2_orbits):
            lead = G.scale(table.n0, table.reps[i])
            minus.append((lead,) + tuple(h for h in b if h != lead))
        basis += plus + minus
    else:
        raise ValueError("K must be 'G1' or 'G2'")
    out = []
    for orb in basis:
        if K == "G1" and orb[0] != G.zero:
            lead = next(r for r in table.reps if r in orb)
            orb = (lead,) + tuple(h for h in orb if h != lead)
        out.append(orb)
    return out


def build_char_table(G: GroupSpec, K: str = "G1", pairing: Pairing | None = None,
                     table: UnitOrbitTable | None = None) -> CharTable:
    pairing = check_pairing(pairing or diagonal_pairing(G))
    table = table or orbit_tables(G, pairing)
    N = G.exp
    basis = _orbit_basis(table, K)
    chars = np.array([orb[0] for orb in basis], dtype=np.int64).reshape(len(basis), G.rank)
    CM = (chars @ pairing.M) % N
    C = np.zeros((len(basis), len(basis), N), dtype=np.int64)
    for j, orb in enumerate(basis):
        E = (CM @ np.array(orb, dtype=np.int64).reshape(len(orb), G.rank).T) % N
        for e in range(N):
            C[:, j, e] = (E == e).sum(axis=1)
    return CharTable(G, K, N, tuple(basis), C)


def _is_scalar_identity(full: np.ndarray, level: int, scalar: int) -> tuple[bool, str]:
    red = reduce_full(full, level)
    n = red.shape[0]
    target = np.zeros_like(red)
    for i in range(n):
        target[i, i, 0] = scalar
    bad = np.argwhere(np.any(red != target, axis=-1))
    if bad.size:
        i, j = bad[0]
        return False, f"cell ({i},{j}) = {list(red[i, j])}"
    return True, ""


def verify_char_table(ct: CharTable, A: IncidenceMatrix | None = None) -> list[Check]:
    G, N = ct.group, ct.level
    out = []
    ok, d = _is_scalar_identity(cyc_matmul(ct.B_full, ct.C_full), N, G.v)
    out.append(Check("B C = |G| I", ok, d))
    ok, d = _is_scalar_identity(cyc_matmul(ct.C_full, ct.B_full), N, G.v)
    out.append(Check("C B = |G| I", ok, d))
    sizes = np.array([len(o) for o in ct.basis], dtype=np.int64)
    red = reduce_full(ct.C_full, N)
    if ct.K == "G1":
        w = np.einsum("i,ijn->jn", sizes, red)
        target = np.zeros_like(w)
        target[0, 0] = G.v
        out.append(Check("orbit sizes . C = |G| e_0", bool(np.array_equal(w, target))))
    row0 = red[0]
    out.append(Check("principal row = orbit sizes",
                     bool(np.array_equal(row0[:, 0], sizes) and not row0[:, 1:].any())))
    if ct.K == "G2":
        out.extend(_g2_block_checks(ct, A))
    return out


def _g2_block_checks(ct: CharTable, A: IncidenceMatrix | None) -> list[Check]:
    G, N = ct.group, ct.level
    r = (ct.size - 1) // 2
    n0 = G.n0
    C = ct.C_full
    A0 = C[1:r + 1, 1:r + 1]
    A0n = galois_full(A0, n0)
    blocks_ok = (np.array_equal(C[1:r + 1, r + 1:], A0n)
                 and np.array_equal(C[r + 1:, 1:r + 1], A0n)
                 and np.array_equal(C[r + 1:, r + 1:], A0)
                 and np.array_equal(C[1:, 0], np.tile(np.eye(1, N, dtype=C.dtype)[0], (2 * r, 1)))
                 and np.array_equal(C[0, 1:r + 1], C[0, r + 1:]))
    out = [Check("C_{G,G2} three-block structure", bool(blocks_ok))]
    Dm = A0 - A0n
    ok, d = _is_scalar_identity(cyc_matmul(conj_full(Dm), Dm), N, G.v)
    out.append(Check("(conj(A0) - conj(A0)^(n0)) (A0 - A0^(n0)) = |G| I", ok, d))
    if A is not None:
        root = full_from_reduced(np.array(sqrt_star(G.p, N).coeffs, dtype=np.int64), N)
        expect = A.entries[:, :, None] * root[None, None, :]
        lhs = reduce_full(Dm, N)
        rhs = reduce_full(expect, N)
        out.append(Check("chi_i(O_j - O_j^(n0)) = A_ij sqrt((-1|p) p)",
                         bool(np.array_equal(lhs, rhs))))
    return out


# -- automorphism equivariance ------------------------------------------------------------


def _apply(G: GroupSpec, S: np.ndarray, g) -> tuple:
    return G.element(S @ np.asarray(g, dtype=np.int64))


def _is_automorphism(G: GroupSpec, S: np.ndarray) -> bool:
    for j, m in enumerate(G.moduli):
        col = S[:, j]
        if any(G.scale(m, G.element(col))):
            return False
    imgs = G.indices_of(G.coords_array @ S.T)
    return len(np.unique(imgs)) == G.v


def _signed_perm(table: UnitOrbitTable, f) -> np.ndarray:
    r = table.r
    P = np.zeros((r, r), dtype=np.int64)
    for i, g in enumerate(table.reps):
        j, n = table.locate[f(g)]
        P[j, i] = legendre(n, table.group.p)
    return P


def aut_equivariance_check(A: IncidenceMatrix, S) -> list[Check]:
    """sigma(g) = S g; checks rho_Y(sigma) A = A rho_X(sigma) and rho_Y = rho_X((sigma*)^-1)."""
    G, T, P = A.group, A.table, A.pairing
    S = np.asarray(S, dtype=np.int64).reshape(G.rank, G.rank)
    if not _is_automorphism(G, S):
        raise ValueError("S does not define an automorphism")
    N = G.exp
    C = G.coords_array
    forms = {tuple(row): i for i, row in enumerate((C @ P.M) % N)}
    basis = np.eye(G.rank, dtype=np.int64)
    Sstar = adjoint(P, S)
    inv_idx = np.empty(G.v, dtype=np.int64)
    inv_idx[G.indices_of(C @ Sstar.T)] = np.arange(G.v)

    rho_X = _signed_perm(T, lambda g: _apply(G, S, g))
    rho_X_star_inv = _signed_perm(T, lambda g: G._elements[inv_idx[G.index(g)]])

    # rho_Y from first principles: theta(g') o sigma^-1 = theta(h)
    S_inv_idx = np.empty(G.v, dtype=np.int64)
    S_inv_idx[G.indices_of(C @ S.T)] = np.arange(G.v)
    S_inv = C[S_inv_idx[[G.index(tuple(int(x) for x in b)) for b in basis]]].T

    def char_image(g):
        want = tuple(int(x) for x in (np.asarray(g) @ P.M @ S_inv) % N)
        return G._elements[forms[want]]

    rho_Y = _signed_perm(T, char_image)
    lhs, rhs = rho_Y @ A.entries, A.entries @ rho_X
    return [
        Check("rho_Y(sigma) A = A rho_X(sigma)", bool(np.array_equal(lhs, rhs))),
        Check("rho_Y(sigma) = rho_X((sigma*)^-1)", bool(np.array_equal(rho_Y, rho_X_star_inv))),
    ]


def adjoint(P: Pairing, S) -> np.ndarray:
    """Matrix of sigma* with respect to the pairing."""
    G = P.group
    N = G.exp
    S = np.asarray(S, dtype=np.int64).reshape(G.rank, G.rank)
    C = G.coords_array
    forms = {tuple(row): i for i, row in enumerate((C @ P.M) % N)}
    cols = []
    for i in range(G.rank):
        want = tuple(int(x) for x in (np.eye(G.rank, dtype=np.int64)[i] @ P.M @ S) % N)
        cols.append(C[forms[want]])
    return np.array(cols, dtype=np.int64).T


# -- Galois-ordered block decomposition ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    p: int
    beta: int
    m: int
    A: IncidenceMatrix
    A_L: np.ndarray
    J_blocks: tuple[tuple[np.ndarray, ...], ...]
    reps: OrbitReps
    checks: tuple[Check, ...] = field(default=())

    @property
    def n_blocks(self) -> int:
        return len(self.J_blocks)

    @property
    def B_prime(self) -> np.ndarray:
        return np.block([list(row) for row in self.J_blocks])

    @property
    def B_H(self) -> np.ndarray:
        return self.p * self.B_prime

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def galois_table(R: RingSpec, reps: OrbitReps | None = None,
                 pairing: Pairing | None = None) -> tuple[UnitOrbitTable, Pairing, OrbitReps]:
    reps = reps or _orbit_reps(R)
    pairing = pairing or trace_pairing(R)
    table = orbit_tables(R.group, pairing, ordering="galois", reps=reps.galois_order())
    return table, pairing, reps


def field_incidence(R: RingSpec, reps: OrbitReps) -> np.ndarray:
    """A_{L,L1} for L = F_q with the field trace pairing and reps l_i mod p."""
    F = R.reduce_to_field()
    G = F.group
    P = trace_pairing(F)
    lreps = [tuple(c % R.p for c in lv.coeffs) for lv in reps.l]
    table = orbit_tables(G, P, ordering="galois", reps=lreps)
    return build_A(G, P, table).entries


def block_decompose(R: RingSpec, reps: OrbitReps | None = None) -> BlockDecomposition:
    if R.k != 2:
        raise ValueError("block decomposition needs GR(p^2, beta)")
    table, pairing, reps = galois_table(R, reps)
    if table.ordering != "galois":
        raise ValueError("the block form needs the Galois ordering")
    p, beta = R.p, R.beta
    A = build_A(R.group, pairing, table)
    m = reps.r_prime
    nb = len(reps.lprime)
    E = A.entries
    A_L = field_incidence(R, reps)

    def blk(i, j):
        return E[i * m:(i + 1) * m, j * m:(j + 1) * m]

    J = tuple(tuple(blk(i + 1, j + 1) // p for j in range(nb)) for i in range(nb))
    bd = BlockDecomposition(p, beta, m, A, A_L, J, reps)

    checks = [Check("top-left block is zero", not blk(0, 0).any())]
    checks.append(Check("first block row is p A_L",
                        all(np.array_equal(blk(0, j + 1), p * A_L) for j in range(nb))))
    checks.append(Check("first block column is A_L",
                        all(np.array_equal(blk(i + 1, 0), A_L) for i in range(nb))))
    checks.append(Check("J blocks are exact multiples",
                        all(np.array_equal(blk(i + 1, j + 1), p * J[i][j])
                            for i in range(nb) for j in range(nb))))
    zero_pattern = A_L == 0
    checks.append(Check("J blocks supported on the zeros of A_L",
                        all(not J[i][j][~zero_pattern].any() for i in range(nb) for j in range(nb))))
    checks.append(Check("sum_j J_ij = 0",
                        all(not sum(J[i][j] for j in range(nb)).any() for i in range(nb))))
    checks.append(Check("sum_i J_ij = 0",
                        all(not sum(J[i][j] for i in range(nb)).any() for j in range(nb))))
    Bp = bd.B_prime
    checks.append(Check("B'_H has zero row sums", not Bp.sum(axis=1).any()))
    BH = bd.B_H
    n = BH.shape[0]
    sq = BH @ BH
    target = p ** (2 * beta - 1) * np.eye(n, dtype=np.int64) - p ** beta * np.kron(
        np.ones((nb, nb), dtype=np.int64), np.eye(m, dtype=np.int64))
    checks.append(Check("B_H^2 = p^(2b-1) I - p^b (J x I_m)", bool(np.array_equal(sq, target))))
    checks.append(Check("B_H^3 = p^(2b-1) B_H", bool(np.array_equal(sq @ BH, p ** (2 * beta - 1) * BH))))
    checks.append(verify_A_square(A))
    return BlockDecomposition(p, beta, m, A, A_L, J, reps, tuple(checks))
