import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gshds.conditions import (ab_conditions_check, ab_feasibility_search, alpha1_checks, build_L0, check_ab,
                              exponent_bound_report, lambda_direct, lambda_matrix, parse_resume_token,
                              power_coeffs, power_difference_closed_form, psi, synthetic_alpha1_candidate)
from gshds.galgebra import AlgebraElement, convolve, power_map
from gshds.galois import paley_gshds
from gshds.incidence import build_A
from gshds.pgroup import make_group, valuation

AB_WITNESSES_BOUND1 = 4       # frozen; the brute-force oracle below re-derives it
AB_WITNESSES_BOUND3 = 2620    # frozen from the first full run


@pytest.fixture(scope="module")
def lz():
    return build_L0(lambda_matrix(3, 1))


@pytest.fixture(scope="module")
def lz_second():
    return build_L0(lambda_matrix(3, 1, index=1))


def test_psi():
    assert [psi(m, 3) for m in range(9)] == [0, 0, 0, 1, 0, 0, -1, 0, 0]


@pytest.mark.parametrize("index", [0, 1])
def test_lambda_matches_direct_ring_arithmetic(index):
    lm = lambda_matrix(3, 1, index)
    n = lm.L.shape[0]
    assert all(lambda_direct(lm.ring, lm.reps, s, t) == lm.L[s, t] for s in range(n) for t in range(n))


@pytest.mark.parametrize("index", [0, 1])
def test_lambda_identities(index):
    lm = lambda_matrix(3, 1, index)
    assert lm.ok, [c for c in lm.checks if not c.ok]
    assert lm.eps0 in (1, -1)
    n = 9
    assert np.array_equal(lm.L @ lm.L, 27 * np.eye(n, dtype=np.int64) - 3 * np.ones((n, n), dtype=np.int64))


def test_lambda_for_p5():
    lm = lambda_matrix(5, 1)
    assert lm.ok and lm.L.shape == (25, 25)
    assert build_L0(lm).ok


def test_lambda_rejects_alpha_zero():
    with pytest.raises(ValueError):
        lambda_matrix(3, 0)


def test_l0_identities(lz, lz_second):
    for z in (lz, lz_second):
        assert z.ok, [c for c in z.checks if not c.ok]
        assert z.element.total() == 0
        assert z.element.vec[0] == z.lm.L[0, 0]


def test_l0_provenance_records_embedding(lz, lz_second):
    a, b = lz.provenance(), lz_second.provenance()
    assert a["modulus"] != b["modulus"]
    assert len(a["l_reps"]) == 13 and len(a["lprime_reps"]) == 9
    assert a["k_labels"][0] == [0, 0]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=9, max_size=9))
def test_convolution_with_inverse_is_the_lambda_action(b):
    """(L0 * B(x^-1)) evaluated at k_i equals (L b)_i."""
    lm = lambda_matrix(3, 1)
    L0 = build_L0(lm).element
    B = AlgebraElement(lm.K, np.array(b))
    lhs = convolve(L0, power_map(B, -1)).vec
    assert np.array_equal(lhs, lm.L @ np.array(b))


def test_even_coefficient_reports_part5(lz):
    A = np.array([1] * 8 + [2])
    B = np.ones(9, dtype=int)
    res = check_ab(A, B, 1, 1, lz)
    assert not res.ok and res.violation == "A odd"


def brute_force_ab(lm, values):
    """Every (A, B) pair over the box, tested with matrix equations on all pairs at once."""
    p, al, e0 = lm.p, lm.alpha, lm.eps0
    n = p ** (2 * al)
    box = np.array(list(itertools.product(values, repeat=n)), dtype=np.int64)
    sA, sB = box.sum(axis=1), box.sum(axis=1)
    LB = box @ lm.L.T
    U = p ** (2 * al) * box - sA[:, None]
    eq1 = (U[:, None, :] == LB[None, :, :]).all(axis=2)
    V = p ** (2 * al) * box - sB[:, None]
    pLA = p * (box @ lm.L.T)
    eq2 = (V[None, :, :] == pLA[:, None, :]).all(axis=2)
    found = 0
    for i, j in zip(*np.nonzero(eq1 & eq2)):
        cA, cB = int(sA[i]), int(sB[j])
        if cA % p ** (al - 1) or cB % p ** al:
            continue
        b0, a0 = e0 * cA // p ** (al - 1), e0 * cB // p ** al
        if a0 % 2 and b0 % 2 and cA % 2 and cB % 2:
            found += 1
    return found


def test_feasibility_bound1_matches_brute_force(lz):
    res = ab_feasibility_search(3, 1, 1, lz)
    assert res.exhaustive and res.total == 512
    assert len(res.witnesses) == AB_WITNESSES_BOUND1 == brute_force_ab(lz.lm, (-1, 1))
    for w in res.witnesses:
        assert check_ab(w.A, w.B, w.a0, w.b0, lz).ok
        assert w.A.total() == lz.lm.eps0 * w.b0
        assert w.B.total() == 3 * lz.lm.eps0 * w.a0


def test_feasibility_bound3_and_resume(lz):
    full = ab_feasibility_search(3, 1, 3, lz)
    assert full.exhaustive and len(full.witnesses) == AB_WITNESSES_BOUND3
    part = ab_feasibility_search(3, 1, 3, lz, budget=100000)
    assert not part.exhaustive and part.resume_token == "ab-offset=100000"
    rest = ab_feasibility_search(3, 1, 3, lz, resume=part.resume_token)
    assert rest.resume_token is None
    assert len(part.witnesses) + len(rest.witnesses) == AB_WITNESSES_BOUND3
    assert parse_resume_token(part.resume_token) == 100000
    with pytest.raises(ValueError):
        parse_resume_token("offset=3")


def test_empty_box_report_names_the_box(lz):
    res = ab_feasibility_search(3, 1, 1, lz, budget=0)
    assert not res.witnesses
    assert "{-1, 1}^9" in res.box and "(Z/3)^2" in res.box


def test_ab_conditions_check_validates_input(lz):
    size = 13 * 10
    with pytest.raises(ValueError):
        ab_conditions_check(np.ones(size - 1), np.ones(size), lz)
    with pytest.raises(ValueError):
        ab_conditions_check(np.ones(size), np.full(size, 3), lz)
    with pytest.raises(ValueError):
        ab_conditions_check(np.ones(size), np.full(size, 2), lz)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_ab_conditions_check_block_sums(data):
    lz = build_L0(lambda_matrix(3, 1))
    size = 130
    d = np.array(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=size, max_size=size)))
    nu = np.array(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=size, max_size=size)))
    res = ab_conditions_check(d, nu, lz)
    names = [c.name for c in res.checks]
    assert names[:3] == ["A odd", "B odd", "a0, b0 odd"]
    assert {"sum a", "b vector", "sum b", "a vector"} <= set(names)
    # all block sums of 13 odd entries are odd, so the parity checks hold
    assert all(c.ok for c in res.checks[:3])
    by = {c.name: c.ok for c in res.checks}
    # the coordinate sums restate the chi_0 conditions
    assert by["sum a"] == by["chi_0(A)"] and by["sum b"] == by["chi_0(B)"]


def test_alpha1_synthetic_candidate_partial_pass():
    D = synthetic_alpha1_candidate(3, seed=0)
    rep = alpha1_checks(D)
    by = {c.name: c.ok for c in rep.checks}
    assert by["D cap L is a GSHDS in L"]
    assert not by["D is a GSHDS"]
    assert not rep.ok


def test_alpha1_rejects_other_groups():
    with pytest.raises(ValueError):
        alpha1_checks(paley_gshds(3, 3))


def test_power_coeffs_k0():
    pc = power_coeffs(paley_gshds(3, 3), 0)
    assert (pc.c, pc.a, pc.b) == (0, 1, 0)
    assert pc.a_minus_b == 1 and pc.ok


def test_power_coeffs_f27():
    pc = power_coeffs(paley_gshds(3, 3), 1)
    assert pc.a_minus_b == -6 == pc.closed_form
    assert valuation(pc.a_minus_b, 3) == 1
    assert np.all(pc.nu % 3 == 0)
    assert pc.ok


@pytest.mark.parametrize("p, m", [(5, 3), (3, 5)])
def test_power_coeffs_other_paley_sets(p, m):
    pc = power_coeffs(paley_gshds(p, m), 1)
    assert pc.ok, [c for c in pc.checks if not c.ok]


def test_power_coeffs_rejects_bad_input():
    with pytest.raises(ValueError):
        power_coeffs(paley_gshds(3, 3), 2)
    with pytest.raises(ValueError):
        power_coeffs(paley_gshds(3, 1), 1)
    G = make_group(3, [1, 1, 1])
    D = AlgebraElement.from_set(G, G.elements()[1:14])
    with pytest.raises(ValueError):
        power_coeffs(D, 1)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(1, 3), st.integers(0, 2))
def test_closed_form_has_valuation_k(p, alpha, k):
    val = power_difference_closed_form(p, alpha, k)
    assert valuation(val, p) == k


def test_closed_form_frozen_values():
    assert power_difference_closed_form(3, 1, 1) == -6
    assert power_difference_closed_form(5, 1, 1) == 1055
    assert power_difference_closed_form(3, 1, 0) == 1


@pytest.mark.parametrize("exps, excluded_by", [
    ([3], ["Camion-Mann", "Johnsen", "Chen-Sehgal-Xiang"]),
    ([2, 2, 1], ["Chen-Sehgal-Xiang"]),
    ([1, 1, 1], []),
    ([1, 1, 1, 1, 1], []),
    ([1], []),
    ([2, 2], ["square order"]),
    ([1, 1], ["square order"]),
    ([2, 1], ["Camion-Mann", "Chen-Sehgal-Xiang"]),
])
def test_exponent_bounds(exps, excluded_by):
    rep = exponent_bound_report(make_group(3, exps))
    assert rep.excluded_by == excluded_by
    assert rep.excluded == bool(excluded_by)
    assert [r.rule for r in rep.rules] == ["square order", "composite order", "Camion-Mann", "Johnsen",
                                           "Chen-Sehgal-Xiang"]


@pytest.mark.parametrize("p, s", [(3, 1), (3, 2), (3, 3), (5, 2)])
def test_bound_mechanics_cyclic(p, s):
    """A nu = p^alpha d forces p^(s-1-alpha) nu = A d, since A^2 = p^(s-1) I."""
    A = build_A(make_group(p, [s])).entries
    rng = np.random.default_rng(0)
    for alpha in range(s):
        nu = p ** alpha * rng.integers(-5, 6, size=A.shape[0])
        d = A @ nu // p ** alpha
        assert np.array_equal(A @ nu, p ** alpha * d)
        assert np.array_equal(p ** (s - 1 - alpha) * nu, A @ d)


@pytest.mark.parametrize("p, s", [(3, 1), (3, 2)])
def test_bound_mechanics_rank_two(p, s):
    A = build_A(make_group(p, [s, s])).entries
    rng = np.random.default_rng(1)
    for alpha in range(2 * s):
        nu = p ** alpha * rng.integers(-5, 6, size=A.shape[0])
        d = A @ nu // p ** alpha
        assert np.array_equal(p ** (2 * s - 1 - alpha) * nu, A @ d)
