import pytest
from hypothesis import given, settings, strategies as st
from sympy import totient

from gshds.galois import (decompose, field_square_check, frobenius, make_field, make_ring, matrix_trace,
                          orbit_reps, paley_gshds, paley_set, parse_ring, primitive_polynomials, qr_symbol,
                          teichmuller, teichmuller_set, trace, trace_pairing, unit_coordinates)
from gshds.pgroup import legendre

RINGS = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)]


@st.composite
def ring_elems(draw, n=2):
    p, beta = draw(st.sampled_from(RINGS))
    R = make_ring(p, beta)
    out = [R.elem(draw(st.lists(st.integers(0, R.mod - 1), min_size=beta, max_size=beta)))
           for _ in range(n)]
    return R, out


@settings(max_examples=50, deadline=None)
@given(ring_elems(3))
def test_ring_axioms(t):
    R, (a, b, c) = t
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a * R.one == a


@settings(max_examples=40, deadline=None)
@given(ring_elems(1))
def test_teichmuller_properties(t):
    R, (g,) = t
    if not g.is_unit():
        return
    tg = teichmuller(g)
    assert tg ** (R.q - 1) == R.one
    assert tg.mod_p() == g.mod_p()
    r0, r1 = decompose(g)
    assert r0 + r1 * R.p == g


@settings(max_examples=40, deadline=None)
@given(ring_elems(2))
def test_frobenius_is_a_ring_map_and_trace_matches_matrix(t):
    R, (a, b) = t
    assert frobenius(a * b) == frobenius(a) * frobenius(b)
    assert frobenius(a + b) == frobenius(a) + frobenius(b)
    assert trace(a) == matrix_trace(a)
    assert trace(a + b) == (trace(a) + trace(b)) % R.mod
    assert R.fast_trace(a) == trace(a)


@pytest.mark.parametrize("p, beta", [(3, 1), (3, 2), (3, 3), (5, 2), (5, 3), (7, 3)])
def test_primitive_polynomial_count(p, beta):
    assert sum(1 for _ in primitive_polynomials(p, beta)) == totient(p ** beta - 1) // beta


def test_frozen_moduli_and_traces():
    assert make_field(3, 3).modulus == (1, 0, 2, 1)
    assert make_ring(3, 3).trace_vector == (3, 7, 4)
    P = trace_pairing(make_ring(3, 2))
    assert P.M.tolist() == [[2, 8], [8, 6]]


@pytest.mark.parametrize("p, beta", [(3, 2), (3, 3), (5, 2)])
def test_teichmuller_set_is_cyclic_of_order_q_minus_1(p, beta):
    R = make_ring(p, beta)
    T = teichmuller_set(R)
    assert len({t.coeffs for t in T}) == R.q - 1
    assert {t.mod_p().coeffs for t in T} == {g.coeffs for g in R.reduce_to_field().elements() if not g.is_zero()}


@pytest.mark.parametrize("p, beta", [(3, 2), (3, 3)])
def test_unit_coordinates_reconstruct(p, beta):
    R = make_ring(p, beta)
    for g in list(R.units())[::7]:
        b0, b1 = unit_coordinates(g)
        lift = R.elem(b1.coeffs)
        assert b0 * (lift * p + 1) == g


@pytest.mark.parametrize("p, beta", [(3, 2), (3, 3), (5, 2), (5, 3), (7, 3)])
def test_orbit_reps_tile(p, beta):
    reps = orbit_reps(make_ring(p, beta))
    assert reps.verify_tiling()
    assert reps.r_prime == (p ** beta - 1) // (p - 1)
    assert reps.lprime[0].is_zero()
    if beta % 2:
        assert all(qr_symbol(lv) == 1 for lv in reps.l)


def test_square_reps_need_odd_beta():
    with pytest.raises(ValueError):
        orbit_reps(make_ring(3, 2), squares=True)


@pytest.mark.parametrize("p, beta", [(3, 1), (3, 2), (3, 3), (5, 2), (5, 3), (7, 2)])
def test_field_square_claim(p, beta):
    assert field_square_check(p, beta)


def test_qr_symbol_on_prime_field():
    F = make_field(7, 1)
    assert [qr_symbol(F.const(n)) for n in range(7)] == [legendre(n, 7) for n in range(7)]


@pytest.mark.parametrize("p, m", [(3, 1), (3, 3), (5, 1), (5, 3)])
def test_paley_set_size_and_skewness(p, m):
    F = make_field(p, m)
    S = paley_set(F)
    assert len(S) == (p ** m - 1) // 2
    D = paley_gshds(p, m)
    assert D.total() == len(S)


def test_parse_ring_roundtrip():
    R = make_ring(3, 3, 1)
    assert parse_ring(str(R)) == R
    with pytest.raises(ValueError):
        parse_ring("GR(3^2, 3; modulus=[0,0,0,1])")
    with pytest.raises(ValueError):
        make_field(4, 2)
    with pytest.raises(ValueError):
        make_field(3, 3, index=99)


def test_second_embedding_differs():
    assert make_field(3, 3, 0).modulus != make_field(3, 3, 1).modulus
