import cmath
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gshds.galgebra import (AlgebraElement, Pairing, char_table, char_value, check_gshds, check_pairing,
                            convolve, diagonal_pairing, difference_multiplicities, fourier_inverse,
                            power_map, project, restrict)
from gshds.galois import paley_gshds
from gshds.pgroup import kernel_image_mu, make_group, quotient_projection

SMALL = [(3, [1]), (3, [2]), (3, [1, 1]), (3, [2, 1]), (5, [1]), (3, [1, 1, 1]), (5, [2])]


@st.composite
def element(draw, G=None, lo=-5, hi=5):
    if G is None:
        G = make_group(*draw(st.sampled_from(SMALL)))
    vec = draw(st.lists(st.integers(lo, hi), min_size=G.v, max_size=G.v))
    return AlgebraElement(G, np.array(vec, dtype=np.int64))


@st.composite
def triple(draw):
    G = make_group(*draw(st.sampled_from(SMALL)))
    return draw(element(G)), draw(element(G)), draw(element(G))


def naive_product(A, B):
    """Direct double sum over the group, independent of the array layout."""
    G = A.group
    out = Counter()
    for g, a in A.coeffs.items():
        for h, b in B.coeffs.items():
            out[G.add(g, h)] += a * b
    return AlgebraElement.from_dict(G, {g: c for g, c in out.items() if c})


@settings(max_examples=40, deadline=None)
@given(triple())
def test_convolution_matches_naive_and_is_commutative_ring(t):
    A, B, C = t
    assert convolve(A, B) == naive_product(A, B)
    assert A * B == B * A
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A * AlgebraElement.identity(A.group) == A


@settings(max_examples=30, deadline=None)
@given(element())
def test_power_map_is_a_ring_map_for_units(A):
    G = A.group
    n = G.n0
    B = A * A
    assert power_map(B, n) == power_map(A, n) * power_map(A, n)
    assert power_map(power_map(A, -1), -1) == A
    assert power_map(A, 1) == A


@settings(max_examples=30, deadline=None)
@given(element())
def test_whole_group_absorbs(A):
    W = AlgebraElement.whole(A.group)
    assert A * W == W * A.total()


def test_big_coefficients_switch_to_exact_objects():
    G = make_group(3, [1])
    A = AlgebraElement.from_dict(G, {(1,): 2 ** 40})
    B = A * A
    assert B[(2,)] == 2 ** 80


def test_power_repeated_squaring():
    G = make_group(5, [1])
    A = AlgebraElement.from_set(G, [(1,), (4,)])
    P = A
    for _ in range(6):
        P = P * A
    assert A.power(7) == P
    assert A.power(0) == AlgebraElement.identity(G)
    with pytest.raises(ValueError):
        A.power(-1)


def test_group_mismatch_raises():
    A = AlgebraElement.identity(make_group(3, [1]))
    B = AlgebraElement.identity(make_group(5, [1]))
    with pytest.raises(ValueError):
        A + B


def numeric_char(A, g, P):
    N = P.level
    return sum(c * cmath.exp(2j * cmath.pi * P.exponent(g, h) / N) for h, c in A.coeffs.items())


def numeric(z):
    w = cmath.exp(2j * cmath.pi / z.level)
    return sum(c * w ** e for e, c in enumerate(z.coeffs))


@settings(max_examples=25, deadline=None)
@given(element())
def test_characters_match_numeric_and_invert(A):
    G = A.group
    P = diagonal_pairing(G)
    vals = char_table(A, P)
    for g, v in zip(G.elements(), vals):
        assert abs(numeric(v) - numeric_char(A, g, P)) < 1e-6
        assert v == char_value(A, g, P)
    assert fourier_inverse(vals, G, P) == A


@settings(max_examples=20, deadline=None)
@given(triple())
def test_characters_are_multiplicative(t):
    A, B, _ = t
    va, vb, vab = char_table(A), char_table(B), char_table(A * B)
    assert all(x * y == z for x, y, z in zip(va, vb, vab))


def test_diagonal_pairing_is_checked():
    G = make_group(3, [2, 1])
    P = diagonal_pairing(G)
    assert P.M.tolist() == [[1, 0], [0, 3]]
    assert check_pairing(P) is P
    bad = Pairing("bad", G, ((1, 1), (0, 3)))
    with pytest.raises(ValueError):
        check_pairing(bad)
    degenerate = Pairing("deg", G, ((3, 0), (0, 3)))
    with pytest.raises(ValueError):
        check_pairing(degenerate)


def test_paley_27_certificate():
    cert = check_gshds(paley_gshds(3, 3))
    assert cert.ok and cert.kind == "SHDS"
    assert (cert.v, cert.k, cert.k0, cert.lambda_) == (27, 13, 13, 6)


def test_paley_5_is_pds():
    cert = check_gshds(paley_gshds(5, 1))
    assert cert.kind == "PaleyPDS"
    assert cert.pds_params == (5, 2, 0, 1)


def test_non_gshds_reports_a_witness():
    G = make_group(3, [1, 1])
    D = AlgebraElement.from_set(G, [(0, 1), (1, 0), (1, 1), (1, 2)])
    cert = check_gshds(D)
    assert not cert.ok
    assert cert.witness is not None and cert.reason


def test_difference_multiplicities_of_a_difference_set():
    D = paley_gshds(3, 3)
    M = difference_multiplicities(D)
    assert M[D.group.zero] == 13
    assert set(M.vec[1:].tolist()) == {6}


def test_restrict_and_project():
    G = make_group(3, [2, 1])
    D = AlgebraElement.from_set(G, G.elements()[1:5])
    L, H = kernel_image_mu(G, 1)
    R = restrict(D, L)
    assert R.total() == sum(D[g] for g in L.elements)
    q = quotient_projection(G, L)
    Pj = project(D, q)
    assert Pj.total() == D.total()
    assert Pj.group == q.H
