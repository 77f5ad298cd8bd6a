from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arith_sw.quadform import (
    INF, HYPERBOLIC_PLANE, JordanForm, LatticeGram, MomentMatrix, Root8, UnsupportedRegime,
    congruent, det, diag_matrix, diagonalize, diff_set, gamma_real, gamma_space_p,
    hasse_invariant, hilbert_symbol, jordan_decompose, local_invariants, local_represents,
    relevant_places, smallest_nonresidue, weil_index_p,
)

nonzero = st.fractions(min_value=-200, max_value=200, max_denominator=30).filter(lambda x: x != 0)
odd_primes = st.sampled_from([3, 5, 7, 11, 13])
places = st.sampled_from([2, 3, 5, 7, 11, INF])


# ---------------------------------------------------------------- Hilbert symbols

def test_hilbert_examples():
    assert hilbert_symbol(-1, -1, INF) == -1
    assert hilbert_symbol(2, 7, 5) == 1
    assert hilbert_symbol(3, 5, 5) == -1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(2, 3, 3) == -1


def test_hilbert_zero_rejected():
    with pytest.raises(ValueError):
        hilbert_symbol(0, 3, 3)


@given(nonzero, nonzero, places)
def test_hilbert_symmetric(a, b, v):
    assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)


@given(nonzero, nonzero, nonzero, places)
def test_hilbert_bimultiplicative(a, b, c, v):
    assert hilbert_symbol(a * b, c, v) == hilbert_symbol(a, c, v) * hilbert_symbol(b, c, v)


@given(nonzero, places)
def test_hilbert_a_minus_a(a, v):
    assert hilbert_symbol(a, -a, v) == 1


@given(nonzero, nonzero)
def test_hilbert_product_formula(a, b):
    prod = 1
    for v in relevant_places(a, b):
        prod *= hilbert_symbol(a, b, v)
    assert prod == 1


# ---------------------------------------------------------------- Hasse, Jordan

def test_hasse_examples():
    assert hasse_invariant(7, [1, 1, 1]) == 1
    u = smallest_nonresidue(3)
    assert hasse_invariant(3, [3, -3 * u]) == -1
    assert hasse_invariant(3, [1, 3, 3]) == -1


def test_jordan_examples():
    assert jordan_decompose(3, diag_matrix([1, 3])).blocks == ((0, (1,)), (1, (1,)))
    assert jordan_decompose(3, ((1, 1), (1, 10))).blocks == ((0, (1,)), (2, (1,)))
    assert jordan_decompose(5, diag_matrix([2, 5])).blocks == ((0, (2,)), (1, (1,)))


def test_jordan_rejects_p2_and_singular():
    with pytest.raises(UnsupportedRegime):
        jordan_decompose(2, diag_matrix([1, 1]))
    with pytest.raises(ValueError):
        jordan_decompose(3, ((1, 1), (1, 1)))


@st.composite
def base_change(draw, n):
    rows = draw(st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n))
    return tuple(tuple(Fraction(v) for v in r) for r in rows)


@given(odd_primes, st.lists(st.sampled_from([1, 2, 3, 5, 6, 9, 10, 25, 27]), min_size=1, max_size=3),
       st.data())
def test_jordan_invariant_under_base_change(p, d, data):
    t = diag_matrix(d)
    g = data.draw(base_change(len(d)))
    dg = det(g)
    if dg == 0 or dg.numerator % p == 0:
        return
    assert jordan_decompose(p, congruent(t, g)) == jordan_decompose(p, t)


@given(odd_primes, st.lists(st.integers(1, 60), min_size=1, max_size=3))
def test_jordan_preserves_det_and_hasse(p, d):
    t = diag_matrix(d)
    jf = jordan_decompose(p, t)
    diag = jf.diagonal()
    assert len(diag) == len(d)
    ratio = det(t) / det(diag_matrix(diag))
    assert local_invariants(p, [ratio]).det_class == (1, 0)
    assert hasse_invariant(p, diag) == hasse_invariant(p, d)


# ---------------------------------------------------------------- Weil indices

def test_gamma_real_examples():
    assert gamma_real((0, 2), 1) == Root8(2)
    assert gamma_real((2, 2), 3) == Root8(0)
    assert gamma_real((1, 2), 2) == Root8(2)


def test_weil_index_examples():
    assert weil_index_p(1, 5) == Root8(0)
    assert weil_index_p(5, 5) == Root8(0)
    assert weil_index_p(3, 3) == Root8(2)


def test_gamma_space_examples():
    assert gamma_space_p(5, [1, 1, 1]) == Root8(0)
    assert gamma_space_p(3, [1, 3]) == Root8(2)
    assert gamma_space_p(3, [3, 3]) == Root8(4)


def test_weil_index_p2_unsupported():
    with pytest.raises(UnsupportedRegime):
        weil_index_p(1, 2)


@given(odd_primes, st.lists(st.integers(1, 100), min_size=1, max_size=4), st.data())
def test_gamma_space_isometry_invariant(p, d, data):
    g = data.draw(base_change(len(d)))
    dg = det(g)
    if dg == 0 or dg.numerator % p == 0:
        return
    other = jordan_decompose(p, congruent(diag_matrix(d), g)).diagonal()
    assert gamma_space_p(p, other) == gamma_space_p(p, d)
    assert gamma_space_p(p, d) ** 8 == Root8(0)


# ---------------------------------------------------------------- representability

def test_local_represents_examples():
    assert local_represents(3, [1, 1, 1], diag_matrix([1, 1]))
    assert not local_represents(3, [1, 1, 1], diag_matrix([1, 3]))
    assert not local_represents(INF, [1, 1, 1], diag_matrix([1, -1]))


def test_diff_set_examples():
    hh = ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
    assert diff_set(hh, diag_matrix([1, 1, 3])) == {3}
    assert diff_set(diag_matrix([-2, -2]), ((1,),)) == {2}
    assert INF in diff_set(hh, diag_matrix([1, -1, 3]))


def test_diff_set_signature_checked():
    with pytest.raises(ValueError):
        diff_set(diag_matrix([2, 2, 2]), diag_matrix([1, 1]))


def test_diff_parity_breaks_for_three_negative_directions():
    # T negative definite of rank 3: infinity fails by signature while the Hasse invariants agree
    d = diff_set(diag_matrix([2, 10, -2, -14]), ((-5, Fraction(5, 2), 1), (Fraction(5, 2), -2, Fraction(-5, 2)),
                                                  (1, Fraction(-5, 2), -6)))
    assert d == {2, INF}


@st.composite
def kudla_range_instance(draw):
    m = draw(st.integers(0, 2))
    pos = [2 * draw(st.integers(1, 9)) for _ in range(m)]
    neg = [-2 * draw(st.integers(1, 9)) for _ in range(2)]
    n = m + 1
    d = [draw(st.integers(1, 12)) * draw(st.sampled_from([1, -1])) for _ in range(n)]
    return diag_matrix(pos + neg), diag_matrix(d)


@given(kudla_range_instance())
def test_diff_odd_when_at_most_two_negative(inst):
    v, t = inst
    neg = sum(1 for x in diagonalize(t) if x < 0)
    d = diff_set(v, t)
    assert (INF in d) == (neg > 0)
    if neg <= 2:
        assert len(d) % 2 == 1


def test_lattice_gram_conventions():
    L = LatticeGram.diagonal([1, 3])
    assert L.entries == diag_matrix([2, 6])
    assert L.half() == diag_matrix([1, 3])
    assert MomentMatrix(((1, 0), (0, 3))).det() == 3
    assert det(HYPERBOLIC_PLANE) == -1
    with pytest.raises(ValueError):
        LatticeGram(((Fraction(1, 2),),))
