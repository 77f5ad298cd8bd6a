from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arith_sw import localdensity as ld
from arith_sw.quadform import (
    HYPERBOLIC_PLANE, LatticeGram, UnsupportedRegime, det, diag_matrix, hasse_invariant,
    hilbert_symbol, local_invariants, local_represents, smallest_nonresidue,
)

F = Fraction


def Q(*d):
    return LatticeGram.diagonal(d).entries


# ---------------------------------------------------------------- closed forms

def test_unimodular_closed_forms():
    assert ld.density_unimodular_T(5, HYPERBOLIC_PLANE, diag_matrix([1])).coeffs == (1, F(-1, 5))
    assert ld.density_unimodular_T(3, Q(1), diag_matrix([1])).coeffs == (1, 1)
    p = 3
    poly = ld.density_unimodular_T(p, Q(1, 1, 1, 1), diag_matrix([1, 1, 1]))
    expect = ld.poly_mul((1, F(-1, p ** 2)), (1, 0, F(-1, p ** 2)))
    assert poly.coeffs == tuple(expect)


def test_closed_form_rejects_non_unimodular():
    with pytest.raises(ValueError):
        ld.density_unimodular_T(3, Q(1, 3), diag_matrix([1]))
    with pytest.raises(ValueError):
        ld.density_unimodular_T(3, Q(1, 1), diag_matrix([3]))


def test_scaled_split():
    assert ld.density_scaled_split(3, Q(1), Q(3), diag_matrix([1])).coeffs == (1, 1)
    assert ld.density_scaled_split(3, Q(1), Q(3, 3), diag_matrix([1])) == \
        ld.density_unimodular_T(3, Q(1), diag_matrix([1]))
    assert ld.density_scaled_split(3, Q(1, 1), None, diag_matrix([1])) == \
        ld.density_unimodular_T(3, Q(1, 1), diag_matrix([1]))
    with pytest.raises(ValueError):
        ld.density_scaled_split(3, Q(1), Q(1), diag_matrix([1]))


def test_scaled_split_agrees_with_counting():
    dens = ld.density_polynomial_general(3, Q(1, 3), diag_matrix([1]))
    assert dens.same_polynomial(ld.density_scaled_split(3, Q(1), Q(3), diag_matrix([1])))


# ---------------------------------------------------------------- interpolation

def test_interpolation_reproduces_closed_form():
    dens = ld.density_polynomial_general(3, Q(1), diag_matrix([1]))
    assert dens.coeffs == (1, 1) and dens.provenance == "interpolated"
    for gram, t in [(HYPERBOLIC_PLANE, diag_matrix([2])), (Q(1, 2, 1), diag_matrix([1, 2]))]:
        assert ld.density_polynomial_general(5, gram, t).same_polynomial(
            ld.density_unimodular_T(5, gram, t))


def test_sum_of_two_squares_misses_three():
    # vanishes at X = 1 (x^2 + y^2 = 3 has no 3-adic solution), but not identically
    dens = ld.density_polynomial_general(3, Q(1, 1), diag_matrix([3]))
    assert dens(1) == 0
    assert ld.density_value(3, Q(1, 1), diag_matrix([3]), 1).value == dens(F(1, 3)) != 0


def test_count_infeasible_is_unsupported():
    with pytest.raises(UnsupportedRegime):
        ld.count_representations(2, Q(1), diag_matrix([1]), 0, 1)


@given(st.sampled_from([3, 5]), st.integers(1, 4), st.integers(1, 2), st.data())
def test_closed_form_equals_counting(p, l, n, data):
    if n > l:
        return
    units = [1, 2] if p == 3 else [1, 2, 3, 4]
    lform = data.draw(st.lists(st.sampled_from(units), min_size=l, max_size=l))
    tform = data.draw(st.lists(st.sampled_from(units), min_size=n, max_size=n))
    gram, t = Q(*lform), diag_matrix(tform)
    poly = ld.density_unimodular_T(p, gram, t)
    for r in (0, 1):
        res = ld.density_value(p, gram, t, r)
        assert res.stabilized and res.value == poly(F(1, p ** r))


@given(st.sampled_from([3, 5]), st.data())
def test_local_represents_matches_counting(p, data):
    eps = smallest_nonresidue(p)
    lform = data.draw(st.lists(st.sampled_from([1, eps]), min_size=3, max_size=3))
    tform = data.draw(st.lists(st.sampled_from([1, eps, p, p * eps]), min_size=2, max_size=2))
    positive = ld.density_value(p, Q(*lform), diag_matrix(tform), 0).value > 0
    assert local_represents(p, lform, diag_matrix(tform)) == positive


@pytest.mark.parametrize("t", [[3], [9], [1, 3]])
def test_stabilization_beyond_threshold(t):
    from arith_sw.quadform import valuation
    p = 3
    gram = Q(*([1] * (len(t) + 1)))
    tm = diag_matrix(t)
    k = 2 * valuation(det(tm) * 2 ** len(t), p) + 2
    a = ld.count_representations(p, gram, tm, 0, k, check_next=False).value
    b = ld.count_representations(p, gram, tm, 0, k + 1, check_next=False).value
    assert a == b


# ---------------------------------------------------------------- Whittaker data

def test_whittaker_finite_examples():
    w = ld.whittaker_finite(5, HYPERBOLIC_PLANE, diag_matrix([1]))
    assert w.p_power == 0 and w.value == F(4, 5) and w.derivative == F(1, 5)
    w = ld.whittaker_finite(3, Q(1, 1, 1, 1), diag_matrix([1, 1, 3]))
    assert w.value == 0 and w.p_power == 0


def test_whittaker_finite_non_unimodular_prefactor():
    w = ld.whittaker_finite(3, Q(1, 3), diag_matrix([1]))
    assert w.p_power == F(-1, 2)


# ---------------------------------------------------------------- heights

def test_nu_examples():
    assert ld.nu_p(0, 0, 1, 3) == 1
    assert ld.nu_p(0, 1, 1, 3) == 2
    assert ld.nu_p(1, 1, 1, 5) == 3 + 5
    with pytest.raises(ValueError):
        ld.nu_p(2, 1, 1, 3)


def test_height_ratio_simplest():
    hr = ld.height_ratio(3, Q(1, 1, 1, 1), diag_matrix([1, 1, 3]))
    assert hr.coefficient == 1 and hr.by_counting == 1 and hr.exponents == (0, 0, 1)


def test_height_ratio_unimodular_rejected():
    with pytest.raises(ValueError, match="Whittaker value nonzero"):
        ld.height_ratio(3, Q(1, 1, 1, 1), diag_matrix([1, 1, 1]))


# ---------------------------------------------------------------- vertex lattices

def test_t_max():
    assert ld.t_max(4, 1, 3) == 4
    assert ld.t_max(3, 1, 3) == 2  # det L = (-1)^2
    assert ld.t_max(3, smallest_nonresidue(3), 3) == 4


@pytest.mark.parametrize("p,n,det_l", [(3, 3, 1), (3, 4, 1), (5, 3, 2), (5, 2, 1), (7, 5, 3)])
def test_vertex_lattice_invariants(p, n, det_l):
    for t in range(2, ld.t_max(n, det_l, p) + 1, 2):
        v = ld.vertex_lattice_gram(t, p, det_l, n)
        assert hilbert_symbol(p, (-1) ** (t // 2) * v.beta, p) == -1
        assert local_invariants(p, [v.alpha * v.beta * det_l]).det_class[0] == 1
        qform = [v.gram[i][i] / 2 for i in range(n + 1)]
        lform = [F(1, 2)] * n + [F(det_l, 2)]
        assert local_invariants(p, qform).det_class == local_invariants(p, lform).det_class
        assert hasse_invariant(p, qform) == -hasse_invariant(p, lform)


def test_vertex_lattice_examples():
    v = ld.vertex_lattice_gram(4, 3, 1, 4)
    eps = smallest_nonresidue(3)
    assert [v.gram[i][i] for i in range(5)] == [v.alpha, 3, 3, 3, 3 * v.beta]
    assert local_invariants(3, [v.beta]).det_class == local_invariants(3, [eps]).det_class
    assert v.alpha == v.beta
    with pytest.raises(ValueError):
        ld.vertex_lattice_gram(3, 3, 1, 4)
    with pytest.raises(ValueError):
        ld.vertex_lattice_gram(6, 3, 1, 4)


def test_soylu_examples():
    assert ld.soylu_classify(3, Q(1, 1, 1, 1), diag_matrix([1, 1, 3])) == "zero_dimensional"
    assert ld.soylu_classify(3, Q(1, 1, 1, 1), diag_matrix([3, 3, 3])) == "zero_dimensional"
    assert ld.soylu_classify(3, Q(1, 1, 1, 2), diag_matrix([3, 3, 3])) == "higher_dimensional"
    assert ld.soylu_classify(3, Q(1, 1, 1, 1), diag_matrix([1, 1, 1])) == "out_of_scope"


# ---------------------------------------------------------------- volumes

def test_vol_ratio():
    w = ld.vol_ratio(3, Q(1, 1, 1, 1))
    assert w.value == F(8, 9) ** 2
    assert ld.vol_ratio(5, HYPERBOLIC_PLANE).value == F(4, 5)


def test_vol_ratio_ramified_stabilizes():
    w = ld.vol_ratio_ramified(3, Q(1, 1))
    assert w.value > 0
    assert w.density.provenance == "interpolated"
