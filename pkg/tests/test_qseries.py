from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moonshine.qseries import (
    BiSeries,
    IdentityError,
    IntegralityError,
    PrecisionError,
    QSeries,
    denominator_identity_residual,
    equivariant_denominator_check,
    eta_pochhammer,
    faber_tower,
    hecke_tower_dims,
    j_series,
    mahler_check,
    ug_from_tg,
)

from conftest import eta_quotient_2b


# -- coefficients of the modular invariant --------------------------------------


def test_j_first_coefficients():
    j = j_series(8)
    assert j.coeff(-1) == 1
    assert j.coeff(0) == 0
    assert j.coeff(1) == 196884
    assert j.coeff(2) == 21493760
    assert j.coeff(3) == 864299970
    assert j.coeff(4) == 20245856256
    assert j.coeff(5) == 333202640600


def test_j_c6_from_recursion_instance():
    # c(6) = c(4) + c(1) c(2), the n=1 case of the even recursion
    j = j_series(8)
    assert j.coeff(6) == 20245856256 + 196884 * 21493760 == 4252023300096


def test_j_positive_coefficients_to_200():
    j = j_series(202)
    assert all(j.coeff(n) > 0 for n in range(1, 201))


# -- recursion check ---------------------------------------------------------------


def test_mahler_check_to_200():
    checked = mahler_check(j_series(202))
    assert checked == list(range(0, 50))  # 4n+2 <= 200


def test_mahler_check_trivial_n0():
    # n = 0 instance is c(2) = c(2); a window holding q^2 suffices
    assert mahler_check(j_series(5)) == [0]


def test_mahler_check_detects_violation():
    j = j_series(12)
    bad = QSeries(j.lead, list(j.coeffs))
    bad.coeffs[6 - bad.lead] += 1
    with pytest.raises(IdentityError):
        mahler_check(bad)


# -- pentagonal expansion -----------------------------------------------------------


def test_eta_pochhammer_against_direct_product():
    prec = 40
    direct = QSeries(0, [1] + [0] * (prec - 1))
    for n in range(1, prec):
        direct = direct * QSeries(0, [1] + [0] * (n - 1) + [-1] + [0] * (prec - n - 1))
        direct = direct.truncate(prec)
    assert eta_pochhammer(prec).coeffs == direct.coeffs


def test_eta_pochhammer_values():
    e = eta_pochhammer(8)
    assert [e.coeff(k) for k in range(6)] == [1, -1, -1, 0, 0, 1]


# -- tower dimensions ----------------------------------------------------------------


def test_hecke_tower_m1_equals_j():
    assert hecke_tower_dims(1, 12) == j_series(12)


def test_hecke_tower_m2_values():
    h = hecke_tower_dims(2, 8)
    assert h.coeff(-2) == 1
    assert h.coeff(-1) == 0
    assert h.coeff(0) == 0
    assert h.coeff(1) == 2 * 21493760 == 42987520
    assert h.coeff(2) == 2 * 20245856256 + 196884 == 40491909396


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_hecke_equals_faber(m):
    prec = 30
    base = j_series(prec + m + 2)
    series, poly = faber_tower(base, m)
    want = hecke_tower_dims(m, prec)
    for n in range(-m, prec - m):
        assert series.coeff(n) == want.coeff(n)
    assert poly[m] == 1
    assert all(isinstance(a, int) for a in poly)


def test_faber_m1_is_identity():
    j = j_series(10)
    series, poly = faber_tower(j, 1)
    assert poly == [0, 1]
    assert all(series.coeff(n) == j.coeff(n) for n in range(-1, series.end))


def test_faber_m2_polynomial():
    _, poly = faber_tower(j_series(12), 2)
    assert poly == [-2 * 196884, 0, 1]


def test_faber_insufficient_precision():
    with pytest.raises(PrecisionError):
        faber_tower(j_series(3), 4)


# -- ring arithmetic -----------------------------------------------------------------


small_series = st.builds(
    QSeries,
    st.integers(min_value=-3, max_value=2),
    st.lists(st.integers(min_value=-9, max_value=9), min_size=1, max_size=7),
)


@given(small_series, small_series, small_series)
@settings(max_examples=150, deadline=None)
def test_ring_laws(a, b, c):
    left = (a + b) * c
    right = a * c + b * c
    lo = max(left.lead, right.lead)
    hi = min(left.end, right.end)
    for n in range(lo, hi):
        assert left.coeff(n) == right.coeff(n)
    ab, ba = a * b, b * a
    assert ab.lead == ba.lead and ab.coeffs == ba.coeffs


@given(small_series, small_series)
@settings(max_examples=100, deadline=None)
def test_mul_propagates_min_precision(a, b):
    prod = a * b
    assert prod.prec == min(a.prec, b.prec)
    assert prod.lead == a.lead + b.lead


def test_read_beyond_window_raises():
    f = QSeries(-1, [1, 2, 3])
    assert f.coeff(-2) == 0
    with pytest.raises(PrecisionError):
        f.coeff(2)


@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=2, max_size=8),
       st.sampled_from([1, -1]))
@settings(max_examples=100, deadline=None)
def test_invert_is_inverse(tail, lead_coeff):
    f = QSeries(0, [lead_coeff] + tail)
    g = f * f.invert()
    assert g.coeff(0) == 1
    assert all(g.coeff(n) == 0 for n in range(1, g.end))


@given(st.lists(st.integers(min_value=-6, max_value=6), min_size=1, max_size=7))
@settings(max_examples=100, deadline=None)
def test_exp_log_inverses(tail):
    f = QSeries(1, tail + [0])
    g = f.exp()
    assert g.coeff(0) == 1
    h = g.log()
    for n in range(0, f.end):
        assert h.coeff(n) == f.coeff(n)
    u = QSeries(0, [1] + tail)
    w = u.log().exp()
    for n in range(0, u.end):
        assert w.coeff(n) == u.coeff(n)


def test_exp_requires_vanishing_constant():
    with pytest.raises(ValueError):
        QSeries(0, [1, 2]).exp()


def test_map_integral_rejects_fractions():
    with pytest.raises(IntegralityError):
        QSeries(0, [Fraction(1, 2)]).map_integral()


def test_json_round_trip():
    j = j_series(6)
    assert QSeries.from_json(j.to_json()) == j


# -- two-variable identities -----------------------------------------------------------


@pytest.mark.parametrize("pp,pq", [(2, 2), (3, 3), (4, 4)])
def test_denominator_identity_residual_zero(pp, pq):
    assert denominator_identity_residual(pp, pq) == 0


def test_biseries_mul_respects_truncation():
    a = BiSeries(0, 2, 0, 2, {(0, 0): 1, (1, 1): 1})
    b = BiSeries(0, 3, 0, 3, {(0, 0): 1, (2, 2): 5})
    prod = a * b
    assert prod.end_p == 2 and prod.end_q == 2
    assert prod.coeff(1, 1) == 1
    with pytest.raises(PrecisionError):
        prod.coeff(2, 2)


def test_equivariant_reduces_to_dimension_identity_at_identity():
    j = j_series(80)
    traces = {k: j for k in range(1, 5)}
    assert equivariant_denominator_check(traces, 3, 3) == 0


def test_equivariant_check_2b():
    t2b = eta_quotient_2b(60)
    j = j_series(60)
    # odd powers stay in the class, even powers land at the identity
    traces = {1: t2b, 2: j, 3: t2b, 4: j}
    assert equivariant_denominator_check(traces, 3, 3) == 0


def test_equivariant_missing_power_raises():
    j = j_series(80)
    with pytest.raises(KeyError):
        equivariant_denominator_check({1: j}, 3, 3)


# -- highest-weight generating series ---------------------------------------------------


def test_ug_from_tg_identity_values():
    u = ug_from_tg(j_series(12))
    assert u.coeff(-1) == 1
    assert u.coeff(0) == 0
    assert u.coeff(1) == 196883


def test_ug_leading_structure():
    u = ug_from_tg(eta_quotient_2b(12))
    assert u.coeff(-1) == 1
    assert u.coeff(1) == 275  # t(1) - 1
