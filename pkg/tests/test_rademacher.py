import math
import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from moonshine.modgroup import Cusp, IntMatrix, scaling_matrix
from moonshine.qseries import faber_tower, j_series, ug_from_tg
from moonshine.rademacher import (
    ETA,
    TRIVIAL,
    CertificateError,
    CoefficientEstimate,
    PrecisionConfig,
    bessel_i,
    classical_c,
    dedekind_sum,
    eta_multiplier,
    kloosterman_sum,
    rounded_tg_series,
    symbol_for_class,
    tg_coefficient,
    ug_hat_coefficient,
)
from moonshine.roots import RootOfUnity

from conftest import eta_quotient_2a, eta_quotient_2b

L_INF = scaling_matrix(Cusp(1, 0))


# -- Bessel ---------------------------------------------------------------------


def test_bessel_half_closed_form():
    with mp.workprec(256):
        for x in (mpmath.mpf(1), mpmath.mpf("0.37"), mpmath.mpf(25)):
            mine = bessel_i(Fraction(1, 2), x)
            closed = mpmath.sqrt(2 / (mp.pi * x)) * mpmath.sinh(x)
            assert abs(mine - closed) < abs(closed) * mpmath.mpf(2) ** (-248)


def test_bessel_against_library():
    with mp.workprec(192):
        for order in (Fraction(1, 2), 1, 2, 3):
            for x in (mpmath.mpf("0.5"), 4 * mp.pi, mpmath.mpf(60)):
                mine = bessel_i(order, x)
                order_f = Fraction(order)
                ref = mpmath.besseli(mpmath.mpf(order_f.numerator) / order_f.denominator, x)
                assert abs(mine - ref) < abs(ref) * mpmath.mpf(2) ** (-180)


def test_bessel_small_argument_lead():
    with mp.workprec(64):
        x = mpmath.mpf(2) ** -20
        assert abs(bessel_i(1, x) - x / 2) < x * x


def test_bessel_rejects_bad_order():
    with pytest.raises(ValueError):
        bessel_i(Fraction(1, 3), 1.0)


# -- Dedekind sums and the eta multiplier ---------------------------------------------


def _dedekind_direct(h, k):
    total = Fraction(0)
    for r in range(1, k):
        x = Fraction(r, k)
        y = Fraction(h * r, k)

        def saw(t):
            if t.denominator == 1:
                return Fraction(0)
            return t - math.floor(t) - Fraction(1, 2)

        total += saw(x) * saw(y)
    return total


@pytest.mark.parametrize("k", [1, 2, 3, 5, 12, 35, 60])
def test_dedekind_sum_matches_direct(k):
    for h in range(k):
        if math.gcd(h, k) == 1:
            assert dedekind_sum(h, k) == _dedekind_direct(h, k)


def test_eta_multiplier_generators():
    assert eta_multiplier(IntMatrix(1, 1, 0, 1)) == RootOfUnity(Fraction(1, 24))
    assert eta_multiplier(IntMatrix(0, -1, 1, 0)) == RootOfUnity(Fraction(-3, 24))
    # twelve translations compose to the half turn
    assert eta_multiplier(IntMatrix(1, 12, 0, 1)) == RootOfUnity(Fraction(1, 2))


def _eta_numeric(tau):
    q = mpmath.exp(2j * mp.pi * tau)
    return mpmath.exp(mp.pi * 1j * tau / 12) * mpmath.qp(q)


def _random_sl2(rng, length=10):
    M = IntMatrix(1, 0, 0, 1)
    S = IntMatrix(0, -1, 1, 0)
    for _ in range(length):
        if rng.random() < 0.5:
            M = M @ IntMatrix(1, rng.choice([-2, -1, 1, 2]), 0, 1)
        else:
            M = M @ S
    return M


def test_eta_multiplier_against_transformation():
    rng = random.Random(11)
    with mp.workprec(200):
        tau = mpmath.mpc("0.31", "0.83")
        eta_tau = _eta_numeric(tau)
        for _ in range(40):
            M = _random_sl2(rng)
            if abs(M.a) > 100 or abs(M.c) > 100:
                continue
            lhs = _eta_numeric((M.a * tau + M.b) / (M.c * tau + M.d))
            rhs = eta_multiplier(M).to_mpc() * mpmath.sqrt(M.c * tau + M.d) * eta_tau
            assert abs(lhs - rhs) < abs(lhs) * mpmath.mpf(2) ** (-150), M


def test_eta_multiplier_cocycle():
    # nu(M1 M2) / (nu(M1) nu(M2)) equals the principal-branch sqrt cocycle sign
    rng = random.Random(23)
    with mp.workprec(80):
        tau = mpmath.mpc("0.2", "1.1")
        for _ in range(60):
            m1, m2 = _random_sl2(rng, 8), _random_sl2(rng, 8)
            if max(abs(x) for x in (m1.a, m1.c, m2.a, m2.c)) > 100:
                continue
            prod = m1 @ m2
            ratio = eta_multiplier(prod) * (eta_multiplier(m1) * eta_multiplier(m2)).conjugate()
            z = m1.c * ((m2.a * tau + m2.b) / (m2.c * tau + m2.d)) + m1.d
            w = m2.c * tau + m2.d
            omega = mpmath.sqrt(z) * mpmath.sqrt(w) / mpmath.sqrt(z * w)
            sign = 1 if omega.real > 0 else -1
            assert ratio == RootOfUnity(0 if sign == 1 else Fraction(1, 2))


# -- Kloosterman sums -------------------------------------------------------------------


def _classical_kloosterman(mm, nn, c):
    total = mpmath.mpc(0)
    if c == 1:
        return mpmath.mpc(1)
    for a in range(c):
        if math.gcd(a, c) != 1:
            continue
        d = pow(a, -1, c)
        total += mpmath.exp(2j * mp.pi * (mm * a + nn * d) / c)
    return total


def test_kloosterman_c1_is_one():
    assert kloosterman_sum(0, 1, L_INF, TRIVIAL, -1, 1, 1) == 1


def test_kloosterman_brute_force_sample():
    with mp.workprec(80):
        for c in (2, 3, 5, 12, 49, 50):
            for mm, nn in ((1, 1), (-1, 1), (2, -3), (5, 5), (-4, 0)):
                mine = kloosterman_sum(0, 1, L_INF, TRIVIAL, -mm, nn, c)
                ref = _classical_kloosterman(mm, nn, c)
                assert abs(mine - ref) < mpmath.mpf(2) ** (-60), (mm, nn, c)


def test_kloosterman_empty_class_is_zero():
    # infinite cusp at level 8 only meets c = 0 mod 8
    sym = symbol_for_class("4B")
    L = scaling_matrix(Cusp(1, 0))
    assert kloosterman_sum(0, 8, L, TRIVIAL, 1, 1, 3) == 0


def test_kloosterman_weight_half_runs_and_checks_cocycle():
    # exercises the two-point tau-independence assertion internally
    with mp.workprec(80):
        val = kloosterman_sum(Fraction(1, 2), 1, L_INF, ETA, 1, 1, 5)
        assert isinstance(val, mpmath.mpc)


# -- coefficient estimates ----------------------------------------------------------------


TABLE_ROWS = [
    (25, 1, "196883.661"), (100, 1, "196883.958"),
    (25, 5, "333202640598.254"), (50, 10, "22567393309593598.660"),
]


@pytest.mark.parametrize("cmax,n,printed", TABLE_ROWS)
def test_classical_partial_sums_printed_digits(cmax, n, printed):
    est = classical_c(n, PrecisionConfig(c_max=cmax))
    with mp.workprec(256):
        assert abs(est.value.real - mpmath.mpf(printed)) < mpmath.mpf("1e-3")


def test_classical_matches_general_route_level_one():
    sym = symbol_for_class("1A")
    cfg = PrecisionConfig(c_max=40)
    with mp.workprec(256):
        for n in range(1, 7):
            a = classical_c(n, cfg).value.real
            b = tg_coefficient(sym, 1, n, cfg).value.real
            assert abs(a - b) < abs(a) * mpmath.mpf("1e-6")


def test_tg_4b_printed_digits():
    sym = symbol_for_class("4B")
    for cmax, n, printed in [(100, 1, "51.894"), (50, 5, "4759.860"), (100, 10, "0.040")]:
        est = tg_coefficient(sym, 1, n, PrecisionConfig(c_max=cmax))
        with mp.workprec(256):
            assert abs(est.value.real - mpmath.mpf(printed)) < mpmath.mpf("2e-3")


def test_rounded_series_2a_2b_match_eta_quotient_oracles(tg_series):
    oracle_2b = eta_quotient_2b(14)
    oracle_2a = eta_quotient_2a(14)
    for n in range(-1, 13):
        assert tg_series["2B"].coeff(n) == oracle_2b.coeff(n)
        assert tg_series["2A"].coeff(n) == oracle_2a.coeff(n)


def test_rounded_series_2a_q1(tg_series):
    assert tg_series["2A"].coeff(1) == 4372


def test_rounded_series_4b_row(tg_series):
    ser = tg_series["4B"]
    assert (ser.coeff(1), ser.coeff(5), ser.coeff(10)) == (52, 4760, 0)


def test_rounded_series_identity_matches_j(cfg):
    ser, cert = rounded_tg_series(symbol_for_class("1A"), 8, cfg)
    j = j_series(8)
    assert all(ser.coeff(n) == j.coeff(n) for n in range(-1, 7))
    assert max(cert.values()) < 0.25


def test_certificate_failure_at_tiny_cutoff():
    with pytest.raises(CertificateError):
        rounded_tg_series(symbol_for_class("1A"), 4, PrecisionConfig(c_max=1))


def test_imaginary_part_diagnostic():
    with mp.workprec(256):
        bad = CoefficientEstimate(mpmath.mpc(1, 0.5), 1, mpmath.mpf(0))
        with pytest.raises(ArithmeticError):
            bad.check_real(256)


def test_tower_coefficients_match_faber_route(tg_series, cfg):
    for name in ("2B", "4B"):
        sym = symbol_for_class(name)
        f2, _ = faber_tower(tg_series[name], 2)
        with mp.workprec(256):
            for n in range(1, 6):
                est = tg_coefficient(sym, 2, n, cfg)
                err = abs(est.value.real - f2.coeff(n))
                assert err < max(10 * est.tail_indicator, mpmath.mpf("1e-6")), (name, n, err)


def test_block_order_deterministic(cfg):
    sym = symbol_for_class("4B")
    a = tg_coefficient(sym, 1, 3, cfg)
    b = tg_coefficient(sym, 1, 3, cfg)
    assert a.value == b.value and a.tail_indicator == b.tail_indicator


# -- weight 1/2 ------------------------------------------------------------------------------


def test_ug_hat_polar_depth_is_23_over_24():
    from moonshine.rademacher import _contributing_cusps

    sym = symbol_for_class("1A")
    terms = [t for t in _contributing_cusps(sym, multiplier="eta")]
    assert len(terms) == 1
    assert terms[0].pole_order - Fraction(1, 24) == Fraction(23, 24)


def test_ug_hat_n0_real():
    est = ug_hat_coefficient(symbol_for_class("1A"), 0, PrecisionConfig(c_max=40))
    est.check_real(256)


@pytest.mark.slow
def test_ug_hat_theta_correction_pattern():
    """The weight-1/2 sum differs from (q)_inf T + 1 by one unary theta.

    At the identity class the discrepancy is a constant multiple of the
    eta expansion itself: +-36 on the pentagonal support, 0 elsewhere.
    """
    pent = {0: 1, 1: -1, 2: -1, 3: 0, 4: 0, 5: 1}
    exact = ug_from_tg(j_series(10))
    cfg = PrecisionConfig(working_bits=128, c_max=400)
    sym = symbol_for_class("1A")
    with mp.workprec(128):
        for n, sign in pent.items():
            est = ug_hat_coefficient(sym, n, cfg)
            target = (exact.coeff(n) if n > 0 else -1) + 36 * sign
            assert abs(est.value.real - target) < 0.5, (n, est.value.real, target)
