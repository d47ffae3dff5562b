"""Arbitrary-precision evaluation of the exact coefficient formulas.

The n-th coefficient of a weight-0 series with poles prescribed at the
cusps of Gamma_0(N h) is a sum over qualifying cusps rho = alpha/gamma
(pole order (h,gamma)^2/(e h^2), one Atkin-Lehner label e per cusp) of

    eps(L_rho)^m * 2 pi |(-m/n) (h,gamma)^2/(e h^2)|^(1/2)
      * sum_{c > 0, (c,Nh) = (gamma,Nh)} K_c(0, L, -m, n)/c
          * I_1((4 pi / c) sqrt(|m n (h,gamma)^2/(e h^2)|))

and the weight-1/2 counterpart with the eta multiplier replaces the
exponent 1/2 by 1/4, I_1 by I_{1/2}, and shifts the spectral parameters
by the cusp parameters kappa = width/24 mod 1.  K_c is the decorated
Kloosterman sum

    K_c = sum_{0 <= a < c t_rho, L S in Gamma_0(N), a d = 1 (c)}
            (automorphy factor) * exp(2 pi i (a (-m + kappa_rho)/t_rho
                                               + d (n + kappa_oo))/c),

whose terms all have exactly rational phase, so the sum is accumulated
in exact phase buckets and converted to floating point once per block.

Summation order is deterministic: c increases one block at a time, each
block covering every contributing cusp in canonical order, matching the
conditional-convergence ordering 0 < c < K of the underlying limits.
All operations are pure; results are bit-stable for a fixed
PrecisionConfig.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from .modgroup import (
    Cusp,
    CuspDatum,
    GroupSymbol,
    IntMatrix,
    cusp_width,
    cusps_of_gamma0,
    epsilon_g,
    load_monster_symbols,
)
from .qseries import QSeries, j_series
from .roots import RootOfUnity


class CertificateError(ArithmeticError):
    """A numeric estimate was too far from an integer to round safely."""


@dataclass(frozen=True)
class PrecisionConfig:
    working_bits: int = 256
    c_max: int = 200

    def __post_init__(self):
        if self.working_bits < 64:
            raise ValueError("working_bits >= 64")
        if self.c_max < 1:
            raise ValueError("c_max >= 1")

    @property
    def tail_cutoff(self) -> mpmath.mpf:
        return mpmath.mpf(2) ** (-(self.working_bits + 16))


@dataclass
class CoefficientEstimate:
    """A truncated-series value with the truncation's bookkeeping."""

    value: mpmath.mpc
    c_max_used: int
    tail_indicator: mpmath.mpf

    def real(self) -> mpmath.mpf:
        return self.value.real

    def check_real(self, working_bits: int) -> None:
        bound = mpmath.mpf(2) ** (-(working_bits // 4))
        if abs(self.value.imag) >= bound:
            raise ArithmeticError(
                f"imaginary part {self.value.imag} exceeds diagnostic bound {bound}")

    def nearest_int(self) -> tuple[int, mpmath.mpf]:
        target = int(mpmath.nint(self.value.real))
        return target, abs(self.value - target)


@dataclass(frozen=True)
class MultiplierSystem:
    tag: str = "trivial"
    weight: Fraction = Fraction(0)

    def __post_init__(self):
        if self.tag not in ("trivial", "eta"):
            raise ValueError("tag must be 'trivial' or 'eta'")
        expected = Fraction(0) if self.tag == "trivial" else Fraction(1, 2)
        if self.weight != expected:
            raise ValueError(f"multiplier {self.tag} carries weight {expected}")


TRIVIAL = MultiplierSystem()
ETA = MultiplierSystem("eta", Fraction(1, 2))


# -- Bessel ---------------------------------------------------------------------


def bessel_i(order, x) -> mpmath.mpf:
    """I_nu(x) for nu in {1/2, 1, 2, 3, ...} by the ascending series.

    All terms are positive, so a relative cutoff at 2^-(prec+16) keeps
    the full working accuracy without cancellation concerns.
    """
    order = Fraction(order)
    if order != Fraction(1, 2) and (order.denominator != 1 or order < 1):
        raise ValueError(f"unsupported order {order}")
    x = mpmath.mpf(x)
    if x <= 0:
        raise ValueError("x > 0 required")
    nu = mpmath.mpf(order.numerator) / order.denominator
    half = x / 2
    term = half ** nu / mpmath.gamma(nu + 1)
    total = term
    quarter = half * half
    cutoff = mpmath.mpf(2) ** (-(mp.prec + 16))
    k = 0
    while True:
        k += 1
        term *= quarter / (k * (k + nu))
        total += term
        if term < total * cutoff and 2 * k > x:
            return total


# -- Dedekind sums and the eta multiplier -----------------------------------------


def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) = sum_{r=1}^{k-1} ((r/k))((h r/k)) via reciprocity, O(log k)."""
    if k < 1:
        raise ValueError("k >= 1")
    h %= k
    if math.gcd(h, k) != 1:
        raise ValueError("s(h, k) needs gcd(h, k) = 1")
    s = Fraction(0)
    sign = 1
    while h:
        s += sign * (Fraction(h * h + k * k + 1, 12 * h * k) - Fraction(1, 4))
        h, k = k % h, h
        sign = -sign
    return s


def eta_multiplier(M: IntMatrix) -> RootOfUnity:
    """nu_eta(M) = eta(M tau) / ((M:tau)^(1/2) eta(tau)) as an exact root of unity.

    Defined on all of SL2(Z): for a negative bottom row the principal
    branch contributes an exact factor of +-i relative to -M.
    """
    if M.det != 1:
        raise ValueError("determinant must be 1")
    a, b, c, d = M.a, M.b, M.c, M.d
    if c < 0:
        return RootOfUnity(Fraction(1, 4)) * eta_multiplier(-M)
    if c == 0:
        if d < 0:
            return RootOfUnity(Fraction(-1, 4)) * eta_multiplier(-M)
        return RootOfUnity(Fraction(b, 24))
    turns = (Fraction(a + d, 12 * c) - dedekind_sum(d, c)) / 2 - Fraction(1, 8)
    root = RootOfUnity(turns)
    if 24 % root.order:
        raise ArithmeticError(f"eta multiplier left the 24th roots: {root}")
    return root


def _mobius(M: IntMatrix, tau: mpmath.mpc) -> mpmath.mpc:
    return (M.a * tau + M.b) / (M.c * tau + M.d)


def _jfactor(M: IntMatrix, tau: mpmath.mpc) -> mpmath.mpc:
    return M.c * tau + M.d


def _cocycle_sign(L: IntMatrix, S: IntMatrix, tau: mpmath.mpc) -> int:
    """(S:tau)^(1/2) / ((L^-1 : L S tau)^(1/2) (L S : tau)^(1/2)) in {+1, -1}."""
    LS = L @ S
    z = _jfactor(L.inverse(), _mobius(LS, tau))
    w = _jfactor(LS, tau)
    ratio = mpmath.sqrt(z * w) / (mpmath.sqrt(z) * mpmath.sqrt(w))
    sign = 1 if ratio.real > 0 else -1
    if abs(ratio - sign) > mpmath.mpf(2) ** (-mp.prec // 2):
        raise ArithmeticError("automorphy cocycle is not a sign")
    return sign


# -- Kloosterman sums --------------------------------------------------------------


def _phase_buckets(weight: Fraction, N: int, L: IntMatrix, mult: MultiplierSystem,
                   m: int, n: int, c: int) -> dict[Fraction, int]:
    """Exact phases (fractions of a full turn) with multiplicities."""
    if L.c < 0 or (L.c == 0 and L.d < 0):
        # -L scales the same cusp; at half-integral weight the principal
        # branch is only consistent for a nonnegative bottom row
        L = -L
    gamma, alpha = L.c, -L.d
    t_rho = cusp_width(N, Cusp(alpha, gamma))
    buckets: dict[Fraction, int] = {}
    if weight == 0 and mult.tag == "trivial":
        # phase = (a(-m)/t + d n)/c over the common denominator D = t c
        D = t_rho * c
        counts: dict[int, int] = {}
        for a in range(c * t_rho):
            if math.gcd(a, c) != 1:
                continue
            if (gamma * a - alpha * c) % N:
                continue
            d = pow(a, -1, c) if c > 1 else 0
            num = (-m * a + d * n * t_rho) % D
            counts[num] = counts.get(num, 0) + 1
        for num, count in counts.items():
            key = Fraction(num, D)
            buckets[key] = buckets.get(key, 0) + count
        return buckets
    kappa_rho = Fraction(t_rho, 24) % 1
    kappa_inf = Fraction(1, 24)
    tau1 = mpmath.mpc(0, 1)
    tau2 = mpmath.mpc(mpmath.mpf(1) / 3, mpmath.mpf(1) / 2)
    for a in range(c * t_rho):
        if math.gcd(a, c) != 1:
            continue
        if (gamma * a - alpha * c) % N:
            continue
        d = pow(a, -1, c) if c > 1 else 0
        phase = (Fraction(a) * (-m + kappa_rho) / t_rho + Fraction(d) * (n + kappa_inf)) / c
        b = (a * d - 1) // c
        S = IntMatrix(a, b, c, d)
        sign1 = _cocycle_sign(L, S, tau1)
        if sign1 != _cocycle_sign(L, S, tau2):
            raise ArithmeticError("automorphy cocycle depends on tau")
        nu = eta_multiplier(L @ S)
        extra = (RootOfUnity(Fraction(1, 2)) if sign1 < 0 else RootOfUnity(0)) \
            * nu.conjugate()
        key = (phase + extra.exponent) % 1
        buckets[key] = buckets.get(key, 0) + 1
    return buckets


def kloosterman_sum(weight: Fraction | int, N: int, L: IntMatrix, mult: MultiplierSystem,
                    m: int, n: int, c: int) -> mpmath.mpc:
    """Decorated Kloosterman sum K_c for the cusp scaled by L at level N.

    Each term carries exp(2 pi i (a(-m + kappa_rho)/t_rho
    + d(n + kappa_oo))/c) times the combined automorphy/multiplier
    factor, which is identically 1 at weight 0 with trivial multiplier.
    An empty congruence class yields 0.
    """
    weight = Fraction(weight)
    if weight not in (Fraction(0), Fraction(1, 2)):
        raise ValueError("weight must be 0 or 1/2")
    buckets = _phase_buckets(weight, N, L, mult, m, n, c)
    total = mpmath.mpc(0)
    for phase, count in sorted(buckets.items()):
        z = 2 * mp.pi * mpmath.mpf(phase.numerator) / phase.denominator
        cval, sval = mp.cos_sin(z)
        total += count * mpmath.mpc(cval, sval)
    return total


# -- coefficient formulas -----------------------------------------------------------


def classical_c(n: int, cfg: PrecisionConfig = PrecisionConfig()) -> CoefficientEstimate:
    """Partial Rademacher-Petersson sum for the n-th coefficient of the
    normalized modular invariant: 4 pi^2 sum_c K_c / c^2 *
    sum_k (4 pi^2)^k n^k / (c^2k (k+1)! k!), over 0 < c <= c_max.
    """
    if n < 1:
        raise ValueError("n >= 1")
    L = IntMatrix(-1, 0, 0, -1)  # scaling for the infinite cusp of level 1
    with mp.workprec(cfg.working_bits):
        four_pi2 = 4 * mp.pi * mp.pi
        total = mpmath.mpc(0)
        tail = mpmath.mpf(0)
        for c in range(1, cfg.c_max + 1):
            kc = kloosterman_sum(0, 1, L, TRIVIAL, 1, n, c)
            c2 = mpmath.mpf(c) ** 2
            term = mpmath.mpf(1)
            ksum = term
            k = 0
            while True:
                k += 1
                term *= four_pi2 * n / (c2 * k * (k + 1))
                ksum += term
                if term < cfg.tail_cutoff * ksum:
                    break
            block = four_pi2 * kc / c2 * ksum
            total += block
            if abs(block) > 0:
                tail = abs(block)
        est = CoefficientEstimate(total, cfg.c_max, tail)
        est.check_real(cfg.working_bits)
        return est


@dataclass(frozen=True)
class _CuspTerm:
    datum: CuspDatum
    eps: RootOfUnity
    pole_order: Fraction
    al_label: int
    gcd_class: int


def _contributing_cusps(sym: GroupSymbol, multiplier: str = "trivial") -> list[_CuspTerm]:
    level = sym.N * sym.h
    out = []
    for cd in cusps_of_gamma0(level, multiplier=multiplier):
        res = epsilon_g(sym, cd.scaling)
        if res is None:
            continue
        eps, pole, e = res
        if Fraction(1, cd.width) != pole:
            raise ArithmeticError(
                f"width {cd.width} inconsistent with pole order {pole} at {cd.cusp.label()}")
        out.append(_CuspTerm(cd, eps, pole, e, math.gcd(cd.cusp.gamma, level)))
    return out


def tg_coefficient(sym: GroupSymbol, m: int, n: int,
                   cfg: PrecisionConfig = PrecisionConfig()) -> CoefficientEstimate:
    """n-th coefficient of the order-m series attached to the group symbol."""
    if m < 1 or n < 1:
        raise ValueError("m, n >= 1")
    level = sym.N * sym.h
    cusps = _contributing_cusps(sym)
    with mp.workprec(cfg.working_bits):
        two_pi = 2 * mp.pi
        four_pi = 4 * mp.pi
        total = mpmath.mpc(0)
        tail = mpmath.mpf(0)
        for c in range(1, cfg.c_max + 1):
            gc = math.gcd(c, level)
            block = mpmath.mpc(0)
            hit = False
            for term in cusps:
                if gc != term.gcd_class:
                    continue
                kc = kloosterman_sum(0, level, term.datum.scaling, TRIVIAL, m, n, c)
                if kc == 0:
                    continue
                hit = True
                pole = mpmath.mpf(term.pole_order.numerator) / term.pole_order.denominator
                pref = term.eps.to_mpc() ** m * two_pi * mpmath.sqrt(pole * m / n)
                bess = bessel_i(1, four_pi / c * mpmath.sqrt(pole * m * n))
                block += pref * kc / c * bess
            total += block
            if hit and abs(block) > 0:
                tail = abs(block)
        est = CoefficientEstimate(total, cfg.c_max, tail)
        est.check_real(cfg.working_bits)
        return est


def ug_hat_coefficient(sym: GroupSymbol, n: int,
                       cfg: PrecisionConfig = PrecisionConfig()) -> CoefficientEstimate:
    """Coefficient of q^(n + 1/24) in the weight-1/2 partner series.

    Only cusps where the weight-1/2 principal part is genuinely polar
    contribute (pole order above 1/24, i.e. width below 24); at wider
    cusps the eta factor's 1/24 lead already makes the product
    holomorphic.
    """
    if n < 0:
        raise ValueError("n >= 0")
    level = sym.N * sym.h
    cusps = [t for t in _contributing_cusps(sym, multiplier="eta")
             if t.pole_order > Fraction(1, 24)]
    with mp.workprec(cfg.working_bits):
        two_pi = 2 * mp.pi
        four_pi = 4 * mp.pi
        rot = (1 - mpmath.mpc(0, 1)) / mpmath.sqrt(2)
        n_shift = n + mpmath.mpf(1) / 24
        total = mpmath.mpc(0)
        tail = mpmath.mpf(0)
        for c in range(1, cfg.c_max + 1):
            gc = math.gcd(c, level)
            block = mpmath.mpc(0)
            hit = False
            for term in cusps:
                if gc != term.gcd_class:
                    continue
                kc = kloosterman_sum(Fraction(1, 2), level, term.datum.scaling,
                                     ETA, 1, n, c)
                if kc == 0:
                    continue
                hit = True
                pole = mpmath.mpf(term.pole_order.numerator) / term.pole_order.denominator
                depth = pole - mpmath.mpf(1) / 24  # |1/24 - pole|, positive here
                pref = term.eps.to_mpc() * rot * two_pi * (depth / n_shift) ** mpmath.mpf(0.25)
                bess = bessel_i(Fraction(1, 2), four_pi / c * mpmath.sqrt(depth * n_shift))
                block += pref * kc / c * bess
            total += block
            if hit and abs(block) > 0:
                tail = abs(block)
        est = CoefficientEstimate(total, cfg.c_max, tail)
        est.check_real(cfg.working_bits)
        return est


def rounded_tg_series(sym: GroupSymbol, prec: int,
                      cfg: PrecisionConfig = PrecisionConfig()) -> tuple[QSeries, dict]:
    """Exact integer expansion q^-1 + sum_{n>0} a_n q^n with rounding certificates.

    Every estimate must land within 0.25 of an integer; the certificate
    maps n to the achieved rounding distance.  The constant term is 0 by
    the q^-m + O(q) normalization, never rounded from numerics.
    """
    if prec < 2:
        raise ValueError("prec >= 2 to hold the polar term")
    coeffs = [1, 0]
    certificate: dict[int, float] = {}
    with mp.workprec(cfg.working_bits):
        for n in range(1, prec - 1):
            est = tg_coefficient(sym, 1, n, cfg)
            value, dist = est.nearest_int()
            if value != 0 and (n + 1) % sym.h:
                # coefficients are supported on n = -1 mod h
                raise CertificateError(f"nonzero value {value} off the support at n={n}")
            if not dist < 0.25:
                raise CertificateError(
                    f"rounding distance {mpmath.nstr(dist, 8)} >= 0.25 at n={n}; "
                    f"raise c_max or working_bits")
            certificate[n] = float(dist)
            coeffs.append(value)
    return QSeries(-1, coeffs), certificate


_identity_series_cache: dict[int, QSeries] = {}


def identity_series(prec: int) -> QSeries:
    """Exact expansion for the identity class (equals the modular invariant)."""
    if prec not in _identity_series_cache:
        _identity_series_cache[prec] = j_series(prec)
    return _identity_series_cache[prec]


def symbol_for_class(name: str) -> GroupSymbol:
    table = load_monster_symbols()
    if name not in table:
        raise KeyError(f"unknown class {name!r}")
    return table[name]
