"""Congruence-subgroup and eigengroup machinery.

Group symbols N||h+e,f,... encode the invariance groups of the
McKay-Thompson series: N||h+e,f,... is built from Gamma_0(N/h)
conjugated by diag(1/h, 1) and extended by the Atkin-Lehner involutions
W_e for the listed exact divisors e of N/h.  The eigenvalue character
sigma_g on the extended group takes values in h-th roots of unity; its
values, together with the cusp data of Gamma_0(Nh), determine where
each series has poles and with which leading coefficients epsilon_g.

All operations are pure functions of immutable inputs; the bundled
symbol table is immutable after construction.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .roots import RootOfUnity


class SymbolError(ValueError):
    """Malformed or inconsistent group symbol."""


def exact_divisors(n: int) -> list[int]:
    """Divisors e of n with gcd(e, n/e) = 1."""
    return [e for e in range(1, n + 1) if n % e == 0 and math.gcd(e, n // e) == 1]


def _al_product(e: int, f: int) -> int:
    g = math.gcd(e, f)
    return e * f // (g * g)


@dataclass(frozen=True)
class GroupSymbol:
    """The datum N||h+e,f,... with its Atkin-Lehner list."""

    N: int
    h: int
    wset: frozenset[int]
    class_name: str = ""

    def __post_init__(self):
        if self.N < 1 or self.h < 1:
            raise SymbolError("N and h must be positive")
        if math.gcd(self.N, 24) % self.h:
            raise SymbolError(f"h={self.h} does not divide gcd(N,24)={math.gcd(self.N, 24)}")
        n_over_h = self.N // self.h
        for e in self.wset:
            if n_over_h % e or math.gcd(e, n_over_h // e) != 1:
                raise SymbolError(f"{e} is not an exact divisor of N/h={n_over_h}")
        if 1 not in self.wset:
            raise SymbolError("1 must belong to the Atkin-Lehner list")
        for e in self.wset:
            for f in self.wset:
                if _al_product(e, f) not in self.wset:
                    raise SymbolError(f"list not closed: {e}*{f} escapes")

    @property
    def n_over_h(self) -> int:
        return self.N // self.h

    @property
    def lam(self) -> int:
        """-1 when N/h is in the Atkin-Lehner list, else +1."""
        return -1 if self.n_over_h in self.wset else 1

    def text(self) -> str:
        parts = [str(self.N)]
        if self.h > 1:
            parts.append(f"||{self.h}")
        ws = sorted(self.wset - {1})
        if ws:
            if set(ws) | {1} == set(exact_divisors(self.n_over_h)):
                parts.append("+")
            else:
                parts.append("+" + ",".join(str(e) for e in ws))
        return "".join(parts)


_SYMBOL_RE = re.compile(r"^(\d+)(?:\|\|(\d+))?(\+(?:\d+(?:,\d+)*)?)?$")


def parse_group_symbol(text: str) -> GroupSymbol:
    """Parse "N", "N+", "N+e,f,...", "N||h", "N||h+", "N||h+e,f,..."."""
    m = _SYMBOL_RE.match(text.replace(" ", ""))
    if not m:
        raise SymbolError(f"malformed symbol {text!r}")
    N = int(m.group(1))
    h = int(m.group(2)) if m.group(2) else 1
    plus = m.group(3)
    if h == 0 or N == 0:
        raise SymbolError("zero level or h")
    n_over_h = N // h if h and N % h == 0 else None
    if n_over_h is None:
        raise SymbolError(f"h={h} does not divide N={N}")
    if plus is None:
        wset = {1}
    elif plus == "+":
        wset = set(exact_divisors(n_over_h))
    else:
        wset = {1} | {int(tok) for tok in plus[1:].split(",")}
        # close under the Atkin-Lehner product; escape means a bad list
        changed = True
        while changed:
            changed = False
            for e in list(wset):
                for f in list(wset):
                    g = _al_product(e, f)
                    if g not in wset:
                        wset.add(g)
                        changed = True
    return GroupSymbol(N=N, h=h, wset=frozenset(wset))


_PAIRED_NAME_RE = re.compile(r"^(\d+)([A-Z]+)$")


def _data_dir() -> Path:
    override = os.environ.get("MOONSHINE_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


@lru_cache(maxsize=None)
def load_monster_symbols() -> dict[str, GroupSymbol]:
    """Class name -> group symbol for every Monster conjugacy class.

    Names like "23AB" cover two classes related by inversion; the map
    resolves the combined name and both split names.  27A and 27B carry
    the same symbol.
    """
    path = _data_dir() / "monster_groups"
    if not path.exists():
        raise FileNotFoundError(f"symbol table not found at {path}")
    table: dict[str, GroupSymbol] = {}
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            name, text = line.split()
        except ValueError as exc:
            raise SymbolError(f"bad record {line!r}") from exc
        m = _PAIRED_NAME_RE.match(name)
        if not m:
            raise SymbolError(f"bad class name {name!r}")
        order, letters = m.groups()
        names = [name] if len(letters) == 1 else [name] + [order + c for c in letters]
        for nm in names:
            base = parse_group_symbol(text)
            table[nm] = GroupSymbol(base.N, base.h, base.wset, class_name=nm)
    return table


# -- matrices ------------------------------------------------------------------


@dataclass(frozen=True)
class IntMatrix:
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "IntMatrix":
        if self.det != 1:
            raise ValueError("only determinant-1 matrices are inverted exactly")
        return IntMatrix(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(-self.a, -self.b, -self.c, -self.d)

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))


IDENTITY = IntMatrix(1, 0, 0, 1)
T_SHIFT = IntMatrix(1, 1, 0, 1)


def translation(r: int) -> IntMatrix:
    return IntMatrix(1, r, 0, 1)


def in_gamma0(M: IntMatrix, N: int) -> bool:
    return M.det == 1 and M.c % N == 0


def atkin_lehner_matrix(N: int, e: int) -> IntMatrix:
    """An integral matrix [[ae, b], [cN, de]] of determinant e."""
    if N % e or math.gcd(e, N // e) != 1:
        raise ValueError(f"{e} is not an exact divisor of {N}")
    if e == 1:
        return IDENTITY
    if e == N:
        return IntMatrix(0, -1, N, 0)
    g, x, y = _egcd(e, N // e)
    # x*e + y*(N/e) = 1, so det([[xe, -y], [N, e]]) = xe^2 + yN = e
    W = IntMatrix(x * e, -y, N, e)
    assert W.det == e
    return W


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - y * (a // b))


# -- cusps ---------------------------------------------------------------------


@dataclass(frozen=True)
class Cusp:
    """The fraction alpha/gamma with gcd 1; gamma = 0 encodes infinity."""

    alpha: int
    gamma: int

    def __post_init__(self):
        if math.gcd(self.alpha, self.gamma) != 1:
            raise ValueError("alpha and gamma must be coprime")

    @property
    def is_infinity(self) -> bool:
        return self.gamma == 0

    def label(self) -> str:
        if self.is_infinity:
            return "oo"
        if self.gamma == 1:
            return str(self.alpha)
        return f"{self.alpha}/{self.gamma}"


def scaling_matrix(cusp: Cusp) -> IntMatrix:
    """The canonical L with bottom row (gamma, -alpha), det 1 and L^-1(oo) = cusp.

    Among the solutions (delta, beta) of delta*alpha - beta*gamma = 1 the
    one with smallest |beta| is chosen (ties towards beta >= 0); when
    alpha = 0 forces beta, the smallest |delta| wins instead.
    """
    alpha, gamma = cusp.alpha, cusp.gamma
    if gamma == 0:
        # bottom row (0, -alpha) with alpha = +-1; det = delta*alpha = 1
        return IntMatrix(-alpha, 0, 0, -alpha)
    if alpha == 0:
        return IntMatrix(0, -1, 1, 0)
    g, x, y = _egcd(alpha, gamma)
    if g != 1:
        raise ValueError("cusp entries not coprime")
    delta0, beta0 = x, -y  # delta*alpha - beta*gamma = 1
    # shift family: (delta0 + t*gamma, beta0 + t*alpha)
    t_best = round(Fraction(-beta0, alpha))
    candidates = [t_best - 1, t_best, t_best + 1]
    key = lambda t: (abs(beta0 + t * alpha), 0 if beta0 + t * alpha >= 0 else 1)
    t = min(candidates, key=key)
    delta, beta = delta0 + t * gamma, beta0 + t * alpha
    L = IntMatrix(-delta, beta, gamma, -alpha)
    assert L.det == 1
    return L


def cusp_width(N: int, cusp: Cusp) -> int:
    gamma = cusp.gamma
    return N // math.gcd(gamma * gamma, N)


@dataclass(frozen=True)
class CuspDatum:
    cusp: Cusp
    width: int
    kappa: Fraction
    scaling: IntMatrix


def cusps_of_gamma0(N: int, multiplier: str = "trivial") -> list[CuspDatum]:
    """A complete set of inequivalent cusp representatives of Gamma_0(N).

    One class per (gamma | N, alpha mod gcd(gamma, N/gamma)); alpha is
    lifted to the least nonnegative representative coprime to gamma, and
    the class of 1/N is written as infinity = (1, 0).  kappa is 0 for the
    trivial multiplier and width/24 mod 1 for the eta multiplier.
    """
    if N < 1:
        raise ValueError("N >= 1")
    if multiplier not in ("trivial", "eta"):
        raise ValueError("multiplier must be 'trivial' or 'eta'")
    cusps = [Cusp(1, 0)]
    for gamma in sorted(d for d in range(1, N) if N % d == 0):
        d = math.gcd(gamma, N // gamma)
        for a0 in range(d):
            if math.gcd(a0, d) != 1:
                continue
            alpha = a0
            while math.gcd(alpha, gamma) != 1:
                alpha += d
            cusps.append(Cusp(alpha, gamma))
    out = []
    for cusp in cusps:
        width = cusp_width(N, cusp)
        kappa = Fraction(0) if multiplier == "trivial" else Fraction(width, 24) % 1
        out.append(CuspDatum(cusp, width, kappa, scaling_matrix(cusp)))
    return out


def gamma0_index(N: int) -> int:
    """[SL2(Z) : Gamma_0(N)] = N prod_{p | N} (1 + 1/p)."""
    idx = N
    for p in {p for p in range(2, N + 1) if N % p == 0 and all(p % q for q in range(2, p))}:
        idx = idx // p * (p + 1)
    return idx


def cusp_equivalent(N: int, c1: Cusp, c2: Cusp) -> tuple[IntMatrix, int] | None:
    """Witness (M, r) with M in Gamma_0(N) and L_{c1} = M^-1 L_{c2} T^r, if any.

    Solves the linear congruence gamma1*alpha2 - gamma2*alpha1 =
    r*gamma1*gamma2 (mod N); the witness is verified by multiplication.
    """
    L1, L2 = scaling_matrix(c1), scaling_matrix(c2)
    g1, a1 = c1.gamma, c1.alpha
    g2, a2 = c2.gamma, c2.alpha
    rhs = g1 * a2 - g2 * a1
    coeff = g1 * g2
    if coeff == 0:
        if rhs % N:
            return None
        r = 0
    else:
        g = math.gcd(coeff, N)
        if rhs % g:
            return None
        mod = N // g
        r = (rhs // g) * pow(coeff // g, -1, mod) % mod if mod > 1 else 0
    M = L2 @ translation(r) @ L1.inverse()
    if not in_gamma0(M, N):
        return None
    assert M.inverse() @ L2 @ translation(r) == L1
    return M, r


# -- the eigenvalue character sigma_g and pole coefficients epsilon_g -----------


@dataclass(frozen=True)
class EigengroupElement:
    """A matrix [[a e, b/h], [c N, d e]] with a d e - b c N/(e h) = 1."""

    a: int
    b: int
    c: int
    d: int
    e: int

    def matrix(self, sym: GroupSymbol) -> tuple[tuple[Fraction, Fraction], ...]:
        return (
            (Fraction(self.a * self.e), Fraction(self.b, sym.h)),
            (Fraction(self.c * sym.N), Fraction(self.d * self.e)),
        )

    @classmethod
    def from_matrix(cls, sym: GroupSymbol, mat, e: int | None = None) -> "EigengroupElement":
        """Factor an exact 2x2 matrix into the shape, normalizing scalars.

        For a matrix of determinant s^2 * e0 (e0 in the Atkin-Lehner
        list) the scalar s is divided out first.
        """
        m00, m01 = Fraction(mat[0][0]), Fraction(mat[0][1])
        m10, m11 = Fraction(mat[1][0]), Fraction(mat[1][1])
        det = m00 * m11 - m01 * m10
        candidates = [e] if e is not None else sorted(sym.wset)
        for e0 in candidates:
            ratio = det / e0
            if ratio <= 0 or ratio.denominator != 1:
                continue
            s2 = ratio.numerator
            s = math.isqrt(s2)
            if s * s != s2:
                continue
            a = m00 / s / e0
            b = m01 / s * sym.h
            c = m10 / s / sym.N
            d = m11 / s / e0
            if any(x.denominator != 1 for x in (a, b, c, d)):
                continue
            elem = cls(int(a), int(b), int(c), int(d), e0)
            if elem.a * elem.d * e0 - elem.b * elem.c * (sym.N // (e0 * sym.h)) == 1:
                return elem
        raise ValueError("matrix does not fit the eigengroup shape")


def _h_split(h: int, e: int) -> tuple[int, int]:
    """h = h_e * h_bar with h_bar the largest divisor of h coprime to e."""
    h_bar = h
    g = math.gcd(h_bar, e)
    while g > 1:
        h_bar //= g
        g = math.gcd(h_bar, e)
    return h // h_bar, h_bar


def _mat_mul(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def sigma_g(sym: GroupSymbol, M: EigengroupElement) -> RootOfUnity:
    """Eigenvalue of the symbol's character at M, a root of unity of order | h.

    Normal form search: integers A, B, C mod h are sought so that

        [[1, B/h], [0, 1]] M [[1, A/h], [0, 1]] [[1, 0], [C N, 1]] * h_e

    is an integral Atkin-Lehner matrix W_{e h_e^2} for Gamma_0(N h); all
    factors lie in the extended group, where such a matrix has eigenvalue
    1, so sigma(M) = exp(2 pi i (A + B + lambda C) / h).  Every valid
    triple must give one value; disagreement or an empty search signals a
    matrix outside the group.
    """
    N, h = sym.N, sym.h
    if M.e not in sym.wset:
        raise ValueError(f"e={M.e} not in the Atkin-Lehner list")
    if M.a * M.d * M.e - M.b * M.c * (N // (M.e * h)) != 1:
        raise ValueError("normalized determinant is not 1")
    h_e, _h_bar = _h_split(h, M.e)
    cap_e = M.e * h_e * h_e
    lam = sym.lam
    base = M.matrix(sym)
    value: RootOfUnity | None = None
    for A in range(h):
        right = _mat_mul(base, ((Fraction(1), Fraction(A, h)), (Fraction(0), Fraction(1))))
        for C in range(h):
            rc = _mat_mul(right, ((Fraction(1), Fraction(0)), (Fraction(C * N), Fraction(1))))
            for B in range(h):
                mhat = _mat_mul(((Fraction(1), Fraction(B, h)), (Fraction(0), Fraction(1))), rc)
                entries = [x * h_e for row in mhat for x in row]
                if any(x.denominator != 1 for x in entries):
                    continue
                m00, m01, m10, m11 = (int(x) for x in entries)
                if m00 % cap_e or m11 % cap_e or m10 % (N * h):
                    continue
                found = RootOfUnity(Fraction(A + B + lam * C, h))
                if value is None:
                    value = found
                elif value != found:
                    raise ArithmeticError("inconsistent eigenvalue normal forms")
    if value is None:
        raise ValueError("no valid (A, B, C): matrix is not in the eigengroup")
    return value


def qualifying_atkin_lehner(sym: GroupSymbol, gamma: int) -> int | None:
    """The e in the Atkin-Lehner list with gcd(gamma/(gamma,h), N/h) = N/(eh), if any."""
    h_gamma = math.gcd(sym.h, abs(gamma))
    t = math.gcd(abs(gamma) // h_gamma, sym.n_over_h)
    e, rem = divmod(sym.n_over_h, t)
    if rem:
        return None
    return e if e in sym.wset else None


def epsilon_g(sym: GroupSymbol, L: IntMatrix) -> tuple[RootOfUnity, Fraction, int] | None:
    """Leading pole coefficient data of the symbol's series scaled to cusp L^-1(oo).

    Returns (eps, pole_order, e) when the pole condition holds at the
    cusp alpha/gamma read off the bottom row (gamma, -alpha) of L, with
    pole_order = (h,gamma)^2/(e h^2); returns None when the series is
    holomorphic there.  eps = sigma(L U) exp(2 pi i u (h,gamma) / (e h^2))
    for the least nonnegative admissible u.
    """
    if L.det != 1:
        raise ValueError("L must have determinant 1")
    gamma, alpha = L.c, -L.d
    N, h = sym.N, sym.h
    e = qualifying_atkin_lehner(sym, gamma)
    if e is None:
        return None
    h_gamma = math.gcd(h, abs(gamma))
    pole_order = Fraction(h_gamma * h_gamma, e * h * h)
    # u gamma = alpha (h,gamma) (mod e h)
    rhs = alpha * h_gamma
    mod = e * h
    g = math.gcd(gamma, mod)
    if rhs % g:
        raise ArithmeticError("no admissible u; cusp data inconsistent")
    step = mod // g
    u = (rhs // g) * pow((gamma // g) % step, -1, step) % step if step > 1 else 0
    U = ((Fraction(e * h, h_gamma), Fraction(u, h)), (Fraction(0), Fraction(h_gamma, h)))
    LU = _mat_mul(((Fraction(L.a), Fraction(L.b)), (Fraction(L.c), Fraction(L.d))), U)
    sigma = sigma_g(sym, EigengroupElement.from_matrix(sym, LU, e=e))
    eps = sigma * RootOfUnity(Fraction(u * h_gamma, e * h * h))
    return eps, pole_order, e
