"""Exact Laurent q-series arithmetic and the identity layer.

Series here are truncations of q-expansions with exact big-integer
coefficients (rationals appear only transiently inside exp/log and must
clear by the end of any identity evaluation):

    f = sum_{n = lead}^{lead + prec - 1} a_n q^n

Coefficients below `lead` are exactly zero; coefficients at or beyond
`lead + prec` are unknown, and reading them is an error.  Every binary
operation propagates the minimum usable window, so identity residuals
computed from these series are never vacuously zero.

The identity layer built on top:

  * j_series          -- q^-1 + 0 + 196884 q + ... via E4^3 / Delta - 744
  * eta_pochhammer    -- (q)_inf = prod (1 - q^n), pentagonal expansion
  * mahler_check      -- c(4n+2) = c(2n+2) + sum_k c(k) c(2n-k+1)
  * hecke_tower_dims  -- c(-m,n) = sum_{k | (m,n)} (m/k) c(mn/k^2)
  * faber_tower       -- unique monic degree-m polynomial in a q^-1 + O(1)
                         base with expansion q^-m + O(q)
  * denominator_identity_residual / equivariant_denominator_check --
    two-variable product-vs-difference identities, evaluated exactly
  * ug_from_tg        -- highest-weight generating series (q)_inf T + 1
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Mapping, Sequence


class PrecisionError(ValueError):
    """Requested coefficient lies beyond the declared truncation."""


class IntegralityError(ValueError):
    """A coefficient that must be an integer is not."""


class IdentityError(AssertionError):
    """An exact identity failed; carries the offending index."""


class QSeries:
    """Truncated Laurent series with exact coefficients."""

    __slots__ = ("lead", "coeffs")

    def __init__(self, lead: int, coeffs: Sequence[int | Fraction]):
        if not coeffs:
            raise ValueError("a series needs at least one stored coefficient")
        self.lead = lead
        self.coeffs = list(coeffs)

    # -- window bookkeeping --------------------------------------------------

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    @property
    def end(self) -> int:
        """First exponent beyond the known window."""
        return self.lead + len(self.coeffs)

    def coeff(self, n: int):
        if n >= self.end:
            raise PrecisionError(f"coefficient of q^{n} beyond truncation (end {self.end})")
        if n < self.lead:
            return 0
        return self.coeffs[n - self.lead]

    def _at(self, n: int):
        # window-unchecked read, callers guarantee n < end
        if n < self.lead:
            return 0
        return self.coeffs[n - self.lead]

    def truncate(self, end: int) -> "QSeries":
        if end > self.end:
            raise PrecisionError(f"cannot extend window to {end} (end is {self.end})")
        if end <= self.lead:
            raise PrecisionError("empty window after truncation")
        return QSeries(self.lead, self.coeffs[: end - self.lead])

    def normalized(self) -> "QSeries":
        """Strip leading zero coefficients (the right end is unchanged)."""
        i = 0
        while i < len(self.coeffs) - 1 and self.coeffs[i] == 0:
            i += 1
        return QSeries(self.lead + i, self.coeffs[i:])

    def map_integral(self) -> "QSeries":
        """Assert every coefficient is an integer and cast."""
        out = []
        for k, a in enumerate(self.coeffs):
            if isinstance(a, Fraction):
                if a.denominator != 1:
                    raise IntegralityError(f"coefficient of q^{self.lead + k} is {a}")
                a = a.numerator
            out.append(int(a))
        return QSeries(self.lead, out)

    # -- ring operations -----------------------------------------------------

    def __neg__(self) -> "QSeries":
        return QSeries(self.lead, [-a for a in self.coeffs])

    def _add_scalar(self, value) -> "QSeries":
        if value == 0:
            return QSeries(self.lead, list(self.coeffs))
        if self.end <= 0:
            raise PrecisionError("window ends before exponent 0; cannot add a constant")
        lead = min(self.lead, 0)
        out = [self._at(n) for n in range(lead, self.end)]
        out[-lead] += value
        return QSeries(lead, out)

    def __add__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self._add_scalar(other)
        lead = min(self.lead, other.lead)
        end = min(self.end, other.end)
        if end <= lead:
            raise PrecisionError("windows do not overlap")
        return QSeries(lead, [self._at(n) + other._at(n) for n in range(lead, end)])

    def __radd__(self, other) -> "QSeries":
        return self.__add__(other)

    def __sub__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return self._add_scalar(-other)
        return self.__add__(-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self).__add__(other)

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, (int, Fraction)):
            return QSeries(self.lead, [a * other for a in self.coeffs])
        lead = self.lead + other.lead
        end = min(self.end + other.lead, other.end + self.lead)
        out = [0] * (end - lead)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            ni = self.lead + i
            jmax = min(len(other.coeffs), end - ni - other.lead)
            for j in range(jmax):
                b = other.coeffs[j]
                if b:
                    out[ni + other.lead + j - lead] += a * b
        return QSeries(lead, out)

    def __rmul__(self, other) -> "QSeries":
        return self.__mul__(other)

    def __pow__(self, k: int) -> "QSeries":
        if k < 0:
            return self.invert() ** (-k)
        if k == 0:
            return QSeries(0, [1] + [0] * (self.prec - 1))
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def invert(self) -> "QSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ValueError("leading coefficient must be nonzero; call normalized() first")
        n = self.prec
        inv0 = c0 if c0 in (1, -1) else Fraction(1, 1) / Fraction(c0)
        out = [inv0] + [0] * (n - 1)
        for m in range(1, n):
            s = 0
            for k in range(1, min(m, n - 1) + 1):
                if self.coeffs[k]:
                    s += self.coeffs[k] * out[m - k]
            out[m] = -inv0 * s
        return QSeries(-self.lead, out)

    def derivative(self) -> "QSeries":
        """q d/dq."""
        return QSeries(self.lead, [(self.lead + i) * a for i, a in enumerate(self.coeffs)])

    def exp(self) -> "QSeries":
        """exp of a series vanishing at exponents <= 0; output window [0, end)."""
        for k in range(self.lead, min(1, self.end)):
            if self._at(k) != 0:
                raise ValueError("exp requires the argument to vanish at exponents <= 0")
        n = self.end
        f = [Fraction(self._at(k)) for k in range(n)]
        g = [Fraction(0)] * n
        g[0] = Fraction(1)
        for m in range(1, n):
            s = Fraction(0)
            for k in range(1, m + 1):
                if f[k]:
                    s += k * f[k] * g[m - k]
            g[m] = s / m
        return QSeries(0, g)

    def log(self) -> "QSeries":
        """log of a series with constant term 1 at exponent 0; output window [0, end)."""
        if self.lead > 0 or self._at(0) != 1 or any(self._at(k) for k in range(self.lead, 0)):
            raise ValueError("log requires constant term 1 at exponent 0")
        n = self.end
        g = [Fraction(self._at(k)) for k in range(n)]
        h = [Fraction(0)] * n
        for m in range(1, n):
            s = Fraction(0)
            for k in range(1, m):
                if h[k]:
                    s += k * h[k] * g[m - k]
            h[m] = g[m] - s / m
        return QSeries(0, h)

    # -- interchange -----------------------------------------------------------

    def to_json(self) -> dict:
        ints = self.map_integral()
        return {"lead": ints.lead, "coeffs": [str(a) for a in ints.coeffs], "prec": ints.prec}

    @classmethod
    def from_json(cls, obj: Mapping) -> "QSeries":
        coeffs = [int(s) for s in obj["coeffs"]]
        if obj.get("prec") is not None and int(obj["prec"]) != len(coeffs):
            raise ValueError("prec does not match coefficient count")
        return cls(int(obj["lead"]), coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return (a.lead, a.end) == (b.lead, b.end) and a.coeffs == b.coeffs

    def __repr__(self) -> str:
        shown = []
        for i, a in enumerate(self.coeffs):
            if a:
                shown.append(f"{a}*q^{self.lead + i}")
            if len(shown) == 5:
                break
        body = " + ".join(shown) or "0"
        return f"QSeries({body} + ..., window [{self.lead},{self.end}))"


# -- classical building blocks -------------------------------------------------


def eta_pochhammer(prec: int) -> QSeries:
    """(q)_inf = prod_{n>0} (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}."""
    if prec < 1:
        raise ValueError("prec >= 1")
    out = [0] * prec
    k = 0
    while True:
        placed = False
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e < prec:
                out[e] += -1 if kk % 2 else 1
                placed = True
        if not placed:
            break
        k += 1
    return QSeries(0, out)


def _sigma3_table(n: int) -> list[int]:
    s = [0] * (n + 1)
    for d in range(1, n + 1):
        d3 = d * d * d
        for k in range(d, n + 1, d):
            s[k] += d3
    return s


def eisenstein_e4(prec: int) -> QSeries:
    """Normalized weight-4 Eisenstein series 1 + 240 sum sigma_3(n) q^n."""
    s = _sigma3_table(prec - 1)
    return QSeries(0, [1] + [240 * s[n] for n in range(1, prec)])


def j_series(prec: int) -> QSeries:
    """Normalized elliptic modular invariant, q^-1 + 0 + sum_{n>=1} c(n) q^n.

    The window is [-1, prec - 1), i.e. `prec` stored coefficients.
    """
    if prec < 1:
        raise ValueError("prec >= 1")
    p = prec + 2
    e4 = eisenstein_e4(p)
    delta = (QSeries(1, [1] + [0] * (p - 1)) * eta_pochhammer(p) ** 24).truncate(p)
    j = (e4 ** 3) * delta.invert() - 744
    return j.truncate(prec - 1).map_integral()


def mahler_check(series: QSeries) -> list[int]:
    """Verify c(4n+2) = c(2n+2) + sum_{k=1}^n c(k) c(2n-k+1) for all representable n."""
    checked = []
    n = 0
    while 4 * n + 2 < series.end:
        lhs = series.coeff(4 * n + 2)
        rhs = series.coeff(2 * n + 2)
        for k in range(1, n + 1):
            rhs += series.coeff(k) * series.coeff(2 * n - k + 1)
        if lhs != rhs:
            raise IdentityError(f"recursion fails at n={n}: residual {lhs - rhs}")
        checked.append(n)
        n += 1
    return checked


def hecke_tower_dims(m: int, prec: int) -> QSeries:
    """Graded dimensions of the order-m tower module: q^-m + sum_n c(-m,n) q^n.

    c(-m,n) = sum_{k | gcd(m,n)} (m/k) c(mn/k^2) for n > 0 and delta_{-m,n}
    for n <= 0.  The window is [-m, -m + prec).
    """
    if m < 1:
        raise ValueError("m >= 1")
    n_max = max(prec - m - 1, 1)
    j = j_series(m * n_max + 2)
    out = [0] * prec
    out[0] = 1
    for idx in range(1, prec):
        n = -m + idx
        if n <= 0:
            continue
        g = math.gcd(m, n)
        total = 0
        for k in range(1, g + 1):
            if g % k == 0:
                total += (m // k) * j.coeff(m * n // (k * k))
        out[idx] = total
    return QSeries(-m, out)


def faber_tower(base: QSeries, m: int) -> tuple[QSeries, list]:
    """Monic degree-m polynomial in `base` with expansion q^-m + O(q).

    `base` must be q^-1 + O(1).  Returns (series, [a_0, ..., a_m]); the
    polynomial coefficients are integers whenever `base` has integer
    coefficients.
    """
    if base.lead != -1 or base.coeff(-1) != 1:
        raise ValueError("base must be q^-1 + O(1) with leading coefficient 1")
    if m < 1:
        raise ValueError("m >= 1")
    if base.prec < m + 2:
        raise PrecisionError("base precision too small for the requested tower order")
    powers: list[QSeries | None] = [None] * (m + 1)
    powers[1] = base
    for j in range(2, m + 1):
        powers[j] = powers[j - 1] * base
    poly: list = [0] * (m + 1)
    poly[m] = 1
    result = powers[m]
    for j in range(m - 1, 0, -1):
        c = result.coeff(-j)
        if c:
            poly[j] = -c
            result = result - powers[j] * c
    c0 = result.coeff(0)
    poly[0] = -c0
    result = result - c0
    return result, poly


def ug_from_tg(tg: QSeries) -> QSeries:
    """Highest-weight generating series (q)_inf * T + 1."""
    if tg.lead != -1 or tg.coeff(-1) != 1:
        raise ValueError("input must be q^-1 + O(1)")
    eta = eta_pochhammer(tg.prec)
    return ((eta * tg) + 1).truncate(tg.end - 1)


# -- two-variable identity layer -------------------------------------------------


class BiSeries:
    """Truncated series in p and q with exact coefficients.

    Coefficients live on the grid [lead_p, end_p) x [lead_q, end_q);
    multiplication respects both truncation orders (minimum-window rule).
    """

    __slots__ = ("lead_p", "end_p", "lead_q", "end_q", "data")

    def __init__(self, lead_p: int, end_p: int, lead_q: int, end_q: int,
                 data: dict | None = None):
        self.lead_p, self.end_p = lead_p, end_p
        self.lead_q, self.end_q = lead_q, end_q
        self.data = {} if data is None else data

    def coeff(self, i: int, j: int):
        if i >= self.end_p or j >= self.end_q:
            raise PrecisionError(f"(p^{i} q^{j}) beyond truncation")
        return self.data.get((i, j), 0)

    def add_inplace(self, i: int, j: int, value) -> None:
        if value and self.lead_p <= i < self.end_p and self.lead_q <= j < self.end_q:
            new = self.data.get((i, j), 0) + value
            if new:
                self.data[(i, j)] = new
            else:
                self.data.pop((i, j), None)

    def __neg__(self) -> "BiSeries":
        return BiSeries(self.lead_p, self.end_p, self.lead_q, self.end_q,
                        {k: -v for k, v in self.data.items()})

    def __add__(self, other: "BiSeries") -> "BiSeries":
        out = BiSeries(min(self.lead_p, other.lead_p), min(self.end_p, other.end_p),
                       min(self.lead_q, other.lead_q), min(self.end_q, other.end_q))
        for (i, j), v in self.data.items():
            out.add_inplace(i, j, v)
        for (i, j), v in other.data.items():
            out.add_inplace(i, j, v)
        return out

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return self.__add__(-other)

    def __mul__(self, other: "BiSeries") -> "BiSeries":
        lead_p = self.lead_p + other.lead_p
        lead_q = self.lead_q + other.lead_q
        end_p = min(self.end_p + other.lead_p, other.end_p + self.lead_p)
        end_q = min(self.end_q + other.lead_q, other.end_q + self.lead_q)
        out = BiSeries(lead_p, end_p, lead_q, end_q)
        for (i1, j1), v1 in self.data.items():
            for (i2, j2), v2 in other.data.items():
                out.add_inplace(i1 + i2, j1 + j2, v1 * v2)
        return out

    def max_abs(self, window: Callable[[int, int], bool]):
        best = 0
        for (i, j), v in self.data.items():
            if window(i, j) and abs(v) > best:
                best = abs(v)
        return best


def _mul_clipped(a: BiSeries, b: BiSeries, grid: BiSeries) -> BiSeries:
    # fixed-window convolution: exact on `grid` when the headroom lemma of
    # _denominator_lhs holds (all p-degrees >= 1, q-deficit bounded by p-degree)
    out = BiSeries(grid.lead_p, grid.end_p, grid.lead_q, grid.end_q)
    for (i1, j1), v1 in a.data.items():
        for (i2, j2), v2 in b.data.items():
            out.add_inplace(i1 + i2, j1 + j2, v1 * v2)
    return out


def _denominator_lhs(trace_at: Callable[[int, int], int], prec_p: int, prec_q: int) -> BiSeries:
    """p^-1 exp(-sum_{k>0} sum_{m>0,n} (1/k) t_k(mn) p^{mk} q^{nk}).

    trace_at(k, mn) supplies t_k(mn) = tr(g^k | V_mn); the modules vanish
    for mn < -1 and mn = 0.  The q-window carries prec_p + 1 exponents of
    headroom above prec_q so that every product landing at q-exponent
    <= prec_q is complete: a factor with p-degree d has q-exponent >= -d,
    so partners of anything above the headroom cannot pull it back down.
    """
    q_lo, q_hi = -(prec_p + 1), prec_q + prec_p + 2
    arg = BiSeries(1, prec_p + 2, q_lo, q_hi)
    for k in range(1, prec_p + 2):
        for mk in range(k, prec_p + 2, k):
            m = mk // k
            for n in range(-1, (q_hi - 1) // k + 1):
                if m * n < -1 or m * n == 0:
                    continue
                if not (q_lo <= n * k < q_hi):
                    continue
                t = trace_at(k, m * n)
                if t:
                    arg.add_inplace(mk, n * k, Fraction(-t, k))
    grid = BiSeries(0, prec_p + 2, q_lo, q_hi)
    total = BiSeries(0, prec_p + 2, q_lo, q_hi, {(0, 0): Fraction(1)})
    power = total
    for k in range(1, prec_p + 2):
        power = _mul_clipped(power, arg, grid)
        if not power.data:
            break
        for key, v in power.data.items():
            total.add_inplace(key[0], key[1], v / math.factorial(k))
    return BiSeries(-1, prec_p + 1, total.lead_q, total.end_q,
                    {(i - 1, j): v for (i, j), v in total.data.items()})


def _difference_rhs(series: QSeries, prec_p: int, prec_q: int) -> BiSeries:
    """T(sigma) - T(tau) on the product side's window."""
    q_lo, q_hi = -(prec_p + 1), prec_q + prec_p + 2
    out = BiSeries(-1, prec_p + 1, q_lo, q_hi)
    for i in range(-1, prec_p + 1):
        if i < series.end:
            out.add_inplace(i, 0, series.coeff(i))
    for j in range(-1, min(q_hi, series.end)):
        out.add_inplace(0, j, -series.coeff(j))
    return out


def _trace_budget(prec_p: int, prec_q: int) -> int:
    # largest mn requested by _denominator_lhs (attained at k = 1)
    return (prec_p + 1) * (prec_q + prec_p + 1)


def _as_int(residual):
    if isinstance(residual, Fraction):
        if residual.denominator != 1:
            raise IntegralityError(f"non-integral residual {residual}")
        return residual.numerator
    return residual


def denominator_identity_residual(prec_p: int, prec_q: int) -> int:
    """Max |coefficient| of (product side) - (J(sigma) - J(tau)) over m, n >= 1.

    Exact arithmetic throughout; the expected return is 0.
    """
    if prec_p < 2 or prec_q < 2:
        raise ValueError("precisions >= 2")
    j = j_series(_trace_budget(prec_p, prec_q) + 2)
    diff = _denominator_lhs(lambda k, mn: j.coeff(mn), prec_p, prec_q) \
        - _difference_rhs(j, prec_p, prec_q)
    return _as_int(diff.max_abs(lambda i, jj: 1 <= i <= prec_p and 1 <= jj <= prec_q))


def equivariant_denominator_check(class_traces: Mapping[int, QSeries],
                                  prec_p: int, prec_q: int) -> int:
    """Residual of the trace-twisted product identity against T(sigma) - T(tau).

    `class_traces[k]` is the trace series of the k-th power of the class
    (key 1 is the series itself); every k up to prec_p + 1 must be present
    and long enough for the window budget.
    """
    top = _trace_budget(prec_p, prec_q)
    for k in range(1, prec_p + 2):
        if k not in class_traces:
            raise KeyError(f"missing power-map trace series for k={k}")
        if class_traces[k].end <= top:
            raise PrecisionError(f"trace series for k={k} too short (need end > {top})")

    def trace_at(k: int, mn: int) -> int:
        if mn == -1:
            return 1
        return class_traces[k].coeff(mn)

    diff = _denominator_lhs(trace_at, prec_p, prec_q) \
        - _difference_rhs(class_traces[1], prec_p, prec_q)
    return _as_int(diff.max_abs(lambda i, jj: 1 <= i <= prec_p and jj <= prec_q))
