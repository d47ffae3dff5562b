"""Asymptotic main terms, limiting proportions, and quantum dimensions.

As the grading index n grows, the multiplicity of the i-th irreducible
in the order-m tower module behaves like

    dim(chi_i) m^(1/4) / (sqrt(2) n^(3/4) |M|) * exp(4 pi sqrt(m n)),

and in the highest-weight filtration like

    sqrt(12) dim(chi_i) / (|24n+1|^(1/2) |M|) * exp((pi/6) sqrt(23 |24n+1|)).

Both are proportional to dim(chi_i), so the limiting proportion of the
i-th irreducible among all constituents is dim(chi_i) divided by the
sum of all 194 degrees, and the quantum dimensions of the fixed-point
orbifold's module components are the degrees themselves.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath
from mpmath import mp

from .chartab import DIMS_TOTAL, MONSTER_ORDER, CharacterTable, ModuleDecomposition


def _dim(table: CharacterTable, i: int) -> int:
    if i not in table.dims:
        raise KeyError(f"degree of character {i} not available in this table")
    return table.dims[i]


def main_term_m(table: CharacterTable, i: int, m: int, n: int) -> mpmath.mpf:
    """Leading asymptotic of the tower multiplicity m_i(-m, n)."""
    if m < 1 or n < 1:
        raise ValueError("m, n >= 1")
    dim = _dim(table, i)
    return (mpmath.mpf(dim) * mpmath.mpf(m) ** mpmath.mpf(0.25)
            / (mpmath.sqrt(2) * mpmath.mpf(n) ** mpmath.mpf(0.75) * MONSTER_ORDER)
            * mpmath.exp(4 * mp.pi * mpmath.sqrt(mpmath.mpf(m) * n)))


def main_term_n(table: CharacterTable, i: int, n: int) -> mpmath.mpf:
    """Leading asymptotic of the highest-weight multiplicity n_i(n)."""
    if n < 1:
        raise ValueError("n >= 1")
    dim = _dim(table, i)
    x = mpmath.mpf(24 * n + 1)
    return (mpmath.sqrt(12) * dim / (mpmath.sqrt(x) * MONSTER_ORDER)
            * mpmath.exp(mp.pi / 6 * mpmath.sqrt(23 * x)))


def identity_main_term_sum(m: int, n: int) -> mpmath.mpf:
    """sum_i dim(chi_i) * main_term_m(i, m, n), closed by column orthogonality.

    The degrees square-sum to the group order, so the sum collapses to
    m^(1/4) exp(4 pi sqrt(m n)) / (sqrt(2) n^(3/4)) -- the classical
    leading term of the graded dimension, with no table required.
    """
    if m < 1 or n < 1:
        raise ValueError("m, n >= 1")
    return (mpmath.mpf(m) ** mpmath.mpf(0.25)
            / (mpmath.sqrt(2) * mpmath.mpf(n) ** mpmath.mpf(0.75))
            * mpmath.exp(4 * mp.pi * mpmath.sqrt(mpmath.mpf(m) * n)))


def delta_limit(table: CharacterTable, i: int) -> Fraction:
    """Limiting proportion dim(chi_i) / sum_j dim(chi_j), exact."""
    if table.dims_total is not None:
        total = table.dims_total
    elif not table.partial:
        total = sum(table.dims.values())
    else:
        raise ValueError("partial table without a declared degree total")
    return Fraction(_dim(table, i), total)


def format_scientific(x: Fraction, sig: int = 4) -> str:
    """Truncated scientific rendering of a nonnegative rational.

    Truncation (never rounding) matches the published tables' trailing
    "..." convention: 3.3689e-23 prints as 3.368e-23 at sig = 4.
    """
    if x < 0:
        raise ValueError("nonnegative values only")
    if x == 0:
        return "0"
    exp = 0
    y = x
    while y >= 10:
        y /= 10
        exp += 1
    while y < 1:
        y *= 10
        exp -= 1
    scaled = y * 10 ** (sig - 1)
    mant = scaled.numerator // scaled.denominator
    digits = str(mant)
    body = digits[0] + ("." + digits[1:] if sig > 1 else "")
    return f"{body}e{exp}" if exp else body


def proportion_rows(decomps: Iterable[ModuleDecomposition]) -> list[dict]:
    """delta(m_i(-m, n)) = m_i / sum_j m_j per graded piece, exact."""
    rows = []
    for dec in decomps:
        total = sum(dec.multiplicities.values())
        row: dict = {"n": dec.n}
        if total == 0:
            row["proportions"] = None  # empty graded piece: proportions undefined
        else:
            row["proportions"] = {i: Fraction(mult, total)
                                  for i, mult in dec.multiplicities.items()}
        rows.append(row)
    return rows


def proportion_table(table: CharacterTable, decomps: Sequence[ModuleDecomposition],
                     indices: Sequence[int] | None = None, sig: int = 4) -> dict:
    """Tabular report of proportions per n with the limit row appended."""
    indices = list(indices) if indices is not None else sorted(table.dims)
    rows = []
    for row in proportion_rows(decomps):
        props = row["proportions"]
        rendered = {i: (None if props is None or i not in props
                        else format_scientific(props[i], sig)) for i in indices}
        exact = {i: (None if props is None or i not in props else props[i]) for i in indices}
        rows.append({"n": row["n"], "delta": rendered, "exact": exact})
    limit = {i: delta_limit(table, i) for i in indices}
    return {
        "indices": indices,
        "rows": rows,
        "limit": {i: format_scientific(v, sig) for i, v in limit.items()},
        "limit_exact": limit,
    }


def quantum_dimension(table: CharacterTable, i: int,
                      decomps: Sequence[ModuleDecomposition]) -> list[tuple[int, Fraction]]:
    """d_i(n) = m_i(-1, n) / m_1(-1, n), converging to dim(chi_i)."""
    out = []
    for dec in decomps:
        m1 = dec.multiplicities.get(1, 0)
        if m1 == 0:
            continue  # no trivial constituents yet at this n
        out.append((dec.n, Fraction(dec.multiplicities.get(i, 0), m1)))
    return out
