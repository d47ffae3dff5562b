"""Monster character-table data model and multiplicity extraction.

The table stores exact character values (a + b sqrt(d))/2 and exposes
the two multiplicity computations:

  * the orthogonality route (complete tables):
        m_i(-m, n) = sum_g chibar_i(g) t_g(n) / |C(g)|
    over one g per conjugacy class, where t_g is the n-th coefficient
    of the order-m trace series;

  * the linear-solve route (bundled partial table): the trace values
    t_g(n) = sum_i m_i chi_i(g) over the bundled classes are solved
    exactly for the unknown multiplicities on a declared support,
    overdetermined and cross-checked.

Adams operations act through the stored power maps:
tr(g|psi^k V) = tr(g^k|V).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .qseries import QSeries, eta_pochhammer, hecke_tower_dims, ug_from_tg

MONSTER_ORDER = (
    2**46 * 3**20 * 5**9 * 7**6 * 11**2 * 13**3 * 17 * 19 * 23 * 29 * 31 * 41 * 47 * 59 * 71
)
NUM_IRREDUCIBLES = 194
DIMS_TOTAL = 5844076785304502808013602136


class TableError(ValueError):
    """Schema violation or failed table invariant."""


class DecompositionError(ArithmeticError):
    """Multiplicities failed integrality or nonnegativity."""


@dataclass(frozen=True)
class CharacterValue:
    """(a + b sqrt(d)) / 2 with the a = b d (mod 2) integrality convention."""

    a: int
    b: int = 0
    d: int = 1

    def __post_init__(self):
        if self.b == 0 and self.d != 1:
            object.__setattr__(self, "d", 1)
        if (self.a - self.b * self.d) % 2:
            raise TableError(f"({self.a} + {self.b} sqrt({self.d}))/2 is not an algebraic integer")

    @classmethod
    def rational(cls, v: int) -> "CharacterValue":
        return cls(2 * v, 0, 1)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise TableError("irrational character value used where a rational is required")
        return Fraction(self.a, 2)

    def conjugate(self) -> "CharacterValue":
        return CharacterValue(self.a, -self.b, self.d)


class AlgebraicSum:
    """Accumulator for sums q0 + sum_d q_d sqrt(d) with exact rationals."""

    __slots__ = ("rational", "irrational")

    def __init__(self):
        self.rational = Fraction(0)
        self.irrational: dict[int, Fraction] = {}

    def add(self, value: CharacterValue, weight: Fraction) -> None:
        self.rational += Fraction(value.a, 2) * weight
        if value.b:
            cur = self.irrational.get(value.d, Fraction(0)) + Fraction(value.b, 2) * weight
            if cur:
                self.irrational[value.d] = cur
            else:
                self.irrational.pop(value.d, None)

    def add_product(self, x: CharacterValue, y: CharacterValue, weight: Fraction) -> None:
        """Accumulate weight * x * y."""
        if x.b and y.b and x.d != y.d:
            raise TableError("product of values from different quadratic fields")
        d = x.d if x.b else y.d
        a = Fraction(x.a * y.a + x.b * y.b * d, 4)
        b = Fraction(x.a * y.b + x.b * y.a, 4)
        self.rational += a * weight
        if b:
            cur = self.irrational.get(d, Fraction(0)) + b * weight
            if cur:
                self.irrational[d] = cur
            else:
                self.irrational.pop(d, None)

    def exact_rational(self) -> Fraction:
        if self.irrational:
            raise DecompositionError(
                f"irrational parts fail to cancel: {self.irrational}")
        return self.rational


@dataclass(frozen=True)
class ClassInfo:
    name: str
    element_order: int
    power_map: Mapping[int, str]
    group_symbol: str
    centralizer_order: int | None = None

    def __post_init__(self):
        if self.power_map.get(1) != self.name:
            raise TableError(f"power map of {self.name} must fix k=1")
        if self.centralizer_order is not None and MONSTER_ORDER % self.centralizer_order:
            raise TableError(f"centralizer order of {self.name} does not divide the group order")


@dataclass
class CharacterTable:
    classes: list[ClassInfo]
    rows: dict[int, dict[str, CharacterValue]]
    dims: dict[int, int]
    group_order: int
    dims_total: int | None = None
    partial: bool = True

    def __post_init__(self):
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise TableError("duplicate class names")
        for i, row in self.rows.items():
            if set(row) != set(names):
                raise TableError(f"character {i} does not cover every class")
        for i in self.rows:
            ident = self.rows[i].get("1A")
            if ident is not None:
                if not ident.is_rational:
                    raise TableError("identity-class value must be rational")
                dim = ident.to_fraction()
                if dim.denominator != 1 or dim <= 0:
                    raise TableError(f"character {i} has non-positive degree {dim}")
                if i in self.dims and self.dims[i] != dim.numerator:
                    raise TableError(f"declared degree of character {i} conflicts with its row")
        ordered = [self.dims[i] for i in sorted(self.dims)]
        if ordered != sorted(ordered):
            raise TableError("degrees must be ascending in the index")
        if 1 in self.dims and self.dims[1] != 1:
            raise TableError("character 1 must be the trivial one")

    def class_info(self, name: str) -> ClassInfo:
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(f"unknown class {name!r}")

    def value(self, i: int, name: str) -> CharacterValue:
        try:
            return self.rows[i][name]
        except KeyError as exc:
            raise TableError(f"character {i} at class {name} not in table") from exc

    def class_size(self, name: str) -> int:
        info = self.class_info(name)
        if info.centralizer_order is None:
            raise TableError(f"centralizer order of {name} is not available")
        return self.group_order // info.centralizer_order

    def power_class(self, name: str, k: int) -> str:
        info = self.class_info(name)
        order = info.element_order
        k = k % order if order else k
        if k == 0:
            return "1A"
        target = info.power_map.get(k) or info.power_map.get(str(k))
        if target is None:
            raise TableError(f"power map of {name} lacks k={k}")
        return target

    def check_orthogonality(self) -> Fraction:
        """Exact column and row orthogonality; returns the worst residual (0)."""
        if self.partial:
            raise TableError("orthogonality requires a complete table")
        worst = Fraction(0)
        names = [c.name for c in self.classes]
        for g in names:
            for h in names:
                acc = AlgebraicSum()
                for i in self.rows:
                    acc.add_product(self.value(i, g).conjugate(), self.value(i, h), Fraction(1))
                got = acc.exact_rational()
                want = Fraction(self.class_info(g).centralizer_order) if g == h else Fraction(0)
                worst = max(worst, abs(got - want))
        idx = sorted(self.rows)
        for i in idx:
            for j in idx:
                acc = AlgebraicSum()
                for g in names:
                    w = Fraction(1, self.class_info(g).centralizer_order)
                    acc.add_product(self.value(i, g), self.value(j, g).conjugate(), w)
                got = acc.exact_rational()
                want = Fraction(1) if i == j else Fraction(0)
                worst = max(worst, abs(got - want))
        if worst != 0:
            raise TableError(f"orthogonality fails, worst residual {worst}")
        return worst


def _data_dir() -> Path:
    override = os.environ.get("MOONSHINE_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def bundled_table_path() -> Path:
    return _data_dir() / "monster_chartab_partial.json"


def load_character_table(path: str | Path | None = None) -> CharacterTable:
    """Load and validate a character table in the JSON schema.

    Complete tables (194 characters x 194 classes, centralizer orders
    present) get the full orthogonality check; the bundled partial table
    is validated structurally.
    """
    path = Path(path) if path is not None else bundled_table_path()
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise TableError(f"cannot read character table at {path}: {exc}") from exc
    try:
        group_order = int(doc["group_order"])
        classes = []
        for entry in doc["classes"]:
            classes.append(ClassInfo(
                name=entry["name"],
                element_order=int(entry["element_order"]),
                power_map={int(k): v for k, v in entry["power_map"].items()},
                group_symbol=entry.get("symbol", ""),
                centralizer_order=(int(entry["centralizer_order"])
                                   if "centralizer_order" in entry else None),
            ))
        names = [c.name for c in classes]
        rows: dict[int, dict[str, CharacterValue]] = {}
        for ch in doc["characters"]:
            i = int(ch["index"])
            vals = ch["values"]
            if len(vals) != len(names):
                raise TableError(f"character {i} has {len(vals)} values for {len(names)} classes")
            rows[i] = {nm: CharacterValue(int(v["a"]), int(v.get("b", "0")), int(v.get("d", 1)))
                       for nm, v in zip(names, vals)}
        dims = {int(k): int(v) for k, v in doc.get("dims", {}).items()}
        for i, row in rows.items():
            dims.setdefault(i, int(row["1A"].to_fraction()))
        dims_total = int(doc["dims_total"]) if "dims_total" in doc else None
        partial = bool(doc.get("partial", len(rows) < NUM_IRREDUCIBLES))
    except (KeyError, ValueError, TypeError) as exc:
        raise TableError(f"schema violation in {path}: {exc}") from exc
    if group_order != MONSTER_ORDER:
        raise TableError("group order does not match the Monster")
    if dims_total is not None and dims_total != DIMS_TOTAL:
        raise TableError("sum of degrees does not match the known total")
    table = CharacterTable(classes, rows, dims, group_order, dims_total, partial)
    for c in classes:
        for k, target in c.power_map.items():
            if target not in names:
                raise TableError(f"power map of {c.name} points at unknown class {target}")
    if not partial:
        if len(rows) != NUM_IRREDUCIBLES or len(classes) != NUM_IRREDUCIBLES:
            raise TableError("complete tables carry 194 characters over 194 classes")
        table.check_orthogonality()
        if sum(table.dims.values()) != DIMS_TOTAL:
            raise TableError("sum of degrees does not match the known total")
    return table


# -- multiplicities -----------------------------------------------------------------


@dataclass(frozen=True)
class ModuleDecomposition:
    """Multiplicities of the ordered irreducibles in one graded piece."""

    multiplicities: Mapping[int, int]
    m: int
    n: int

    def total_dimension(self, dims: Mapping[int, int]) -> int:
        return sum(mult * dims[i] for i, mult in self.multiplicities.items() if mult)


def multiplicity_at(table: CharacterTable, i: int, n: int,
                    trace_series: Mapping[str, QSeries]) -> int:
    """m_i at grading n from the orthogonality sum over all classes."""
    acc = AlgebraicSum()
    for info in table.classes:
        if info.name not in trace_series:
            raise TableError(f"trace series missing for class {info.name}")
        w = Fraction(1, info.centralizer_order) if info.centralizer_order else None
        if w is None:
            raise TableError(f"centralizer order of {info.name} is not available")
        t = trace_series[info.name].coeff(n)
        acc.add(table.value(i, info.name).conjugate(), w * t)
    value = acc.exact_rational()
    if value.denominator != 1:
        raise DecompositionError(f"multiplicity of character {i} at n={n} is {value}")
    if value < 0:
        raise DecompositionError(f"multiplicity of character {i} at n={n} is negative")
    return value.numerator


def multiplicity_series(table: CharacterTable, i: int, m: int,
                        trace_series: Mapping[str, QSeries], prec: int) -> list[int]:
    """m_i(-m, n) for n = 1..prec from order-m trace series."""
    for name, ser in trace_series.items():
        if ser.lead != -m:
            raise TableError(f"series for {name} does not have lead -{m}")
    return [multiplicity_at(table, i, n, trace_series) for n in range(1, prec + 1)]


def decompositions(table: CharacterTable, m: int,
                   trace_series: Mapping[str, QSeries], prec: int) -> list[ModuleDecomposition]:
    out = []
    for n in range(1, prec + 1):
        mults = {i: multiplicity_at(table, i, n, trace_series) for i in sorted(table.rows)}
        out.append(ModuleDecomposition(mults, m, n))
    return out


def adams_tower_trace(table: CharacterTable, name: str, m: int, n: int,
                      base_traces: Mapping[str, QSeries]) -> int:
    """sum_{k | (m,n)} (m/k) tr(g^k | V_{mn/k^2}); delta_{-m,n} for n <= 0."""
    if n <= 0:
        return 1 if n == -m else 0
    total = 0
    g = math.gcd(m, n)
    for k in range(1, g + 1):
        if g % k:
            continue
        target = table.power_class(name, k)
        if target not in base_traces:
            raise TableError(f"trace series missing for class {target}")
        total += (m // k) * base_traces[target].coeff(m * n // (k * k))
    return total


def highest_weight_multiplicities(table: CharacterTable, i: int,
                                  trace_series: Mapping[str, QSeries],
                                  prec: int) -> list[int]:
    """n_i(n) for n = 1..prec via orthogonality against (q)_inf T_g + 1."""
    u_series = {name: ug_from_tg(ser) for name, ser in trace_series.items()}
    out = []
    for n in range(1, prec + 1):
        out.append(multiplicity_at(table, i, n, u_series))
    return out


@dataclass
class AuditReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def nonnegativity_audit(decomps: Iterable[ModuleDecomposition],
                        dims: Mapping[int, int]) -> AuditReport:
    """Every multiplicity nonnegative and every graded dimension identity exact."""
    report = AuditReport()
    for dec in decomps:
        report.checked += 1
        for i, mult in dec.multiplicities.items():
            if mult < 0:
                report.violations.append(f"m_{i}(-{dec.m},{dec.n}) = {mult} < 0")
        if set(dims) >= set(dec.multiplicities):
            want = hecke_tower_dims(dec.m, dec.n + dec.m + 1).coeff(dec.n)
            got = dec.total_dimension(dims)
            if got != want:
                report.violations.append(
                    f"dimension identity fails at (-{dec.m},{dec.n}): {got} != {want}")
    return report


# -- partial-table route --------------------------------------------------------------


def decomposition_from_traces(table: CharacterTable, n: int,
                              trace_series: Mapping[str, QSeries],
                              support: Sequence[int] | None = None) -> ModuleDecomposition:
    """Solve t_g(n) = sum_i m_i chi_i(g) exactly over the table's classes.

    The unknowns run over `support` (default: all bundled character
    indices); the system over every class sharing the table must be
    consistent, integral and nonnegative.  This is the decomposition
    route available without a complete 194-class table.
    """
    support = sorted(support if support is not None else table.rows)
    names = [c.name for c in table.classes if c.name in trace_series]
    if len(names) < len(support):
        raise TableError("fewer trace series than unknown multiplicities")
    rows = []
    rhs = []
    for nm in names:
        row = []
        for i in support:
            v = table.value(i, nm)
            row.append(v.to_fraction())
        rows.append(row)
        rhs.append(Fraction(trace_series[nm].coeff(n)))
    solution = _solve_overdetermined(rows, rhs)
    mults = {}
    for i, v in zip(support, solution):
        if v.denominator != 1:
            raise DecompositionError(f"multiplicity of character {i} at n={n} is {v}")
        if v < 0:
            raise DecompositionError(f"multiplicity of character {i} at n={n} is negative")
        mults[i] = v.numerator
    return ModuleDecomposition(mults, 1, n)


def _solve_overdetermined(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination; raises if the system is inconsistent or deficient."""
    m, k = len(rows), len(rows[0])
    aug = [row[:] + [r] for row, r in zip(rows, rhs)]
    piv_rows = []
    r0 = 0
    for col in range(k):
        pivot = next((r for r in range(r0, m) if aug[r][col] != 0), None)
        if pivot is None:
            raise DecompositionError("singular decomposition system")
        aug[r0], aug[pivot] = aug[pivot], aug[r0]
        pr = aug[r0]
        inv = 1 / pr[col]
        aug[r0] = [x * inv for x in pr]
        for r in range(m):
            if r != r0 and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[r0])]
        piv_rows.append(r0)
        r0 += 1
    for r in range(r0, m):
        if aug[r][k] != 0:
            raise DecompositionError("inconsistent decomposition system")
    solution = [Fraction(0)] * k
    for idx, r in enumerate(piv_rows):
        solution[idx] = aug[r][k]
    return solution
