"""Command implementations shared by the HTTP service and the CLI.

Each run_* function validates its inputs, performs the computation, and
returns a JSON-ready dict (big integers as decimal strings).  Errors are
typed for exit-code mapping: ValidationError (bad request),
CertificateError (numeric rounding certificate failed), DataError
(missing or corrupt data file).
"""

from __future__ import annotations

import mpmath

from . import chartab, distrib, modgroup, qseries, rademacher
from .qseries import QSeries
from .rademacher import CertificateError, PrecisionConfig


class ValidationError(ValueError):
    """Request parameters fail a command's preconditions."""


class DataError(RuntimeError):
    """A required data file is missing or malformed."""


def _symbol(class_name: str) -> modgroup.GroupSymbol:
    try:
        return rademacher.symbol_for_class(class_name)
    except FileNotFoundError as exc:
        raise DataError(str(exc)) from exc
    except KeyError as exc:
        raise ValidationError(f"unknown class {class_name!r}") from exc


def _config(c_max: int, working_bits: int) -> PrecisionConfig:
    try:
        return PrecisionConfig(working_bits=working_bits, c_max=c_max)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


_series_cache: dict[tuple[str, int, int, int], QSeries] = {}


def class_series(class_name: str, prec: int, cfg: PrecisionConfig) -> QSeries:
    """Exact trace expansion for a class, cached per (class, prec, config)."""
    key = (class_name, prec, cfg.working_bits, cfg.c_max)
    if key not in _series_cache:
        if class_name == "1A":
            _series_cache[key] = qseries.j_series(prec)
        else:
            ser, _ = rademacher.rounded_tg_series(_symbol(class_name), prec, cfg)
            _series_cache[key] = ser
    return _series_cache[key]


def format_fixed_truncated(value, places: int = 3) -> str:
    """Decimal rendering truncated toward zero, to compare against printed digits."""
    scaled = mpmath.mpf(value) * 10**places
    whole = int(scaled)  # toward zero
    sign = "-" if whole < 0 else ""
    whole = abs(whole)
    return f"{sign}{whole // 10**places}.{whole % 10**places:0{places}d}"


def run_jcoeffs(n_max: int) -> dict:
    """Exact coefficients of the normalized modular invariant up to q^n_max."""
    if n_max < 0:
        raise ValidationError("n_max >= 0")
    j = qseries.j_series(n_max + 2)
    return {
        "rows": [{"n": n, "c": str(j.coeff(n))} for n in range(-1, n_max + 1)],
    }


def run_convergence(class_name: str, ns: list[int] | None = None,
                    thresholds: list[int] | None = None,
                    c_max_exact: int = 200, working_bits: int = 256) -> dict:
    """Partial-sum grid for the class's coefficients, one row per c-threshold.

    The final row holds the exact integers recovered by the rounding
    certificates at c_max_exact.
    """
    ns = ns or [1, 5, 10]
    thresholds = thresholds or [25, 50, 75, 100]
    if any(n < 1 for n in ns):
        raise ValidationError("coefficient indices must be positive")
    if any(t < 1 for t in thresholds) or thresholds != sorted(thresholds):
        raise ValidationError("thresholds must be positive and increasing")
    sym = _symbol(class_name)
    rows = []
    for t in thresholds:
        cfg = _config(t, working_bits)
        vals = [rademacher.tg_coefficient(sym, 1, n, cfg) for n in ns]
        rows.append({
            "threshold": t,
            "values": [format_fixed_truncated(v.value.real) for v in vals],
            "values_full": [mpmath.nstr(v.value.real, 30) for v in vals],
        })
    cfg = _config(c_max_exact, working_bits)
    exact_prec = max(ns) + 2
    try:
        ser, cert = (rademacher.rounded_tg_series(sym, exact_prec, cfg)
                     if class_name != "1A" else (qseries.j_series(exact_prec), {}))
    except CertificateError:
        raise
    return {
        "class": class_name,
        "symbol": sym.text(),
        "ns": ns,
        "rows": rows,
        "exact": [str(ser.coeff(n)) for n in ns],
        "max_certificate_distance": max(cert.values()) if cert else 0.0,
        "c_max_exact": c_max_exact,
    }


def run_tower(class_name: str, m: int, prec: int,
              c_max: int = 200, working_bits: int = 256) -> dict:
    """Order-m expansion and its monic polynomial in the base series."""
    if m < 1:
        raise ValidationError("m >= 1")
    if prec < 2:
        raise ValidationError("prec >= 2")
    cfg = _config(c_max, working_bits)
    base = class_series(class_name, prec + m + 2, cfg)
    series, poly = qseries.faber_tower(base, m)
    if series.end > prec + 1:
        series = series.truncate(prec + 1)
    return {
        "class": class_name,
        "m": m,
        "series": series.map_integral().to_json(),
        "polynomial": [str(a) for a in poly],
    }


def _load_table(path: str | None) -> chartab.CharacterTable:
    try:
        return chartab.load_character_table(path)
    except chartab.TableError as exc:
        raise DataError(str(exc)) from exc


def _order_m_traces(table: chartab.CharacterTable, m: int, prec: int,
                    cfg: PrecisionConfig) -> dict[str, QSeries]:
    base_prec = prec + 2 * m + 2
    traces = {}
    for info in table.classes:
        base = class_series(info.name, base_prec, cfg)
        traces[info.name] = base if m == 1 else qseries.faber_tower(base, m)[0]
    return traces


def run_multiplicities(chartab_path: str | None = None, m: int = 1, n_max: int = 4,
                       indices: list[int] | None = None,
                       c_max: int = 200, working_bits: int = 256) -> dict:
    """Decompose the order-m graded pieces into irreducibles.

    Complete tables use the class-size-weighted orthogonality sum;
    the bundled partial table solves the trace system exactly over its
    classes on the bundled character support.
    """
    if m < 1 or n_max < 1:
        raise ValidationError("m, n_max >= 1")
    table = _load_table(chartab_path)
    cfg = _config(c_max, working_bits)
    traces = _order_m_traces(table, m, n_max, cfg)
    support = sorted(indices) if indices else sorted(table.rows)
    decomps = []
    try:
        if table.partial:
            for n in range(1, n_max + 1):
                dec = chartab.decomposition_from_traces(table, n, traces, support)
                decomps.append(chartab.ModuleDecomposition(dec.multiplicities, m, n))
        else:
            decomps = chartab.decompositions(table, m, traces, n_max)
    except chartab.DecompositionError as exc:
        raise ValidationError(
            f"{exc} (a larger character support or a complete table is needed)") from exc
    audit = chartab.nonnegativity_audit(decomps, table.dims)
    rows = []
    for dec in decomps:
        rows.append({
            "n": dec.n,
            "multiplicities": {str(i): str(v) for i, v in dec.multiplicities.items()},
            "dimension": str(dec.total_dimension(table.dims)),
        })
    return {
        "m": m,
        "route": "partial-solve" if table.partial else "orthogonality",
        "rows": rows,
        "audit": {"checked": audit.checked, "violations": audit.violations,
                  "passed": audit.passed},
    }


def run_distribution(chartab_path: str | None = None, m: int = 1,
                     n_start: int = 1, n_max: int = 4,
                     indices: list[int] | None = None,
                     c_max: int = 200, working_bits: int = 256, sig: int = 4) -> dict:
    """Proportions of selected irreducibles per graded piece, limit row last."""
    if n_start < 1 or n_max < n_start:
        raise ValidationError("need 1 <= n_start <= n_max")
    table = _load_table(chartab_path)
    indices = list(indices) if indices else [i for i in (1, 2, 194) if i in table.dims]
    cfg = _config(c_max, working_bits)
    traces = _order_m_traces(table, m, n_max, cfg)
    support = sorted(table.rows)
    decomps = []
    try:
        for n in range(n_start, n_max + 1):
            if table.partial:
                dec = chartab.decomposition_from_traces(table, n, traces, support)
                dec = chartab.ModuleDecomposition(dec.multiplicities, m, n)
            else:
                dec = chartab.ModuleDecomposition(
                    {i: chartab.multiplicity_at(table, i, n, traces)
                     for i in sorted(table.rows)}, m, n)
            decomps.append(dec)
    except chartab.DecompositionError as exc:
        raise ValidationError(
            f"{exc} (a larger character support or a complete table is needed)") from exc
    report = distrib.proportion_table(table, decomps, indices=indices, sig=sig)
    rows = []
    for row in report["rows"]:
        rows.append({
            "n": row["n"],
            "delta": {str(i): row["delta"][i] for i in indices},
            "exact": {str(i): (None if row["exact"][i] is None else str(row["exact"][i]))
                      for i in indices},
        })
    return {
        "m": m,
        "indices": indices,
        "rows": rows,
        "limit": {str(i): report["limit"][i] for i in indices},
        "limit_exact": {str(i): str(report["limit_exact"][i]) for i in indices},
    }
