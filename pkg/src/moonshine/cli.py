"""Command-line client for the computations.

Commands dispatch to the shared operations layer in-process, or to a
running service instance when --server is given; either way the report
payload is identical.  Exit codes: 0 success, 2 validation error,
3 numeric-certificate failure, 4 data-file error.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click

from . import ops
from .chartab import TableError
from .rademacher import CertificateError

EXIT_VALIDATION = 2
EXIT_CERTIFICATE = 3
EXIT_DATA = 4


def _dispatch(ctx, endpoint: str, payload: dict, runner, *args):
    server = ctx.obj.get("server")
    if server:
        import httpx

        resp = httpx.post(f"{server.rstrip('/')}/v1/{endpoint}", json=payload, timeout=600.0)
        if resp.status_code != 200:
            detail = resp.json().get("detail", {})
            kind = detail.get("kind") if isinstance(detail, dict) else "validation"
            message = detail.get("message") if isinstance(detail, dict) else str(detail)
            _fail(kind or "validation", message or resp.text)
        return resp.json()
    try:
        return runner(*args)
    except ops.ValidationError as exc:
        _fail("validation", str(exc))
    except (ops.DataError, TableError, FileNotFoundError) as exc:
        _fail("data", str(exc))
    except CertificateError as exc:
        _fail("certificate", str(exc))


def _fail(kind: str, message: str):
    click.echo(f"error ({kind}): {message}", err=True)
    sys.exit({"validation": EXIT_VALIDATION, "certificate": EXIT_CERTIFICATE,
              "data": EXIT_DATA}.get(kind, 1))


def _emit(ctx, report: dict, text_renderer, csv_rows):
    fmt = ctx.obj["format"]
    if fmt == "json":
        payload = json.dumps(report, indent=1)
    elif fmt == "csv":
        buf = io.StringIO()
        rows = csv_rows(report)
        writer = csv.writer(buf)
        for row in rows:
            writer.writerow(row)
        payload = buf.getvalue().rstrip("\n")
    else:
        payload = text_renderer(report)
    out = ctx.obj.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(payload + "\n")
    else:
        click.echo(payload)


@click.group()
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text",
              help="output format")
@click.option("--out", type=click.Path(writable=True), default=None,
              help="write the report to a file")
@click.option("--server", default=None, help="base URL of a running service instance")
@click.pass_context
def main(ctx, fmt, out, server):
    """Exact and Rademacher-sum moonshine computations."""
    ctx.ensure_object(dict)
    ctx.obj.update(format=fmt, out=out, server=server)


@main.command()
@click.option("--n-max", type=int, default=10, show_default=True)
@click.pass_context
def jcoeffs(ctx, n_max):
    """Exact coefficients c(n) of the normalized modular invariant."""
    report = _dispatch(ctx, "jcoeffs", {"n_max": n_max}, ops.run_jcoeffs, n_max)

    def text(rep):
        lines = [f"{'n':>5}  c(n)"]
        lines += [f"{row['n']:>5}  {row['c']}" for row in rep["rows"]]
        return "\n".join(lines)

    _emit(ctx, report, text, lambda rep: [["n", "c"]] + [[r["n"], r["c"]] for r in rep["rows"]])


@main.command()
@click.option("--class", "class_name", default="1A", show_default=True)
@click.option("--n", "ns", type=int, multiple=True, help="coefficient indices (default 1 5 10)")
@click.option("--threshold", "thresholds", type=int, multiple=True,
              help="partial-sum cutoffs (default 25 50 75 100)")
@click.option("--cmax", type=int, default=200, show_default=True,
              help="cutoff for the exact bottom row")
@click.option("--bits", type=int, default=256, show_default=True)
@click.pass_context
def convergence(ctx, class_name, ns, thresholds, cmax, bits):
    """Partial-sum grid for a class, with the exact row at the bottom."""
    ns = list(ns) or [1, 5, 10]
    thresholds = list(thresholds) or [25, 50, 75, 100]
    payload = {"class_name": class_name, "ns": ns, "thresholds": thresholds,
               "c_max_exact": cmax, "working_bits": bits}
    report = _dispatch(ctx, "convergence", payload, ops.run_convergence,
                       class_name, ns, thresholds, cmax, bits)

    def text(rep):
        width = max(len(v) for row in rep["rows"] for v in row["values"])
        width = max(width, max(len(e) for e in rep["exact"]), 8)
        head = "  ".join(f"{'n=' + str(n):>{width}}" for n in rep["ns"])
        lines = [f"class {rep['class']} ({rep['symbol']})", f"{'':>8}  {head}"]
        for row in rep["rows"]:
            cells = "  ".join(f"{v:>{width}}" for v in row["values"])
            lines.append(f"{'c<=' + str(row['threshold']):>8}  {cells}")
        cells = "  ".join(f"{v:>{width}}" for v in rep["exact"])
        lines.append(f"{'exact':>8}  {cells}")
        return "\n".join(lines)

    def rows(rep):
        out = [["threshold"] + [f"n={n}" for n in rep["ns"]]]
        for row in rep["rows"]:
            out.append([row["threshold"]] + row["values"])
        out.append(["exact"] + rep["exact"])
        return out

    _emit(ctx, report, text, rows)


@main.command()
@click.option("--class", "class_name", default="1A", show_default=True)
@click.option("--m", type=int, default=2, show_default=True)
@click.option("--prec", type=int, default=10, show_default=True)
@click.option("--cmax", type=int, default=200, show_default=True)
@click.option("--bits", type=int, default=256, show_default=True)
@click.pass_context
def tower(ctx, class_name, m, prec, cmax, bits):
    """Order-m expansion and its monic polynomial in the base series."""
    payload = {"class_name": class_name, "m": m, "prec": prec,
               "c_max": cmax, "working_bits": bits}
    report = _dispatch(ctx, "tower", payload, ops.run_tower, class_name, m, prec, cmax, bits)

    def text(rep):
        ser = rep["series"]
        lines = [f"class {rep['class']}, order {rep['m']}"]
        poly = rep["polynomial"]
        terms = []
        for j in range(len(poly) - 1, -1, -1):
            a = int(poly[j])
            if a == 0:
                continue
            var = "" if j == 0 else ("X" if j == 1 else f"X^{j}")
            terms.append(f"{a:+d}{'*' if var else ''}{var}")
        lines.append("polynomial: " + " ".join(terms))
        lead = ser["lead"]
        for k, c in enumerate(ser["coeffs"]):
            if c != "0":
                lines.append(f"  q^{lead + k:<4} {c}")
        return "\n".join(lines)

    def rows(rep):
        ser = rep["series"]
        out = [["exponent", "coefficient"]]
        out += [[ser["lead"] + k, c] for k, c in enumerate(ser["coeffs"])]
        return out

    _emit(ctx, report, text, rows)


@main.command()
@click.option("--chartab", default=None, help="path to a character table JSON")
@click.option("--m", type=int, default=1, show_default=True)
@click.option("--n-max", type=int, default=4, show_default=True)
@click.option("--index", "indices", type=int, multiple=True,
              help="restrict the character support")
@click.option("--cmax", type=int, default=200, show_default=True)
@click.option("--bits", type=int, default=256, show_default=True)
@click.pass_context
def multiplicities(ctx, chartab, m, n_max, indices, cmax, bits):
    """Decompose the order-m graded pieces into irreducibles."""
    idx = list(indices) or None
    payload = {"chartab": chartab, "m": m, "n_max": n_max, "indices": idx,
               "c_max": cmax, "working_bits": bits}
    report = _dispatch(ctx, "multiplicities", payload, ops.run_multiplicities,
                       chartab, m, n_max, idx, cmax, bits)

    def text(rep):
        lines = [f"order {rep['m']} decompositions ({rep['route']})"]
        for row in rep["rows"]:
            parts = [f"{v}*x{i}" for i, v in sorted(
                ((int(i), int(v)) for i, v in row["multiplicities"].items())) if v]
            lines.append(f"  n={row['n']}: {row['dimension']} = " + " + ".join(parts))
        audit = rep["audit"]
        lines.append(f"audit: {'pass' if audit['passed'] else 'FAIL'} "
                     f"({audit['checked']} pieces checked)")
        lines.extend(f"  violation: {v}" for v in audit["violations"])
        return "\n".join(lines)

    def rows(rep):
        support = sorted({int(i) for row in rep["rows"] for i in row["multiplicities"]})
        out = [["n", "dimension"] + [f"m_{i}" for i in support]]
        for row in rep["rows"]:
            out.append([row["n"], row["dimension"]]
                       + [row["multiplicities"].get(str(i), "0") for i in support])
        return out

    _emit(ctx, report, text, rows)


@main.command()
@click.option("--chartab", default=None, help="path to a character table JSON")
@click.option("--m", type=int, default=1, show_default=True)
@click.option("--n", "n_start", type=int, default=1, show_default=True)
@click.option("--n-max", type=int, default=4, show_default=True)
@click.option("--index", "indices", type=int, multiple=True,
              help="irreducibles to report (default 1 2 194)")
@click.option("--cmax", type=int, default=200, show_default=True)
@click.option("--bits", type=int, default=256, show_default=True)
@click.pass_context
def distribution(ctx, chartab, m, n_start, n_max, indices, cmax, bits):
    """Proportions of irreducibles per graded piece, with the limit row."""
    idx = list(indices) or None
    payload = {"chartab": chartab, "m": m, "n_start": n_start, "n_max": n_max,
               "indices": idx, "c_max": cmax, "working_bits": bits}
    report = _dispatch(ctx, "distribution", payload, ops.run_distribution,
                       chartab, m, n_start, n_max, idx, cmax, bits)

    def text(rep):
        idx_s = [str(i) for i in rep["indices"]]
        head = "  ".join(f"{'delta_' + i:>12}" for i in idx_s)
        lines = [f"{'n':>6}  {head}"]
        for row in rep["rows"]:
            cells = []
            for i in idx_s:
                exact = row["exact"][i]
                cells.append(f"{(exact if exact and len(exact) <= 6 else row['delta'][i] or '-'):>12}")
            lines.append(f"{row['n']:>6}  " + "  ".join(cells))
        cells = "  ".join(f"{rep['limit'][i]:>12}" for i in idx_s)
        lines.append(f"{'limit':>6}  {cells}")
        return "\n".join(lines)

    def rows(rep):
        idx_s = [str(i) for i in rep["indices"]]
        out = [["n"] + [f"delta_{i}" for i in idx_s]]
        for row in rep["rows"]:
            out.append([row["n"]] + [row["delta"][i] or "" for i in idx_s])
        out.append(["limit"] + [rep["limit"][i] for i in idx_s])
        return out

    _emit(ctx, report, text, rows)


if __name__ == "__main__":
    main()
