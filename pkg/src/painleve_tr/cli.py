"""Command-line interface: ``painleve-tr curve | tr | tau | detform | verify``.

Exact rationals cross the command line as ``p/q`` strings; decimal or float
input is rejected.  Every output carries the descriptor hash of the curve it
was computed on.  Errors are printed as JSON ``{"error": {"kind", "reason"}}``
with exit code 2 (bad input) or 3 (unsupported label/mode combination);
``verify`` exits 1 when a check fails.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import __version__
from . import detform as df
from . import verify as vf
from .algebra import numeric
from .algebra import parse_rational as exact_rational
from .algebra.jet import Jet
from .curves import (CurveError, Label, Unsupported, build_curve, check_curve, pinned_bases,
                     singular_time_test)
from .painleve import _coeff_str, formal_solution, sigma_series, tau_logderiv_series
from .toprec import TableCache, TopologicalRecursion, f0_closed_form, f1_closed_form

CACHE_ENV = "PAINLEVE_TR_CACHE"
EXIT_FAIL, EXIT_INPUT, EXIT_CAPABILITY = 1, 2, 3

_PARAM_FLAGS = ("theta", "theta0", "theta1", "thetat", "thetainf")
# labels that run only at exact numeric base points
NUMERIC_ONLY = (Label.PV, Label.PVI)


class CliError(Exception):
    def __init__(self, kind, reason, code):
        super().__init__(reason)
        self.kind, self.reason, self.code = kind, reason, code


def parse_rational(text):
    """Validate an exact rational string; floats and decimals are refused."""
    try:
        exact_rational(str(text))
    except (ValueError, ZeroDivisionError):
        raise CliError("input", f"{text!r} is not an exact rational 'p' or 'p/q'", EXIT_INPUT) from None
    return str(text).strip()


# ---------------------------------------------------------------------------
# base-point options


def base_options(fn):
    opts = [
        click.option("--label", "-l", required=True, help="PI, PII, PIII, PIV, PV or PVI."),
        click.option("--mode", type=click.Choice(["symbolic", "numeric"]), default=None,
                     help="symbolic: q0 (and t for PIV) stay symbols. Default: numeric if --q0 is given."),
        click.option("--q0", default=None, help="Base value of q0 (PI-PIV, PVI)."),
        click.option("--t", "t", default=None, help="Base time (PIV, PVI; optional consistency check otherwise)."),
        click.option("--Q0", "Q0", default=None, help="Double zero of the PV curve."),
        click.option("--param", "-p", multiple=True, help="NAME=p/q, repeatable."),
    ] + [click.option(f"--{n}", n, default=None, help=f"Value of {n}.") for n in _PARAM_FLAGS]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def base_kwargs(label, mode, q0, t, Q0, param, **thetas):
    """Keyword data for build_curve/formal_solution, with the capability matrix enforced."""
    try:
        L = Label.parse(label)
    except (ValueError, KeyError):
        raise CliError("input", f"unknown label {label!r}", EXIT_INPUT) from None
    params = {}
    for item in param:
        if "=" not in item:
            raise CliError("input", f"--param expects NAME=p/q, got {item!r}", EXIT_INPUT)
        k, v = item.split("=", 1)
        params[k.strip()] = parse_rational(v)
    for k, v in thetas.items():
        if v is not None:
            params[k] = parse_rational(v)
    if mode is None:
        mode = "numeric" if (q0 is not None or Q0 is not None or L in NUMERIC_ONLY) else "symbolic"
    if mode == "symbolic" and L in NUMERIC_ONLY:
        raise CliError("capability", f"{L.value} supports numeric mode only: t is not a rational "
                       "function of the base data, so symbolic t-derivatives are unavailable", EXIT_CAPABILITY)
    kw = {"params": params}
    if mode == "symbolic":
        if q0 is not None or Q0 is not None:
            raise CliError("input", "symbolic mode takes no --q0/--Q0", EXIT_INPUT)
        if L is not Label.PIV:
            kw["q0"] = "symbolic"
        if t is not None:
            raise CliError("input", "symbolic mode takes no --t", EXIT_INPUT)
    else:
        if L is Label.PV:
            if Q0 is None:
                raise CliError("input", "PV needs --Q0", EXIT_INPUT)
            kw["Q0"] = parse_rational(Q0)
        elif q0 is None:
            raise CliError("input", "numeric mode needs --q0", EXIT_INPUT)
        else:
            kw["q0"] = parse_rational(q0)
        if L in (Label.PIV, Label.PVI) and t is None:
            raise CliError("input", f"{L.value} in numeric mode needs --t", EXIT_INPUT)
        if t is not None:
            kw["t"] = parse_rational(t)
    return L, kw


def _curve(L, kw):
    try:
        return build_curve(L, **kw)
    except Unsupported as e:
        raise CliError("capability", str(e), EXIT_CAPABILITY) from None
    except (CurveError, ValueError, KeyError, TypeError) as e:
        raise CliError("input", f"{type(e).__name__}: {e}", EXIT_INPUT) from None


# ---------------------------------------------------------------------------
# output


def _emit(ctx, doc, rows=None, pretty=None):
    """Write ``doc`` as JSON, ``rows`` as CSV, or ``pretty`` lines, per --format."""
    fmt = ctx.obj["format"]
    if fmt == "json":
        click.echo(json.dumps(doc, sort_keys=True, indent=1))
    elif fmt == "csv":
        if rows is None:
            raise CliError("input", "this command has no tabular output; use --format json", EXIT_INPUT)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerows(rows)
        click.echo(buf.getvalue(), nl=False)
    else:
        click.echo("\n".join(pretty if pretty is not None else _pretty_lines(doc)))


def _pretty_lines(doc, indent=""):
    out = []
    for k in sorted(doc):
        v = doc[k]
        if isinstance(v, dict):
            out.append(f"{indent}{k}:")
            out.extend(_pretty_lines(v, indent + "  "))
        elif isinstance(v, list):
            out.append(f"{indent}{k}:")
            for item in v:
                if isinstance(item, dict):
                    out.extend(_pretty_lines(item, indent + "  - "))
                else:
                    out.append(f"{indent}  - {item}")
        else:
            out.append(f"{indent}{k}: {v}")
    return out


def _coefficient(c, jets=False):
    """Value at the base point; with ``jets`` the whole Taylor jet in t - t_base."""
    if jets:
        return _coeff_str(c)
    return str(c.c[0]) if isinstance(c, Jet) else str(c)


def _run_guarded(fn):
    """Turn CliError into a JSON error document and the matching exit code."""
    try:
        return fn()
    except CliError as e:
        click.echo(json.dumps({"error": {"kind": e.kind, "reason": e.reason}}, sort_keys=True))
        sys.exit(e.code)


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.version_option(__version__)
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "pretty"]), default="json")
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None,
              help=f"Cache root (default ${CACHE_ENV}, else ~/.cache/painleve_tr).")
@click.option("--no-cache", is_flag=True, help="Compute everything afresh and write nothing.")
@click.option("--prec", type=int, default=256, show_default=True,
              help="Binary precision for numeric log comparisons.")
@click.pass_context
def main(ctx, fmt, cache_dir, no_cache, prec):
    """Spectral curves, topological recursion and tau functions for PI-PVI."""
    numeric.set_precision(prec)
    root = None
    if not no_cache:
        root = Path(cache_dir or os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "painleve_tr")
    ctx.obj = {"format": fmt, "cache": TableCache(root) if root else None}


@main.command()
@base_options
@click.pass_context
def curve(ctx, label, mode, q0, t, Q0, param, **thetas):
    """Curve descriptor, parametrization and genericity report."""
    def run():
        L, kw = base_kwargs(label, mode, q0, t, Q0, param, **thetas)
        c = _curve(L, kw)
        sing, w = singular_time_test(L, c.params, c.base.q0, c.base.t)
        doc = c.to_json()
        doc["genericity"] = {**{k: bool(v) for k, v in check_curve(c).items()},
                             "singular time": sing, "singular-time polynomial": str(w)}
        rows = [("field", "value")] + [(k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else str(v))
                                       for k, v in sorted(doc.items())]
        _emit(ctx, doc, rows)
    _run_guarded(run)


@main.command()
@base_options
@click.option("--gmax", type=click.IntRange(0, 8), default=2, show_default=True)
@click.option("--nmax", type=click.IntRange(1, 4), default=1, show_default=True,
              help="Largest n of the omega_n^(g) tables.")
@click.pass_context
def tr(ctx, label, mode, q0, t, Q0, param, gmax, nmax, **thetas):
    """omega_n^(g) tables and F^(g) for g <= gmax."""
    def run():
        L, kw = base_kwargs(label, mode, q0, t, Q0, param, **thetas)
        c = _curve(L, kw)
        e = TopologicalRecursion(c, cache=ctx.obj["cache"])
        F = {}
        if L not in NUMERIC_ONLY:
            F["0"] = str(f0_closed_form(c))
            if gmax >= 1:
                F["1"] = str(f1_closed_form(c))
        for g in range(2, gmax + 1):
            F[str(g)] = str(e.F(g))
        omega = {}
        for g in range(0, gmax + 1):
            for n in range(1, nmax + 1):
                if 2 * g - 2 + n > 0:
                    omega[f"{g},{n}"] = str(e.get(g, n).as_rational(c))
        doc = {"hash": c.descriptor_hash(), "label": L.value, "descriptor": c.descriptor(),
               "F": F, "omega": omega}
        rows = [("hash", "kind", "g", "n", "value")]
        rows += [(doc["hash"], "F", g, "", v) for g, v in F.items()]
        rows += [(doc["hash"], "omega", *k.split(","), v) for k, v in omega.items()]
        _emit(ctx, doc, rows)
    _run_guarded(run)


@main.command()
@base_options
@click.option("--order", type=click.IntRange(0, 16), default=6, show_default=True, help="Highest hbar order.")
@click.option("--jets", is_flag=True, help="Numeric mode: print Taylor jets in t - t_base, not base values.")
@click.pass_context
def tau(ctx, label, mode, q0, t, Q0, param, order, jets, **thetas):
    """Formal solution (q, p), sigma and d ln tau/dt as hbar-series."""
    def run():
        L, kw = base_kwargs(label, mode, q0, t, Q0, param, **thetas)
        c = _curve(L, kw)
        sol = formal_solution(L, order=order, **kw)
        series = {"q": sol.q, "p": sol.p, "sigma": sigma_series(sol), "dlogtau/dt": tau_logderiv_series(sol)}
        doc = {"hash": c.descriptor_hash(), "label": L.value, "mode": sol.D.mode, "truncation": order,
               "series": {k: {"parity": s.parity, "coefficients": {str(i): _coefficient(v, jets) for i, v in s.items() if i <= order}}
                          for k, s in series.items()}}
        rows = [("hash", "series", "hbar_order", "coefficient")]
        for name, s in series.items():
            rows += [(doc["hash"], name, k, _coefficient(v, jets)) for k, v in s.items() if k <= order]
        _emit(ctx, doc, rows)
    _run_guarded(run)


@main.command()
@base_options
@click.option("--order", type=click.IntRange(0, 8), default=3, show_default=True, help="Highest hbar order of W_n.")
@click.option("--nmax", type=click.IntRange(1, 3), default=2, show_default=True)
@click.option("--tt/--no-tt", default=True, help="Include the topological-type report.")
@click.pass_context
def detform(ctx, label, mode, q0, t, Q0, param, order, nmax, tt, **thetas):
    """Determinantal correlators W_n (as dz-forms) and the topological-type report."""
    def run():
        L, kw = base_kwargs(label, mode, q0, t, Q0, param, **thetas)
        c = _curve(L, kw)
        sol = formal_solution(L, order=order + 3, **kw)
        tower = df.m_tower(df.build_lax(sol), order + 1, c)
        W = {}
        rows = [("hash", "n", "hbar_order", "coefficient")]
        for n in range(1, nmax + 1):
            Wn = df.correlators(tower, n, order)
            W[str(n)] = {str(k): str(Wn.form(k)) for k, _ in Wn.items() if k <= order}
            rows += [(c.descriptor_hash(), n, k, v) for k, v in W[str(n)].items()]
        doc = {"hash": c.descriptor_hash(), "label": L.value, "W": W}
        if tt:
            doc["tt"] = [{**r, "witness": None if r["witness"] is None else str(r["witness"])}
                         for r in df.tt_report(tower, nmax=nmax, order=order)]
        _emit(ctx, doc, rows)
    _run_guarded(run)


def _suite_job(args):
    suite, label, kw = args
    return vf.run_suite(suite, label, kw)


@main.command()
@click.option("--suite", type=click.Choice(vf.SUITES), required=True)
@click.option("--label", "-l", default=None, help="Restrict to one label (default: every applicable label).")
@click.option("--jobs", "-j", type=click.IntRange(1, 64), default=1, show_default=True,
              help="Worker processes; reports are assembled in a fixed order.")
@click.option("--timestamp", default=None, help="Fixed timestamp for reproducible reports.")
@click.option("--runtimes/--no-runtimes", default=True,
              help="Record per-check runtimes (off: reports are byte-identical across runs).")
@click.pass_context
def verify(ctx, suite, label, jobs, timestamp, runtimes):
    """Run a verification suite at the pinned base points; exit 1 if any check fails."""
    def run():
        if suite == "golden":
            reports = [vf.golden_suite()]
        else:
            labels = [Label.parse(label)] if label else list(Label)
            if suite in ("tt", "cross"):
                labels = [L for L in labels if L in (Label.PI, Label.PII)] or labels
            jobs_list = [(suite, L, kw) for L in labels for kw in _suite_bases(suite, L)]
            if jobs > 1:
                with ProcessPoolExecutor(jobs) as pool:
                    reports = list(pool.map(_suite_job, jobs_list))
            else:
                reports = [_suite_job(j) for j in jobs_list]
        docs = [r.to_dict(timestamp, runtimes) for r in reports]
        ok = all(r.ok for r in reports)
        doc = {"suite": suite, "ok": ok, "reports": docs}
        rows = [("suite", "label", "base", "check", "status", "residual")]
        pretty = []
        for r in reports:
            base = json.dumps(r.base, sort_keys=True) if r.base else ""
            for chk in r.checks:
                rows.append((r.suite, r.label or "", base, chk.name, chk.status, chk.residual or ""))
                pretty.append(f"[{chk.status:>8}] {r.label or '-':4} {chk.name}")
            pretty.append(f"  {r.suite} {r.label or ''} {base}: {r.counts()}")
        _emit(ctx, doc, rows, pretty)
        if not ok:
            sys.exit(EXIT_FAIL)
    _run_guarded(run)


def _suite_bases(suite, L):
    """Pinned base points used by each suite."""
    if suite in ("tt", "cross"):
        return pinned_bases(L, symbolic=True)[:1] or pinned_bases(L)[:1]
    if suite == "tau":
        return pinned_bases(L, symbolic=True) or pinned_bases(L)[:1]
    return pinned_bases(L)


if __name__ == "__main__":  # pragma: no cover
    main()
