"""Command line interface: ``riesz-psi <command> [flags]``.

Every command writes CSV (to stdout or ``--output``) preceded by '#' manifest
lines. Exit codes: 0 ok, 1 verification failed, 2 usage or domain error,
3 resource/size limit, 4 zeros-file problem.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConvergenceError,
    DomainError,
    PrecisionError,
    RieszPsiError,
    SizeError,
    ZeroFileError,
)

ZEROS_ENV = "RIESZ_PSI_ZEROS"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE, EXIT_DATA = 0, 1, 2, 3, 4
_started = time.perf_counter()


def default_zeros_path() -> Path:
    env = os.environ.get(ZEROS_ENV)
    if env:
        return Path(env)
    return Path(__file__).parent / "data" / "zeros_10k.txt"


def fmt(v) -> str:
    """Shortest round-trip decimal; integral values without a trailing .0."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


class _Writer:
    def __init__(self, args, command, zeros_checksum=None):
        self.out = open(args.output, "w", newline="\n") if args.output else sys.stdout
        self.lines = []
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
        self.manifest = [
            f"command: {command}",
            f"version: riesz_psi {__version__}",
            "parameters: " + json.dumps(params, sort_keys=True, default=str),
            f"zeros-sha256: {zeros_checksum or 'n/a'}",
            "precision: float64 working, exact rationals for Riesz means",
        ]

    def note(self, text):
        self.manifest.append(text)

    def header(self, *cols):
        self.lines.append(",".join(cols))

    def row(self, *cells):
        self.lines.append(",".join(c if isinstance(c, str) else fmt(c) for c in cells))

    def close(self):
        wall = time.perf_counter() - _started
        for m in self.manifest:
            self.out.write(f"# {m}\n")
        self.out.write(f"# wall-time-s: {wall:.3f}\n")
        for line in self.lines:
            self.out.write(line + "\n")
        self.out.flush()
        if self.out is not sys.stdout:
            self.out.close()


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _parse_x(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    return q


def _grid(args) -> list:
    if args.x:
        return list(args.x)
    if args.x_max is None:
        raise DomainError("give --x values or --x-max")
    if getattr(args, "log_points", None):
        lo = float(args.x_min)
        return [float(v) for v in np.logspace(math.log10(lo), math.log10(float(args.x_max)), args.log_points)]
    step = args.step
    pts, v = [], Fraction(args.x_min)
    while v <= args.x_max:
        pts.append(v)
        v += step
    return pts


def _load_tabulated(args, count=None):
    from .zeros_db import load_zeros, tabulate_zeta_prime

    path = Path(args.zeros) if args.zeros else default_zeros_path()
    table = load_zeros(path)
    if count is not None:
        count = min(count, len(table))
        table = table.head(count)
    return tabulate_zeta_prime(table)


# ------------------------------------------------------------------ commands


def cmd_riesz(args) -> int:
    from .arith import build_arith_table, riesz_means

    xs = _grid(args)
    xs = [Fraction(x) if not isinstance(x, Fraction) else x for x in xs]
    for x in xs:
        if x <= 0:
            raise DomainError(f"x must be positive, got {x}")
    top = max(math.floor(x) for x in xs)
    limit = args.table_limit if args.table_limit else max(top, 1)
    if top > limit:
        raise SizeError(f"x = {top} needs an arithmetic table of size {top}; --table-limit is {limit}")
    table = build_arith_table(limit)
    exact = riesz_means(args.k, xs, table)
    w = _Writer(args, "riesz")
    w.header("x", "S_k_exact_num", "S_k_exact_den", "S_k_float")
    for x, s in zip(xs, exact):
        xcell = str(x.numerator) if x.denominator == 1 else fmt(float(x))
        w.row(xcell, str(s.numerator), str(s.denominator), fmt(float(s)))
    w.close()
    return EXIT_OK


def cmd_verify_lemma1(args) -> int:
    from .arith import build_arith_table
    from .euler_products import EulerProductSpec, verify_factorization

    s = args.s
    if s.real <= 1:
        raise DomainError(f"the factorization check needs Re s > 1, got {s}")
    table = build_arith_table(args.N)
    ok_all = True
    w = _Writer(args, "verify-lemma1")
    w.header("s_re", "s_im", "n", "N", "P", "series_re", "series_im", "series_err",
             "product_re", "product_im", "product_err", "difference", "bound", "tolerance", "passed")
    for n in args.n:
        spec = EulerProductSpec(n, prime_cutoff=args.P, target_tolerance=args.tolerance)
        rep = verify_factorization(n, s, args.N, spec, table, tolerance=args.tolerance)
        ok_all = ok_all and rep.passed
        d, p = rep.dirichlet, rep.product_side
        w.row(s.real, s.imag, n, args.N, args.P, d.value.real, d.value.imag, d.err,
              p.value.real, p.value.imag, p.err, rep.difference, rep.bound, args.tolerance, rep.passed)
    w.close()
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_explicit(args) -> int:
    from .arith import build_arith_table
    from .explicit_formula import FormulaConfig, compare

    xs = [float(x) for x in _grid(args)]
    if args.max_zeros < 0:
        raise DomainError("--max-zeros must be >= 0")
    # one extra zero fixes the midpoint height above the last one used
    table = _load_tabulated(args, args.max_zeros + 1)
    count = min(args.max_zeros, len(table))
    cfg = FormulaConfig(args.k, table, tuple(xs), n=args.n, prime_cutoff=args.P, zero_count=count)
    arith = build_arith_table(max(1, int(max(xs))))
    res = compare(cfg, arith, doubling=False)
    w = _Writer(args, "explicit", table.checksum)
    w.note(f"n: {cfg.n}")
    for note in res.summary.notes:
        w.note(note)
    w.header("x", "S_k", "main", "E_k", "Y", "x^-1/2*Y", "discrepancy", "T_used", "zero_count")
    for smp in res.samples:
        w.row(smp.x, smp.s_float, smp.main, smp.residual, smp.zero_sum, smp.scaled_zero_sum,
              smp.discrepancy, smp.T, smp.zero_count)
    w.close()
    print(f"fraction |d| < |E_k|: {res.summary.fraction_improved:.3f}; "
          f"max |d| sqrt(x): {res.summary.max_scaled_discrepancy:.4g}", file=sys.stderr)
    return EXIT_OK


def cmd_jlambda(args) -> int:
    from .zeros_db import j_lambda_curve, loglog_slope

    grid = list(args.T) if args.T else list(np.arange(args.T_step, args.T_max + args.T_step / 2, args.T_step))
    need_zp = args.lam != 0
    from .zeros_db import load_zeros, tabulate_zeta_prime

    path = Path(args.zeros) if args.zeros else default_zeros_path()
    table = load_zeros(path)
    if need_zp:
        cover = table.count_upto(max(grid))
        table = tabulate_zeta_prime(table.head(min(len(table), cover + 1)))
    values = j_lambda_curve(table, args.lam, grid)
    counts = np.searchsorted(table.ordinates, grid, side="right")
    w = _Writer(args, "jlambda", table.checksum)
    w.header("T", "J", "zero_count")
    for T, J, c in zip(grid, values, counts):
        w.row(float(T), float(J), int(c))
    w.close()
    if len(grid) >= 3 and np.sum(values > 0) >= 3:
        fit = loglog_slope(grid, values)
        print(f"log-log slope of J against T: {fit.slope:.4f} +- {fit.stderr:.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_exponent_fit(args) -> int:
    from .arith import build_arith_table
    from .explicit_formula import exponent_fit

    xs = np.logspace(math.log10(args.x_min), math.log10(args.x_max), args.points)
    table = build_arith_table(int(xs[-1]))
    fit = exponent_fit(args.k, xs, table, args.P, confidence=args.confidence, min_decades=args.min_decades)
    w = _Writer(args, "exponent-fit")
    w.header("k", "slope", "intercept", "stderr", "lower", "upper", "confidence", "points", "excluded", "decades")
    w.row(fit.k, fit.slope, fit.intercept, fit.stderr, fit.lower, fit.upper, fit.confidence,
          fit.points, fit.excluded, fit.decades)
    w.close()
    return EXIT_OK


def cmd_tabulate(args) -> int:
    table = _load_tabulated(args, args.count)
    w = _Writer(args, "tabulate", table.checksum)
    w.header("gamma", "re_zeta_prime", "im_zeta_prime", "err")
    for g, z, e in zip(table.ordinates, table.zeta_prime, table.zeta_prime_err):
        w.row(float(g), z.real, z.imag, float(e))
    w.close()
    return EXIT_OK


def cmd_tail_diagnostic(args) -> int:
    from .zeros_db import theorem2_tail_diagnostic

    table = _load_tabulated(args, args.count)
    rep = theorem2_tail_diagnostic(table, args.k, args.epsilon, step=args.step)
    w = _Writer(args, "tail-diagnostic", table.checksum)
    w.note(f"head increment: {fmt(rep.head_increment)}; tail increment: {fmt(rep.tail_increment)}")
    w.header("T", "partial_sum", "increment")
    for T, p, d in zip(rep.grid, rep.partial_sums, rep.increments):
        w.row(float(T), float(p), float(d))
    w.close()
    print(f"increment ratio head/tail: {rep.decay_ratio:.4g}; decaying: {rep.decaying}", file=sys.stderr)
    return EXIT_OK if rep.decaying else EXIT_FAIL


def cmd_h_growth(args) -> int:
    from .euler_products import lemma22_bound_scan

    scan = lemma22_bound_scan(args.delta, args.t, n=args.n, prime_cutoff=args.P)
    w = _Writer(args, "h-growth")
    w.note(f"n: {scan.n}; C_hat: {fmt(scan.c_hat)}")
    w.header("t", "abs_h", "rel_err")
    for t, m, r in zip(scan.t_samples, scan.moduli, scan.rel_errors):
        w.row(t, m, r)
    w.close()
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _add_grid(p, rational):
    conv = _parse_x if rational else float
    p.add_argument("--x", type=conv, action="append", help="sample point (repeatable)")
    p.add_argument("--x-min", type=conv, default=conv("1"))
    p.add_argument("--x-max", type=conv)
    if rational:
        p.add_argument("--step", type=_parse_x, default=Fraction(1))
    else:
        p.add_argument("--log-points", type=int, default=40, help="log-spaced grid size between --x-min and --x-max")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riesz-psi", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"riesz_psi {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def new(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--output", "-o", help="CSV file (default stdout)")
        p.set_defaults(func=func)
        return p

    p = new("riesz", cmd_riesz, "exact Riesz means S_k(x) of n/psi(n)")
    p.add_argument("--k", type=int, required=True)
    _add_grid(p, rational=True)
    p.add_argument("--table-limit", type=int, help="arithmetic table size (default: floor of max x)")

    p = new("verify-lemma1", cmd_verify_lemma1, "check the Euler-product factorization of F(s)")
    p.add_argument("--s", type=_parse_complex, required=True)
    p.add_argument("--n", type=int, action="append", required=True, help="repeatable")
    p.add_argument("--N", type=int, default=10**6, help="Dirichlet series length")
    p.add_argument("--P", type=int, default=10**6, help="prime cutoff")
    p.add_argument("--tolerance", type=float, default=1e-5)

    p = new("explicit", cmd_explicit, "residual E_k(x) against the zero sum")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int)
    _add_grid(p, rational=False)
    p.add_argument("--zeros", help=f"zeros file (default ${ZEROS_ENV} or bundled table)")
    p.add_argument("--max-zeros", type=int, default=100)
    p.add_argument("--P", type=int, default=10**5)

    p = new("jlambda", cmd_jlambda, "discrete moments J_{-lambda}(T)")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--T", type=float, action="append")
    p.add_argument("--T-max", type=float, default=1000.0)
    p.add_argument("--T-step", type=float, default=50.0)
    p.add_argument("--zeros")

    p = new("exponent-fit", cmd_exponent_fit, "slope of log|E_k| against log x")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x-min", type=float, default=1e2)
    p.add_argument("--x-max", type=float, default=1e6)
    p.add_argument("--points", type=int, default=60)
    p.add_argument("--P", type=int, default=10**5)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--min-decades", type=float, default=2.0)

    p = new("tabulate", cmd_tabulate, "refine zeros and tabulate zeta' (cached)")
    p.add_argument("--zeros")
    p.add_argument("--count", type=int)

    p = new("tail-diagnostic", cmd_tail_diagnostic, "tail diagnostic for sum gamma^-(k-1/2)+eps / |zeta'(rho)|")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--step", type=float, default=50.0)
    p.add_argument("--count", type=int)
    p.add_argument("--zeros")

    p = new("h-growth", cmd_h_growth, "growth of h_n near Re s = -1")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=float, action="append", required=True)
    p.add_argument("--P", type=int, default=10**6)
    return ap


def main(argv=None) -> int:
    global _started
    _started = time.perf_counter()
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        return args.func(args)
    except ZeroFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SizeError, PrecisionError, ConvergenceError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except RieszPsiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
