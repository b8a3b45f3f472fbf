"""Command-line front end: ``divorder <subcommand> [options]``.

Every subcommand writes CSV (default) or JSON shaped as
``{"rows": [...], "meta": {...}}``.  Exit status is 0 on success, 2 on bad
arguments and 3 when ``selftest`` has a failing check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__, acceptance, arith, constants, exppairs, lab, sieve
from .constants import mp

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 2, 3


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    """Locale-independent text for one cell."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, constants.HighPrecision):
        return mp.nstr(v.value, 20, min_fixed=-1, max_fixed=40)
    if isinstance(v, type(mp.mpf(0))):
        return mp.nstr(v, 20, min_fixed=-1, max_fixed=40)
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return _fmt(v)


def emit(args, header, rows, meta=None, default_format="csv"):
    fmt = args.format or default_format
    if fmt == "json":
        payload = {
            "rows": [dict(zip(header, (_jsonable(v) for v in row))) for row in rows],
            "meta": _jsonable(meta or {}),
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_fmt(v) for v in row] for row in rows)
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# Subcommands


def cmd_eval(args):
    n = args.n
    if args.kind == "tau_r":
        value = arith.tau_r(n, args.r)
    elif args.kind == "sigma_r":
        value = arith.sigma_r(n, args.r)
    elif args.kind == "tau_ab":
        value = arith.tau_ab(args.a, args.b, n)
    else:
        value = arith.mu_k(n, args.k)
    if args.format == "json":
        emit(args, ["n", "value"], [(n, value)], {"kind": args.kind})
    else:
        _write_plain(args, f"{value}\n")


def _write_plain(args, text):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_divisors(args):
    divs = arith.divisors_of_order(args.n, args.r)
    emit(args, ["divisor"], [(d,) for d in divs], {"n": args.n, "r": args.r})


def _spec(args) -> sieve.SummatorySpec:
    return sieve.SummatorySpec(args.kind, r=args.r, a=args.a, b=args.b, k=args.k)


def _grid(args, limit):
    if args.x:
        return sorted(set(args.x))
    return sieve.geometric_grid(limit, args.ratio, args.start)


def cmd_sum(args):
    spec = _spec(args)
    series = sieve.summatory(spec, args.limit, _grid(args, args.limit), segment_size=args.segment, workers=args.threads)
    emit(args, ["x", "sum"], series.rows, {"summand": spec.label, "limit": args.limit})


def _residual_params(args):
    if args.kind in ("tau_r", "sigma_r"):
        return args.r
    if args.kind == "T_ab":
        return (args.a, args.b)
    return None


def cmd_residual(args):
    params = _residual_params(args)
    scaled = args.kind == "sigma_r" and not args.sparse
    series = lab.residual_series(
        args.kind,
        params,
        args.limit,
        _grid(args, args.limit),
        tol=args.tol,
        dense=not args.sparse,
        scale=acceptance.x_log53 if scaled else None,
        segment_size=args.segment,
        workers=args.threads,
    )
    meta = {"kind": args.kind, "params": params, "limit": args.limit, "flagged": len(series.flagged)}
    if series.envelope:
        meta["sign_changes"] = series.sign_changes
        try:
            fit = lab.fit_slope(series, args.fit_from, args.limit)
            meta["slope"] = fit.slope
            meta["fit_rms"] = fit.fit_rms
            meta["decade_maxima"] = [list(w) for w in fit.windows]
        except ValueError as exc:
            meta["slope"] = None
            meta["slope_note"] = str(exc)
    if scaled:
        try:
            maxima, ratio = acceptance.scaled_spread(series, 10**3, args.limit)
            meta["scaled_decade_maxima"] = maxima
            meta["scaled_max_over_median"] = ratio
        except ValueError:
            pass
    rows = [(r.x, r.exact_sum, r.main, r.residual, r.budget_ok) for r in series.rows]
    emit(args, ["x", "sum", "main", "residual", "budget_ok"], rows, meta)


def cmd_constants(args):
    summary = constants.constants_summary(args.r, args.tol)
    rows = []
    for name, v in summary.items():
        if isinstance(v, dict):
            rows.append((name, v["value"], v["err"]))
        else:
            rows.append((name, v, ""))
    emit(args, ["name", "value", "err"], rows, {"r": args.r, "tol": args.tol}, default_format="json")


def _pair_row(word):
    p = exppairs.evaluate_word(word)
    return (word, p.k, p.l, f"{float(p.k):.12f}", f"{float(p.l):.12f}", p.eps, exppairs.validate_pair(p))


def cmd_exppair(args):
    if args.action == "eval":
        if not args.word:
            raise UsageError("exppair eval needs a word")
        rows = [_pair_row(args.word)]
    else:
        rows = [(b,) + _pair_row(w) for b, w in constants.table_words().items()]
    header = ["word", "k", "l", "k_decimal", "l_decimal", "eps", "valid"]
    emit(args, header if args.action == "eval" else ["b"] + header, rows)


def cmd_champions(args):
    rows = lab.champion_probes(args.kind, args.r, args.y)
    emit(args, ["y", "value", "limit"], rows, {"kind": args.kind, "r": args.r})


def cmd_distribution(args):
    cdf = lab.distribution_cdf(args.q, args.r, args.N, segment_size=args.segment, workers=args.threads)
    lams, S = cdf.grid(args.points)
    meta = {"q": args.q, "r": args.r, "N": args.N, "atom_at_zero": cdf.atom_at_zero, "max_jump": cdf.max_jump}
    emit(args, ["lambda", "S"], list(zip(lams.tolist(), S.tolist())), meta)


def cmd_mertens(args):
    if args.x:
        rows = [(x, sieve.mertens_k(args.k, x)) for x in args.x]
    else:
        xs = sieve.geometric_grid(args.limit, args.ratio, args.start)
        table = sieve.mertens_table(args.k, args.limit)
        rows = [(x, int(table[x])) for x in xs]
    emit(args, ["x", "M_k"], rows, {"k": args.k})


def cmd_petermann(args):
    xs = args.x or acceptance.PETERMANN_GRID
    if args.r < 1:
        raise UsageError("petermann needs --r >= 1")
    rows = lab.petermann_scan(args.r, xs)
    emit(args, ["x", "sum", "main", "residual", "scaled"], rows, {"r": args.r})


def cmd_selftest(args):
    scale = acceptance.FULL if args.full else acceptance.CI
    results = acceptance.run_all(scale, report=lambda line: print(line, file=sys.stderr))
    rows = [(r.number, r.name, r.passed, r.detail, round(r.seconds, 2)) for r in results]
    emit(args, ["criterion", "name", "passed", "detail", "seconds"], rows, {"scale": scale.name})
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default csv)")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="sieve worker threads")
    common.add_argument("--segment", type=int, default=sieve.DEFAULT_SEGMENT, help="sieve segment length")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--ratio", type=float, default=sieve.DEFAULT_RATIO, help="geometric checkpoint ratio")
    grid.add_argument("--start", type=int, default=sieve.DEFAULT_START, help="first checkpoint")
    grid.add_argument("--x", type=int, nargs="+", help="explicit checkpoints instead of a grid")

    order = argparse.ArgumentParser(add_help=False)
    order.add_argument("--r", type=int, default=1)
    order.add_argument("--a", type=int, default=1)
    order.add_argument("--b", type=int, default=2)
    order.add_argument("--k", type=int, default=1)

    p = argparse.ArgumentParser(prog="divorder", description="Divisors of order r: exact tables and asymptotic probes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common, order], help="one value f(n)")
    s.add_argument("kind", choices=("tau_r", "sigma_r", "tau_ab", "mu_k"))
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("divisors", parents=[common], help="divisors of order r of n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, default=1)
    s.set_defaults(func=cmd_divisors)

    s = sub.add_parser("sum", parents=[common, order, grid], help="exact partial sums on a checkpoint grid")
    s.add_argument("kind", choices=sieve.KINDS)
    s.add_argument("--limit", type=int, default=10**6)
    s.set_defaults(func=cmd_sum)

    s = sub.add_parser("residual", parents=[common, order, grid], help="partial sums minus main terms")
    s.add_argument("kind", choices=lab.RESIDUAL_KINDS)
    s.add_argument("--limit", type=int, default=10**8)
    s.add_argument("--tol", type=float, default=1e-10, help="Euler-product tail tolerance")
    s.add_argument("--fit-from", type=int, default=10**4, help="lower end of the slope fit")
    s.add_argument("--sparse", action="store_true", help="skip the dense envelope sweep")
    s.set_defaults(func=cmd_residual)

    s = sub.add_parser("constants", parents=[common], help="main-term constants with error bounds (JSON by default)")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("exppair", parents=[common], help="exponent-pair words")
    s.add_argument("action", choices=("eval", "table"))
    s.add_argument("word", nargs="?")
    s.set_defaults(func=cmd_exppair)

    s = sub.add_parser("champions", parents=[common], help="limsup probes along primorial champions")
    s.add_argument("--kind", choices=("tau_limsup", "sigma_limsup"), default="tau_limsup")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--y", type=int, nargs="+", default=[10**5, 10**6, 10**7, 10**8])
    s.set_defaults(func=cmd_champions)

    s = sub.add_parser("distribution", parents=[common], help="empirical CDF of sigma_r(n^q)/n^q")
    s.add_argument("--q", type=int, default=1)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--N", type=int, default=10**7)
    s.add_argument("--points", type=int, default=201)
    s.set_defaults(func=cmd_distribution)

    s = sub.add_parser("mertens", parents=[common, grid], help="M_k(x)")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--limit", type=int, default=10**6)
    s.set_defaults(func=cmd_mertens)

    s = sub.add_parser("petermann", parents=[common], help="weighted lattice sum vs zeta(r+2)x^2/2")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--x", type=int, nargs="+")
    s.set_defaults(func=cmd_petermann)

    s = sub.add_parser("selftest", parents=[common], help="acceptance checks (reduced scale unless --full)")
    s.add_argument("--full", action="store_true", help="run at the full 10^8 scale")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if getattr(args, "threads", 1) < 1:
        parser.print_usage(sys.stderr)
        print("divorder: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        code = args.func(args)
    except (UsageError, ValueError, OverflowError, exppairs.WordSyntaxError) as exc:
        parser.print_usage(sys.stderr)
        print(f"divorder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
