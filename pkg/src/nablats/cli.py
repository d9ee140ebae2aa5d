"""Command-line entry point: ``nablats <command> ...`` prints one JSON document.

Exit codes: 0 success, 1 domain or precondition error, 2 parse error,
3 inconclusive search or no witness, 4 property-suite failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import chain, extrema, series, suites
from .errors import DomainError, InconclusiveSearch, NablaError, NotDifferentiable, ParseError
from .fracdiff import dense_tolerance, nabla, parse_order
from .funcspec import compose, parse_function, product
from .timescale import parse_timescale

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE, EXIT_INCONCLUSIVE, EXIT_SUITE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _real(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"expected a decimal literal, got {text!r}") from None


def _window(text: Optional[str]) -> Optional[tuple[float, float]]:
    if text is None:
        return None
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ParseError(f"window must be <lo>:<hi>, got {text!r}")
    return _real(lo), _real(hi)


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    return x


def _exact(x) -> Optional[str]:
    return str(x) if isinstance(x, Fraction) else None


# -- commands ----------------------------------------------------------------------


def cmd_deriv(a):
    ts, f, alpha = parse_timescale(a.ts), parse_function(a.fn), parse_order(a.alpha)
    res = nabla(ts, f, _real(a.at), alpha)
    return res.as_dict(), {"kind": alpha.kind}


def cmd_witness(a):
    ts, f, alpha = parse_timescale(a.ts), parse_function(a.fn), parse_order(a.alpha)
    lo, hi = _real(a.a), _real(a.b)
    if a.command == "rolle":
        w = extrema.rolle_witnesses(ts, f, lo, hi, alpha)
    elif a.command == "mvt":
        w = extrema.mvt_witnesses(ts, f, lo, hi, alpha)
    else:
        if a.gn is None:
            raise ParseError("gmvt needs --gn")
        w = extrema.gmvt_witnesses(ts, f, parse_function(a.gn), lo, hi, alpha)
    return w.as_dict(), {"certified": w.certified()}


def cmd_chain(a):
    ts, alpha = parse_timescale(a.ts), parse_order(a.alpha)
    f = parse_function(a.fn)
    t = _real(a.at)
    window = _window(a.window)
    if a.mode == "inverse":
        return {"value": chain.inverse_nabla(ts, f, t, alpha, window)}, {}
    if a.gn is None:
        raise ParseError(f"chain --mode {a.mode} needs --gn")
    g = parse_function(a.gn)
    if a.mode == "integral":
        value = chain.chain_integral(ts, f, g, t, alpha)
        direct = nabla(ts, compose(f, g), t, alpha).value
        naive = chain.naive_chain(ts, f, g, t, alpha)
        return {"value": value}, {"direct": direct, "naive": naive}
    if a.mode == "cpoint":
        cert = chain.chain_c_point(ts, f, g, t, alpha)
        return cert.as_dict(), {"rho": ts.rho(ts.canonical(t))}
    value = chain.compose_monotone(ts, g, f, t, alpha, window)
    direct = nabla(ts, compose(f, g), t, alpha).value
    return {"value": value}, {"direct": direct}


def cmd_series(a):
    ts, alpha = parse_timescale(a.ts), parse_order(a.alpha)
    fs = [parse_function(s) for s in a.fn]
    t = _real(a.at)
    if a.mode == "product":
        value = series.general_product_rule(ts, fs, t, alpha)
        direct = nabla(ts, product(fs), t, alpha).value
        return {"value": _num(value), "exact": _exact(value)}, {"oracle": direct,
                                                                "difference": float(value) - direct}
    f = fs[0]
    if a.mode == "powersum":
        if a.m is None:
            raise ParseError("series --mode powersum needs --m")
        value = series.power_sum(ts, f, t, alpha, a.m)
        brute = series.power_sum_bruteforce(ts, f, t, a.m)
        return {"value": _num(value), "exact": _exact(value)}, {
            "oracle": _num(brute), "agree": value == brute or abs(float(value) - float(brute))
            <= 1e-9 * (1 + abs(float(brute)))}
    if a.anchor is None:
        raise ParseError("series --mode expand needs --anchor")
    exp = series.backward_expansion(ts, f, t, _real(a.anchor), alpha)
    ft = f(ts.canonical(t))
    return {"value": _num(exp.value), "exact": _exact(exp.value), "terms": exp.n}, {
        "oracle": ft, "difference": float(exp.value) - ft}


def cmd_verify(a):
    reports = suites.run_suites(a.suite, a.seed, a.cases)
    docs = [r.as_dict() for r in reports]
    failed = [r.suite for r in reports if not r.ok]
    result = {"suites": docs, "passed": sum(r.passed for r in reports),
              "failed": sum(r.failed for r in reports), "skipped": sum(r.skipped for r in reports)}
    return result, {"failing_suites": failed}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nablats", description="Nabla fractional calculus on time scales.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fn_append=False):
        sp.add_argument("--ts", required=True, help="time scale, e.g. Z, N, hZ:0.5, interval:0:1")
        if fn_append:
            sp.add_argument("--fn", required=True, action="append", help="function of t (repeatable)")
        else:
            sp.add_argument("--fn", required=True, help="function of t")
        sp.add_argument("--alpha", default="1", help="order p/q in (0, 1]")

    d = sub.add_parser("deriv", help="nabla fractional derivative at a point")
    common(d)
    d.add_argument("--at", required=True)
    d.set_defaults(run=cmd_deriv)

    for name in ("rolle", "mvt", "gmvt"):
        w = sub.add_parser(name, help=f"{name} witness search")
        common(w)
        w.add_argument("--gn", help="second function (gmvt)")
        w.add_argument("--a", required=True)
        w.add_argument("--b", required=True)
        w.set_defaults(run=cmd_witness)

    c = sub.add_parser("chain", help="chain rules and inverse derivative")
    common(c)
    c.add_argument("--mode", choices=("integral", "cpoint", "monotone", "inverse"), default="integral")
    c.add_argument("--gn", help="inner function g")
    c.add_argument("--at", required=True)
    c.add_argument("--window", help="lo:hi window for image time scales")
    c.set_defaults(run=cmd_chain)

    s = sub.add_parser("series", help="product rule, power sums, backward expansion")
    common(s, fn_append=True)
    s.add_argument("--mode", choices=("product", "powersum", "expand"), default="product")
    s.add_argument("--at", required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--anchor")
    s.set_defaults(run=cmd_series)

    v = sub.add_parser("verify", help="run seeded property suites")
    v.add_argument("--suite", choices=("all",) + suites.SUITES, default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--cases", type=int, default=suites.DEFAULT_CASES)
    v.set_defaults(run=cmd_verify)
    return p


def _exit_code(err: Exception) -> int:
    if isinstance(err, ParseError):
        return EXIT_PARSE
    if isinstance(err, InconclusiveSearch):
        return EXIT_INCONCLUSIVE
    return EXIT_DOMAIN


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True, default=_num) + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    doc = {"command": argv[0] if argv else None, "inputs": {}, "result": None, "diagnostics": {}}
    try:
        args = build_parser().parse_args(argv)
        doc["command"] = args.command
        doc["inputs"] = {k: v for k, v in vars(args).items() if k not in ("run", "command")}
        doc["diagnostics"]["tolerance"] = dense_tolerance()
        result, diag = args.run(args)
    except (NablaError, NotDifferentiable) as err:
        code = _exit_code(err)
        kind = getattr(err, "kind", "error")
        doc["diagnostics"]["error"] = {"kind": kind, "message": str(err)}
        best = getattr(err, "best", None)
        if best is not None:
            doc["diagnostics"]["error"]["best"] = best
        _emit(doc)
        print(f"error: kind={kind} exit={code} {str(err).splitlines()[0] if str(err) else ''}",
              file=sys.stderr)
        return code
    doc["result"] = result
    doc["diagnostics"].update(diag)
    _emit(doc)
    if args.command == "verify" and diag["failing_suites"]:
        first = next(r for r in result["suites"] if r["failed"])
        print(f"error: kind=suite_failure exit={EXIT_SUITE} suites={','.join(diag['failing_suites'])} "
              f"first_case={first['first_counterexample']['case']}", file=sys.stderr)
        return EXIT_SUITE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
