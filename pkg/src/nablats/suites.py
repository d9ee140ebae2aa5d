"""Seeded randomized property suites behind ``verify``.

Every case draws its inputs from ``random.Random(f"{seed}:{suite}:{index}")``
so a single failing case can be replayed from the printed seed and index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .chain import (chain_c_point, chain_integral, compose_monotone, image_timescale,
                    inverse_direct, inverse_nabla, _local_window)
from .errors import DomainError, InconclusiveSearch, NablaError, NotDifferentiable, NotExact, NoWitness
from .extrema import gmvt_witnesses, local_left_extremum, rolle_witnesses
from .fracdiff import (FracOrder, linear_combo, nabla, nabla_exact, parse_order, product_nabla,
                       shift_residual)
from .funcspec import RealFunction, combine, compose, parse_function, product
from .series import backward_expansion, general_product_rule, power_sum, power_sum_bruteforce
from .timescale import (ContinuousInterval, FiniteSet, PieceUnion, TimeScale, UniformGrid,
                        naturals, reals)

SUITES = ("fracdiff", "mvt", "chain", "series")
DEFAULT_CASES = 300
ALPHAS = tuple(Fraction(x) for x in ("1", "1/2", "1/3", "2/3", "1/5"))
CHAIN_ALPHAS = tuple(Fraction(x) for x in ("1", "1/2", "1/3"))
WINDOW = (-3.0, 3.0)


# -- generators ------------------------------------------------------------------


def rand_rational(rng: random.Random, bound: int = 3) -> Fraction:
    d = rng.choice((1, 2, 4))
    return Fraction(rng.randint(-bound * d, bound * d), d)


def _coef(q: Fraction) -> str:
    return f"({q.numerator}/{q.denominator})" if q.denominator != 1 else f"({q.numerator})"


def poly_text(coefs) -> str:
    """``coefs[k]`` multiplies ``t^k``."""
    parts = [_coef(Fraction(c)) + ("" if k == 0 else "*t" if k == 1 else f"*t^{k}")
             for k, c in enumerate(coefs)]
    return " + ".join(parts)


def rand_poly(rng: random.Random, max_deg: int = 3) -> RealFunction:
    deg = rng.randint(0, max_deg)
    return parse_function(poly_text([rand_rational(rng) for _ in range(deg + 1)]))


def rand_increasing(rng: random.Random) -> RealFunction:
    a = rng.choice((Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)))
    b = rng.choice((Fraction(0), Fraction(1, 4), Fraction(1)))
    return parse_function(poly_text([rand_rational(rng), a, 0, b]))


def rand_finite(rng: random.Random, lo: int = 3, hi: int = 10) -> FiniteSet:
    n = rng.randint(lo, hi)
    return FiniteSet(sorted(k / 4 for k in rng.sample(range(-24, 25), n)))


def rand_scale(rng: random.Random, kinds=("finite", "grid", "N", "interval", "union", "R")) -> TimeScale:
    kind = rng.choice(kinds)
    if kind == "finite":
        return rand_finite(rng)
    if kind == "grid":
        return UniformGrid(0.0, rng.choice((0.25, 0.5, 1.0, 2.0)))
    if kind == "N":
        return naturals()
    if kind == "interval":
        lo = rng.randint(-3, 1)
        return ContinuousInterval(lo, lo + rng.randint(1, 4))
    if kind == "union":
        lo = rng.randint(-3, 0)
        return PieceUnion([(lo, lo + 1), (lo + 1.5, lo + 1.5), (lo + 2.25, lo + 2.25), (lo + 3, lo + 4)])
    return reals()


def sample_tk(rng: random.Random, ts: TimeScale, tries: int = 50) -> float:
    window = None if ts.bounded else WINDOW
    for _ in range(tries):
        t = ts.canonical(ts.sample(rng, 1, window)[0])
        if ts.tk_contains(t):
            return t
    raise DomainError(f"could not sample a point of T^k from {ts}")


def sample_scattered(rng: random.Random, ts: TimeScale) -> float:
    for _ in range(50):
        t = sample_tk(rng, ts)
        if ts.rho(t) < t:
            return t
    raise DomainError(f"could not sample a left-scattered point from {ts}")


def _interval_with_interior(rng: random.Random, ts: TimeScale, tries: int = 50) -> tuple[float, float]:
    window = None if ts.bounded else WINDOW
    a = b = 0.0
    for _ in range(tries):
        a, b = sorted(ts.canonical(x) for x in ts.sample(rng, 2, window))
        if a < b and ts.open_points(a, b):
            break
    return a, b


# -- reports ------------------------------------------------------------------------


@dataclass
class SuiteReport:
    suite: str
    seed: int
    cases: int
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    checks: dict = field(default_factory=dict)
    first_counterexample: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def as_dict(self) -> dict:
        return {
            "suite": self.suite, "seed": self.seed, "cases": self.cases, "passed": self.passed,
            "failed": self.failed, "skipped": self.skipped, "checks": self.checks,
            "first_counterexample": self.first_counterexample,
        }


class _Case:
    """Collects named checks for one case."""

    def __init__(self, index: int, inputs: dict):
        self.index = index
        self.inputs = inputs
        self.failures: list[dict] = []
        self.names: list[str] = []
        self.skipped = False

    def check(self, name: str, ok: bool, **values):
        self.names.append(name)
        if not ok:
            self.failures.append({"check": name, **values})


def _rel_close(x, y, rtol: float) -> bool:
    return abs(x - y) <= rtol * (1.0 + abs(y))


def _inputs(ts, t=None, alpha=None, **fns) -> dict:
    out = {"ts": str(ts)}
    out.update({k: (v.source if isinstance(v, RealFunction) else v) for k, v in fns.items()})
    if t is not None:
        out["t"] = t
    if alpha is not None:
        out["alpha"] = str(alpha)
    return out


# -- suites -------------------------------------------------------------------------


def _case_fracdiff(rng: random.Random, index: int) -> _Case:
    ts = rand_scale(rng)
    f, g = rand_poly(rng), rand_poly(rng)
    alpha = parse_order(rng.choice(ALPHAS))
    t = sample_tk(rng, ts)
    lam, om = rand_rational(rng), rand_rational(rng)
    case = _Case(index, _inputs(ts, t, alpha, f=f, g=g, lam=str(lam), omega=str(om)))
    try:
        v = nabla(ts, f, t, alpha).value
    except (NotDifferentiable, DomainError) as e:
        case.skipped = True
        case.inputs["reason"] = str(e)
        return case
    scattered = ts.rho(t) < t
    res = shift_residual(ts, f, t, alpha)
    case.check("shift_identity", abs(res) <= 1e-12, residual=res)
    if scattered:
        try:
            ex = float(nabla_exact(ts, f, t, alpha))
            case.check("scattered_exact", _rel_close(v, ex, 1e-12), value=v, exact=ex)
        except NotExact:
            pass
    lc = linear_combo(ts, f, g, float(lam), float(om), t, alpha)
    direct = nabla(ts, combine(lam, f, om, g), t, alpha).value
    case.check("linearity", _rel_close(direct, lc, 1e-9), direct=direct, combo=lc)
    pn = product_nabla(ts, f, g, t, alpha)
    pd = nabla(ts, product([f, g]), t, alpha).value
    case.check("product_rule", _rel_close(pn, pd, 1e-9 if scattered else 1e-6), rule=pn, direct=pd)
    return case


def _case_mvt(rng: random.Random, index: int) -> _Case:
    kind = index % 3
    if kind == 0:
        # Rolle completeness on a finite scale with f(a) = f(b)
        ts = rand_finite(rng)
        a, b = ts.points[0], ts.points[-1]
        p = [rand_rational(rng) for _ in range(rng.randint(1, 2))]
        c = rand_rational(rng)
        fa, fb = Fraction(a), Fraction(b)
        src = f"(t - ({fa.numerator}/{fa.denominator}))*(t - ({fb.numerator}/{fb.denominator}))*({poly_text(p)}) + {_coef(c)}"
        f = parse_function(src)
        alpha = parse_order(rng.choice(ALPHAS))
        case = _Case(index, _inputs(ts, None, alpha, f=f, a=a, b=b))
        try:
            w = rolle_witnesses(ts, f, a, b, alpha)
        except NoWitness as e:
            case.check("rolle_completeness", False, reason=str(e), best=e.best)
            return case
        # nu**alpha > 0, so the sign of the backward difference is the sign of ∇f
        d1 = f.eval_exact(w.t1) - f.eval_exact(ts.rho(w.t1))
        d2 = f.eval_exact(w.t2) - f.eval_exact(ts.rho(w.t2))
        case.check("rolle_certificate", d1 <= 0 <= d2, t1=w.t1, t2=w.t2, d1=float(d1), d2=float(d2))
        return case
    if kind == 1:
        # GMVT certificates recomputed from scratch
        ts = rand_scale(rng, ("finite", "grid", "N", "interval", "union"))
        f, g = rand_poly(rng), rand_increasing(rng)
        alpha = parse_order(rng.choice((Fraction(1),) if not ts.is_finite else ALPHAS))
        a, b = _interval_with_interior(rng, ts)
        case = _Case(index, _inputs(ts, None, alpha, f=f, g=g, a=a, b=b))
        try:
            if not a < b or not ts.open_points(a, b):
                raise DomainError("degenerate interval")
            w = gmvt_witnesses(ts, f, g, a, b, alpha)
        except (DomainError, InconclusiveSearch) as e:
            # includes NoWitness: the chain may genuinely have no witness on scattered sets
            case.skipped = True
            case.inputs["reason"] = f"{type(e).__name__}: {e}"
            return case
        lhs = nabla(ts, f, w.t1, alpha).value / nabla(ts, g, w.t1, alpha).value
        rhs = nabla(ts, f, w.t2, alpha).value / nabla(ts, g, w.t2, alpha).value
        slack = 1e-9 * (1.0 + abs(w.mid))
        case.check("gmvt_certificate", lhs <= w.mid + slack and w.mid <= rhs + slack and
                   a < w.t1 < b and a < w.t2 < b, t1=w.t1, t2=w.t2, lhs=lhs, mid=w.mid, rhs=rhs)
        return case
    # sign lemmas at a single point
    ts = rand_scale(rng)
    f = rand_poly(rng)
    alpha = parse_order(rng.choice(ALPHAS))
    t = sample_tk(rng, ts)
    case = _Case(index, _inputs(ts, t, alpha, f=f))
    try:
        rep = local_left_extremum(ts, f, t, alpha)
    except DomainError as e:
        case.skipped = True
        case.inputs["reason"] = str(e)
        return case
    if rep.derivative is None:
        case.skipped = True
        return case
    d = rep.derivative
    if d > 1e-9:
        case.check("positive_derivative_gives_left_max", rep.left_max, derivative=d, kind=rep.kind)
    if rep.left_max:
        case.check("left_max_gives_nonnegative_derivative", d >= -1e-9, derivative=d, kind=rep.kind)
    return case


def _case_chain(rng: random.Random, index: int) -> _Case:
    ts = rand_scale(rng, ("finite", "grid", "N", "interval", "union", "R"))
    f, g = rand_poly(rng), rand_increasing(rng)
    alpha = parse_order(rng.choice(CHAIN_ALPHAS))
    t = sample_tk(rng, ts)
    case = _Case(index, _inputs(ts, t, alpha, f=f, g=g))
    try:
        direct = nabla(ts, compose(f, g), t, alpha).value
    except (NotDifferentiable, DomainError) as e:
        case.skipped = True
        case.inputs["reason"] = str(e)
        return case
    scattered = ts.rho(t) < t
    ci = chain_integral(ts, f, g, t, alpha)
    case.check("chain_integral", _rel_close(ci, direct, 1e-8), integral=ci, direct=direct)
    try:
        cert = chain_c_point(ts, f, g, t, alpha)
        ok = cert.valid(ts.rho(t), t) and (scattered or cert.c == t)
        case.check("chain_c_point", ok, c=cert.c, residual=cert.residual)
    except InconclusiveSearch as e:
        case.check("chain_c_point", False, reason=str(e), best=e.best)
    if scattered:
        window = _local_window(ts, t)
        image = image_timescale(ts, g, window)
        rho_img = image.rho(g(t))
        case.check("rho_commutes", abs(rho_img - g(ts.rho(t))) <= 1e-12 * (1.0 + abs(rho_img)),
                   image_rho=rho_img, mapped_rho=g(ts.rho(t)))
        cm = compose_monotone(ts, g, f, t, alpha, window)
        case.check("compose_monotone", _rel_close(cm, direct, 1e-9), composed=cm, direct=direct)
        y = g(t)
        inv = inverse_nabla(ts, g, y, alpha, window)
        inv_d = inverse_direct(ts, g, y, alpha, window)
        case.check("inverse_formula", _rel_close(inv, inv_d, 1e-8), formula=inv, direct=inv_d)
        inv1 = inverse_nabla(ts, g, y, 1, window)
        prod = inv1 * nabla(ts, g, t, 1).value
        case.check("inverse_consistency", abs(prod - 1.0) <= 1e-9, product=prod)
    return case


def _case_series(rng: random.Random, index: int) -> _Case:
    kind = index % 3
    if kind == 0:
        ts = rand_scale(rng, ("finite", "grid", "N", "union"))
        m = rng.randint(2, 4)
        fs = [rand_poly(rng, 2) for _ in range(m)]
        alpha = parse_order(rng.choice(ALPHAS))
        t = sample_scattered(rng, ts)
        case = _Case(index, _inputs(ts, t, alpha, **{f"f{i}": f for i, f in enumerate(fs)}))
        rule = general_product_rule(ts, fs, t, alpha)
        try:
            direct = nabla_exact(ts, product(fs), t, alpha)
        except NotExact:
            direct = nabla(ts, product(fs), t, alpha).value
        tol = 1e-12 if isinstance(rule, Fraction) and isinstance(direct, Fraction) else 1e-9
        case.check("product_rule_m", _rel_close(float(rule), float(direct), tol) and
                   (tol > 1e-12 or rule == direct), rule=float(rule), direct=float(direct))
        base = general_product_rule(ts, fs[:2], t, alpha, exact=False)
        pn = product_nabla(ts, fs[0], fs[1], t, alpha)
        case.check("product_rule_base", base == pn, rule=base, two_factor=pn)
        return case
    if kind == 1:
        ts = UniformGrid(0.0, 1.0)
        f = rand_poly(rng)
        alpha = parse_order(rng.choice(ALPHAS))
        t = float(rng.randint(-20, 20))
        m = rng.randint(1, 8)
        case = _Case(index, _inputs(ts, t, alpha, f=f, m=m))
        try:
            closed = power_sum(ts, f, t, alpha, m)
        except DomainError as e:
            case.skipped = True
            case.inputs["reason"] = str(e)
            return case
        brute = power_sum_bruteforce(ts, f, t, m)
        if isinstance(closed, Fraction) and isinstance(brute, Fraction):
            ok = closed == brute
        else:
            ok = abs(float(closed) - float(brute)) <= 1e-9 * (1.0 + abs(float(brute)))
        case.check("power_sum", ok, closed=float(closed), brute=float(brute))
        return case
    ts = rand_finite(rng, 3, 12)
    f = rand_poly(rng, 4)
    alpha = parse_order(rng.choice(ALPHAS))
    j = rng.randint(1, len(ts.points) - 1)
    t = ts.points[j]
    r = ts.points[rng.randint(0, j - 1)]
    case = _Case(index, _inputs(ts, t, alpha, f=f, r=r))
    exp = backward_expansion(ts, f, t, r, alpha)
    if isinstance(exp.value, Fraction):
        ok = exp.value == f.eval_exact(t)
    else:
        ok = abs(exp.value - f(t)) <= 1e-12 * (1.0 + abs(f(t)))
    case.check("telescoping", ok, expansion=float(exp.value), value=f(t))
    return case


CASES: dict[str, Callable[[random.Random, int], _Case]] = {
    "fracdiff": _case_fracdiff,
    "mvt": _case_mvt,
    "chain": _case_chain,
    "series": _case_series,
}


def run_suite(name: str, seed: int = 0, cases: int = DEFAULT_CASES) -> SuiteReport:
    if name not in CASES:
        raise DomainError(f"unknown suite {name!r}")
    report = SuiteReport(name, seed, cases)
    for i in range(cases):
        rng = random.Random(f"{seed}:{name}:{i}")
        try:
            case = CASES[name](rng, i)
        except NablaError as e:
            case = _Case(i, {"seed": seed})
            case.check("no_unexpected_error", False, error=f"{type(e).__name__}: {e}")
        for n in case.names:
            report.checks[n] = report.checks.get(n, 0) + 1
        if case.skipped:
            report.skipped += 1
        elif case.failures:
            report.failed += 1
            if report.first_counterexample is None:
                report.first_counterexample = {"case": i, "seed": seed, "inputs": case.inputs,
                                               "failures": case.failures}
        else:
            report.passed += 1
    return report


def run_suites(which: str = "all", seed: int = 0, cases: int = DEFAULT_CASES) -> list[SuiteReport]:
    names = SUITES if which == "all" else (which,)
    return [run_suite(n, seed, cases) for n in names]
