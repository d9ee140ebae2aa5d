"""Local left-extrema, extreme values, and Rolle / mean-value witness searches.

Witness searches scan ``(a, b)_T`` in increasing order and return the
smallest qualifying ``t1`` and ``t2``. Isolated points are checked
exhaustively, using exact rational arithmetic whenever the functions are
rational-coefficient polynomials (or rational functions) so that ties such as
``2/11 <= 18/99`` are decided exactly. Interval pieces get a 1024-point scan
followed by bisection toward the leftmost qualifying point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .errors import (DomainError, EvaluationError, InconclusiveSearch, NotDifferentiable,
                     NotExact, NoWitness, PreconditionError)
from .fracdiff import FracOrder, nabla, nu_power_exact, parse_order, signed_power
from .funcspec import RealFunction
from .timescale import TimeScale

LEFT_MAX = "LeftMax"
LEFT_MIN = "LeftMin"
BOTH = "LeftMax-and-LeftMin"
NEITHER = "Neither"

SIGN_TOL = 1e-9
CERT_TOL = 1e-9
EQUAL_TOL = 1e-12
SCAN_POINTS = 1024
SAMPLE_POINTS = 64
NEIGHBOURHOOD = 1e-3

Number = Union[float, Fraction]


@dataclass(frozen=True)
class ExtremumReport:
    kind: str
    left_max: bool
    left_min: bool
    derivative: Optional[float]
    sampled: bool
    # max => ∇f >= 0 and min => ∇f <= 0
    necessary_signs_hold: Optional[bool]
    # ∇f > 0 => max and ∇f < 0 => min
    sufficient_signs_hold: Optional[bool]

    def as_dict(self):
        return dict(self.__dict__)


def _cmp_values(f: RealFunction, x: float, y: float) -> int:
    """Sign of ``f(x) - f(y)``, exact when ``f`` allows it."""
    try:
        d = f.eval_exact(x) - f.eval_exact(y)
    except NotExact:
        d = f(x) - f(y)
    return (d > 0) - (d < 0)


def _geometric_offsets(delta: float, n: int = SAMPLE_POINTS) -> list[float]:
    return [delta * 10.0 ** (-8.0 * (i + 1) / n) for i in range(n)]


def local_left_extremum(ts: TimeScale, f: RealFunction, t0: float, alpha) -> ExtremumReport:
    alpha = parse_order(alpha)
    if not ts.contains(t0):
        raise DomainError(f"{t0!r} is not a point of {ts}")
    t0 = ts.canonical(t0)
    if not ts.tk_contains(t0):
        raise DomainError(f"t={t0!r} not in T^k")
    r = ts.rho(t0)
    if r < t0:
        c = _cmp_values(f, r, t0)
        is_max, is_min, sampled = c <= 0, c >= 0, False
    else:
        reach = ts.dense_reach(t0, -1)
        ft = f(t0)
        is_max = is_min = True
        if reach > 0:
            delta = min(NEIGHBOURHOOD, reach)
            for d in _geometric_offsets(delta) + _geometric_offsets(delta / 16):
                fs = f(t0 - d)
                is_max &= fs <= ft
                is_min &= fs >= ft
        sampled = True
    try:
        d = nabla(ts, f, t0, alpha).value
    except NotDifferentiable:
        d = None
    if d is None:
        nec = suf = None
    else:
        nec = (not is_max or d >= -SIGN_TOL) and (not is_min or d <= SIGN_TOL)
        suf = (d <= SIGN_TOL or is_max) and (d >= -SIGN_TOL or is_min)
    kind = BOTH if is_max and is_min else LEFT_MAX if is_max else LEFT_MIN if is_min else NEITHER
    return ExtremumReport(kind, is_max, is_min, d, sampled, nec, suf)


def _golden(fn: Callable[[float], float], lo: float, hi: float, iters: int = 80) -> float:
    """Minimizer of a unimodal ``fn`` on ``[lo, hi]``."""
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = fn(x2)
    return x1 if f1 <= f2 else x2


def extreme_values(ts: TimeScale, f: RealFunction, a: float, b: float) -> tuple[float, float]:
    """``(argmin, argmax)`` of ``f`` over ``[a, b]_T``; ties go to the smaller point."""
    part = ts.restrict(a, b)
    best_lo = best_hi = None
    for lo, hi in part.segments():
        if lo == hi:
            cands = [lo]
        else:
            xs = np.linspace(lo, hi, SCAN_POINTS + 1).tolist()
            vals = [f(x) for x in xs]
            i_min = int(np.argmin(vals))
            i_max = int(np.argmax(vals))
            cands = list(xs)
            for i, sgn in ((i_min, 1.0), (i_max, -1.0)):
                l, h = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
                if l < h:
                    cands.append(_golden(lambda x: sgn * f(x), l, h))
            cands.sort()
        for x in cands:
            v = f(x)
            if best_lo is None or v < best_lo[1] or (v == best_lo[1] and x < best_lo[0]):
                best_lo = (x, v)
            if best_hi is None or v > best_hi[1] or (v == best_hi[1] and x < best_hi[0]):
                best_hi = (x, v)
    return best_lo[0], best_hi[0]


# -- witness searches ----------------------------------------------------------


@dataclass(frozen=True)
class WitnessPair:
    t1: float
    t2: float
    lhs: float
    mid: float
    rhs: float
    alpha: FracOrder
    exhaustive: bool = True

    def certified(self, tol: float = CERT_TOL) -> bool:
        slack = tol * (1.0 + abs(self.mid))
        return self.lhs <= self.mid + slack and self.mid <= self.rhs + slack

    def as_dict(self):
        return {
            "t1": self.t1, "t2": self.t2, "lhs": self.lhs, "mid": self.mid, "rhs": self.rhs,
            "alpha": str(self.alpha), "exhaustive": self.exhaustive,
        }


def _exact_num(f: RealFunction, t: float, r: float) -> Fraction:
    return f.eval_exact(t) - f.eval_exact(r)


def _open_check(ts: TimeScale, a: float, b: float) -> list[tuple[float, float]]:
    for x in (a, b):
        if not ts.contains(x):
            raise DomainError(f"{x!r} is not a point of {ts}")
    a, b = ts.canonical(a), ts.canonical(b)
    if not a < b:
        raise DomainError("need a < b")
    segs = ts.open_points(a, b)
    if not segs:
        raise PreconditionError(f"(a, b)_T is empty for a={a!r}, b={b!r}")
    return segs


def _candidates(segs, a, b):
    """Sorted ``(t, segment_index_or_None)``; interval pieces are scanned."""
    out = []
    for i, (lo, hi) in enumerate(segs):
        if lo == hi:
            out.append((lo, None))
        else:
            for x in np.linspace(lo, hi, SCAN_POINTS).tolist():
                if a < x < b:
                    out.append((x, i))
    return out


def _leq(x: Number, y: Number, exact: bool) -> bool:
    if exact:
        return x <= y
    return x <= y + CERT_TOL * (1.0 + abs(float(y)))


def _search(ts, a, b, quantity: Callable[[float], Number], mid: Number, alpha: FracOrder,
            what: str) -> WitnessPair:
    segs = _open_check(ts, a, b)
    a, b = ts.canonical(a), ts.canonical(b)
    cands = _candidates(segs, a, b)
    dense = any(seg is not None for _, seg in cands)
    vals = [quantity(t) for t, _ in cands]
    exact = isinstance(mid, Fraction)

    def first(pred):
        for i, ((t, seg), v) in enumerate(zip(cands, vals)):
            if pred(v):
                if seg is not None and i > 0 and cands[i - 1][1] == seg and not pred(vals[i - 1]):
                    return _bisect_leftmost(cands[i - 1][0], t, v, quantity, pred)
                return t, v
        return None

    hit1 = first(lambda v: _leq(v, mid, exact and isinstance(v, Fraction)))
    hit2 = first(lambda v: _leq(mid, v, exact and isinstance(v, Fraction)))
    if hit1 is None or hit2 is None:
        lo_i = min(range(len(vals)), key=lambda i: vals[i])
        hi_i = max(range(len(vals)), key=lambda i: vals[i])
        best = {"t1": cands[lo_i][0], "lhs": float(vals[lo_i]), "mid": float(mid),
                "t2": cands[hi_i][0], "rhs": float(vals[hi_i])}
        missing = "t1" if hit1 is None else "t2"
        if dense:
            raise InconclusiveSearch(f"{what}: no certifiable {missing} found on the scan", best)
        raise NoWitness(f"{what}: exhaustive scan of (a, b)_T has no {missing}", best)
    (t1, v1), (t2, v2) = hit1, hit2
    return WitnessPair(t1, t2, float(v1), float(mid), float(v2), alpha, not dense)


def _bisect_leftmost(lo, hi, v_hi, quantity, pred, iters: int = 60):
    """Shrink ``(lo, hi]`` keeping ``pred(quantity(hi))`` true."""
    for _ in range(iters):
        m = 0.5 * (lo + hi)
        if not lo < m < hi:
            break
        try:
            vm = quantity(m)
        except (NotDifferentiable, EvaluationError, PreconditionError):
            # too close to a piece boundary to evaluate; keep the bracket found so far
            break
        if pred(vm):
            hi, v_hi = m, vm
        else:
            lo = m
    return hi, v_hi


def _nabla_or_fail(ts, f, t, alpha) -> float:
    try:
        return nabla(ts, f, t, alpha).value
    except NotDifferentiable as e:
        raise PreconditionError(f"{f.source} is not nabla-differentiable at {t!r}: {e}") from None


def _scattered(ts, t):
    r = ts.rho(t)
    return (r, True) if r < t else (r, False)


def _exact_nu_alpha(t, r, alpha) -> Fraction:
    try:
        return nu_power_exact(Fraction(t) - Fraction(r), alpha)
    except NotExact:
        return Fraction(signed_power(t - r, alpha))


def rolle_witnesses(ts: TimeScale, f: RealFunction, a: float, b: float, alpha) -> WitnessPair:
    alpha = parse_order(alpha)
    if abs(f(b) - f(a)) > EQUAL_TOL:
        raise PreconditionError(f"f(a) = {f(a)!r} differs from f(b) = {f(b)!r}")

    def quantity(t):
        r, scattered = _scattered(ts, t)
        if scattered:
            try:
                return _exact_num(f, t, r) / _exact_nu_alpha(t, r, alpha)
            except NotExact:
                pass
        return _nabla_or_fail(ts, f, t, alpha)

    return _search(ts, a, b, quantity, Fraction(0), alpha, "rolle")


def _exact_mid(f, g, a, b):
    try:
        den = g.eval_exact(b) - g.eval_exact(a)
        return (f.eval_exact(b) - f.eval_exact(a)) / den if den != 0 else None
    except NotExact:
        return None


def gmvt_witnesses(ts: TimeScale, f: RealFunction, g: RealFunction, a: float, b: float,
                   alpha) -> WitnessPair:
    alpha = parse_order(alpha)
    gd = g(b) - g(a)
    if gd == 0:
        raise PreconditionError("g(a) = g(b)")
    mid = _exact_mid(f, g, a, b)
    if mid is None:
        mid = (f(b) - f(a)) / gd

    def quantity(t):
        r, scattered = _scattered(ts, t)
        if scattered:
            try:
                nf, ng = _exact_num(f, t, r), _exact_num(g, t, r)
                if ng <= 0:
                    raise PreconditionError(f"∇g({t!r}) <= 0")
                return nf / ng
            except NotExact:
                pass
        dg = _nabla_or_fail(ts, g, t, alpha)
        if not dg > 0:
            raise PreconditionError(f"∇g({t!r}) = {dg!r} is not positive")
        return _nabla_or_fail(ts, f, t, alpha) / dg

    return _search(ts, a, b, quantity, mid, alpha, "gmvt")


def mvt_witnesses(ts: TimeScale, f: RealFunction, a: float, b: float, alpha) -> WitnessPair:
    """Mean-value witnesses; for ``alpha < 1`` the quantity is ``∇f / nu**(1-alpha)``."""
    alpha = parse_order(alpha)
    segs = _open_check(ts, a, b)
    a, b = ts.canonical(a), ts.canonical(b)
    if not alpha.is_one:
        for lo, hi in segs:
            if lo < hi:
                raise PreconditionError(
                    f"alpha={alpha} needs left-scattered points; {lo!r} lies in a continuum")
            if ts.rho(lo) == lo:
                raise PreconditionError(f"alpha={alpha} needs left-scattered points; {lo!r} is left-dense")
    try:
        mid: Number = (f.eval_exact(b) - f.eval_exact(a)) / (Fraction(b) - Fraction(a))
    except NotExact:
        mid = (f(b) - f(a)) / (b - a)

    def quantity(t):
        r, scattered = _scattered(ts, t)
        if scattered:
            try:
                return _exact_num(f, t, r) / (Fraction(t) - Fraction(r))
            except NotExact:
                pass
            d = _nabla_or_fail(ts, f, t, alpha)
            return d if alpha.is_one else d / (t - r) ** float(1 - alpha.value)
        return _nabla_or_fail(ts, f, t, alpha)

    return _search(ts, a, b, quantity, mid, alpha, "mvt")


def witness_sets(ts: TimeScale, f: RealFunction, g: Optional[RealFunction], a: float, b: float,
                 alpha) -> tuple[list[float], list[float]]:
    """All ``t1`` and all ``t2`` candidates on a finite ``(a, b)_T`` (exhaustive).

    ``g=None`` means the Rolle quantity ``∇f`` against zero.
    """
    alpha = parse_order(alpha)
    segs = _open_check(ts, a, b)
    if any(lo < hi for lo, hi in segs):
        raise DomainError("witness_sets needs a finite (a, b)_T")
    a, b = ts.canonical(a), ts.canonical(b)
    pts = [lo for lo, _ in segs]
    if g is None:
        mid: Number = Fraction(0)
        pair = None
    else:
        mid = _exact_mid(f, g, a, b)
        if mid is None:
            mid = (f(b) - f(a)) / (g(b) - g(a))
    t1s, t2s = [], []
    for t in pts:
        r = ts.rho(t)
        try:
            num = _exact_num(f, t, r)
            v: Number = num / (_exact_num(g, t, r) if g is not None else _exact_nu_alpha(t, r, alpha))
        except NotExact:
            df = nabla(ts, f, t, alpha).value
            v = df if g is None else df / nabla(ts, g, t, alpha).value
        exact = isinstance(v, Fraction) and isinstance(mid, Fraction)
        if _leq(v, mid, exact):
            t1s.append(t)
        if _leq(mid, v, exact):
            t2s.append(t)
    return t1s, t2s
