"""Nabla fractional derivative of order ``alpha`` in ``(0, 1]`` on a time scale.

At a left-scattered point the derivative is the exact backward quotient
``(f(t) - f(rho(t))) / nu(t)**alpha``. At a left-dense point it is the limit
of ``(f(t) - f(s)) / (t - s)**alpha`` as ``s -> t`` inside the time scale:
two-sided when ``alpha = 1/q`` with ``q`` odd (negative bases then have real
powers), left-sided otherwise.

The dense limit is estimated from quotients at ``s = t -/+ delta0 * 2**-k``,
``k <= 40``, stopping early once rounding in ``f(t) - f(s)`` approaches the
tolerance. Convergence is declared when three consecutive quotients agree
within ``tol * (1 + |q|)``. The reported value is a Richardson-extrapolated
estimate from the same quotients when that estimate is consistent with the
raw sequence, otherwise the last quotient.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError, NonRealPowerError, NotDifferentiable, NotExact, ParseError
from .funcspec import RealFunction, exact_root
from .timescale import TimeScale

DEFAULT_TOL = 1e-7
MAX_HALVINGS = 40
MAX_DELTA0 = 0.1
EPS = 2.0**-52
NOISE_FRACTION = 0.01
TOL_ENV = "NABLA_SCALE_TOL"

ODD_RECIPROCAL = "OddReciprocal"
GENERAL = "General"

EXACT_SCATTERED = "ExactScattered"
DENSE_TWO_SIDED = "DenseLimitTwoSided"
DENSE_LEFT = "DenseLimitLeft"
DENSE_RIGHT = "DenseLimitRight"


def dense_tolerance() -> float:
    """Convergence tolerance, overridable through ``$NABLA_SCALE_TOL``."""
    raw = os.environ.get(TOL_ENV)
    if not raw:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ParseError(f"{TOL_ENV}={raw!r} is not a decimal literal") from None
    if not (tol > 0 and math.isfinite(tol)):
        raise ParseError(f"{TOL_ENV} must be positive")
    return tol


@dataclass(frozen=True)
class FracOrder:
    value: Fraction

    @property
    def p(self) -> int:
        return self.value.numerator

    @property
    def q(self) -> int:
        return self.value.denominator

    @property
    def kind(self) -> str:
        return ODD_RECIPROCAL if self.p == 1 and self.q % 2 == 1 else GENERAL

    @property
    def odd_reciprocal(self) -> bool:
        return self.kind == ODD_RECIPROCAL

    @property
    def is_one(self) -> bool:
        return self.value == 1

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return str(self.value)


def classify_alpha(p: int, q: int) -> FracOrder:
    if q <= 0:
        raise DomainError("order denominator must be positive")
    v = Fraction(p, q)
    if not 0 < v <= 1:
        raise DomainError(f"order {p}/{q} is outside (0, 1]")
    return FracOrder(v)


def parse_order(text) -> FracOrder:
    """Accept ``p/q``, an integer, or a :class:`Fraction`/``FracOrder``."""
    if isinstance(text, FracOrder):
        return text
    if isinstance(text, Fraction):
        return classify_alpha(text.numerator, text.denominator)
    if isinstance(text, int):
        return classify_alpha(text, 1)
    s = str(text).strip()
    num, slash, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if slash else 1
    except ValueError:
        raise ParseError(f"order must be p/q with integers, got {s!r}") from None
    try:
        return classify_alpha(p, q)
    except DomainError as e:
        raise ParseError(str(e)) from None


def signed_power(x: float, alpha: FracOrder) -> float:
    """Real ``x**alpha``; negative ``x`` only for odd-reciprocal orders."""
    if x >= 0:
        return x if alpha.is_one else x ** float(alpha.value)
    if not alpha.odd_reciprocal:
        raise NonRealPowerError(f"({x!r})^({alpha}) is not real")
    if alpha.is_one:
        return x
    mag = abs(x) ** (1.0 / alpha.q)
    # one Newton step tightens the q-th root
    mag -= (mag**alpha.q - abs(x)) / (alpha.q * mag ** (alpha.q - 1))
    return -mag


def nu_power_exact(nu, alpha: FracOrder) -> Fraction:
    """``nu**alpha`` as a rational, or :class:`NotExact`."""
    nu = Fraction(nu)
    root = exact_root(nu, alpha.q)
    if root is None:
        raise NotExact(f"{nu}^{alpha} is irrational")
    return root**alpha.p


@dataclass(frozen=True)
class NablaResult:
    value: float
    method: str
    error_estimate: float = 0.0
    samples_used: int = 0
    trace: dict = field(default_factory=dict, compare=False, repr=False)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "error_estimate": self.error_estimate,
            "samples_used": self.samples_used,
        }


def _require_tk(ts: TimeScale, t: float) -> float:
    if not ts.contains(t):
        raise DomainError(f"{t!r} is not a point of {ts}")
    t = ts.canonical(t)
    if not ts.tk_contains(t):
        raise DomainError(f"t={t!r} not in T^k (right-scattered minimum of {ts})")
    return t


def _richardson(qs: list[float], alpha: FracOrder, levels: int = 6) -> tuple[float, float]:
    """Best extrapolated limit of ``qs`` (step halving, error terms ``h**(n - alpha)``).

    Returns ``(estimate, error)``; the error is the Ridders-style discrepancy
    between neighbouring tableau entries.
    """
    a = float(alpha.value)
    # the h**0 term is the limit itself when alpha == 1
    powers = [n - a for n in range(1, levels + 2) if n - a > 0][:levels]
    best, best_err = qs[-1], math.inf
    prev = list(qs)
    for n, pw in enumerate(powers, start=1):
        fac = 2.0**pw - 1.0
        cur = [math.nan] * len(qs)
        for j in range(n, len(qs)):
            cur[j] = prev[j] + (prev[j] - prev[j - 1]) / fac
            err = max(abs(cur[j] - prev[j]), abs(cur[j] - prev[j - 1]))
            if err < best_err:
                best, best_err = cur[j], err
        prev = cur
    return best, best_err


@dataclass
class _Side:
    value: float
    error: float
    quotients: list
    raw_converged: bool


def _one_side(f: RealFunction, ft: float, t: float, side: int, delta0: float,
              alpha: FracOrder, tol: float) -> _Side:
    qs: list[float] = []
    raw = noisy = False
    for k in range(MAX_HALVINGS + 1):
        s = t + side * delta0 * 0.5**k
        h = t - s
        if h == 0:
            break
        fs = f(s)
        hp = signed_power(h, alpha)
        qs.append((ft - fs) / hp)
        # rounding in ft - fs grows like 1/h**alpha; further halving only adds noise.
        # Judged against the limit, not the quotient: for alpha < 1 the quotients
        # can be large while the limit is zero.
        noise = 4 * EPS * (abs(ft) + abs(fs)) / abs(hp)
        floor = NOISE_FRACTION * tol
        scale = abs(qs[-1])
        if noise > floor and len(qs) >= 3:
            scale = min(scale, abs(_richardson(qs, alpha)[0]))
        if noise > floor * (1.0 + scale):
            noisy = True
            break
        if len(qs) >= 3:
            q0, q1, q2 = qs[-3:]
            lim = tol * (1.0 + abs(q2))
            if abs(q2 - q1) <= lim and abs(q1 - q0) <= lim:
                raw = True
                break
    if not qs:
        raise NotDifferentiable("no usable approach points", {"side": side})
    last = qs[-1]
    step = abs(qs[-1] - qs[-2]) if len(qs) > 1 else math.inf
    if len(qs) >= 3:
        rich, rerr = _richardson(qs, alpha)
    else:
        rich, rerr = last, step
    if raw:
        lim = tol * (1.0 + abs(last))
        if rerr <= lim and abs(rich - last) <= 10 * lim:
            return _Side(rich, rerr, qs, True)
        return _Side(last, step, qs, True)
    # raw test failed: accept only a geometrically contracting tail whose
    # extrapolated limit is itself stable
    if len(qs) >= 10:
        d_new = abs(qs[-1] - qs[-2])
        d_old = abs(qs[-9] - qs[-10])
        if d_old > 0 and d_new <= 0.6 * d_old and rerr <= tol * (1.0 + abs(rich)):
            return _Side(rich, rerr, qs, False)
    elif noisy and len(qs) >= 3 and rerr <= tol * (1.0 + abs(rich)):
        # short reach: halving hit rounding before the tail could be judged
        return _Side(rich, rerr, qs, False)
    raise NotDifferentiable(
        f"difference quotients did not converge after {len(qs)} halvings",
        {"side": side, "quotients": qs},
    )


def _dense(ts: TimeScale, f: RealFunction, t: float, alpha: FracOrder, tol: float) -> NablaResult:
    ft = f(t)
    left = ts.dense_reach(t, -1)
    right = ts.dense_reach(t, +1) if alpha.odd_reciprocal else 0.0
    if left <= 0 and right <= 0:
        raise DomainError(f"left-dense point {t!r} has no approach points on the required side")
    sides = {}
    if left > 0:
        sides[-1] = _one_side(f, ft, t, -1, min(MAX_DELTA0, left), alpha, tol)
    if right > 0:
        sides[+1] = _one_side(f, ft, t, +1, min(MAX_DELTA0, right), alpha, tol)
    used = sum(len(s.quotients) for s in sides.values())
    trace = {("left" if k < 0 else "right"): s.quotients for k, s in sides.items()}
    if len(sides) == 2:
        vl, vr = sides[-1].value, sides[+1].value
        v = 0.5 * (vl + vr)
        if abs(vl - vr) > 10 * tol * (1.0 + abs(v)):
            raise NotDifferentiable(
                f"one-sided limits disagree at {t!r}: left {vl!r}, right {vr!r}", trace)
        err = max(sides[-1].error, sides[+1].error, 0.5 * abs(vl - vr))
        return NablaResult(v, DENSE_TWO_SIDED, err, used, trace)
    side, res = next(iter(sides.items()))
    method = DENSE_LEFT if side < 0 else DENSE_RIGHT
    return NablaResult(res.value, method, res.error, used, trace)


def nabla(ts: TimeScale, f: RealFunction, t: float, alpha, tol: Optional[float] = None) -> NablaResult:
    """``∇^(alpha) f(t)`` on ``ts``; raises :class:`NotDifferentiable` on failure."""
    alpha = parse_order(alpha)
    t = _require_tk(ts, t)
    r = ts.rho(t)
    if r < t:
        num = f(t) - f(r)
        return NablaResult(num / signed_power(t - r, alpha), EXACT_SCATTERED, 0.0, 2)
    return _dense(ts, f, t, alpha, dense_tolerance() if tol is None else tol)


def nabla_exact(ts: TimeScale, f: RealFunction, t: float, alpha) -> Fraction:
    """Rational value at a left-scattered point; :class:`NotExact` otherwise."""
    alpha = parse_order(alpha)
    t = _require_tk(ts, t)
    r = ts.rho(t)
    if not r < t:
        raise NotExact("left-dense point")
    den = nu_power_exact(Fraction(t) - Fraction(r), alpha)
    return (f.eval_exact(t) - f.eval_exact(r)) / den


def shift_residual(ts: TimeScale, f: RealFunction, t: float, alpha) -> float:
    """``f(rho(t)) - [f(t) - nu(t)**alpha * ∇f(t)]``; zero up to rounding."""
    alpha = parse_order(alpha)
    res = nabla(ts, f, t, alpha)
    t = ts.canonical(t)
    r = ts.rho(t)
    if r == t:
        return 0.0
    return (f(r) - f(t)) + signed_power(t - r, alpha) * res.value


def linear_combo(ts, f, g, lam: float, omega: float, t, alpha) -> float:
    return lam * nabla(ts, f, t, alpha).value + omega * nabla(ts, g, t, alpha).value


def product_nabla(ts, f, g, t, alpha) -> float:
    """Two-factor product rule: ``f(rho(t)) ∇g(t) + g(t) ∇f(t)``."""
    alpha = parse_order(alpha)
    dg = nabla(ts, g, t, alpha).value
    df = nabla(ts, f, t, alpha).value
    t = ts.canonical(t)
    return f(ts.rho(t)) * dg + g(t) * df


def constant_rule(ts: TimeScale, t: float, alpha) -> float:
    parse_order(alpha)
    _require_tk(ts, t)
    return 0.0


def identity_rule(ts: TimeScale, t: float, alpha) -> float:
    """``∇^(alpha) t`` = ``nu(t)**(1 - alpha)``, or 1 when ``alpha = 1``."""
    alpha = parse_order(alpha)
    t = _require_tk(ts, t)
    if alpha.is_one:
        return 1.0
    return ts.nu(t) ** float(1 - alpha.value)
