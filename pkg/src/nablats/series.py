"""Finite sums from the product rule: m-fold products, power sums, backward expansion.

Each closed form comes with a brute-force counterpart. When the functions are
rational polynomials and the point and graininess are rational, values are
computed as :class:`~fractions.Fraction` so identities can be checked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import DomainError, NotExact
from .fracdiff import nabla, nabla_exact, nu_power_exact, parse_order, signed_power, _require_tk
from .funcspec import RealFunction
from .timescale import TimeScale

Number = Union[float, Fraction]

EXPANSION_CAP = 10**6


def _exact_scattered(ts, fs: Sequence[RealFunction], t, alpha):
    """Exact ``(f(rho), f(t), ∇f(t))`` triples, or ``None``."""
    r = ts.rho(t)
    if not r < t:
        return None
    try:
        return [(f.eval_exact(r), f.eval_exact(t), nabla_exact(ts, f, t, alpha)) for f in fs]
    except NotExact:
        return None


def general_product_rule(ts: TimeScale, fs: Sequence[RealFunction], t: float, alpha,
                         exact: bool = True) -> Number:
    """``Σ_i Π_{j<i} f_j(ρ(t)) · ∇f_i(t) · Π_{j>i} f_j(t)``."""
    alpha = parse_order(alpha)
    if len(fs) < 2:
        raise DomainError("the product rule needs at least two factors")
    t = _require_tk(ts, t)
    triples = _exact_scattered(ts, fs, t, alpha) if exact else None
    if triples is None:
        r = ts.rho(t)
        triples = [(f(r), f(t), nabla(ts, f, t, alpha).value) for f in fs]
    total = 0
    for i, (_, _, d) in enumerate(triples):
        term = d
        for j, (fr, ft, _) in enumerate(triples):
            if j < i:
                term *= fr
            elif j > i:
                term *= ft
        total += term
    return total


def _shift_parts(ts, f, t, alpha, exact):
    """``(f(ρ(t)), ν(t)^α ∇f(t))``, exact when possible."""
    r = ts.rho(t)
    if exact and r < t:
        try:
            d = nabla_exact(ts, f, t, alpha)
            return f.eval_exact(r), nu_power_exact(Fraction(t) - Fraction(r), alpha) * d
        except NotExact:
            pass
    d = nabla(ts, f, t, alpha).value
    return f(r), (signed_power(t - r, alpha) * d if r < t else 0.0)


def power_sum(ts: TimeScale, f: RealFunction, t: float, alpha, m: int, exact: bool = True) -> Number:
    """``([f(ρ) + ν^α∇f]^(m+1) - f(ρ)^(m+1)) / (ν^α∇f)``."""
    alpha = parse_order(alpha)
    if m < 1:
        raise DomainError("m must be a positive integer")
    t = _require_tk(ts, t)
    base, step = _shift_parts(ts, f, t, alpha, exact)
    if step == 0:
        raise DomainError("closed form needs ν(t)^α·∇f(t) ≠ 0 (t left-scattered, derivative nonzero)")
    return ((base + step) ** (m + 1) - base ** (m + 1)) / step


def power_sum_bruteforce(ts: TimeScale, f: RealFunction, t: float, m: int, exact: bool = True) -> Number:
    """``Σ_{i=0}^{m} f(ρ(t))^i f(t)^(m-i)`` by direct summation."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    if not ts.contains(t):
        raise DomainError(f"{t!r} is not a point of {ts}")
    t = ts.canonical(t)
    r = ts.rho(t)
    if exact:
        try:
            fr, ft = f.eval_exact(r), f.eval_exact(t)
            return sum(fr**i * ft ** (m - i) for i in range(m + 1))
        except NotExact:
            pass
    fr, ft = f(r), f(t)
    return math.fsum(fr**i * ft ** (m - i) for i in range(m + 1))


@dataclass(frozen=True)
class Expansion:
    value: Number
    anchor_value: Number
    terms: list = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.terms)


def backward_expansion(ts: TimeScale, f: RealFunction, t: float, r: float, alpha,
                       exact: bool = True) -> Expansion:
    """``f(r) + Σ_{j<n} ν(ρ^j t)^α ∇f(ρ^j t)`` with ``r = ρ^n(t)``, ``n >= 1``."""
    alpha = parse_order(alpha)
    t = _require_tk(ts, t)
    if not ts.contains(r):
        raise DomainError(f"anchor {r!r} is not a point of {ts}")
    r = ts.canonical(r)
    if not r < t:
        raise DomainError("the anchor must lie strictly before t")
    terms: list = []
    p = t
    while p > r:
        if len(terms) >= EXPANSION_CAP:
            raise DomainError(f"anchor {r!r} not reached within {EXPANSION_CAP} backward steps")
        q = ts.rho(p)
        if q == p:
            raise DomainError(f"anchor {r!r} is unreachable: ρ fixes the left-dense point {p!r}")
        _, step = _shift_parts(ts, f, p, alpha, exact)
        terms.append(step)
        p = q
    if p != r:
        raise DomainError(f"anchor {r!r} is not in the backward orbit of {t!r}")
    anchor = None
    if exact and all(isinstance(x, Fraction) for x in terms):
        try:
            anchor = f.eval_exact(r)
        except NotExact:
            pass
    if anchor is None:
        anchor = f(r)
        total = anchor + math.fsum(float(x) for x in terms)
    else:
        total = anchor + sum(terms)
    return Expansion(total, anchor, terms)
