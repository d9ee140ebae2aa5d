"""Chain rules for nabla fractional derivatives, image time scales and inverses.

The integral form evaluates

    ∇(f∘g)(t) = ∫_0^1 f'(g(ρ(t)) + φ ν(t)^α ∇g(t)) dφ · ∇g(t)

with ``f'`` taken from the symbolic derivative. The point form finds a ``c``
in ``[ρ(t), t]`` with ``∇(f∘g)(t) = f'(g(c)) ∇g(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import DomainError, EvaluationError, InconclusiveSearch, NotExact, PreconditionError
from .fracdiff import nabla, parse_order, signed_power, _require_tk
from .funcspec import RealFunction, compose, degree, require_increasing
from .timescale import (ContinuousInterval, FiniteSet, PieceUnion, TimeScale, UniformGrid,
                        MAX_MATERIALIZE, simplify)

GL_NODES = 32
GL_EXACT_DEGREE = 2 * GL_NODES - 1
QUAD_RTOL = 1e-10
QUAD_MAX_LEVEL = 14
CPOINT_SCAN = 1024
CPOINT_MAX_ITERS = 200
CERT_RTOL = 1e-8
# where monotonicity is sampled on unbounded scales when no window is given
DEFAULT_CHECK_WINDOW = (-100.0, 100.0)


@lru_cache(maxsize=1)
def _gauss_legendre() -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(GL_NODES)
    return 0.5 * (x + 1.0), 0.5 * w


def _gl_panel(fn, a: float, b: float) -> float:
    x, w = _gauss_legendre()
    h = b - a
    return h * sum(wi * fn(a + h * xi) for xi, wi in zip(x.tolist(), w.tolist()))


def integrate_unit(fn, poly_degree: Optional[int] = None) -> float:
    """``∫_0^1 fn``: one Gauss-Legendre panel if ``fn`` is a low-degree polynomial,
    otherwise composite panels doubled until two estimates agree."""
    prev = _gl_panel(fn, 0.0, 1.0)
    if poly_degree is not None and poly_degree <= GL_EXACT_DEGREE:
        return prev
    for level in range(1, QUAD_MAX_LEVEL + 1):
        n = 2**level
        cur = math.fsum(_gl_panel(fn, i / n, (i + 1) / n) for i in range(n))
        if abs(cur - prev) <= QUAD_RTOL * max(abs(cur), 1e-300) or cur == prev:
            return cur
        prev = cur
    raise EvaluationError(f"quadrature did not converge after {2**QUAD_MAX_LEVEL} panels")


def chain_integral(ts: TimeScale, f: RealFunction, g: RealFunction, t: float, alpha) -> float:
    alpha = parse_order(alpha)
    t = _require_tk(ts, t)
    dg = nabla(ts, g, t, alpha).value
    r = ts.rho(t)
    step = signed_power(t - r, alpha) * dg if r < t else 0.0
    base = g(r)
    if step == 0.0:
        return f.eval_derivative(base) * dg
    d = degree(f.derivative)
    avg = integrate_unit(lambda phi: f.eval_derivative(base + phi * step), d)
    return avg * dg


def naive_chain(ts: TimeScale, f: RealFunction, g: RealFunction, t: float, alpha) -> float:
    """``f'(g(t)) ∇g(t)``; right only at left-dense points."""
    return f.eval_derivative(g(t)) * nabla(ts, g, t, alpha).value


@dataclass(frozen=True)
class ChainPointCert:
    c: float
    lhs: float
    rhs: float
    residual: float

    def valid(self, rho: float, t: float) -> bool:
        return rho <= self.c <= t and self.residual <= CERT_RTOL * (1.0 + abs(self.lhs))

    def as_dict(self):
        return dict(self.__dict__)


def chain_c_point(ts: TimeScale, f: RealFunction, g: RealFunction, t: float, alpha) -> ChainPointCert:
    alpha = parse_order(alpha)
    t = _require_tk(ts, t)
    lhs = nabla(ts, compose(f, g), t, alpha).value
    dg = nabla(ts, g, t, alpha).value
    r = ts.rho(t)
    if r == t:
        rhs = f.eval_derivative(g(t)) * dg
        return ChainPointCert(t, lhs, rhs, abs(lhs - rhs))
    if dg == 0.0:
        return ChainPointCert(r, lhs, 0.0, abs(lhs))

    def h(c):
        return f.eval_derivative(g(c)) * dg - lhs

    tol = CERT_RTOL * (1.0 + abs(lhs))
    xs = np.linspace(r, t, CPOINT_SCAN + 1).tolist()
    hs = [h(x) for x in xs]
    for i, v in enumerate(hs):
        if v == 0.0:
            return ChainPointCert(xs[i], lhs, lhs, 0.0)
        if i and (hs[i - 1] < 0) != (v < 0):
            lo, hi, hlo = xs[i - 1], xs[i], hs[i - 1]
            width = 1e-12 * (1.0 + abs(t))
            for _ in range(CPOINT_MAX_ITERS):
                if hi - lo <= width:
                    break
                m = 0.5 * (lo + hi)
                hm = h(m)
                if hm == 0.0:
                    lo = hi = m
                    break
                if (hm < 0) == (hlo < 0):
                    lo, hlo = m, hm
                else:
                    hi = m
            c = lo if abs(h(lo)) <= abs(h(hi)) else hi
            rhs = f.eval_derivative(g(c)) * dg
            return ChainPointCert(c, lhs, rhs, abs(lhs - rhs))
    i = min(range(len(hs)), key=lambda k: abs(hs[k]))
    if abs(hs[i]) <= tol:
        return ChainPointCert(xs[i], lhs, hs[i] + lhs, abs(hs[i]))
    raise InconclusiveSearch("no sign change of f'(g(c))·∇g(t) - ∇(f∘g)(t) on [ρ(t), t]",
                             {"c": xs[i], "residual": abs(hs[i])})


def _affine_coeffs(g: RealFunction) -> tuple[float, float]:
    try:
        c0 = g.eval_exact(0)
        return float(g.eval_exact(1) - c0), float(c0)
    except NotExact:
        return g(1.0) - g(0.0), g(0.0)


def image_timescale(ts: TimeScale, g: RealFunction, window: Optional[tuple[float, float]] = None,
                    seed: int = 0) -> TimeScale:
    """``Ran(g)`` for a strictly increasing ``g`` on ``ts`` (optionally within ``window``)."""
    if window is None and not ts.bounded and not (isinstance(ts, UniformGrid) and g.is_affine) \
            and not isinstance(ts, ContinuousInterval):
        raise DomainError("image of an unbounded time scale under a non-affine map needs a window")
    check = window if window is not None else None if ts.bounded else DEFAULT_CHECK_WINDOW
    require_increasing(g, ts, window=check, seed=seed)
    if window is not None:
        lo, hi = ts.ceil(window[0]), ts.floor(window[1])
        if lo is None or hi is None or lo > hi:
            raise DomainError("window contains no points of the time scale")
        if isinstance(ts, UniformGrid) and g.is_affine:
            ts = UniformGrid.between(ts.offset, ts.step, lo, hi)
        elif lo == hi:
            return FiniteSet([g(lo)])
        else:
            ts = ts.restrict(lo, hi)
    if isinstance(ts, UniformGrid):
        if g.is_affine:
            m, c = _affine_coeffs(g)
            return UniformGrid(m * ts.offset + c, m * ts.step, ts.lo_index, ts.hi_index)
        if len(ts) > MAX_MATERIALIZE:
            raise DomainError("grid too large to map pointwise; pass a smaller window")
        return FiniteSet([g(ts.value(k)) for k in ts.indices()])
    if isinstance(ts, FiniteSet):
        return FiniteSet([g(p) for p in ts.points])
    if isinstance(ts, ContinuousInterval):
        return ContinuousInterval(_map_end(g, ts.a), _map_end(g, ts.b))
    if isinstance(ts, PieceUnion):
        return simplify(PieceUnion([(g(lo), g(hi)) for lo, hi in ts.pieces]))
    raise TypeError(ts)


def _map_end(g: RealFunction, x: float) -> float:
    # an increasing map sends an infinite end to the same infinity
    return x if math.isinf(x) else g(x)


def _local_window(ts: TimeScale, t: float, steps: int = 3) -> tuple[float, float]:
    lo = ts.iterate_rho(t, steps)
    hi = t
    for _ in range(steps):
        hi = ts.sigma(hi)
    return lo - 1.0, hi + 1.0


def compose_monotone(ts: TimeScale, g: RealFunction, f: RealFunction, t: float, alpha,
                     window: Optional[tuple[float, float]] = None) -> float:
    """``(∇f over Ran(g))(g(t)) · ∇g(t)`` for strictly increasing ``g``."""
    alpha = parse_order(alpha)
    t = _require_tk(ts, t)
    image = image_timescale(ts, g, window or _local_window(ts, t))
    u = g(t)
    if not image.contains(u):
        raise DomainError(f"g(t) = {u!r} is not in the image time scale")
    return nabla(image, f, u, 1).value * nabla(ts, g, t, alpha).value


def invert_on(ts: TimeScale, f: RealFunction, y: float, max_expand: int = 200) -> float:
    """The point ``s`` of ``ts`` with ``f(s) = y``, for strictly increasing ``f``."""
    lo = ts.lower if ts.lower is not None else None
    hi = ts.upper if ts.upper is not None else None
    span = 1.0
    if lo is None:
        lo = (hi if hi is not None else 0.0) - span
        while f(lo) > y and max_expand:
            span *= 2
            lo, max_expand = lo - span, max_expand - 1
    if hi is None:
        hi = lo + 1.0
        span = 1.0
        while f(hi) < y and max_expand:
            span *= 2
            hi, max_expand = hi + span, max_expand - 1
    if not f(lo) <= y <= f(hi):
        raise DomainError(f"{y!r} is outside the range of {f.source}")
    for _ in range(200):
        m = 0.5 * (lo + hi)
        if not lo < m < hi:
            break
        if f(m) < y:
            lo = m
        else:
            hi = m
    tol = 1e-9 * (1.0 + abs(y))
    for s in (ts.floor(lo), ts.ceil(lo), ts.floor(hi), ts.ceil(hi)):
        if s is not None and abs(f(s) - y) <= tol:
            return s
    raise DomainError(f"{y!r} is not the image of a point of the time scale under {f.source}")


def inverse_nabla(ts: TimeScale, f: RealFunction, t: float, alpha,
                  window: Optional[tuple[float, float]] = None) -> float:
    """``∇`` of ``f⁻¹`` at ``t`` in ``Ran(f)``: ``ν(t)**(1-α) / ∇f(f⁻¹(t))``."""
    alpha = parse_order(alpha)
    s = invert_on(ts, f, t)
    image = image_timescale(ts, f, window or _local_window(ts, s))
    if not image.tk_contains(t):
        raise DomainError(f"t={t!r} not in T^k of the image time scale")
    d1 = nabla(ts, f, s, 1).value
    if d1 == 0.0:
        raise PreconditionError(f"∇f vanishes at f⁻¹(t) = {s!r}")
    if alpha.is_one:
        return 1.0 / d1
    return image.nu(t) ** float(1 - alpha.value) / d1


def inverse_direct(ts: TimeScale, f: RealFunction, t: float, alpha,
                   window: Optional[tuple[float, float]] = None) -> float:
    """Backward quotient of ``f⁻¹`` on the image scale (left-scattered ``t`` only)."""
    alpha = parse_order(alpha)
    s = invert_on(ts, f, t)
    image = image_timescale(ts, f, window or _local_window(ts, s))
    rt = image.rho(t)
    if rt == t:
        raise DomainError("direct inverse quotient needs a left-scattered point")
    return (s - invert_on(ts, f, rt)) / signed_power(t - rt, alpha)
