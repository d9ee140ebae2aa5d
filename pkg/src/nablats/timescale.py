"""Time scales: nonempty closed subsets of the real line.

Four concrete representations share the :class:`TimeScale` interface:

* :class:`FiniteSet`  -- a strictly increasing tuple of reals,
* :class:`UniformGrid` -- ``offset + k*step`` for integer ``k``, optionally bounded,
  never materialized,
* :class:`ContinuousInterval` -- ``[a, b]`` (either end may be infinite),
* :class:`PieceUnion` -- sorted, disjoint closed intervals and isolated points.

All values are immutable. Membership on grids and intervals tolerates
``MEMBER_TOL`` of round-off; finite-set membership is exact.
"""

from __future__ import annotations

import bisect
import math
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import DomainError, ParseError

MEMBER_TOL = 1e-12
# restrict() on a grid materializes at most this many points
MAX_MATERIALIZE = 100_000

LEFT_DENSE = "LeftDense"
LEFT_SCATTERED = "LeftScattered"


@dataclass(frozen=True)
class PointClass:
    kind: str
    nu: float

    @property
    def left_dense(self) -> bool:
        return self.kind == LEFT_DENSE


class TimeScale(ABC):
    """Common interface; subclasses implement the primitive queries."""

    @property
    @abstractmethod
    def lower(self) -> Optional[float]:
        """Minimum of the set, or ``None`` when unbounded below."""

    @property
    @abstractmethod
    def upper(self) -> Optional[float]:
        """Maximum of the set, or ``None`` when unbounded above."""

    @abstractmethod
    def contains(self, t: float) -> bool: ...

    @abstractmethod
    def canonical(self, t: float) -> float:
        """The stored member that ``t`` denotes (``t`` must be a member)."""

    @abstractmethod
    def _rho(self, t: float) -> float: ...

    @abstractmethod
    def _sigma(self, t: float) -> float: ...

    @abstractmethod
    def floor(self, x: float) -> Optional[float]:
        """Largest member ``<= x`` or ``None``."""

    @abstractmethod
    def ceil(self, x: float) -> Optional[float]:
        """Smallest member ``>= x`` or ``None``."""

    @abstractmethod
    def segments(self) -> list[tuple[float, float]]:
        """Bounded scales only: ordered ``(lo, hi)`` pieces, ``lo == hi`` for points."""

    @abstractmethod
    def dense_reach(self, t: float, side: int) -> float:
        """Length of the continuum adjoining ``t`` on ``side`` (-1 left, +1 right)."""

    @abstractmethod
    def text(self) -> str: ...

    # -- derived operations -------------------------------------------------

    def __contains__(self, t) -> bool:
        return self.contains(t)

    def _member(self, t: float) -> float:
        if not self.contains(t):
            raise DomainError(f"{t!r} is not a point of {self.text()}")
        return self.canonical(t)

    @property
    def bounded(self) -> bool:
        return self.lower is not None and self.upper is not None

    @property
    def is_finite(self) -> bool:
        return False

    def rho(self, t: float) -> float:
        """Backward jump; the minimum maps to itself."""
        return self._rho(self._member(t))

    def sigma(self, t: float) -> float:
        """Forward jump; the maximum maps to itself."""
        return self._sigma(self._member(t))

    def nu(self, t: float) -> float:
        t = self._member(t)
        return t - self._rho(t)

    def classify_point(self, t: float) -> PointClass:
        g = self.nu(t)
        return PointClass(LEFT_DENSE if g == 0 else LEFT_SCATTERED, g)

    def tk_contains(self, t: float) -> bool:
        t = self._member(t)
        m = self.lower
        if m is None or t != m:
            return True
        return not self._sigma(m) > m

    def iterate_rho(self, t: float, n: int) -> float:
        if n < 0:
            raise DomainError("iteration count must be nonnegative")
        p = self._member(t)
        for _ in range(n):
            q = self._rho(p)
            if q == p:
                break
            p = q
        return p

    def restrict(self, a: float, b: float) -> "TimeScale":
        """The compact time-scale interval ``[a, b]_T``."""
        a, b = self._member(a), self._member(b)
        if not a < b:
            raise DomainError(f"restrict needs a < b, got {a!r}, {b!r}")
        return self._restrict(a, b)

    @abstractmethod
    def _restrict(self, a: float, b: float) -> "TimeScale": ...

    def open_points(self, a: float, b: float) -> list[tuple[float, float]]:
        """Pieces of ``(a, b)_T``: the segments of ``[a, b]_T`` minus the ends."""
        out = []
        for lo, hi in self.restrict(a, b).segments():
            if lo == hi:
                if a < lo < b:
                    out.append((lo, hi))
            else:
                out.append((lo, hi))
        return out

    def sample(self, rng: random.Random, n: int, window: Optional[tuple[float, float]] = None) -> list[float]:
        """``n`` random members, drawn from ``window`` when the scale is unbounded."""
        scale: TimeScale = self
        if window is not None:
            lo, hi = window
            lo_m = self.ceil(lo)
            hi_m = self.floor(hi)
            if lo_m is None or hi_m is None or lo_m > hi_m:
                raise DomainError("sampling window contains no points")
            if lo_m < hi_m:
                scale = self.restrict(lo_m, hi_m)
            else:
                return [lo_m] * n
        elif not self.bounded:
            raise DomainError("sampling an unbounded time scale needs a window")
        segs = scale.segments()
        weights = [max(hi - lo, 1.0) for lo, hi in segs]
        out = []
        for _ in range(n):
            lo, hi = rng.choices(segs, weights=weights)[0]
            out.append(lo if lo == hi else rng.uniform(lo, hi))
        return out

    def __str__(self) -> str:
        return self.text()


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


@dataclass(frozen=True)
class FiniteSet(TimeScale):
    points: tuple[float, ...]

    def __init__(self, points: Sequence[float]):
        pts = tuple(float(p) for p in points)
        if not pts:
            raise DomainError("a finite time scale needs at least one point")
        if any(not math.isfinite(p) for p in pts):
            raise DomainError("finite time-scale points must be finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise DomainError("finite time-scale points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def lower(self):
        return self.points[0]

    @property
    def upper(self):
        return self.points[-1]

    @property
    def is_finite(self) -> bool:
        return True

    def contains(self, t):
        i = bisect.bisect_left(self.points, t)
        return i < len(self.points) and self.points[i] == t

    def canonical(self, t):
        return float(t)

    def _rho(self, t):
        i = bisect.bisect_left(self.points, t)
        return self.points[i - 1] if i > 0 else t

    def _sigma(self, t):
        i = bisect.bisect_left(self.points, t)
        return self.points[i + 1] if i + 1 < len(self.points) else t

    def floor(self, x):
        i = bisect.bisect_right(self.points, x)
        return self.points[i - 1] if i > 0 else None

    def ceil(self, x):
        i = bisect.bisect_left(self.points, x)
        return self.points[i] if i < len(self.points) else None

    def segments(self):
        return [(p, p) for p in self.points]

    def dense_reach(self, t, side):
        return 0.0

    def _restrict(self, a, b):
        i = bisect.bisect_left(self.points, a)
        j = bisect.bisect_right(self.points, b)
        return FiniteSet(self.points[i:j])

    def text(self):
        return "finite:" + ",".join(_fmt(p) for p in self.points)


@dataclass(frozen=True)
class UniformGrid(TimeScale):
    """``{offset + k*step}``; ``lo_index``/``hi_index`` bound ``k`` when set."""

    offset: float
    step: float
    lo_index: Optional[int] = None
    hi_index: Optional[int] = None

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise DomainError("grid step must be a positive finite real")
        if self.lo_index is not None and self.hi_index is not None and self.lo_index > self.hi_index:
            raise DomainError("grid bounds leave no points")

    @classmethod
    def between(cls, offset: float, step: float, lower=None, upper=None) -> "UniformGrid":
        """Grid restricted to the reals ``lower <= t <= upper``."""
        lo = hi = None
        if lower is not None:
            lo = math.ceil((lower - offset) / step - MEMBER_TOL)
        if upper is not None:
            hi = math.floor((upper - offset) / step + MEMBER_TOL)
        return cls(float(offset), float(step), lo, hi)

    def value(self, k: int) -> float:
        return self.offset + k * self.step

    def _index(self, t: float) -> Optional[int]:
        x = (t - self.offset) / self.step
        k = round(x)
        if abs(x - k) > MEMBER_TOL * max(1.0, abs(x)):
            return None
        if self.lo_index is not None and k < self.lo_index:
            return None
        if self.hi_index is not None and k > self.hi_index:
            return None
        return k

    @property
    def lower(self):
        return None if self.lo_index is None else self.value(self.lo_index)

    @property
    def upper(self):
        return None if self.hi_index is None else self.value(self.hi_index)

    @property
    def is_finite(self) -> bool:
        return self.bounded

    def __len__(self):
        if not self.bounded:
            raise TypeError("unbounded grid has no length")
        return self.hi_index - self.lo_index + 1

    def contains(self, t):
        return math.isfinite(t) and self._index(t) is not None

    def canonical(self, t):
        return self.value(self._index(t))

    def _rho(self, t):
        k = self._index(t)
        if self.lo_index is not None and k == self.lo_index:
            return t
        return self.value(k - 1)

    def _sigma(self, t):
        k = self._index(t)
        if self.hi_index is not None and k == self.hi_index:
            return t
        return self.value(k + 1)

    def _clamp(self, k):
        if self.lo_index is not None and k < self.lo_index:
            return None
        if self.hi_index is not None and k > self.hi_index:
            return None
        return k

    def floor(self, x):
        k = math.floor((x - self.offset) / self.step + MEMBER_TOL)
        if self.hi_index is not None:
            k = min(k, self.hi_index)
        k = self._clamp(k)
        return None if k is None else self.value(k)

    def ceil(self, x):
        k = math.ceil((x - self.offset) / self.step - MEMBER_TOL)
        if self.lo_index is not None:
            k = max(k, self.lo_index)
        k = self._clamp(k)
        return None if k is None else self.value(k)

    def indices(self) -> Iterator[int]:
        if not self.bounded:
            raise DomainError("cannot enumerate an unbounded grid")
        return iter(range(self.lo_index, self.hi_index + 1))

    def segments(self):
        return [(self.value(k), self.value(k)) for k in self.indices()]

    def dense_reach(self, t, side):
        return 0.0

    def _restrict(self, a, b):
        lo, hi = self._index(a), self._index(b)
        if hi - lo + 1 <= MAX_MATERIALIZE:
            return FiniteSet([self.value(k) for k in range(lo, hi + 1)])
        return UniformGrid(self.offset, self.step, lo, hi)

    def text(self):
        if self.offset == 0 and self.hi_index is None:
            if self.step == 1 and self.lo_index is None:
                return "Z"
            if self.step == 1 and self.lo_index == 1:
                return "N"
            if self.lo_index is None:
                return f"hZ:{_fmt(self.step)}"
        lo = "-inf" if self.lo_index is None else _fmt(self.lower)
        hi = "inf" if self.hi_index is None else _fmt(self.upper)
        return f"grid:{_fmt(self.offset)}+{_fmt(self.step)}Z[{lo},{hi}]"


@dataclass(frozen=True)
class ContinuousInterval(TimeScale):
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"interval needs a < b, got [{self.a}, {self.b}]")

    @property
    def lower(self):
        return None if math.isinf(self.a) else self.a

    @property
    def upper(self):
        return None if math.isinf(self.b) else self.b

    def contains(self, t):
        return math.isfinite(t) and self.a - MEMBER_TOL <= t <= self.b + MEMBER_TOL

    def canonical(self, t):
        return min(max(float(t), self.a), self.b)

    def _rho(self, t):
        return t

    def _sigma(self, t):
        return t

    def floor(self, x):
        if x < self.a:
            return None
        return min(x, self.b)

    def ceil(self, x):
        if x > self.b:
            return None
        return max(x, self.a)

    def segments(self):
        if not self.bounded:
            raise DomainError("cannot enumerate an unbounded interval")
        return [(self.a, self.b)]

    def dense_reach(self, t, side):
        return t - self.a if side < 0 else self.b - t

    def _restrict(self, a, b):
        return ContinuousInterval(a, b)

    def text(self):
        if math.isinf(self.a) and math.isinf(self.b):
            return "R"
        return f"interval:{_fmt(self.a)}:{_fmt(self.b)}"


def reals() -> ContinuousInterval:
    return ContinuousInterval(-math.inf, math.inf)


def integers() -> UniformGrid:
    return UniformGrid(0.0, 1.0)


def naturals() -> UniformGrid:
    return UniformGrid(0.0, 1.0, 1, None)


def h_integers(h: float) -> UniformGrid:
    return UniformGrid(0.0, float(h))


@dataclass(frozen=True)
class PieceUnion(TimeScale):
    """Normal form: sorted disjoint pieces ``(lo, hi)``; points have ``lo == hi``."""

    pieces: tuple[tuple[float, float], ...]

    def __init__(self, pieces: Sequence[tuple[float, float]]):
        raw = []
        for lo, hi in pieces:
            lo, hi = float(lo), float(hi)
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise DomainError(f"bad piece [{lo}, {hi}]")
            raw.append((lo, hi))
        if not raw:
            raise DomainError("a union time scale needs at least one piece")
        raw.sort()
        merged = [raw[0]]
        for lo, hi in raw[1:]:
            plo, phi = merged[-1]
            if lo <= phi:
                merged[-1] = (plo, max(phi, hi))
            else:
                merged.append((lo, hi))
        object.__setattr__(self, "pieces", tuple(merged))

    @property
    def lower(self):
        return self.pieces[0][0]

    @property
    def upper(self):
        return self.pieces[-1][1]

    @property
    def is_finite(self) -> bool:
        return all(lo == hi for lo, hi in self.pieces)

    def _locate(self, t):
        i = bisect.bisect_right(self.pieces, (t, math.inf)) - 1
        for j in (i, i + 1):
            if 0 <= j < len(self.pieces):
                lo, hi = self.pieces[j]
                if lo == hi:
                    if t == lo:
                        return j
                elif lo - MEMBER_TOL <= t <= hi + MEMBER_TOL:
                    return j
        return None

    def contains(self, t):
        return math.isfinite(t) and self._locate(t) is not None

    def canonical(self, t):
        lo, hi = self.pieces[self._locate(t)]
        return min(max(float(t), lo), hi)

    def _rho(self, t):
        j = self._locate(t)
        lo, _ = self.pieces[j]
        if t > lo:
            return t
        return self.pieces[j - 1][1] if j > 0 else t

    def _sigma(self, t):
        j = self._locate(t)
        _, hi = self.pieces[j]
        if t < hi:
            return t
        return self.pieces[j + 1][0] if j + 1 < len(self.pieces) else t

    def floor(self, x):
        i = bisect.bisect_right(self.pieces, (x, math.inf)) - 1
        if i < 0:
            return None
        lo, hi = self.pieces[i]
        return min(x, hi)

    def ceil(self, x):
        i = bisect.bisect_right(self.pieces, (x, math.inf)) - 1
        if i >= 0 and self.pieces[i][1] >= x:
            return x if self.pieces[i][0] <= x else self.pieces[i][0]
        return self.pieces[i + 1][0] if i + 1 < len(self.pieces) else None

    def segments(self):
        return list(self.pieces)

    def dense_reach(self, t, side):
        lo, hi = self.pieces[self._locate(t)]
        return t - lo if side < 0 else hi - t

    def _restrict(self, a, b):
        out = []
        for lo, hi in self.pieces:
            lo, hi = max(lo, a), min(hi, b)
            if lo <= hi:
                out.append((lo, hi))
        return simplify(PieceUnion(out))

    def text(self):
        parts = []
        for lo, hi in self.pieces:
            parts.append(f"point:{_fmt(lo)}" if lo == hi else f"interval:{_fmt(lo)}:{_fmt(hi)}")
        return "union:(" + ";".join(parts) + ")"


def simplify(ts: PieceUnion) -> TimeScale:
    """Collapse a union into a single interval or a finite set when possible."""
    if len(ts.pieces) == 1 and ts.pieces[0][0] < ts.pieces[0][1]:
        return ContinuousInterval(*ts.pieces[0])
    if ts.is_finite:
        return FiniteSet([lo for lo, _ in ts.pieces])
    return ts


def _real(text: str, src: str, col: int) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"expected a decimal literal in {src!r}, got {text!r}", col) from None
    if not math.isfinite(x):
        raise ParseError(f"non-finite literal {text!r}", col)
    return x


def _piece(text: str, src: str, col: int) -> tuple[float, float]:
    head, _, rest = text.partition(":")
    if head == "point":
        x = _real(rest, src, col + 6)
        return (x, x)
    if head == "interval":
        parts = rest.split(":")
        if len(parts) != 2:
            raise ParseError("interval piece needs interval:<a>:<b>", col)
        a, b = _real(parts[0], src, col + 9), _real(parts[1], src, col + 10 + len(parts[0]))
        if not a < b:
            raise ParseError("interval piece needs a < b", col)
        return (a, b)
    raise ParseError(f"unknown union piece {head!r}", col)


def parse_timescale(src: str) -> TimeScale:
    """Parse ``Z | N | R | hZ:<h> | interval:<a>:<b> | finite:... | union:(...)``."""
    s = src.strip()
    if s == "Z":
        return integers()
    if s == "N":
        return naturals()
    if s == "R":
        return reals()
    if s.startswith("hZ:"):
        h = _real(s[3:], src, 4)
        if h <= 0:
            raise ParseError("hZ step must be positive", 4)
        return h_integers(h)
    if s.startswith("interval:"):
        a, b = _piece(s, src, 1)
        return ContinuousInterval(a, b)
    if s.startswith("finite:"):
        items = s[7:].split(",")
        vals, col = [], 8
        for item in items:
            vals.append(_real(item, src, col))
            col += len(item) + 1
        if len(set(vals)) != len(vals):
            raise ParseError(f"duplicate point in {src!r}", 8)
        return FiniteSet(sorted(vals))
    if s.startswith("union:(") and s.endswith(")"):
        body = s[7:-1]
        if not body:
            raise ParseError("empty union", 8)
        pieces, col = [], 8
        for item in body.split(";"):
            pieces.append(_piece(item, src, col))
            col += len(item) + 1
        ordered = sorted(pieces)
        for (_, h1), (l2, _) in zip(ordered, ordered[1:]):
            if l2 <= h1:
                raise ParseError("union pieces must be disjoint with positive gaps", 8)
        return PieceUnion(pieces)
    raise ParseError(f"unrecognized time scale {src!r}", 1)

