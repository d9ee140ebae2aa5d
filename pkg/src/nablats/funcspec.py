"""Single-variable function expressions in ``t``.

Grammar (whitespace insensitive)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := ('-' | '+') unary | power
    power := atom ('^' unary)?          # exponent must fold to a rational constant
    atom  := NUMBER | 't' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
    FUNC  := sqrt | cbrt | abs | exp | ln | sin | cos

Parsing yields a :class:`RealFunction` carrying the tree, its symbolic
derivative, and an optional monotonicity claim. Evaluation raises
:class:`~nablats.errors.EvaluationError` instead of producing NaN.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import EvaluationError, NonRealPowerError, NotExact, ParseError, PreconditionError

FUNCTIONS = ("sqrt", "cbrt", "abs", "exp", "ln", "sin", "cos")
INCREASING = "strictly-increasing"


# -- tree ----------------------------------------------------------------------


class Expr:
    """Base node. Subclasses are frozen dataclasses, so ``==`` is structural."""

    def substitute(self, repl: "Expr") -> "Expr":
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expr):
    value: float
    exact: Optional[Fraction] = None
    name: Optional[str] = None

    @classmethod
    def of(cls, q) -> "Const":
        q = Fraction(q)
        return cls(float(q), q)

    def substitute(self, repl):
        return self


PI = Const(math.pi, None, "pi")


@dataclass(frozen=True)
class Var(Expr):
    def substitute(self, repl):
        return repl


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    arg: Expr

    def substitute(self, repl):
        return Unary(self.op, self.arg.substitute(repl))


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def substitute(self, repl):
        return Binary(self.op, self.left.substitute(repl), self.right.substitute(repl))


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def substitute(self, repl):
        return Pow(self.base.substitute(repl), self.exponent)


T = Var()
ZERO = Const.of(0)
ONE = Const.of(1)


def _is(e: Expr, q) -> bool:
    return isinstance(e, Const) and e.exact is not None and e.exact == q


# -- printing ------------------------------------------------------------------


def _decimal(q: Fraction) -> str:
    """Exact decimal text for ``q`` when its denominator is ``2^a 5^b``."""
    if q.denominator == 1:
        return str(q.numerator)
    d, twos, fives = q.denominator, 0, 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"({q.numerator}/{q.denominator})"
    k = max(twos, fives)
    n = abs(q * 10**k)
    digits = str(n.numerator).rjust(k + 1, "0")
    body = digits[:-k] + "." + digits[-k:]
    return "-" + body if q < 0 else body


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        if e.name:
            return e.name
        if e.exact is None:
            return repr(e.value)
        s = _decimal(e.exact)
        return f"({s})" if e.exact < 0 else s
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{to_text(e.arg)})"
        return f"{e.op}({to_text(e.arg)})"
    if isinstance(e, Binary):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    if isinstance(e, Pow):
        x = e.exponent
        ex = _decimal(x) if x >= 0 else f"(-{_decimal(-x)})"
        return f"({to_text(e.base)} ^ {ex})"
    raise TypeError(e)


# -- parsing -------------------------------------------------------------------


@dataclass
class _Tok:
    kind: str  # num, name, op, end
    text: str
    col: int


def _tokenize(src: str) -> list[_Tok]:
    toks, i, n = [], 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    while k < n and src[k].isdigit():
                        k += 1
                    j = k
            toks.append(_Tok("num", src[i:j], i + 1))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("name", src[i:j], i + 1))
            i = j
            continue
        if c in "+-*/^()":
            toks.append(_Tok("op", c, i + 1))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i + 1)
    toks.append(_Tok("end", "", n + 1))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.take()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.col)
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.col)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            e = Binary(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            e = Binary(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.text == "-":
            self.take()
            return Unary("neg", self.unary())
        if tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().text == "^":
            caret = self.take()
            ex = self.unary()
            try:
                q = _fold_rational(ex)
            except NotExact:
                raise ParseError("exponent of '^' must be a constant rational", caret.col) from None
            return Pow(base, q)
        return base

    def atom(self) -> Expr:
        tok = self.take()
        if tok.kind == "num":
            q = Fraction(tok.text)
            return Const(float(q), q)
        if tok.kind == "name":
            if tok.text == "t":
                return T
            if tok.text == "pi":
                return PI
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(tok.text, arg)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.col)
        if tok.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "end":
            raise ParseError("unexpected end of input", tok.col)
        raise ParseError(f"unexpected {tok.text!r}", tok.col)


def _fold_rational(e: Expr) -> Fraction:
    if isinstance(e, Const):
        if e.exact is None:
            raise NotExact("irrational constant")
        return e.exact
    if isinstance(e, Unary) and e.op == "neg":
        return -_fold_rational(e.arg)
    if isinstance(e, Binary):
        a, b = _fold_rational(e.left), _fold_rational(e.right)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise NotExact("division by zero")
        return a / b
    if isinstance(e, Pow) and e.exponent.denominator == 1:
        base = _fold_rational(e.base)
        if base == 0 and e.exponent < 0:
            raise NotExact("division by zero")
        return base ** int(e.exponent)
    raise NotExact("not a rational constant")


def parse_expr(src: str) -> Expr:
    if not src or not src.strip():
        raise ParseError("empty expression", 1)
    return _Parser(src).parse()


# -- float evaluation -----------------------------------------------------------


def cbrt(x: float) -> float:
    if x == 0 or not math.isfinite(x):
        return x
    y = math.copysign(abs(x) ** (1.0 / 3.0), x)
    return y - (y * y * y - x) / (3.0 * y * y)


def real_power(x: float, q: Fraction) -> float:
    """``x**q`` over the reals; negative ``x`` needs an odd denominator."""
    if q.denominator == 1:
        if x == 0 and q < 0:
            raise EvaluationError("zero raised to a negative power")
        return x ** int(q)
    if x > 0:
        return x ** float(q)
    if x == 0:
        if q < 0:
            raise EvaluationError("zero raised to a negative power")
        return 0.0
    if q.denominator % 2 == 0:
        raise NonRealPowerError(f"({x!r})^({q}) is not real")
    mag = abs(x) ** float(q)
    if q.denominator == 3 and abs(q.numerator) == 1:
        mag = cbrt(abs(x)) ** q.numerator
    return -mag if q.numerator % 2 else mag


def _sqrt(x):
    if x < 0:
        raise EvaluationError(f"sqrt of negative {x!r}")
    return math.sqrt(x)


def _ln(x):
    if x <= 0:
        raise EvaluationError(f"ln of nonpositive {x!r}")
    return math.log(x)


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        raise EvaluationError(f"exp overflow at {x!r}") from None


def _sign(x):
    if x == 0:
        raise EvaluationError("abs is not differentiable at 0")
    return 1.0 if x > 0 else -1.0


_UNARY: dict[str, Callable[[float], float]] = {
    "neg": lambda x: -x,
    "sqrt": _sqrt,
    "cbrt": cbrt,
    "abs": abs,
    "exp": _exp,
    "ln": _ln,
    "sin": math.sin,
    "cos": math.cos,
    "sign": _sign,
}


def _div(a, b):
    if b == 0:
        raise EvaluationError("division by zero")
    return a / b


_BINARY = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
}


def compile_expr(e: Expr) -> Callable[[float], float]:
    """Closure evaluating ``e``; no finiteness check (see :func:`evaluator`)."""
    if isinstance(e, Const):
        v = e.value
        return lambda x: v
    if isinstance(e, Var):
        return lambda x: x
    if isinstance(e, Unary):
        fn, arg = _UNARY[e.op], compile_expr(e.arg)
        return lambda x: fn(arg(x))
    if isinstance(e, Binary):
        fn, left, right = _BINARY[e.op], compile_expr(e.left), compile_expr(e.right)
        return lambda x: fn(left(x), right(x))
    if isinstance(e, Pow):
        base, q = compile_expr(e.base), e.exponent
        return lambda x: real_power(base(x), q)
    raise TypeError(e)


def evaluator(e: Expr) -> Callable[[float], float]:
    inner = compile_expr(e)

    def run(x: float) -> float:
        try:
            y = inner(float(x))
        except OverflowError:
            raise EvaluationError(f"overflow evaluating at {x!r}") from None
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, EvaluationError):
                raise
            raise EvaluationError(f"{exc} at {x!r}") from None
        if not math.isfinite(y):
            raise EvaluationError(f"non-finite value at {x!r}")
        return y

    return run


# -- exact evaluation ------------------------------------------------------------


def eval_exact(e: Expr, x: Fraction) -> Fraction:
    """Rational evaluation for rational-coefficient rational functions."""
    if isinstance(e, Const):
        if e.exact is None:
            raise NotExact(e.name or "inexact constant")
        return e.exact
    if isinstance(e, Var):
        return x
    if isinstance(e, Unary):
        if e.op != "neg":
            raise NotExact(e.op)
        return -eval_exact(e.arg, x)
    if isinstance(e, Binary):
        a, b = eval_exact(e.left, x), eval_exact(e.right, x)
        if e.op == "/":
            if b == 0:
                raise EvaluationError("division by zero")
            return a / b
        return _BINARY[e.op](a, b)
    if isinstance(e, Pow):
        base = eval_exact(e.base, x)
        q = e.exponent
        if q.denominator == 1:
            if base == 0 and q < 0:
                raise EvaluationError("zero raised to a negative power")
            return base ** int(q)
        root = exact_root(base, q.denominator)
        if root is None:
            raise NotExact("irrational power")
        if root == 0 and q < 0:
            raise EvaluationError("zero raised to a negative power")
        return root ** q.numerator
    raise TypeError(e)


def _iroot(n: int, k: int) -> Optional[int]:
    if n < 0:
        return None
    r = round(n ** (1.0 / k)) if n < 2**1000 else int(math.exp(math.log(n) / k))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**k == n:
            return c
    # fall back to integer Newton for large n
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == n else None


def exact_root(x: Fraction, k: int) -> Optional[Fraction]:
    """The real ``k``-th root of ``x`` if it is rational, else ``None``."""
    if k == 1:
        return x
    if x < 0:
        if k % 2 == 0:
            return None
        r = exact_root(-x, k)
        return None if r is None else -r
    p, q = _iroot(x.numerator, k), _iroot(x.denominator, k)
    if p is None or q is None:
        return None
    return Fraction(p, q)


# -- structure queries ------------------------------------------------------------


def degree(e: Expr) -> Optional[int]:
    """Polynomial degree in ``t``, or ``None`` if ``e`` is not a polynomial."""
    if isinstance(e, Const):
        return 0
    if isinstance(e, Var):
        return 1
    if isinstance(e, Unary):
        d = degree(e.arg)
        if e.op == "neg":
            return d
        return 0 if d == 0 else None
    if isinstance(e, Binary):
        a, b = degree(e.left), degree(e.right)
        if a is None or b is None:
            return None
        if e.op in "+-":
            return max(a, b)
        if e.op == "*":
            return a + b
        return a if b == 0 else None
    if isinstance(e, Pow):
        d = degree(e.base)
        if d == 0:
            return 0
        if d is None or e.exponent.denominator != 1 or e.exponent < 0:
            return None
        return d * int(e.exponent)
    raise TypeError(e)


# -- symbolic derivative ------------------------------------------------------------


def _fold(op, a: Const, b: Const) -> Optional[Const]:
    if a.exact is None or b.exact is None:
        return None
    if op == "/" and b.exact == 0:
        return None
    return Const.of(_BINARY[op](a.exact, b.exact))


def add(a, b):
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold("+", a, b) or Binary("+", a, b)
    return Binary("+", a, b)


def sub(a, b):
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold("-", a, b) or Binary("-", a, b)
    return Binary("-", a, b)


def mul(a, b):
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold("*", a, b) or Binary("*", a, b)
    return Binary("*", a, b)


def div(a, b):
    if _is(b, 1):
        return a
    if _is(a, 0) and not _is(b, 0):
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold("/", a, b) or Binary("/", a, b)
    return Binary("/", a, b)


def neg(a):
    if isinstance(a, Const) and a.exact is not None:
        return Const.of(-a.exact)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def power(a, q: Fraction):
    if q == 0:
        return ONE
    if q == 1:
        return a
    return Pow(a, Fraction(q))


def differentiate(e: Expr) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Binary):
        u, v = e.left, e.right
        du, dv = differentiate(u), differentiate(v)
        if e.op == "+":
            return add(du, dv)
        if e.op == "-":
            return sub(du, dv)
        if e.op == "*":
            return add(mul(du, v), mul(u, dv))
        if _is(dv, 0):
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, Fraction(2)))
    if isinstance(e, Pow):
        du = differentiate(e.base)
        q = e.exponent
        return mul(mul(Const.of(q), power(e.base, q - 1)), du)
    if isinstance(e, Unary):
        u = e.arg
        du = differentiate(u)
        if _is(du, 0):
            return ZERO
        op = e.op
        if op == "neg":
            return neg(du)
        if op == "sqrt":
            return div(du, mul(Const.of(2), e))
        if op == "cbrt":
            return div(du, mul(Const.of(3), power(e, Fraction(2))))
        if op == "abs":
            return mul(Unary("sign", u), du)
        if op == "exp":
            return mul(e, du)
        if op == "ln":
            return div(du, u)
        if op == "sin":
            return mul(Unary("cos", u), du)
        if op == "cos":
            return neg(mul(Unary("sin", u), du))
        if op == "sign":
            return ZERO
    raise TypeError(e)


# -- functions ----------------------------------------------------------------------


@dataclass(frozen=True)
class RealFunction:
    body: Expr
    derivative: Expr
    source: str = ""
    monotone_claim: Optional[str] = None
    _f: Callable = field(default=None, repr=False, compare=False)
    _df: Callable = field(default=None, repr=False, compare=False)

    @classmethod
    def from_expr(cls, body: Expr, source: Optional[str] = None, monotone_claim=None) -> "RealFunction":
        d = differentiate(body)
        return cls(body, d, source if source is not None else to_text(body), monotone_claim,
                   evaluator(body), evaluator(d))

    def __call__(self, x: float) -> float:
        return self._f(x)

    def eval(self, x: float) -> float:
        return self._f(x)

    def eval_derivative(self, x: float) -> float:
        return self._df(x)

    def eval_exact(self, x) -> Fraction:
        return eval_exact(self.body, Fraction(x))

    @property
    def degree(self) -> Optional[int]:
        return degree(self.body)

    @property
    def is_affine(self) -> bool:
        d = self.degree
        return d is not None and d <= 1

    def text(self) -> str:
        return self.source

    def __str__(self) -> str:
        return self.source


def parse_function(src: str, monotone_claim: Optional[str] = None) -> RealFunction:
    return RealFunction.from_expr(parse_expr(src), src.strip(), monotone_claim)


def constant(c) -> RealFunction:
    return RealFunction.from_expr(_num(c))


def compose(f: RealFunction, g: RealFunction) -> RealFunction:
    """``f∘g`` as a new expression, with its own symbolic derivative."""
    return RealFunction.from_expr(f.body.substitute(g.body), f"({f.source})∘({g.source})")


def combine(lam: float, f: RealFunction, omega: float, g: RealFunction) -> RealFunction:
    """``lam*f + omega*g`` as an expression."""
    body = Binary("+", Binary("*", _num(lam), f.body), Binary("*", _num(omega), g.body))
    return RealFunction.from_expr(body)


def product(fs: Sequence[RealFunction]) -> RealFunction:
    body = fs[0].body
    for f in fs[1:]:
        body = Binary("*", body, f.body)
    return RealFunction.from_expr(body)


def _num(x) -> Const:
    if isinstance(x, (int, Fraction)):
        return Const.of(x)
    return Const(float(x), Fraction(x))


def increasing_on_samples(f: RealFunction, ts, pairs: int = 200, seed: int = 0,
                          window: Optional[tuple[float, float]] = None) -> bool:
    """Sampled check that ``f`` is strictly increasing on the time scale ``ts``.

    Draws ``pairs`` random ordered pairs of members and, on scattered parts,
    also compares each sampled point with its backward neighbour.
    """
    rng = random.Random(seed)
    pts = ts.sample(rng, 2 * pairs, window)
    try:
        for s1, s2 in zip(pts[::2], pts[1::2]):
            if s1 == s2:
                continue
            lo, hi = min(s1, s2), max(s1, s2)
            if not f(lo) < f(hi):
                return False
        for p in pts[:pairs]:
            r = ts.rho(p)
            if r < p and not f(r) < f(p):
                return False
    except EvaluationError:
        return False
    return True


def require_increasing(f: RealFunction, ts, window=None, seed: int = 0) -> None:
    if not increasing_on_samples(f, ts, seed=seed, window=window):
        raise PreconditionError(f"{f.source} failed the strict-increase sample check on {ts}")
