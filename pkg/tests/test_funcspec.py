import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from exprgen import rand_expr, smooth_samples
from nablats.errors import EvaluationError, NotExact, ParseError
from nablats.funcspec import (cbrt, compose, constant, degree, eval_exact, exact_root,
                              increasing_on_samples, parse_expr, parse_function, to_text)
from nablats.timescale import integers, naturals


def test_parse_examples():
    assert parse_function("2*t+3")(4) == 11
    assert parse_function("t^2").eval_derivative(3) == 6
    with pytest.raises(ParseError) as e:
        parse_function("2**t")
    assert e.value.column == 3


def test_eval_examples():
    assert parse_function("cbrt(t)")(-8) == -2
    with pytest.raises(EvaluationError):
        parse_function("sqrt(t)")(-1)
    assert parse_function("t^2")(1.5) == 2.25
    with pytest.raises(EvaluationError):
        parse_function("ln(t)")(0)
    with pytest.raises(EvaluationError):
        parse_function("1/t")(0)


def test_derivative_examples():
    f = parse_function("t^2")
    assert f.eval_derivative(math.sqrt(2) * 4) == pytest.approx(8 * math.sqrt(2), rel=1e-15)
    assert parse_function("2*t+3").eval_derivative(17.5) == 2
    assert parse_function("5").eval_derivative(1.0) == 0


def test_cbrt_derivative_undefined_at_zero():
    f = parse_function("cbrt(t)")
    with pytest.raises(EvaluationError):
        f.eval_derivative(0.0)
    assert f.eval_derivative(8.0) == pytest.approx(1 / 12)
    assert f.eval_derivative(-8.0) == pytest.approx(1 / 12)


@pytest.mark.parametrize("src", ["t^t", "2^t", "foo(t)", "t +", "(t", "t)", "sin t", "3..1", "", "x"])
def test_parse_rejects(src):
    with pytest.raises(ParseError):
        parse_function(src)


def test_constant_exponent_folding():
    f = parse_function("t^(1/2 + 1/2)")
    assert f(3.0) == 3.0


def test_odd_root_powers_of_negatives():
    assert parse_function("t^(1/3)")(-27) == pytest.approx(-3)
    with pytest.raises(EvaluationError):
        parse_function("t^(1/2)")(-4)


def test_pi_constant():
    assert parse_function("sin(pi/2)")(0.0) == pytest.approx(1.0)


def test_exact_evaluation():
    f = parse_function("(3/2)*t^3 - t/4 + 0.1")
    assert f.eval_exact(Fraction(2, 3)) == Fraction(3, 2) * Fraction(8, 27) - Fraction(1, 6) + Fraction(1, 10)
    with pytest.raises(NotExact):
        parse_function("sin(t)").eval_exact(1)
    assert eval_exact(parse_expr("t^(3/2)"), Fraction(9, 4)) == Fraction(27, 8)
    with pytest.raises(NotExact):
        eval_exact(parse_expr("t^(1/2)"), Fraction(2))
    with pytest.raises(NotExact):
        eval_exact(parse_expr("sqrt(t)"), Fraction(4))


def test_exact_root():
    assert exact_root(Fraction(-8, 27), 3) == Fraction(-2, 3)
    assert exact_root(Fraction(2), 2) is None
    assert exact_root(Fraction(-4), 2) is None


def test_degree():
    assert degree(parse_expr("3*t^4 - t + 1")) == 4
    assert degree(parse_expr("sqrt(2)*t")) == 1
    assert degree(parse_expr("sin(t)")) is None
    assert degree(parse_expr("t/2")) == 1
    assert degree(parse_expr("1/t")) is None


def test_compose_and_constant():
    h = compose(parse_function("t^2"), parse_function("sqrt(2)*t"))
    assert h(3.0) == pytest.approx(18.0)
    assert h.eval_derivative(3.0) == pytest.approx(12.0)
    assert constant(Fraction(5, 2))(100.0) == 2.5


def test_monotone_sampling():
    assert increasing_on_samples(parse_function("t^3 + t"), integers(), window=(-10, 10))
    assert not increasing_on_samples(parse_function("t^2"), integers(), window=(-10, 10))
    assert increasing_on_samples(parse_function("t^2"), naturals(), window=(1, 50))


def test_derivative_matches_central_differences():
    h = 1e-5
    for f, x in smooth_samples(seed=11, n=1000):
        d = f.eval_derivative(x)
        cd = (f(x + h) - f(x - h)) / (2 * h)
        assert abs(d - cd) <= 1e-4 * (1 + abs(d)), (f.source, x, d, cd)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip(seed):
    src = rand_expr(random.Random(seed), 4)
    e = parse_expr(src)
    assert parse_expr(to_text(e)) == e


@settings(max_examples=300, deadline=None)
@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_cbrt_cubes_back(x):
    c = cbrt(x)
    assert abs(c**3 - x) <= 1e-12 * max(abs(x), 1e-300)
    assert cbrt(-x) == -c
