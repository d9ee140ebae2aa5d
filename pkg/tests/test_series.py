from fractions import Fraction

import pytest

from nablats.errors import DomainError
from nablats.fracdiff import nabla, product_nabla
from nablats.funcspec import parse_function, product
from nablats.series import backward_expansion, general_product_rule, power_sum, power_sum_bruteforce
from nablats.timescale import ContinuousInterval, FiniteSet, h_integers, integers, naturals

P = parse_function
T_ = P("t")


def test_product_rule_examples():
    for t in range(-3, 6):
        assert general_product_rule(integers(), [T_, T_, T_], t, 1) == 3 * t * t - 3 * t + 1
    assert general_product_rule(integers(), [T_, T_], 3, 1) == 5
    assert general_product_rule(integers(), [T_, P("0"), P("sin(t)")], 2, "1/2") == 0
    with pytest.raises(DomainError):
        general_product_rule(integers(), [T_], 3, 1)


def test_product_rule_matches_direct():
    fs = [P("t^2 + 1"), P("sin(t)"), P("t - 3"), P("exp(t/4)")]
    T = h_integers(0.5)
    v = general_product_rule(T, fs, 1.5, "1/3")
    assert v == pytest.approx(nabla(T, product(fs), 1.5, "1/3").value, rel=1e-12)
    assert general_product_rule(T, fs[:2], 2, "1/2", exact=False) == product_nabla(T, fs[0], fs[1], 2, "1/2")


def test_power_sum_examples():
    f = P("t^2")
    assert power_sum(integers(), f, 2, 1, 1) == 5
    assert power_sum_bruteforce(integers(), f, 2, 1) == 5
    for t in (-3, 1, 4):
        for m in (1, 2, 5):
            closed = Fraction(t ** (2 * m + 2) - (t - 1) ** (2 * m + 2), 2 * t - 1)
            assert power_sum(integers(), f, t, 1, m) == closed
    assert power_sum(integers(), P("t^3 - t"), 5, "1/2", 1) == 120 + 60
    assert power_sum_bruteforce(integers(), P("3"), 2, 4) == 5 * 3**4
    assert power_sum_bruteforce(integers(), f, 2, 0) == 1


def test_power_sum_degenerate():
    with pytest.raises(DomainError, match="≠ 0"):
        power_sum(integers(), P("7"), 2, 1, 3)
    with pytest.raises(DomainError):
        power_sum(ContinuousInterval(0, 1), P("t"), 0.5, 1, 3)


def test_backward_expansion_examples():
    e = backward_expansion(naturals(), P("t^3"), 4, 1, 1)
    assert e.value == 64 and e.n == 3
    assert sum((x - 1) / 3 for x in e.terms) == 2 + 6 + 12
    e1 = backward_expansion(integers(), P("sin(t)"), 3, 2, "1/2")
    assert e1.n == 1 and e1.value == pytest.approx(P("sin(t)")(3), rel=1e-15)
    with pytest.raises(DomainError, match="unreachable"):
        backward_expansion(ContinuousInterval(0, 1), P("t"), 0.5, 0.2, 1)
    with pytest.raises(DomainError):
        backward_expansion(naturals(), P("t"), 4, 4, 1)
    with pytest.raises(DomainError, match="not a point"):
        backward_expansion(FiniteSet([0, 1, 3]), P("t"), 3, 0.5, 1)


def test_backward_expansion_telescopes_exactly():
    ts = FiniteSet([-2, -0.75, 0, 0.5, 2.25, 4])
    f = P("(3/4)*t^4 - t^2 + (1/3)")
    e = backward_expansion(ts, f, 4, -2, 1)
    assert e.value == f.eval_exact(4)
    # nu**(1/3) is irrational here, so the sum falls back to floats
    e = backward_expansion(ts, f, 4, -2, "1/3")
    assert abs(e.value - f(4)) <= 1e-12 * (1 + abs(f(4)))
