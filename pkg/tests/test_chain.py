import math

import pytest

from nablats.chain import (chain_c_point, chain_integral, compose_monotone, image_timescale,
                           integrate_unit, inverse_direct, inverse_nabla, invert_on, naive_chain)
from nablats.errors import DomainError, InconclusiveSearch, PreconditionError
from nablats.fracdiff import nabla
from nablats.funcspec import compose, parse_function
from nablats.timescale import (ContinuousInterval, FiniteSet, UniformGrid, h_integers, integers,
                               naturals, reals)

P = parse_function
F, G = P("t^2"), P("sqrt(2)*t")


def test_quadrature():
    assert integrate_unit(lambda x: x**63, 63) == pytest.approx(1 / 64, rel=1e-14)
    assert integrate_unit(math.exp) == pytest.approx(math.e - 1, rel=1e-13)
    assert integrate_unit(lambda x: math.sqrt(x)) == pytest.approx(2 / 3, rel=1e-9)


def test_chain_integral_example():
    T = h_integers(2)
    for t in range(-4, 8, 2):
        assert chain_integral(T, F, G, t, 1) == pytest.approx(2 * (2 * t - 2), abs=1e-10)
    assert chain_integral(T, F, G, 2, 1) == pytest.approx(4)
    assert naive_chain(T, F, G, 2, 1) == pytest.approx(8)


def test_chain_integral_dense_and_degenerate():
    assert chain_integral(reals(), F, P("t^3"), 1, 1) == pytest.approx(6, rel=1e-8)
    assert chain_integral(integers(), P("sin(t)"), P("(t-1)*(t-2)"), 2, 1) == 0


def test_chain_integral_matches_direct_for_transcendental():
    T = h_integers(0.5)
    v = chain_integral(T, P("exp(t)"), P("t^3 + t"), 1.5, "1/3")
    assert v == pytest.approx(nabla(T, compose(P("exp(t)"), P("t^3 + t")), 1.5, "1/3").value, rel=1e-9)


def test_c_point():
    cert = chain_c_point(h_integers(2), F, G, 4, 1)
    assert cert.c == pytest.approx(3, abs=1e-10) and cert.valid(2, 4)
    cert = chain_c_point(integers(), F, P("5"), 3, "1/2")
    assert cert.c == 2
    cert = chain_c_point(reals(), P("sin(t)"), P("t^3 + t"), 0.4, 1)
    assert cert.c == 0.4 and cert.residual <= 1e-8 * (1 + abs(cert.lhs))


def test_c_point_inconclusive():
    # f'(g(c)) ∇g changes sign twice inside [2, 3]: exactness holds, the search still succeeds
    cert = chain_c_point(integers(), P("t^3 - 3*t"), P("t - 1.5"), 3, 1)
    assert 2 <= cert.c <= 3


def test_image_timescale():
    img = image_timescale(integers(), P("2*t"), (-5, 5))
    assert isinstance(img, UniformGrid) and img.lower == -10 and img.upper == 10 and img.step == 2
    img = image_timescale(naturals(), P("t^2"), (1, 10))
    assert img == FiniteSet([k * k for k in range(1, 11)])
    assert image_timescale(ContinuousInterval(0, 1), P("t^3")) == ContinuousInterval(0, 1)
    assert image_timescale(integers(), P("3*t+1")).rho(7) == 4
    with pytest.raises(PreconditionError):
        image_timescale(integers(), P("t^2"), (-3, 3))
    with pytest.raises(DomainError):
        image_timescale(naturals(), P("t^3"))


def test_compose_monotone():
    for t in (-2, 0, 3):
        assert compose_monotone(integers(), P("2*t"), F, t, 1) == pytest.approx(8 * t - 4)
    assert compose_monotone(integers(), P("t^3 + t"), P("t"), 2, "1/2") == \
        pytest.approx(nabla(integers(), P("t^3 + t"), 2, "1/2").value)
    assert compose_monotone(reals(), P("t^3 + t"), F, 1.0, 1) == pytest.approx(16, rel=1e-8)


def test_inverse():
    assert invert_on(naturals(), F, 9) == 3
    assert inverse_nabla(naturals(), F, 9, 1) == pytest.approx(1 / 5)
    assert inverse_nabla(naturals(), F, 9, "1/2") == pytest.approx(5**-0.5)
    assert inverse_direct(naturals(), F, 9, "1/2") == pytest.approx(5**-0.5)
    assert inverse_nabla(reals(), P("t^3"), 8, 1) == pytest.approx(1 / 12, rel=1e-8)
    with pytest.raises(DomainError):
        invert_on(naturals(), F, 10)
    with pytest.raises(DomainError):
        inverse_nabla(naturals(), F, 1, 1)
