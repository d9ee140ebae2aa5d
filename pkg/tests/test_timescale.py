import random

import pytest
from hypothesis import given, settings, strategies as st

from nablats.errors import DomainError, ParseError
from nablats.timescale import (ContinuousInterval, FiniteSet, PieceUnion, UniformGrid, h_integers,
                               integers, naturals, parse_timescale, reals)


UNION = PieceUnion([(0, 1), (2, 2)])


def test_rho_examples():
    assert integers().rho(3) == 2
    assert ContinuousInterval(0, 1).rho(0.5) == 0.5
    for t in (-4, 0, 6):
        assert h_integers(2).rho(t) == t - 2


def test_sigma_examples():
    assert integers().sigma(3) == 4
    assert ContinuousInterval(0, 1).sigma(1) == 1
    assert FiniteSet([1, 3, 7]).sigma(3) == 7


def test_extremes_map_to_themselves():
    assert naturals().rho(1) == 1
    assert FiniteSet([1, 3, 7]).sigma(7) == 7
    assert ContinuousInterval(0, 1).rho(0) == 0


def test_nu_and_classification():
    assert h_integers(2).nu(4) == 2
    assert ContinuousInterval(0, 1).nu(0.7) == 0
    assert UNION.nu(2) == 1
    pc = naturals().classify_point(5)
    assert not pc.left_dense and pc.nu == 1
    assert ContinuousInterval(0, 1).classify_point(0).left_dense
    assert UNION.classify_point(1).left_dense


def test_tk():
    assert not naturals().tk_contains(1)
    assert ContinuousInterval(0, 1).tk_contains(0)
    assert integers().tk_contains(-100)
    assert not FiniteSet([1, 3]).tk_contains(1)


def test_restrict_examples():
    r = naturals().restrict(1, 10)
    assert isinstance(r, FiniteSet) and r.points == tuple(float(k) for k in range(1, 11))
    assert ContinuousInterval(0, 5).restrict(1, 3) == ContinuousInterval(1, 3)
    u = PieceUnion([(0, 1), (2, 2), (3, 4)]).restrict(0, 2)
    assert isinstance(u, PieceUnion) and u.pieces == ((0, 1), (2, 2))


def test_restrict_errors():
    with pytest.raises(DomainError):
        naturals().restrict(3, 3)
    with pytest.raises(DomainError):
        naturals().restrict(1, 2.5)


def test_iterate_rho_examples():
    assert naturals().iterate_rho(4, 3) == 1
    assert integers().iterate_rho(7, 0) == 7
    assert ContinuousInterval(0, 1).iterate_rho(0.5, 2) == 0.5
    assert naturals().iterate_rho(4, 10) == 1


def test_membership_errors():
    with pytest.raises(DomainError):
        integers().rho(0.5)
    with pytest.raises(DomainError):
        FiniteSet([1, 2]).nu(1.5)


def test_constructor_invariants():
    with pytest.raises(DomainError):
        FiniteSet([])
    with pytest.raises(DomainError):
        FiniteSet([2, 1])
    with pytest.raises(DomainError):
        UniformGrid(0, 0)
    with pytest.raises(DomainError):
        ContinuousInterval(1, 1)


def test_union_merges_overlaps():
    u = PieceUnion([(2, 3), (0, 1), (1, 1.5), (3, 3)])
    assert u.pieces == ((0, 1.5), (2, 3))


@pytest.mark.parametrize("text, expected", [
    ("Z", integers()),
    ("N", naturals()),
    ("R", reals()),
    ("hZ:0.5", h_integers(0.5)),
    ("interval:0:1", ContinuousInterval(0, 1)),
    ("finite:3,1,2", FiniteSet([1, 2, 3])),
])
def test_parse(text, expected):
    assert parse_timescale(text) == expected


def test_parse_union():
    u = parse_timescale("union:(interval:0:1;point:2;interval:3:4)")
    assert u.pieces == ((0, 1), (2, 2), (3, 4))


@pytest.mark.parametrize("text", ["z", "hZ:0", "hZ:-1", "interval:1:0", "finite:1,1",
                                  "finite:1,x", "union:(point:0;interval:0:1)", "union:()", "union:(blob:1)"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_timescale(text)


def test_grid_membership_tolerance():
    g = h_integers(0.1)
    assert g.contains(0.30000000000000004)
    assert g.canonical(0.30000000000000004) == pytest.approx(0.3)
    assert not g.contains(0.35)


# -- properties -----------------------------------------------------------------


SCALES = [integers(), naturals(), h_integers(0.25), ContinuousInterval(-2, 3), FiniteSet([-1, 0.5, 2, 7]),
          PieceUnion([(-3, -1), (0, 0), (0.5, 0.5), (1, 4)]), reals()]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SCALES), st.integers(0, 2**32 - 1))
def test_jump_operators_stay_in_scale(ts, seed):
    rng = random.Random(seed)
    window = None if ts.bounded else (-5, 5)
    t = ts.canonical(ts.sample(rng, 1, window)[0])
    r, s = ts.rho(t), ts.sigma(t)
    assert r <= t <= s
    assert ts.contains(r) and ts.contains(s)
    nu = ts.nu(t)
    assert nu >= 0
    assert (nu == 0) == ts.classify_point(t).left_dense


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SCALES), st.integers(0, 2**32 - 1), st.integers(0, 6), st.integers(0, 6))
def test_iterate_rho_composes(ts, seed, m, n):
    rng = random.Random(seed)
    window = None if ts.bounded else (-5, 5)
    t = ts.canonical(ts.sample(rng, 1, window)[0])
    assert ts.iterate_rho(t, m + n) == ts.iterate_rho(ts.iterate_rho(t, m), n)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SCALES[:-1]), st.integers(0, 2**32 - 1))
def test_restrict_membership(ts, seed):
    rng = random.Random(seed)
    window = None if ts.bounded else (-5, 5)
    a, b = sorted(ts.canonical(x) for x in ts.sample(rng, 2, window))
    if not a < b:
        return
    part = ts.restrict(a, b)
    for x in [rng.uniform(-6, 8) for _ in range(30)] + ts.sample(rng, 30, window):
        assert part.contains(x) == (ts.contains(x) and a <= x <= b), x


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=15, unique=True))
def test_finite_set_matches_scan(vals):
    pts = sorted(v / 4 for v in vals)
    ts = FiniteSet(pts)
    for i, p in enumerate(pts):
        assert ts.rho(p) == (pts[i - 1] if i else p)
        assert ts.sigma(p) == (pts[i + 1] if i + 1 < len(pts) else p)
