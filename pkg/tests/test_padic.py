import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wittsums.cyclo import CycElem, cyc
from wittsums.errors import HenselFails, NotIntegral, PrecisionExhausted
from wittsums.ff import build_field
from wittsums.padic import (
    AboveCap,
    LocalCtx,
    artin_hasse,
    artin_hasse_eval,
    embed_cyc,
    frac_vp,
    hensel_lift,
    ord_q,
    pi_m,
    teichmuller_modulus,
    vp,
    with_precision_retry,
)


def test_integer_valuations():
    assert vp(18, 3) == 2
    assert frac_vp(Fraction(5, 24), 2) == -3


@pytest.mark.parametrize("p", [2, 3, 5])
def test_val_p_and_uniformizer(p):
    ctx = LocalCtx(build_field(p, 1), 8, 1)
    assert ctx.from_int(p).val() == 1
    assert ctx.uniformizer.val() == Fraction(1, p - 1)


def test_val_zeta9_minus_one():
    ctx = LocalCtx(build_field(3, 1), 6, 2)
    assert ctx.e == 6
    assert (ctx.zeta - 1).val() == Fraction(1, 6)
    assert ctx.zeta ** 9 == ctx.one
    assert ctx.zeta ** 3 != ctx.one


def test_zero_is_above_cap():
    ctx = LocalCtx(build_field(3, 1), 5, 1)
    v = ctx.zero.val()
    assert isinstance(v, AboveCap) and v.to_json() == {"above": 5}
    assert isinstance((ctx.from_int(3**5)).val(), AboveCap)


def test_teichmuller():
    ctx = LocalCtx(build_field(3, 1), 10, 1)
    assert ctx.teichmuller(0) == ctx.one
    assert ctx.teichmuller(1) == ctx.from_int(-1)


def test_teichmuller_modulus_f4():
    F4 = build_field(2, 2)
    T = 12
    h = teichmuller_modulus(F4, T)
    assert tuple(c % 2 for c in h) == F4.modulus
    ctx = LocalCtx(F4, T, 1)
    y = ctx.teichmuller(1)
    assert y**4 == y and y**3 == ctx.one


def test_ord_q_normalization():
    ctx = LocalCtx(build_field(3, 2), 6, 1)
    assert ord_q(ctx.from_int(9)) == 1


def test_fraction_conversion():
    ctx = LocalCtx(build_field(3, 1), 6, 1)
    assert ctx.from_fraction(Fraction(1, 2)) * 2 == ctx.one
    with pytest.raises(NotIntegral):
        ctx.from_fraction(Fraction(1, 3))


def test_embed_basic():
    ctx = LocalCtx(build_field(3, 1), 8, 1)
    assert embed_cyc(CycElem.scalar(6, -1), ctx) == ctx.from_int(-1)
    g = cyc(3, 1) - cyc(3, 2)
    assert embed_cyc(g, ctx).val() == Fraction(1, 2)
    assert embed_cyc(g * g, ctx) == ctx.from_int(-3)


def test_embed_roots_of_unity_orders():
    ctx = LocalCtx(build_field(3, 2), 6, 2)
    for N, order in [(8, 8), (9, 9), (72, 72)]:
        z = embed_cyc(cyc(N, 1), ctx)
        assert z**order == ctx.one
        for d in range(1, order):
            if order % d == 0 and d < order:
                assert z**d != ctx.one


def test_embed_multiplicative():
    ctx = LocalCtx(build_field(3, 1), 8, 2)
    rng = random.Random(7)
    for _ in range(25):
        x = CycElem(18, [rng.randint(-3, 3) for _ in range(6)])
        y = CycElem(18, [rng.randint(-3, 3) for _ in range(6)])
        assert embed_cyc(x * y, ctx) == embed_cyc(x, ctx) * embed_cyc(y, ctx)
        assert embed_cyc(x + y, ctx) == embed_cyc(x, ctx) + embed_cyc(y, ctx)


def test_artin_hasse():
    assert artin_hasse(3, 2) == (1, 1)
    assert artin_hasse(2, 3)[2] == 1
    for p in (2, 3, 5):
        assert all(frac_vp(c, p) >= 0 for c in artin_hasse(p, 50) if c)


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
def test_pi(p, m):
    ctx = LocalCtx(build_field(p, 1), 8, m)
    pi = pi_m(ctx)
    assert pi.val() == Fraction(1, p ** (m - 1) * (p - 1))
    assert artin_hasse_eval(pi) == ctx.zeta


def test_pi_two_is_minus_two_mod_four():
    ctx = LocalCtx(build_field(2, 1), 10, 1)
    pi = pi_m(ctx)
    assert (pi + 2).val() >= 2
    assert artin_hasse_eval(pi) == ctx.from_int(-1)


def test_hensel():
    ctx = LocalCtx(build_field(5, 1), 10, 1)
    # square root of -1 near 2
    f = [ctx.from_int(1), ctx.zero, ctx.one]
    r = hensel_lift(f, ctx.from_int(2))
    assert r * r == ctx.from_int(-1)
    with pytest.raises(HenselFails):
        hensel_lift(f, ctx.from_int(1))


def test_precision_retry():
    seen = []

    def fn(T):
        seen.append(T)
        if T < 20:
            raise PrecisionExhausted("more")
        return T

    assert with_precision_retry(fn, 4) == 32
    assert seen == [4, 8, 16, 32]
    with pytest.raises(PrecisionExhausted):
        with_precision_retry(fn, 4, T_max=10)


_CTX = LocalCtx(build_field(3, 2), 6, 2)


def _elem(coeffs):
    ur = _CTX.ur
    return _CTX._wrap([ur.reduce(c) for c in coeffs])


local = st.lists(st.lists(st.integers(-40, 40), min_size=2, max_size=2), min_size=6, max_size=6).map(_elem)


@settings(max_examples=150, deadline=None)
@given(local, local)
def test_valuation_multiplicative_and_ultrametric(x, y):
    vx, vy = x.val(), y.val()
    if isinstance(vx, AboveCap) or isinstance(vy, AboveCap):
        return
    vxy = (x * y).val()
    if not isinstance(vxy, AboveCap):
        assert vxy == vx + vy
    else:
        assert vx + vy >= _CTX.T
    s = (x + y).val()
    if not isinstance(s, AboveCap):
        assert s >= min(vx, vy)
        if vx != vy:
            assert s == min(vx, vy)


def test_inverse():
    rng = random.Random(3)
    for _ in range(20):
        x = _elem([[rng.randint(-9, 9) for _ in range(2)] for _ in range(6)])
        if x.is_unit():
            assert x * x.inverse() == _CTX.one
