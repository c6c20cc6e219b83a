import cmath
import itertools
from fractions import Fraction

import pytest

from wittsums.cyclo import CycElem, cyc
from wittsums.errors import PolynomialityViolated, PrecisionExhausted
from wittsums.ff import build_field, dlog, extend_field
from wittsums.lfunc import (
    compute_lfunction,
    exp_sum,
    exp_sum_naive,
    l_coeffs,
    newton_polygon,
    polynomiality_check,
    reduction_check,
    hodge_bound_check,
)
from wittsums.padic import LocalCtx
from wittsums.witt import WittInput

from conftest import diagonal_input, gh_input


def numeric(x):
    z = cmath.exp(2j * cmath.pi / x.N)
    return sum(float(c) * z**i for i, c in enumerate(x.coords))


def complex_sum_m1(f, s, k):
    """Direct sum with the absolute field trace, m = 1 only."""
    E = extend_field(f.field, k)
    p, q = f.p, f.q
    total = 0
    for x in itertools.product(list(E.units()), repeat=f.n):
        val = E.zero
        for t in f.terms:
            term = E.embed(t.coeff)
            for xj, uj in zip(x, t.u):
                term = term * xj**uj
            val = val + term
        tr = val
        acc = val
        for _ in range(E.deg - 1):
            acc = acc**p
            tr = tr + acc
        tr_int = tr.vector()[0]
        e = sum(sj * dlog(E.norm(xj)) for sj, xj in zip(s, x))
        total += cmath.exp(2j * cmath.pi * (tr_int / p - e / (q - 1)))
    return (-1) ** (f.n - 1) * total


def test_small_sums(F2, F3):
    assert exp_sum(gh_input(F2, 1), (0,), 1) == CycElem.scalar(2, -1)
    assert exp_sum(gh_input(F3, 1), (0,), 1) == CycElem.scalar(6, -1)
    g = exp_sum(gh_input(F3, 1), (1,), 1)
    assert g * g == CycElem.scalar(6, -3)
    assert abs(numeric(g) - (cmath.exp(2j * cmath.pi / 3) - cmath.exp(4j * cmath.pi / 3))) < 1e-9


@pytest.mark.parametrize("q,p,a", [(4, 2, 2), (5, 5, 1), (9, 3, 2)])
@pytest.mark.parametrize("k", [1, 2])
def test_sum_against_complex_oracle(q, p, a, k):
    F = build_field(p, a)
    f = WittInput.build(F, 1, [(0, (1,), 0), (0, (-1,), 1)])
    for s in range(q - 1):
        S = exp_sum(f, (s,), k)
        assert abs(numeric(S) - complex_sum_m1(f, (s,), k)) < 1e-6


def test_sum_against_complex_oracle_n2(F3):
    f = diagonal_input(F3)
    for s in itertools.product(range(2), repeat=2):
        assert abs(numeric(exp_sum(f, s, 2)) - complex_sum_m1(f, s, 2)) < 1e-6


@pytest.mark.parametrize("build", [
    lambda F: gh_input(F, 2, [(1, 1)]),
    lambda F: WittInput.build(F, 2, [(0, (1, 0), 0), (0, (0, 1), 1), (1, (-1, -1), 0)]),
])
def test_fast_sum_matches_pointwise(F3, build):
    f = build(F3)
    for s in itertools.product(range(2), repeat=f.n):
        for k in (1, 2):
            assert exp_sum(f, s, k) == exp_sum_naive(f, s, k)


def test_gauss_sum_absolute_value():
    F = build_field(3, 2)
    f = gh_input(F, 1)
    for s in range(1, 8):
        assert abs(abs(numeric(exp_sum(f, (s,), 1))) ** 2 - 9) < 1e-6


def test_davenport_hasse_degree_one(F3):
    f = gh_input(F3, 1)
    S1 = exp_sum(f, (1,), 1)
    S2 = exp_sum(f, (1,), 2)
    assert S2 == -(S1 * S1)
    assert S2 == CycElem.scalar(6, 3)
    c = l_coeffs([S1, S2, exp_sum(f, (1,), 3)])
    assert c[1] == S1 and c[2].is_zero() and c[3].is_zero()


def test_l_coeffs_zero_and_empty():
    z = CycElem.zero(6)
    c = l_coeffs([z, z, z])
    assert c[0] == CycElem.scalar(6, 1) and all(x.is_zero() for x in c[1:])
    assert polynomiality_check(c, 0).ok
    assert l_coeffs([]) == []


def test_l_coeffs_geometric():
    # S_k = 2 for every k gives 1/(1-t)^2 = 1 + 2t + 3t^2 + ...
    S = [CycElem.scalar(1, 2)] * 4
    assert [int(x.coords[0]) for x in l_coeffs(S)] == [1, 2, 3, 4, 5]


def test_polynomiality_flags_wrong_degree(F3):
    res = compute_lfunction(gh_input(F3, 2), (0,))
    assert res.polynomiality.ok and res.degree_claimed == 3
    assert res.coeffs[4].is_zero() and res.coeffs[5].is_zero()
    bad = polynomiality_check(res.coeffs, 2, guard=2)
    assert not bad.ok and bad.index == 3
    with pytest.raises(PolynomialityViolated):
        bad.require()
    assert not polynomiality_check(res.coeffs, 4, guard=1).ok


def test_heilbronn_coefficients_integral(F3):
    res = compute_lfunction(gh_input(F3, 2), (0,))
    assert res.integral
    for c in res.coeffs:
        assert c.is_integral()


def test_newton_examples(F3, F4):
    res = compute_lfunction(gh_input(F3, 1), (1,))
    assert str(res.newton) == "(0,0),(1,1/2)"
    res = compute_lfunction(gh_input(F4, 1), (1,))
    assert str(res.newton) == "(0,0),(1,1/2)"
    res = compute_lfunction(gh_input(F3, 2), (0,))
    assert str(res.newton) == "(0,0),(1,0),(2,1/3),(3,1)"


def test_newton_needs_precision(F3):
    res = compute_lfunction(gh_input(F3, 2), (1,))
    with pytest.raises(PrecisionExhausted):
        newton_polygon(res.coeffs[:4], LocalCtx(F3, 1, 2), 1)


def test_conjugate_twist_same_polygon():
    F = build_field(3, 2)
    f = gh_input(F, 1)
    for s in range(1, 8):
        a = compute_lfunction(f, (s,)).newton
        b = compute_lfunction(f, (s * 3 % 8,)).newton
        assert a == b


def test_hodge_bound(F3):
    res = compute_lfunction(gh_input(F3, 2), (1,))
    assert str(res.hodge) == "(0,0),(1,1/6),(2,2/3),(3,3/2)"
    assert res.newton == res.hodge
    rep = hodge_bound_check(diagonal_input(F3), (1, 0))
    assert rep.ok and rep.comparison.verdict == "above_with_equal_endpoints"
    assert rep.newton.end == (3, rep.hodge.end[1])


def test_twist_validation(F3):
    with pytest.raises(ValueError):
        exp_sum(gh_input(F3, 1), (2,), 1)


def test_reduction_check(F3):
    f = WittInput.build(F3, 1, [(0, (1, 1), 0), (0, (2, 2), 0)])
    for s in itertools.product(range(2), repeat=2):
        out = reduction_check(f, s)
        assert out["ok"]
        if not out["residual_trivial"]:
            assert exp_sum(f, s, 1).is_zero() and exp_sum(f, s, 2).is_zero()


def test_result_json(F3):
    j = compute_lfunction(gh_input(F3, 1), (1,)).to_json()
    assert j["newton"] == [["0", "0"], ["1", "1/2"]]
    assert j["polynomiality"]["ok"] is True
