import itertools
from fractions import Fraction

import pytest

from wittsums.cyclo import CycElem
from wittsums.dwork import (
    artin_hasse,
    evaluate_at_teichmuller,
    expand_Ef,
    expand_Efqk,
    splitting_check,
    local_context,
    log_root_check,
    pi_check,
    trace_formula_check,
)
from wittsums.errors import CheckFailed
from wittsums.ff import build_field
from wittsums.lfunc import exp_sum
from wittsums.padic import LocalCtx, embed_cyc, pi_m
from wittsums.polytope import build_delta
from wittsums.witt import eval_f_trace

from conftest import gh_input


def test_artin_hasse_low_terms():
    assert artin_hasse(5, 2) == (1, 1)
    assert artin_hasse(2, 3) == (1, 1, 1)
    # exp(t + t^3/3) = 1 + t + t^2/2 + t^3/2 + ...
    assert artin_hasse(3, 4) == (1, 1, Fraction(1, 2), Fraction(1, 2))


def test_ef_low_coefficients(F3):
    f = gh_input(F3, 2)
    ctx = local_context(f, 1, 6)
    E = expand_Ef(f, ctx)
    assert E[(0,)] == ctx.one
    assert E[(1,)] == pi_m(ctx)


def test_ef_decay(F3):
    f = gh_input(F3, 2, [(1, 0)])
    nd = build_delta(f)
    ctx = local_context(f, 1, 6)
    E = expand_Ef(f, ctx, nd)
    assert E.decay == Fraction(1, 2)
    assert E.decay_violations(nd) == []
    Eq = expand_Efqk(f, local_context(f, 2, 6), 2, nd)
    assert Eq.decay_violations(nd) == []


def test_efq_is_ef_for_prime_field(F3):
    f = gh_input(F3, 2, [(1, 0)])
    ctx = local_context(f, 1, 6)
    E = expand_Ef(f, ctx)
    Eq = expand_Efqk(f, ctx, 1, base=E)
    assert Eq.coeffs.keys() == E.coeffs.keys()
    assert all(Eq[u] == E[u] for u in E.coeffs)


def test_efqk_factorization(F3):
    f = gh_input(F3, 1)
    ctx = local_context(f, 2, 6)
    Eq = expand_Efqk(f, ctx, 1)
    Eq2 = expand_Efqk(f, ctx, 2)
    # E_{f,q^2}(x) = E_{f,q}(x) E_{f,q}(x^q), with sigma^a acting on coefficients
    prod = {}
    for u, c in Eq.coeffs.items():
        for v, d in Eq.coeffs.items():
            w = (u[0] + 3 * v[0],)
            prod[w] = prod.get(w, ctx.zero) + c * d.frob(1)
    for w in set(prod) | set(Eq2.coeffs):
        assert prod.get(w, ctx.zero) == Eq2[w]


def test_efqk_requires_matching_degree(F3):
    f = gh_input(F3, 1)
    with pytest.raises(ValueError):
        expand_Efqk(f, local_context(f, 1, 4), 2)


def test_splitting_at_one(F3):
    f = gh_input(F3, 1)
    ctx = local_context(f, 1, 6)
    E = expand_Efqk(f, ctx, 1)
    assert evaluate_at_teichmuller(E, (0,)) == ctx.zeta


@pytest.mark.parametrize("m,extra", [(1, []), (2, []), (2, [(1, 0)]), (2, [(1, 1)])])
def test_splitting_identity(F3, m, extra):
    f = gh_input(F3, m, extra)
    for k in (1, 2):
        rep = splitting_check(f, k)
        assert rep.ok, rep.rows
        rep.require()


def test_splitting_pointwise_is_not_vacuous(F3):
    f = gh_input(F3, 2)
    ctx = local_context(f, 1, 6)
    E = expand_Efqk(f, ctx, 1)
    x = F3.elem(1)
    t = eval_f_trace(f, [x])
    assert ctx.zeta ** t == evaluate_at_teichmuller(E, (1,))
    assert ctx.zeta ** (t + 1) != evaluate_at_teichmuller(E, (1,))


@pytest.mark.parametrize("m,extra", [(1, []), (2, []), (2, [(1, 0)])])
@pytest.mark.parametrize("s", [0, 1])
@pytest.mark.parametrize("k", [1, 2])
def test_trace_formula(F3, m, extra, s, k):
    rep = trace_formula_check(gh_input(F3, m, extra), (s,), k)
    assert rep.ok, rep.rows
    assert rep.rows[0]["terms"] > 0


def test_trace_formula_q2(F2):
    rep = trace_formula_check(gh_input(F2, 1), (0,), 1)
    assert rep.ok


def _trace_rhs(f, s, k, T=6):
    ctx = local_context(f, k, T)
    q = f.q
    Qk, Nk = q**k - 1, (q**k - 1) // (q - 1)
    E = expand_Efqk(f, ctx, k)
    acc = ctx.zero
    for w, c in E.coeffs.items():
        if (w[0] - s * Nk) % Qk == 0:
            acc = acc + c
    return ctx, acc * Qk


def test_trace_formula_wrong_twist_fails(F3):
    f = gh_input(F3, 2)
    ctx, rhs_wrong = _trace_rhs(f, 1, 1)
    lhs = embed_cyc(exp_sum(f, (0,), 1), ctx)
    assert lhs != rhs_wrong
    ctx, rhs = _trace_rhs(f, 0, 1)
    assert embed_cyc(exp_sum(f, (0,), 1), ctx) == rhs


def test_check_report_require():
    from wittsums.dwork import CheckReport

    rep = CheckReport(False, [{"ok": False, "residual": {"val": "1"}, "point": [0]}])
    with pytest.raises(CheckFailed):
        rep.require()


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
def test_pi_check(p, m):
    out = pi_check(p, m, 8)
    assert out["val_ok"] and out["E_ok"] and out["log_ok"]


def test_log_root_rejects_non_root():
    ctx = LocalCtx(build_field(3, 1), 6, 1)
    assert not log_root_check(ctx, ctx.uniformizer)
    assert log_root_check(ctx, pi_m(ctx))
