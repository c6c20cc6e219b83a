"""Dwork's splitting function as a finite-precision oracle.

E_f(x) = prod over terms of E(pi_{m-i} omega(a) x^u) is expanded with its
coefficients in the local ring.  A factor term E_j (pi omega(a))^j x^(ju)
has valuation at least j val(pi), so dropping every factor term whose
bound reaches the working precision T changes no coefficient modulo p^T:
the truncated product *is* E_f mod p^T, a Laurent polynomial.  The same
then holds for E_{f,q^k}, which makes both comparisons below exact
congruences with no analytic tail left over.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .cyclo import CycElem
from .errors import CheckFailed
from .ff import FieldCtx, dlog, extend_field
from .lfunc import exp_sum
from .padic import (
    AboveCap,
    LocalCtx,
    LocalElem,
    artin_hasse,
    artin_hasse_eval,
    embed_cyc,
    pi_m,
    val_to_json,
)
from .polytope import NewtonData, build_delta, degree
from .witt import WittInput, eval_f_trace

__all__ = [
    "artin_hasse",
    "SeriesExpansion",
    "local_context",
    "expand_Ef",
    "expand_Efqk",
    "evaluate_at_teichmuller",
    "splitting_check",
    "trace_formula_check",
    "pi_check",
    "log_root_check",
]

Vec = tuple[int, ...]


@dataclass
class SeriesExpansion:
    ctx: LocalCtx
    coeffs: dict  # exponent vector -> LocalElem, exact modulo p^T
    decay: Fraction  # val(a_u) >= decay * deg(u)
    max_degree: Fraction  # largest deg(u) among stored exponents

    def __getitem__(self, u: Vec) -> LocalElem:
        return self.coeffs.get(tuple(u), self.ctx.zero)

    def decay_violations(self, nd: NewtonData) -> list:
        bad = []
        T = self.ctx.T
        for u, c in self.coeffs.items():
            v = c.val()
            bound = min(Fraction(T), self.decay * degree(nd, u))
            if not isinstance(v, AboveCap) and v < bound:
                bad.append((u, v))
        return bad


def local_context(f: WittInput, k: int, T: int) -> LocalCtx:
    """Local ring over the unramified extension of degree a k."""
    return LocalCtx(extend_field(f.field, k), T, f.m)


def _mul_series(a: dict, b: dict, ctx: LocalCtx) -> dict:
    out: dict = {}
    for u, x in a.items():
        for v, y in b.items():
            w = tuple(i + j for i, j in zip(u, v))
            z = x * y
            if w in out:
                out[w] = out[w] + z
            else:
                out[w] = z
    return {w: z for w, z in out.items() if not z.is_zero()}


def _factor_terms(f: WittInput, ctx: LocalCtx):
    """For each term: (u, pi_{m-i} omega(a), number of Artin-Hasse terms)."""
    field: FieldCtx = ctx.field
    p, T = f.p, ctx.T
    for t in f.terms:
        level = f.m - t.level
        pi = pi_m(ctx, level)
        c = pi * ctx.teichmuller(dlog(field.embed(t.coeff)))
        # val(pi_l^j) = j / (p^(l-1)(p-1)) >= T once j >= T (p-1) p^(l-1)
        terms = T * (p - 1) * p ** (level - 1)
        yield t.u, c, terms


def expand_Ef(f: WittInput, ctx: LocalCtx, nd: Optional[NewtonData] = None) -> SeriesExpansion:
    """E_f modulo p^T as a finite exponent -> coefficient map."""
    nd = nd or build_delta(f)
    n = f.n
    zero_u = (0,) * n
    series = {zero_u: ctx.one}
    for u, c, terms in _factor_terms(f, ctx):
        if not any(u):
            const = artin_hasse_eval(c)
            series = {w: z * const for w, z in series.items()}
            continue
        coeffs = artin_hasse(f.p, terms)
        factor = {}
        power = ctx.one
        for j, e in enumerate(coeffs):
            term = power * ctx.from_fraction(e)
            if not term.is_zero():
                factor[tuple(j * x for x in u)] = term
            power = power * c
        series = _mul_series(series, factor, ctx)
    return SeriesExpansion(
        ctx=ctx,
        coeffs=series,
        decay=Fraction(1, f.p - 1),
        max_degree=max((degree(nd, u) for u in series), default=Fraction(0)),
    )


def expand_Efqk(f: WittInput, ctx: LocalCtx, k: int, nd: Optional[NewtonData] = None,
                base: Optional[SeriesExpansion] = None) -> SeriesExpansion:
    """prod_{l < a k} E_f^{sigma^l}(x^{p^l}) modulo p^T.

    The unramified degree of ``ctx`` must be a multiple of a k so that the
    Frobenius used for sigma has the right order.
    """
    nd = nd or build_delta(f)
    E = base or expand_Ef(f, ctx, nd)
    p = f.p
    ak = f.a * k
    if ctx.d % ak:
        raise ValueError(f"context degree {ctx.d} is not a multiple of {ak}")
    total = {(0,) * f.n: ctx.one}
    for l in range(ak):
        factor = {tuple(p**l * x for x in u): c.frob(l) for u, c in E.coeffs.items()}
        total = _mul_series(total, factor, ctx)
    return SeriesExpansion(
        ctx=ctx,
        coeffs=total,
        decay=Fraction(1, p ** (ak - 1) * (p - 1)),
        max_degree=max((degree(nd, u) for u in total), default=Fraction(0)),
    )


def evaluate_at_teichmuller(E: SeriesExpansion, exps: Sequence[int]) -> LocalElem:
    """E(omega(x)) for x with dlog vector ``exps`` in the context field."""
    ctx = E.ctx
    order = ctx.field.order
    grouped: dict[int, LocalElem] = {}
    for u, c in E.coeffs.items():
        e = sum(a * b for a, b in zip(u, exps)) % order
        grouped[e] = grouped[e] + c if e in grouped else c
    acc = ctx.zero
    for e, c in grouped.items():
        acc = acc + c * ctx.teichmuller(e)
    return acc


@dataclass
class CheckReport:
    ok: bool
    rows: list

    def to_json(self) -> dict:
        return {"ok": self.ok, "rows": self.rows}

    def require(self) -> None:
        if not self.ok:
            bad = next(r for r in self.rows if not r["ok"])
            raise CheckFailed("oracle mismatch", residual=bad.get("residual"), point=bad.get("point"))


def _residual(x: LocalElem, y: LocalElem) -> str:
    return val_to_json((x - y).val()) if x != y else {"above": x.ctx.T}


def splitting_check(f: WittInput, k: int, points: Optional[Iterable[Sequence[int]]] = None,
                  T_check: int = 6, samples: int = 20, seed: int = 0) -> CheckReport:
    """zeta_{p^m}^{t(x)} against E_{f,q^k}(omega(x)) modulo p^T_check.

    ``points`` are dlog vectors in F_{q^k}; by default every point for k=1
    and ``samples`` seeded random points otherwise.
    """
    ctx = local_context(f, k, T_check)
    field = ctx.field
    order = field.order
    if points is None:
        if k == 1 and order**f.n <= 10_000:
            import itertools

            points = list(itertools.product(range(order), repeat=f.n))
        else:
            rng = random.Random(seed)
            points = [tuple(rng.randrange(order) for _ in range(f.n)) for _ in range(samples)]
    E = expand_Efqk(f, ctx, k)
    zeta = ctx.zeta
    rows = []
    ok = True
    for e in points:
        x = [field.elem(v) for v in e]
        t = eval_f_trace(f, x)
        lhs = zeta**t
        rhs = evaluate_at_teichmuller(E, e)
        good = lhs == rhs
        ok &= good
        rows.append({"point": list(e), "t": t, "ok": good, "residual": _residual(lhs, rhs)})
    return CheckReport(ok, rows)


def trace_formula_check(f: WittInput, s: Sequence[int], k: int, T_check: int = 6) -> CheckReport:
    """Direct S_k against (-1)^(n-1) (q^k-1)^n sum_{u in L_s} a_{(q^k-1)u}."""
    ctx = local_context(f, k, T_check)
    q, n = f.q, f.n
    Qk = q**k - 1
    Nk = Qk // (q - 1)
    E = expand_Efqk(f, ctx, k)
    acc = ctx.zero
    used = 0
    for w, c in E.coeffs.items():
        if all((wj - sj * Nk) % Qk == 0 for wj, sj in zip(w, s)):
            acc = acc + c
            used += 1
    rhs = acc * ((-1) ** (n - 1) * Qk**n)
    S: CycElem = exp_sum(f, s, k)
    lhs = embed_cyc(S, ctx)
    good = lhs == rhs
    row = {"k": k, "s": list(s), "ok": good, "terms": used, "residual": _residual(lhs, rhs)}
    return CheckReport(good, [row])


def pi_check(p: int, m: int, T: int) -> dict:
    """val(pi_m) and E(pi_m) = zeta_{p^m} at precision T."""
    from .ff import build_field

    ctx = LocalCtx(build_field(p, 1), T, m)
    pi = pi_m(ctx)
    v = pi.val()
    expected = Fraction(1, p ** (m - 1) * (p - 1))
    return {
        "p": p,
        "m": m,
        "val": val_to_json(v),
        "val_ok": v == expected,
        "E_ok": artin_hasse_eval(pi) == ctx.zeta,
        "log_ok": log_root_check(ctx, pi),
    }


def log_root_check(ctx: LocalCtx, pi: LocalElem) -> bool:
    """pi is a root of sum_i t^(p^i)/p^i, checked after clearing p^I.

    I is chosen so every dropped term (i > I) has valuation at least T
    after scaling, so the scaled partial sum must vanish modulo p^T.
    """
    p, T = ctx.p, ctx.T
    v = pi.val()
    if isinstance(v, AboveCap):
        return False
    I = 0
    while True:
        tail = min(p**i * v - (i - I) for i in range(I + 1, I + 2 + T))
        if tail >= T:
            break
        I += 1
    acc = ctx.zero
    for i in range(I + 1):
        acc = acc + pi ** (p**i) * p ** (I - i)
    return acc.is_zero()
