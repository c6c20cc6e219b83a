"""Twisted exponential sums, their L-function and its Newton polygon."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .cyclo import CycElem, cyc, in_subring
from .errors import PolynomialityViolated, PrecisionExhausted
from .ff import dlog, extend_field
from .padic import AboveCap, LocalCtx, cyc_valuation, with_precision_retry
from .polytope import (
    NewtonData,
    PolygonComparison,
    RatPolygon,
    build_delta,
    hodge_polygon,
    lower_hull,
    polygon_above,
    unimodular_reduce,
    weight_series,
)
from .witt import WittInput, eval_f_trace, trace_vector


def conductor(f: WittInput) -> int:
    return f.p**f.m * (f.q - 1)


def _check_twist(f: WittInput, s: Sequence[int]) -> tuple[int, ...]:
    s = tuple(int(x) for x in s)
    if len(s) != f.n or any(not 0 <= x <= f.q - 2 for x in s):
        raise ValueError(f"twist {s} must have {f.n} entries in [0, {f.q - 2}]")
    return s


def exp_sum(f: WittInput, s: Sequence[int], k: int) -> CycElem:
    """(-1)^(n-1) sum over the torus of F_{q^k} of chi(N x) zeta_{p^m}^{t(x)}.

    Summands are zeta_N^(-<s, e> p^m + t (q-1)), N = p^m (q-1), where e is
    the dlog vector of x; reduction mod q-1 of e is the norm to F_q.
    """
    s = _check_twist(f, s)
    N = conductor(f)
    pm = f.p**f.m
    grids, t = trace_vector(f, k)
    chi = np.zeros(grids.shape[1], dtype=np.int64)
    for j, sj in enumerate(s):
        if sj:
            chi += sj * (grids[j] % (f.q - 1))
    expo = ((-chi * pm) + t * (f.q - 1)) % N
    counts = np.bincount(expo, minlength=N)
    sign = (-1) ** (f.n - 1)
    return CycElem.from_exponent_counts(N, [sign * int(c) for c in counts])


def exp_sum_naive(f: WittInput, s: Sequence[int], k: int) -> CycElem:
    """Same sum, point by point through field norms and the iota trace."""
    s = _check_twist(f, s)
    N = conductor(f)
    pm = f.p**f.m
    ctx = extend_field(f.field, k)
    acc = CycElem.zero(N)
    units = list(ctx.units())
    for x in itertools.product(units, repeat=f.n):
        e = sum(sj * dlog(ctx.norm(xj)) for sj, xj in zip(s, x))
        t = eval_f_trace(f, x)
        acc = acc + cyc(N, (-e * pm + t * (f.q - 1)) % N)
    return acc * (-1) ** (f.n - 1)


def l_coeffs(S: Sequence[CycElem]) -> list[CycElem]:
    """Coefficients c_0..c_K of exp(sum_k S_k t^k / k), K = len(S).

    From t L' = L * sum_k S_k t^k:  n c_n = sum_{k=1}^n S_k c_{n-k}.
    """
    if not S:
        return []
    N = S[0].N
    c = [CycElem.scalar(N, 1)]
    for n in range(1, len(S) + 1):
        acc = CycElem.zero(N)
        for k in range(1, n + 1):
            acc = acc + S[k - 1] * c[n - k]
        c.append(acc / n)
    return c


@dataclass(frozen=True)
class PolynomialityVerdict:
    ok: bool
    degree: int
    guard: int
    index: Optional[int] = None  # first offending coefficient
    reason: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "degree": self.degree, "guard": self.guard,
                "index": self.index, "reason": self.reason}

    def require(self) -> None:
        if not self.ok:
            raise PolynomialityViolated(self.index, self.reason)


def polynomiality_check(coeffs: Sequence[CycElem], degree: int, guard: int = 2) -> PolynomialityVerdict:
    if len(coeffs) < degree + guard + 1:
        raise ValueError(f"need {degree + guard + 1} coefficients, have {len(coeffs)}")
    for i in range(degree + 1, degree + guard + 1):
        if not coeffs[i].is_zero():
            return PolynomialityVerdict(False, degree, guard, i, f"c_{i} is nonzero")
    if coeffs[degree].is_zero():
        return PolynomialityVerdict(False, degree, guard, degree, f"c_{degree} vanishes")
    return PolynomialityVerdict(True, degree, guard)


def newton_polygon(coeffs: Sequence[CycElem], ctx: LocalCtx, a: int) -> RatPolygon:
    """Lower hull of (i, ord_q c_i); zero coefficients are absent.

    Coefficients that vanish to the working precision are dropped only if
    the cap provably lies on or above the resulting hull; otherwise the
    precision is insufficient.
    """
    pts = []
    capped = []
    for i, c in enumerate(coeffs):
        if c.is_zero():
            continue
        v = cyc_valuation(c, ctx)
        if isinstance(v, AboveCap):
            capped.append((i, Fraction(v.cap, a)))
        else:
            pts.append((i, v / a))
    if not pts:
        raise PrecisionExhausted("no coefficient has a valuation below the cap")
    hull = lower_hull(pts)
    last = max(i for i, c in enumerate(coeffs) if not c.is_zero())
    for i, cap in capped:
        if i > hull.end[0] or i == last or cap < hull.value_at(i):
            raise PrecisionExhausted(f"c_{i} vanishes to precision {ctx.T}")
    return hull


def default_precision(f: WittInput, nd: NewtonData) -> int:
    return 2 * f.a * nd.volume_deg + 4


def newton_polygon_auto(coeffs: Sequence[CycElem], f: WittInput, nd: NewtonData,
                        T: Optional[int] = None, T_max: int = 512) -> tuple[RatPolygon, int]:
    """Newton polygon with precision doubling; returns (polygon, T used)."""
    used = {}

    def attempt(T_: int) -> RatPolygon:
        used["T"] = T_
        return newton_polygon(coeffs, LocalCtx(f.field, T_, f.m), f.a)

    poly = with_precision_retry(attempt, T or default_precision(f, nd), T_max)
    return poly, used["T"]


def hodge_for(f: WittInput, nd: NewtonData, s: Sequence[int]) -> tuple[RatPolygon, list[Fraction]]:
    """Degree-D(q-1) Hodge polygon of (1/a) sum_i P_{s p^i}."""
    q, p, a = f.q, f.p, f.a
    M = nd.D * (q - 1)
    total: list[Fraction] = []
    for i in range(a):
        si = tuple(x * p**i % (q - 1) for x in s)
        P = weight_series(nd, si, q).P
        total += [Fraction(0)] * (len(P) - len(total))
        for j, c in enumerate(P):
            total[j] += Fraction(c, a)
    return hodge_polygon(total, M), total


@dataclass
class LSeriesResult:
    f: WittInput
    s: tuple[int, ...]
    S: list[CycElem]
    coeffs: list[CycElem]
    degree_claimed: int
    guard: int
    polynomiality: PolynomialityVerdict
    newton: RatPolygon
    hodge: RatPolygon
    hodge_poly: list[Fraction]
    comparison: PolygonComparison
    nd: NewtonData
    precision: int
    integral: bool = True
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "s": list(self.s),
            "sums": [{"k": k + 1, "S": x.to_json()} for k, x in enumerate(self.S)],
            "coeffs": [c.to_json() for c in self.coeffs],
            "degree": self.degree_claimed,
            "polynomiality": self.polynomiality.to_json(),
            "integral": self.integral,
            "newton": self.newton.to_json(),
            "hodge": self.hodge.to_json(),
            "comparison": self.comparison.to_json(),
            "precision": self.precision,
        }


def coefficients_integral(coeffs: Sequence[CycElem], N: int) -> bool:
    for c in coeffs:
        r = in_subring(c, N) if c.N != N else c
        if r is None or not r.is_integral():
            return False
    return True


def compute_lfunction(f: WittInput, s: Sequence[int], guard: int = 2, k_max: Optional[int] = None,
                      T: Optional[int] = None, nd: Optional[NewtonData] = None) -> LSeriesResult:
    s = _check_twist(f, s)
    nd = nd or build_delta(f)
    degree = nd.volume_deg
    K = k_max if k_max is not None else degree + guard
    if K < degree + guard:
        raise ValueError(f"k_max={K} is below degree + guard = {degree + guard}")
    S = [exp_sum(f, s, k) for k in range(1, K + 1)]
    coeffs = l_coeffs(S)
    verdict = polynomiality_check(coeffs, degree, guard)
    NP, T_used = newton_polygon_auto(coeffs[: degree + guard + 1], f, nd, T)
    HP, hp_poly = hodge_for(f, nd, s)
    return LSeriesResult(
        f=f,
        s=s,
        S=S,
        coeffs=coeffs,
        degree_claimed=degree,
        guard=guard,
        polynomiality=verdict,
        newton=NP,
        hodge=HP,
        hodge_poly=hp_poly,
        comparison=polygon_above(NP, HP),
        nd=nd,
        precision=T_used,
        integral=coefficients_integral(coeffs, conductor(f)),
    )


@dataclass(frozen=True)
class HodgeBoundReport:
    comparison: PolygonComparison
    newton: RatPolygon
    hodge: RatPolygon
    degree_ok: bool

    @property
    def ok(self) -> bool:
        return self.comparison.ok and self.degree_ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "degree_ok": self.degree_ok,
            **self.comparison.to_json(),
            "newton": self.newton.to_json(),
            "hodge": self.hodge.to_json(),
        }


def hodge_bound_check(f: WittInput, s: Sequence[int], result: Optional[LSeriesResult] = None,
                    **kwargs) -> HodgeBoundReport:
    """Newton polygon on or above the Hodge polygon with the same endpoint."""
    result = result or compute_lfunction(f, s, **kwargs)
    return HodgeBoundReport(
        comparison=polygon_above(result.newton, result.hodge),
        newton=result.newton,
        hodge=result.hodge,
        degree_ok=result.polynomiality.ok,
    )


def reduction_check(f: WittInput, s: Sequence[int], ks: Sequence[int] = (1, 2)) -> dict:
    """For lower-dimensional supports: S_k(f, s) = scalar(k) * S_k(f', s')."""
    s = _check_twist(f, s)
    red = unimodular_reduce(f, s)
    rows = []
    ok = True
    for k in ks:
        lhs = exp_sum(f, s, k)
        rhs = exp_sum(red.f, red.s, k) * red.scalar(k, f.q)
        rows.append({"k": k, "match": lhs == rhs})
        ok &= lhs == rhs
    return {"ok": ok, "l": red.l, "s_reduced": list(red.s),
            "residual_trivial": red.residual_trivial, "rows": rows, "reduction": red}
