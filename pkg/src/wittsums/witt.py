"""Witt vectors of finite length over finite fields.

Two independent routes are provided.  The universal p-typical polynomials
(built once from ghost components) give the ring structure coordinate-wise;
the Teichmuller isomorphism iota maps W_m(F) onto (Z/p^m)[y]/(h) where the
same operations are plain polynomial arithmetic.  The hot path for sums uses
only iota and a precomputed trace table.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import LengthMismatch, NonConstantTrace, ZeroCoordinate
from .ff import FieldCtx, FieldElem, dlog, extend_field
from .padic import UnramifiedRing, unramified_ring

# -- symbolic integer polynomials: {exponent tuple: coefficient} -----------

Poly = dict


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for mono, c in b.items():
        v = out.get(mono, 0) + sign * c
        if v:
            out[mono] = v
        else:
            out.pop(mono, None)
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            mono = tuple(x + y for x, y in zip(ma, mb))
            v = out.get(mono, 0) + ca * cb
            if v:
                out[mono] = v
            else:
                out.pop(mono)
    return out


def _ppow(a: Poly, n: int, nvars: int) -> Poly:
    result: Poly = {(0,) * nvars: 1}
    while n:
        if n & 1:
            result = _pmul(result, a)
        n >>= 1
        if n:
            a = _pmul(a, a)
    return result


def _pscale(a: Poly, c) -> Poly:
    return {mono: v * c for mono, v in a.items() if v * c}


def _var(i: int, nvars: int) -> Poly:
    mono = [0] * nvars
    mono[i] = 1
    return {tuple(mono): 1}


def _ghost(p: int, j: int, offset: int, nvars: int) -> Poly:
    """w_j = sum_{i<=j} p^i X_{offset+i}^(p^(j-i))."""
    out: Poly = {}
    for i in range(j + 1):
        out = _padd(out, _pscale(_ppow(_var(offset + i, nvars), p ** (j - i), nvars), p**i))
    return out


def _solve_components(p: int, m: int, target) -> tuple[Poly, ...]:
    """Polynomials S_0..S_{m-1} in 2m variables with ghost(S)_j = target(j)."""
    nvars = 2 * m
    comps: list[Poly] = []
    for j in range(m):
        rest = target(j)
        for i, s in enumerate(comps):
            rest = _padd(rest, _pscale(_ppow(s, p ** (j - i), nvars), p**i), sign=-1)
        sj: Poly = {}
        for mono, c in rest.items():
            if c % p**j:
                raise ArithmeticError("universal Witt polynomial is not integral")
            sj[mono] = c // p**j
        comps.append(sj)
    return tuple(comps)


@lru_cache(maxsize=None)
def universal_add(p: int, m: int) -> tuple[Poly, ...]:
    """Addition polynomials in variables (X_0..X_{m-1}, Y_0..Y_{m-1})."""
    nvars = 2 * m
    return _solve_components(p, m, lambda j: _padd(_ghost(p, j, 0, nvars), _ghost(p, j, m, nvars)))


@lru_cache(maxsize=None)
def universal_mul(p: int, m: int) -> tuple[Poly, ...]:
    nvars = 2 * m
    return _solve_components(p, m, lambda j: _pmul(_ghost(p, j, 0, nvars), _ghost(p, j, m, nvars)))


def _eval_mod_p(poly: Poly, values: Sequence[FieldElem]) -> FieldElem:
    ctx = values[0].ctx
    acc = ctx.zero
    p = ctx.p
    for mono, c in poly.items():
        c %= p
        if not c:
            continue
        term = ctx.from_int(c)
        for v, e in zip(values, mono):
            if e:
                term = term * v**e
                if term.is_zero():
                    break
        acc = acc + term
    return acc


# -- Witt vectors -----------------------------------------------------------


@dataclass(frozen=True)
class WittVec:
    coords: tuple[FieldElem, ...]

    def __post_init__(self):
        if not self.coords:
            raise ValueError("Witt vectors need at least one coordinate")
        ctx = self.coords[0].ctx
        if any(c.ctx is not ctx for c in self.coords):
            raise ValueError("coordinates live in different fields")

    @property
    def m(self) -> int:
        return len(self.coords)

    @property
    def ctx(self) -> FieldCtx:
        return self.coords[0].ctx

    @classmethod
    def zero(cls, ctx: FieldCtx, m: int) -> WittVec:
        return cls((ctx.zero,) * m)

    @classmethod
    def teichmuller(cls, b: FieldElem, m: int) -> WittVec:
        """[b] = (b, 0, ..., 0)."""
        return cls((b,) + (b.ctx.zero,) * (m - 1))

    def shift(self, i: int) -> WittVec:
        """V^i, truncated to the same length."""
        z = self.ctx.zero
        return WittVec(((z,) * i + self.coords)[: self.m])

    def frobenius(self) -> WittVec:
        return WittVec(tuple(c ** self.ctx.p for c in self.coords))

    def __add__(self, other: WittVec) -> WittVec:
        return witt_add(self, other)

    def __mul__(self, other: WittVec) -> WittVec:
        return witt_mul(self, other)


def _binary(x: WittVec, y: WittVec, table) -> WittVec:
    if x.m != y.m:
        raise LengthMismatch(f"lengths {x.m} and {y.m}")
    if x.ctx is not y.ctx:
        raise ValueError("Witt vectors over different fields")
    polys = table(x.ctx.p, x.m)
    values = x.coords + y.coords
    return WittVec(tuple(_eval_mod_p(s, values) for s in polys))


def witt_add(x: WittVec, y: WittVec) -> WittVec:
    return _binary(x, y, universal_add)


def witt_mul(x: WittVec, y: WittVec) -> WittVec:
    return _binary(x, y, universal_mul)


def all_witt_vectors(ctx: FieldCtx, m: int) -> Iterator[WittVec]:
    import itertools

    elems = list(ctx.elements())
    for combo in itertools.product(elems, repeat=m):
        yield WittVec(tuple(combo))


# -- the iota isomorphism ---------------------------------------------------


class WittRingElem:
    """Polynomial in the Teichmuller root y over Z/p^m."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: UnramifiedRing, coeffs: tuple):
        self.ring = ring
        self.coeffs = coeffs

    def __add__(self, other: WittRingElem) -> WittRingElem:
        return WittRingElem(self.ring, self.ring.add(self.coeffs, other.coeffs))

    def __mul__(self, other: WittRingElem) -> WittRingElem:
        return WittRingElem(self.ring, self.ring.mul(self.coeffs, other.coeffs))

    def __eq__(self, other):
        return isinstance(other, WittRingElem) and self.ring is other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def frob(self, times: int = 1) -> WittRingElem:
        return WittRingElem(self.ring, self.ring.frob(self.coeffs, times))

    def __repr__(self):
        return f"WittRingElem({self.coeffs} mod {self.ring.P})"


def witt_ring(ctx: FieldCtx, m: int) -> UnramifiedRing:
    return unramified_ring(ctx, m)


def _root_exponent(e: int, i: int, ctx: FieldCtx) -> int:
    """Exponent of (g^e)^(p^-i) in the cyclic group of order q^k - 1."""
    order = ctx.order
    return e * pow(ctx.p, (ctx.deg - 1) * i, order) % order


def iota(x: WittVec) -> WittRingElem:
    ctx = x.ctx
    ring = witt_ring(ctx, x.m)
    acc = ring.zero()
    for i, a in enumerate(x.coords):
        if a.is_zero():
            continue
        term = ring.scale(ring.teich(_root_exponent(dlog(a), i, ctx)), ctx.p**i)
        acc = ring.add(acc, term)
    return WittRingElem(ring, acc)


def ring_trace(z: WittRingElem) -> int:
    """Sum of the Frobenius conjugates; must be a constant of Z/p^m."""
    ring = z.ring
    acc = ring.zero()
    cur = z.coeffs
    for _ in range(ring.d):
        acc = ring.add(acc, cur)
        cur = ring.frob(cur)
    if any(acc[1:]):
        raise NonConstantTrace(f"trace {acc} is not a constant")
    return acc[0]


def witt_trace(x: WittVec) -> int:
    """Trace from W_m(F_{p^d}) to W_m(F_p) = Z/p^m."""
    return ring_trace(iota(x))


# -- input datum f = sum_i sum_u V^i([a_iu x^u]) ---------------------------


@dataclass(frozen=True)
class WittTerm:
    level: int
    u: tuple[int, ...]
    coeff: FieldElem


@dataclass(frozen=True)
class WittInput:
    field: FieldCtx  # F_q
    m: int
    n: int
    terms: tuple[WittTerm, ...]

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        seen = set()
        for t in self.terms:
            if not 0 <= t.level < self.m:
                raise ValueError(f"level {t.level} outside [0, {self.m - 1}]")
            if len(t.u) != self.n:
                raise ValueError(f"exponent {t.u} does not have {self.n} entries")
            if t.coeff.ctx is not self.field:
                raise ValueError("coefficients must lie in the base field")
            if t.coeff.is_zero():
                raise ValueError("coefficients must be nonzero")
            key = (t.level, tuple(t.u))
            if key in seen:
                raise ValueError(f"repeated term {key}")
            seen.add(key)
        if not any(t.level == 0 for t in self.terms):
            raise ValueError("at least one level-0 term is required")

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def a(self) -> int:
        return self.field.deg

    @property
    def q(self) -> int:
        return self.field.q

    @classmethod
    def build(cls, field: FieldCtx, m: int, terms) -> WittInput:
        """terms: iterable of (level, u, coeff) with coeff a FieldElem or dlog int."""
        out = []
        n = None
        for level, u, c in terms:
            u = tuple(int(v) for v in (u if isinstance(u, (tuple, list)) else (u,)))
            n = len(u) if n is None else n
            if isinstance(c, int):
                c = field.elem(c)
            out.append(WittTerm(int(level), u, c))
        if n is None:
            raise ValueError("no terms")
        return cls(field, m, n, tuple(out))

    def supports(self) -> list[list[tuple[int, ...]]]:
        """I_0, ..., I_{m-1}."""
        out: list[list[tuple[int, ...]]] = [[] for _ in range(self.m)]
        for t in self.terms:
            out[t.level].append(t.u)
        return out


def witt_vector_at(f: WittInput, x: Sequence[FieldElem]) -> WittVec:
    """f(x) assembled coordinate-wise with the universal polynomials."""
    ctx = x[0].ctx
    if any(c.is_zero() for c in x):
        raise ZeroCoordinate("torus points need nonzero coordinates")
    acc = WittVec.zero(ctx, f.m)
    for t in f.terms:
        b = ctx.embed(t.coeff)
        for xj, uj in zip(x, t.u):
            b = b * xj**uj
        acc = witt_add(acc, WittVec.teichmuller(b, f.m).shift(t.level))
    return acc


def eval_f_trace(f: WittInput, x: Sequence[FieldElem]) -> int:
    """Tr(f(x)) in Z/p^m, summing the iota-images of the terms directly."""
    ctx = x[0].ctx
    if any(c.is_zero() for c in x):
        raise ZeroCoordinate("torus points need nonzero coordinates")
    ring = witt_ring(ctx, f.m)
    acc = ring.zero()
    ex = [dlog(c) for c in x]
    for t in f.terms:
        e = dlog(ctx.embed(t.coeff)) + sum(uj * ej for uj, ej in zip(t.u, ex))
        term = ring.teich(_root_exponent(e % ctx.order, t.level, ctx))
        acc = ring.add(acc, ring.scale(term, f.p**t.level))
    return ring_trace(WittRingElem(ring, acc))


@lru_cache(maxsize=None)
def trace_table(ctx: FieldCtx, m: int) -> np.ndarray:
    """T[e] = Tr(omega(g^e)) mod p^m for e in [0, q^k - 1)."""
    ring = witt_ring(ctx, m)
    y = ring.x()
    cur = ring.const(1)
    powers = []
    for _ in range(ctx.order):
        powers.append(cur)
        cur = ring.mul(cur, y)
    out = np.zeros(ctx.order, dtype=np.int64)
    p = ctx.p
    for e in range(ctx.order):
        acc = 0
        ee = e
        for _ in range(ctx.deg):
            c = powers[ee]
            acc += c[0]
            ee = ee * p % ctx.order
        # non-constant parts cancel because the sum is Frobenius stable
        out[e] = acc % ring.P
    return out


def trace_vector(f: WittInput, k: int) -> tuple[np.ndarray, np.ndarray]:
    """All torus points of F_{q^k}^n as dlog rows, and t(x) at each of them.

    Points are listed in lexicographic order of their dlog exponents.
    """
    ctx = extend_field(f.field, k)
    order = ctx.order
    n = f.n
    grids = np.indices((order,) * n, dtype=np.int64).reshape(n, -1)
    table = trace_table(ctx, f.m)
    t = np.zeros(grids.shape[1], dtype=np.int64)
    N = ctx.norm_exponent
    p = f.p
    for term in f.terms:
        e = dlog(term.coeff) * N
        lin = np.full(grids.shape[1], e, dtype=np.int64)
        for j, uj in enumerate(term.u):
            if uj:
                lin += (uj % order) * grids[j]
        lin %= order
        pinv = pow(p, (ctx.deg - 1) * term.level, order)
        idx = (lin * pinv) % order
        t += (p**term.level) * table[idx]
    return grids, t % (p**f.m)


__all__ = [
    "WittVec",
    "WittTerm",
    "WittInput",
    "WittRingElem",
    "universal_add",
    "universal_mul",
    "witt_add",
    "witt_mul",
    "iota",
    "witt_trace",
    "ring_trace",
    "witt_vector_at",
    "eval_f_trace",
    "trace_table",
    "trace_vector",
    "all_witt_vectors",
]
