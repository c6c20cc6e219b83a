"""Truncated arithmetic in Z_{p^d}[zeta_{p^m}] modulo p^T.

The unramified part is (Z/p^T)[y]/(h) where ``h`` is the Teichmuller lift
of an F_p-modulus, so y^(p^d) = y and Frobenius is y -> y^p.  On top of it
an element is a polynomial of degree < e = (p-1)p^(m-1) in the uniformizer
pi0 = zeta_{p^m} - 1, reduced by the Eisenstein relation Phi_{p^m}(1+pi0)=0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Optional, Sequence, TypeVar, Union

from .cyclo import CycElem, cyclotomic_poly
from .errors import BadConductor, HenselFails, NotIntegral, PrecisionExhausted
from .ff import FieldCtx, _fp_divmod, _fp_trim

Unr = tuple  # element of an UnramifiedRing: d residues mod p^prec


def vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def frac_vp(x: Fraction, p: int) -> int:
    return vp(x.numerator, p) - vp(x.denominator, p)


@dataclass(frozen=True)
class AboveCap:
    """Valuation known only to be at least ``cap`` (element is 0 mod p^cap)."""

    cap: int

    def to_json(self):
        return {"above": self.cap}


Valuation = Union[Fraction, AboveCap]


def val_to_json(v: Valuation):
    return v.to_json() if isinstance(v, AboveCap) else str(v)


# ---------------------------------------------------------------------------


def _fp_inverse_mod(a: Sequence[int], h: Sequence[int], p: int) -> list[int]:
    """Inverse of a modulo h over F_p (extended Euclid)."""
    r0, r1 = _fp_trim([c % p for c in h]), _fp_trim([c % p for c in a])
    s0, s1 = [], [1]
    while r1:
        q, r = _fp_divmod(r0, r1, p)
        r0, r1 = r1, r
        prod = [0] * (len(q) + len(s1))
        for i, x in enumerate(q):
            for j, y in enumerate(s1):
                prod[i + j] += x * y
        s_new = [0] * max(len(s0), len(prod))
        for i, x in enumerate(s0):
            s_new[i] += x
        for i, x in enumerate(prod):
            s_new[i] -= x
        s0, s1 = s1, _fp_trim([c % p for c in s_new])
    if len(r0) != 1:
        raise ZeroDivisionError("not invertible modulo h")
    inv = pow(r0[0], -1, p)
    return [c * inv % p for c in s0]


class _PolyQuotient:
    """(Z/P)[X]/(h) for monic integer h; elements are d-tuples."""

    def __init__(self, p: int, prec: int, h: Sequence[int]):
        self.p = p
        self.prec = prec
        self.P = p**prec
        self.h = tuple(int(c) % self.P for c in h)
        self.d = len(self.h) - 1
        self._low = [(-c) % self.P for c in self.h[:-1]]

    def zero(self) -> Unr:
        return (0,) * self.d

    def const(self, c: int) -> Unr:
        return (c % self.P,) + (0,) * (self.d - 1)

    def x(self) -> Unr:
        if self.d == 1:
            return self.reduce([0, 1])
        return (0, 1) + (0,) * (self.d - 2)

    def reduce(self, a: Sequence[int]) -> Unr:
        a = list(a)
        d, P, low = self.d, self.P, self._low
        for top in range(len(a) - 1, d - 1, -1):
            c = a[top] % P
            if c:
                base = top - d
                for i in range(d):
                    a[base + i] += c * low[i]
            a[top] = 0
        a = a[:d] + [0] * max(0, d - len(a))
        return tuple(v % P for v in a)

    def add(self, a: Unr, b: Unr) -> Unr:
        P = self.P
        return tuple((x + y) % P for x, y in zip(a, b))

    def sub(self, a: Unr, b: Unr) -> Unr:
        P = self.P
        return tuple((x - y) % P for x, y in zip(a, b))

    def neg(self, a: Unr) -> Unr:
        P = self.P
        return tuple((-x) % P for x in a)

    def scale(self, a: Unr, c: int) -> Unr:
        P = self.P
        return tuple(x * c % P for x in a)

    def mul(self, a: Unr, b: Unr) -> Unr:
        if self.d == 1:
            return (a[0] * b[0] % self.P,)
        out = [0] * (2 * self.d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self.reduce(out)

    def pow(self, a: Unr, n: int) -> Unr:
        result = self.const(1)
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def is_zero(self, a: Unr) -> bool:
        return not any(a)

    def ord(self, a: Unr) -> Optional[int]:
        vals = [vp(x, self.p) for x in a if x]
        return min(vals) if vals else None

    def inverse(self, a: Unr) -> Unr:
        """Inverse of a unit by Newton iteration from the residue inverse."""
        p = self.p
        res = _fp_inverse_mod(list(a), list(self.h), p)
        x = tuple(res + [0] * (self.d - len(res)))
        two = self.const(2)
        prec = 1
        while prec < self.prec:
            x = self.mul(x, self.sub(two, self.mul(a, x)))
            prec *= 2
        return x


@lru_cache(maxsize=None)
def teichmuller_modulus(field: FieldCtx, prec: int) -> tuple[int, ...]:
    """Monic lift of ``field.modulus`` to Z/p^prec whose roots satisfy y^(p^d)=y.

    The root of the naive lift is Hensel-lifted to a root of X^(p^d) - X, then
    the product of its Frobenius conjugates is expanded.
    """
    p, d = field.p, field.deg
    A = _PolyQuotient(p, prec, field.modulus)
    Q = p**d
    y = A.x()
    for _ in range(2 * max(1, prec.bit_length()) + 2):
        fy = A.sub(A.pow(y, Q), y)
        if A.is_zero(fy):
            break
        dfy = A.sub(A.scale(A.pow(y, Q - 1), Q), A.const(1))
        y = A.sub(y, A.mul(fy, A.inverse(dfy)))
    else:
        raise HenselFails("Teichmuller lift of the modulus did not converge")
    conj = [y]
    for _ in range(d - 1):
        conj.append(A.pow(conj[-1], p))
    poly = [A.const(1)]
    for c in conj:
        new = [A.zero() for _ in range(len(poly) + 1)]
        for i, a in enumerate(poly):
            new[i + 1] = A.add(new[i + 1], a)
            new[i] = A.sub(new[i], A.mul(a, c))
        poly = new
    out = []
    for a in poly:
        if any(a[1:]):
            raise HenselFails("conjugate product is not defined over Z/p^T")
        out.append(a[0])
    return tuple(out)


class UnramifiedRing(_PolyQuotient):
    """Z_{p^d} modulo p^prec, with y the Teichmuller lift of the field generator."""

    def __init__(self, field: FieldCtx, prec: int):
        super().__init__(field.p, prec, teichmuller_modulus(field, prec))
        self.field = field
        self.q = field.q
        self._frob_images = [self.pow(self.x(), self.p * r) for r in range(self.d)]
        self._teich: dict[int, Unr] = {}

    def teich(self, e: int) -> Unr:
        """y^e, the Teichmuller lift of g^e."""
        e %= self.q - 1
        t = self._teich.get(e)
        if t is None:
            t = self.pow(self.x(), e)
            self._teich[e] = t
        return t

    def frob(self, a: Unr, times: int = 1) -> Unr:
        """Frobenius y -> y^p applied ``times`` times."""
        for _ in range(times % self.d if self.d > 1 else 0):
            acc = [0] * self.d
            for c, img in zip(a, self._frob_images):
                if c:
                    for i, v in enumerate(img):
                        acc[i] += c * v
            a = tuple(v % self.P for v in acc)
        return a


@lru_cache(maxsize=None)
def unramified_ring(field: FieldCtx, prec: int) -> UnramifiedRing:
    return UnramifiedRing(field, prec)


# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def eisenstein_poly(p: int, m: int) -> tuple[int, ...]:
    """Coefficients of Phi_{p^m}(1 + X), lowest degree first."""
    phi = cyclotomic_poly(p**m)
    out = [0] * len(phi)
    for i, c in enumerate(phi):
        if c:
            for j in range(i + 1):
                out[j] += c * comb(i, j)
    return tuple(out)


class LocalCtx:
    """The ring Z_{p^d}[zeta_{p^m}] / p^T, d = field.deg."""

    def __init__(self, field: FieldCtx, T: int, m: int):
        if T < 1 or m < 1:
            raise ValueError("precision and ramification level must be positive")
        self.field = field
        self.p = field.p
        self.d = field.deg
        self.T = T
        self.m = m
        self.e = (self.p - 1) * self.p ** (m - 1)
        self.ur = unramified_ring(field, T)
        self.eis = eisenstein_poly(self.p, m)
        self._pi: dict[int, LocalElem] = {}
        self._zeta_powers: dict[int, list[LocalElem]] = {}

    def __repr__(self):
        return f"LocalCtx(p={self.p}, d={self.d}, T={self.T}, m={self.m})"

    # -- constructors ---------------------------------------------------
    def _wrap(self, coeffs) -> LocalElem:
        return LocalElem(self, tuple(coeffs))

    @property
    def zero(self) -> LocalElem:
        z = self.ur.zero()
        return self._wrap([z] * self.e)

    @property
    def one(self) -> LocalElem:
        return self.from_int(1)

    def from_unramified(self, a: Unr) -> LocalElem:
        z = self.ur.zero()
        return self._wrap([a] + [z] * (self.e - 1))

    def from_int(self, c: int) -> LocalElem:
        return self.from_unramified(self.ur.const(c))

    def from_fraction(self, c: Fraction) -> LocalElem:
        if c.denominator % self.p == 0:
            raise NotIntegral(f"{c} is not p-integral")
        P = self.ur.P
        return self.from_int(c.numerator * pow(c.denominator, -1, P))

    def teichmuller(self, e: int) -> LocalElem:
        """y^e: the Teichmuller representative of g^e."""
        return self.from_unramified(self.ur.teich(e))

    @property
    def uniformizer(self) -> LocalElem:
        """pi0 = zeta_{p^m} - 1."""
        z = self.ur.zero()
        coeffs = [z] * self.e
        if self.e == 1:
            # p = 2, m = 1: zeta_2 - 1 = -2
            return self.from_int(-2)
        coeffs[1] = self.ur.const(1)
        return self._wrap(coeffs)

    @property
    def zeta(self) -> LocalElem:
        """zeta_{p^m} = 1 + pi0."""
        return self.one + self.uniformizer

    # -- internal kernels -----------------------------------------------
    def _mul(self, a, b):
        e, ur = self.e, self.ur
        P = ur.P
        if ur.d == 1:
            av = [x[0] for x in a]
            bv = [x[0] for x in b]
            conv = [0] * (2 * e - 1)
            for i, x in enumerate(av):
                if x:
                    for j, y in enumerate(bv):
                        if y:
                            conv[i + j] += x * y
            eis = self.eis
            for top in range(2 * e - 2, e - 1, -1):
                c = conv[top] % P
                if c:
                    base = top - e
                    for r in range(e):
                        if eis[r]:
                            conv[base + r] -= c * eis[r]
            return tuple((v % P,) for v in conv[:e])
        d = ur.d
        conv = [[0] * (2 * d - 1) for _ in range(2 * e - 1)]
        for i, x in enumerate(a):
            if not any(x):
                continue
            for j, y in enumerate(b):
                if not any(y):
                    continue
                slot = conv[i + j]
                for s, xs in enumerate(x):
                    if xs:
                        for t, yt in enumerate(y):
                            slot[s + t] += xs * yt
        red = [ur.reduce(c) for c in conv]
        eis = self.eis
        for top in range(2 * e - 2, e - 1, -1):
            c = red[top]
            if any(c):
                base = top - e
                for r in range(e):
                    if eis[r]:
                        red[base + r] = ur.sub(red[base + r], ur.scale(c, eis[r]))
        return tuple(red[:e])


class LocalElem:
    """sum_j coeffs[j] * pi0^j with coeffs in the unramified ring."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: LocalCtx, coeffs: tuple):
        self.ctx = ctx
        self.coeffs = coeffs

    def _coerce(self, other) -> LocalElem:
        if isinstance(other, LocalElem):
            if other.ctx is not self.ctx:
                raise ValueError("elements of different local contexts")
            return other
        if isinstance(other, int):
            return self.ctx.from_int(other)
        if isinstance(other, Fraction):
            return self.ctx.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ur = self.ctx.ur
        return LocalElem(self.ctx, tuple(ur.add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        ur = self.ctx.ur
        return LocalElem(self.ctx, tuple(ur.neg(a) for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ur = self.ctx.ur
        return LocalElem(self.ctx, tuple(ur.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            ur = self.ctx.ur
            return LocalElem(self.ctx, tuple(ur.scale(a, other) for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return LocalElem(self.ctx, self.ctx._mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LocalElem:
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, LocalElem):
            return NotImplemented
        return self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.coeffs)

    def val(self) -> Valuation:
        """p-adic valuation normalized by val(p) = 1."""
        ur, e = self.ctx.ur, self.ctx.e
        best = None
        for j, c in enumerate(self.coeffs):
            o = ur.ord(c)
            if o is not None:
                v = Fraction(o) + Fraction(j, e)
                if best is None or v < best:
                    best = v
        if best is None or best >= self.ctx.T:
            return AboveCap(self.ctx.T)
        return best

    def is_unit(self) -> bool:
        v = self.val()
        return not isinstance(v, AboveCap) and v == 0

    def frob(self, times: int = 1) -> LocalElem:
        """Frobenius on the unramified coefficients, fixing zeta_{p^m}."""
        ur = self.ctx.ur
        return LocalElem(self.ctx, tuple(ur.frob(c, times) for c in self.coeffs))

    def inverse(self) -> LocalElem:
        if not self.is_unit():
            raise ZeroDivisionError("only units are invertible")
        ctx = self.ctx
        x = ctx.from_unramified(ctx.ur.inverse(self.coeffs[0]))
        for _ in range(2 * (ctx.T * ctx.e).bit_length() + 2):
            nx = x * (2 - self * x)
            if nx == x:
                return x
            x = nx
        raise HenselFails("unit inverse did not converge")

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __repr__(self):
        return f"LocalElem({self.ctx!r}, val={self.val()})"


def val(x: LocalElem) -> Valuation:
    return x.val()


def ord_q(x: LocalElem) -> Valuation:
    """Valuation normalized by ord_q(q) = 1, q = p^a with a = field degree."""
    v = x.val()
    if isinstance(v, AboveCap):
        return v
    return v / x.ctx.d


# ---------------------------------------------------------------------------


def poly_eval(coeffs: Sequence[LocalElem], x: LocalElem) -> LocalElem:
    acc = x.ctx.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def hensel_lift(f: Sequence[LocalElem], x0: LocalElem) -> LocalElem:
    """Newton iteration for a root of ``f`` (coefficients low first) near x0.

    Requires f'(x0) to be a unit and f(x0) to lie in the maximal ideal.
    """
    ctx = x0.ctx
    df = [c * i for i, c in enumerate(f)][1:]
    fx = poly_eval(f, x0)
    dfx = poly_eval(df, x0)
    v = fx.val()
    if not dfx.is_unit() or (not isinstance(v, AboveCap) and v <= 0):
        raise HenselFails("Hensel criterion |f(x0)| < |f'(x0)|^2 fails")
    x = x0
    for _ in range(2 * (ctx.T * ctx.e).bit_length() + 4):
        fx = poly_eval(f, x)
        if fx.is_zero():
            return x
        x = x - fx / poly_eval(df, x)
    raise HenselFails("Newton iteration did not converge")


# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def artin_hasse(p: int, prec: int) -> tuple[Fraction, ...]:
    """First ``prec`` coefficients of E(t) = exp(sum_i t^(p^i)/p^i).

    Uses n e_n = sum_{p^i <= n} e_{n - p^i}, from E'/E = sum t^(p^i - 1).
    """
    coeffs = [Fraction(1)]
    for n in range(1, prec):
        acc = Fraction(0)
        pk = 1
        while pk <= n:
            acc += coeffs[n - pk]
            pk *= p
        coeffs.append(acc / n)
    return tuple(coeffs)


def _series_eval(coeffs: Sequence[Fraction], t: LocalElem, terms: int) -> LocalElem:
    ctx = t.ctx
    acc = ctx.zero
    for c in reversed(coeffs[:terms]):
        acc = acc * t + ctx.from_fraction(c)
    return acc


def _terms_needed(t: LocalElem) -> int:
    v = t.val()
    ctx = t.ctx
    if isinstance(v, AboveCap):
        return 1
    if v <= 0:
        raise ValueError("series evaluation needs an argument of positive valuation")
    return math.ceil(ctx.T / v) + 1


def artin_hasse_eval(t: LocalElem) -> LocalElem:
    """E(t) for t in the maximal ideal, truncated exactly at precision T."""
    n = _terms_needed(t)
    return _series_eval(artin_hasse(t.ctx.p, n), t, n)


def _artin_hasse_derivative_eval(t: LocalElem) -> LocalElem:
    n = _terms_needed(t)
    coeffs = artin_hasse(t.ctx.p, n + 1)
    deriv = [coeffs[i + 1] * (i + 1) for i in range(n)]
    return _series_eval(deriv, t, n)


def pi_m(ctx: LocalCtx, level: Optional[int] = None) -> LocalElem:
    """Dwork's pi_l with E(pi_l) = zeta_{p^m}^(p^(m-l)); default l = m.

    E is injective on the maximal ideal (E(t) - E(t') = (t - t')*unit), so
    the Newton root of E(t) = zeta_{p^l} is the unique such root, and it is
    the Artin-Hasse-log root of valuation 1/(p^(l-1)(p-1)).
    """
    level = ctx.m if level is None else level
    if not 1 <= level <= ctx.m:
        raise ValueError(f"level must lie in [1, {ctx.m}]")
    cached = ctx._pi.get(level)
    if cached is not None:
        return cached
    target = ctx.zeta ** (ctx.p ** (ctx.m - level))
    t = target - 1
    for _ in range(2 * (ctx.T * ctx.e).bit_length() + 4):
        h = artin_hasse_eval(t) - target
        if h.is_zero():
            break
        t = t - h / _artin_hasse_derivative_eval(t)
    else:
        raise HenselFails("pi_m Newton iteration did not converge")
    ctx._pi[level] = t
    return t


# ---------------------------------------------------------------------------


def _zeta_image(ctx: LocalCtx, N: int) -> LocalElem:
    p = ctx.p
    pm = 1
    mm = 0
    M = N
    while M % p == 0:
        M //= p
        pm *= p
        mm += 1
    if mm > ctx.m:
        raise BadConductor(f"conductor {N} needs ramification level {mm} > {ctx.m}")
    if (p**ctx.d - 1) % M:
        raise BadConductor(f"{M} does not divide p^d - 1 = {p**ctx.d - 1}")
    # zeta_N = zeta_{p^mm}^A * zeta_M^B with A*M + B*p^mm = 1
    if pm == 1:
        A, B = 0, 1
    elif M == 1:
        A, B = 1, 0
    else:
        A = pow(M, -1, pm)
        B = (1 - A * M) // pm
    zp = ctx.zeta ** (p ** (ctx.m - mm)) if pm > 1 else ctx.one
    zm = ctx.teichmuller((p**ctx.d - 1) // M)
    return zp ** (A % pm if pm > 1 else 0) * zm ** (B % M if M > 1 else 0)


def embed_cyc(x: CycElem, ctx: LocalCtx) -> LocalElem:
    """Image of x under zeta_M -> y^((p^d-1)/M), zeta_{p^k} -> (1+pi0)^(p^(m-k)).

    Coordinates must be p-integral; see :func:`embed_cyc_scaled` otherwise.
    """
    powers = ctx._zeta_powers.get(x.N)
    if powers is None:
        z = _zeta_image(ctx, x.N)
        powers = [ctx.one]
        for _ in range(len(x.coords) - 1):
            powers.append(powers[-1] * z)
        ctx._zeta_powers[x.N] = powers
    acc = ctx.zero
    for c, zi in zip(x.coords, powers):
        if c:
            acc = acc + zi * ctx.from_fraction(c)
    return acc


def embed_cyc_scaled(x: CycElem, ctx: LocalCtx) -> tuple[LocalElem, int]:
    """(embed(p^r x), r) with r >= 0 minimal so that p^r x is p-integral."""
    p = ctx.p
    r = 0
    for c in x.coords:
        if c:
            r = max(r, -frac_vp(c, p))
    return embed_cyc(x * (p**r), ctx), r


def cyc_valuation(x: CycElem, ctx: LocalCtx) -> Valuation:
    """val of the embedded value; AboveCap(T - r) covers the rescaling loss."""
    if x.is_zero():
        return AboveCap(ctx.T)
    y, r = embed_cyc_scaled(x, ctx)
    v = y.val()
    if isinstance(v, AboveCap):
        return AboveCap(ctx.T - r)
    return v - r


# ---------------------------------------------------------------------------

R = TypeVar("R")


def with_precision_retry(fn: Callable[[int], R], T0: int, T_max: int = 256) -> R:
    """Call fn(T) doubling T on PrecisionExhausted until T exceeds T_max."""
    T = T0
    while True:
        try:
            return fn(T)
        except PrecisionExhausted:
            if 2 * T > T_max:
                raise
            T *= 2
