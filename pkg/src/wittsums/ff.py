"""Finite fields F_{p^d} stored in discrete-log form.

Every context fixes a monic modulus over F_p whose canonical root is a
multiplicative generator ``g``; nonzero elements are carried as their
exponent with respect to ``g`` and addition goes through a Zech table.
Extension contexts built with :func:`extend_field` pick their generator so
that its norm down to the base field is the base generator, which keeps
Teichmuller exponents consistent across levels of a tower.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from math import gcd
from typing import Iterator, Optional, Sequence

from sympy import isprime

from .errors import NoGeneratorRoot, NotPrime, ReducibleModulus, ZeroElement

# ---------------------------------------------------------------------------
# polynomials over F_p as lists of ints, lowest degree first


def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _fp_trim(out)


def _fp_divmod(a, b, p):
    a = [x % p for x in a]
    _fp_trim(a)
    b = _fp_trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    quo = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        quo[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        _fp_trim(a)
    return _fp_trim(quo), a


def _fp_gcd(a, b, p):
    a = _fp_trim([x % p for x in a])
    b = _fp_trim([x % p for x in b])
    while b:
        a, b = b, _fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _fp_powmod(base, e, mod, p):
    result = [1]
    base = _fp_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _fp_divmod(_fp_mul(result, base, p), mod, p)[1]
        base = _fp_divmod(_fp_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Rabin-style test: no factor of degree j <= deg/2 divides the modulus."""
    h = _fp_trim([c % p for c in modulus])
    deg = len(h) - 1
    if deg < 1:
        return False
    x = [0, 1]
    xp = x
    for _ in range(1, deg // 2 + 1):
        xp = _fp_powmod(xp, p, h, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_fp_gcd(h, _fp_trim(diff), p)) > 1:
            return False
    return True


# ---------------------------------------------------------------------------


class FieldCtx:
    """The field F_p[X]/(modulus) with the class of X as generator.

    Contexts produced by :func:`extend_field` also carry ``base`` (the
    field F_q they extend), ``k`` and ``norm_exponent`` = (q^k-1)/(q-1).
    """

    def __init__(self, p: int, modulus: Sequence[int]):
        self.p = p
        self.modulus = tuple(int(c) % p for c in modulus)
        self.deg = len(self.modulus) - 1
        self.order = p**self.deg - 1
        self.base: Optional[FieldCtx] = None
        self.k = 1
        self.norm_exponent = 1
        self._build_tables()

    def _build_tables(self):
        p, deg = self.p, self.deg
        low = [(-c) % p for c in self.modulus[:-1]]  # X^deg = sum low[i] X^i
        exp_table = []
        vec = [0] * deg
        vec[0] = 1
        one = tuple(vec)
        for i in range(self.order):
            t = tuple(vec)
            if i > 0 and t == one:
                raise NoGeneratorRoot(
                    f"root of {self.modulus} has order {i} < {self.order}")
            exp_table.append(t)
            top = vec[-1]
            vec = [0] + vec[:-1]
            if top:
                vec = [(v + top * c) % p for v, c in zip(vec, low)]
        if tuple(vec) != one:
            raise NoGeneratorRoot(f"modulus {self.modulus} is not irreducible")
        self._exp = exp_table
        self._log = {v: i for i, v in enumerate(exp_table)}
        zech = []
        for v in exp_table:
            w = ((v[0] + 1) % p,) + v[1:]
            zech.append(self._log.get(w))
        self._zech = zech

    # -- constructors ---------------------------------------------------
    def elem(self, e: Optional[int]) -> FieldElem:
        return FieldElem(self, None if e is None else e % self.order)

    @property
    def zero(self) -> FieldElem:
        return FieldElem(self, None)

    @property
    def one(self) -> FieldElem:
        return FieldElem(self, 0)

    @property
    def gen(self) -> FieldElem:
        return FieldElem(self, 1 % self.order)

    def from_vector(self, coords: Sequence[int]) -> FieldElem:
        v = [int(c) % self.p for c in coords] + [0] * self.deg
        v = tuple(v[: self.deg])
        if not any(v):
            return self.zero
        return FieldElem(self, self._log[v])

    def from_int(self, c: int) -> FieldElem:
        return self.from_vector([c])

    def elements(self) -> Iterator[FieldElem]:
        yield self.zero
        for e in range(self.order):
            yield FieldElem(self, e)

    def units(self) -> Iterator[FieldElem]:
        for e in range(self.order):
            yield FieldElem(self, e)

    # -- tower data -----------------------------------------------------
    @property
    def q(self) -> int:
        return self.order + 1

    def embed(self, x: FieldElem) -> FieldElem:
        """Image of a base-field element under the fixed embedding."""
        if x.ctx is self:
            return x
        if x.ctx is not self.base:
            raise ValueError("element is not from the base field of this context")
        if x.e is None:
            return self.zero
        return FieldElem(self, x.e * self.norm_exponent)

    def norm(self, x: FieldElem) -> FieldElem:
        base = self.base or self
        if x.e is None:
            return base.zero
        return FieldElem(base, x.e % base.order)

    def trace(self, x: FieldElem) -> FieldElem:
        base = self.base or self
        qb = base.q
        acc = self.zero
        y = x
        for _ in range(self.k):
            acc = acc + y
            y = y**qb
        if base is self:
            return acc
        if acc.e is None:
            return base.zero
        if acc.e % self.norm_exponent:
            raise ArithmeticError("trace left the base field")
        return FieldElem(base, acc.e // self.norm_exponent)

    def __repr__(self):
        return f"FieldCtx(p={self.p}, deg={self.deg}, modulus={self.modulus})"


class FieldElem:
    """Element of a :class:`FieldCtx`; ``e`` is the exponent, None for 0."""

    __slots__ = ("ctx", "e")

    def __init__(self, ctx: FieldCtx, e: Optional[int]):
        self.ctx = ctx
        self.e = e

    def is_zero(self) -> bool:
        return self.e is None

    def _coerce(self, other) -> FieldElem:
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.e is None:
            return other
        if other.e is None:
            return self
        od = self.ctx.order
        z = self.ctx._zech[(other.e - self.e) % od]
        if z is None:
            return self.ctx.zero
        return FieldElem(self.ctx, (self.e + z) % od)

    __radd__ = __add__

    def __neg__(self):
        if self.e is None or self.ctx.p == 2:
            return self
        od = self.ctx.order
        return FieldElem(self.ctx, (self.e + od // 2) % od)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.e is None or other.e is None:
            return self.ctx.zero
        return FieldElem(self.ctx, (self.e + other.e) % self.ctx.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.e is None:
            raise ZeroDivisionError("division by zero in finite field")
        if self.e is None:
            return self
        return FieldElem(self.ctx, (self.e - other.e) % self.ctx.order)

    def __pow__(self, n: int):
        if self.e is None:
            if n <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return self
        return FieldElem(self.ctx, self.e * n % self.ctx.order)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.from_int(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.ctx is other.ctx and self.e == other.e

    def __hash__(self):
        return hash((id(self.ctx), self.e))

    def vector(self) -> tuple[int, ...]:
        if self.e is None:
            return (0,) * self.ctx.deg
        return self.ctx._exp[self.e]

    def frobenius(self, j: int = 1) -> FieldElem:
        return self ** (self.ctx.p**j)

    def __repr__(self):
        return "0" if self.e is None else f"g^{self.e}"


def dlog(x: FieldElem) -> int:
    """Exponent ``e`` in [0, order) with g^e = x."""
    if x.e is None:
        raise ZeroElement("discrete log of zero")
    return x.e


# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def build_field(p: int, deg: int, modulus: Optional[tuple[int, ...]] = None) -> FieldCtx:
    """Field with p^deg elements.

    Without a modulus, monic polynomials are scanned lexicographically in
    (c_{deg-1}, ..., c_0) and the first one whose root generates the unit
    group is used.
    """
    if not isprime(p):
        raise NotPrime(f"{p} is not prime")
    if deg < 1:
        raise ValueError("degree must be positive")
    if modulus is not None:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != deg + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {deg}")
        if not is_irreducible(modulus, p):
            raise ReducibleModulus(f"{modulus} is reducible over F_{p}")
        return FieldCtx(p, modulus)
    for tail in itertools.product(range(p), repeat=deg):
        cand = tuple(reversed(tail)) + (1,)
        if cand[0] == 0:
            continue
        try:
            return FieldCtx(p, cand)
        except NoGeneratorRoot:
            continue
    raise NoGeneratorRoot(f"no primitive polynomial of degree {deg} over F_{p}")


def _minpoly_over_fp(x: FieldElem) -> tuple[int, ...]:
    ctx = x.ctx
    poly = [ctx.one]
    conj = x
    for _ in range(ctx.deg):
        # poly *= (X - conj)
        new = [ctx.zero] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * conj
        poly = new
        conj = conj ** ctx.p
    out = []
    for c in poly:
        v = c.vector()
        if any(v[1:]):
            raise ArithmeticError("minimal polynomial left F_p")
        out.append(v[0])
    return tuple(out)


@lru_cache(maxsize=None)
def extend_field(base: FieldCtx, k: int) -> FieldCtx:
    """F_{q^k} over ``base`` = F_q with generator of norm ``base.gen``."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return base
    p, q = base.p, base.q
    big = build_field(p, base.deg * k)
    N = big.order // base.order
    root = None
    for t in range(base.order):
        if gcd(t, base.order) != 1:
            continue
        r = FieldElem(big, t * N % big.order)
        val = big.zero
        for i, c in enumerate(base.modulus):
            if c:
                val = val + big.from_int(c) * r**i
        if val.is_zero():
            root = t
            break
    if root is None:
        raise ArithmeticError("base modulus has no root in the extension")
    j = root
    while gcd(j, big.order) != 1:
        j += q - 1
    gk = FieldElem(big, j % big.order)
    ctx = FieldCtx(p, _minpoly_over_fp(gk))
    ctx.base = base
    ctx.k = k
    ctx.norm_exponent = N
    return ctx


def norm(x: FieldElem) -> FieldElem:
    return x.ctx.norm(x)


def trace(x: FieldElem) -> FieldElem:
    return x.ctx.trace(x)


# ---------------------------------------------------------------------------
# univariate polynomials over a FieldCtx: lists of FieldElem, low degree first


def poly_trim(a: list[FieldElem]) -> list[FieldElem]:
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


def poly_divmod(a, b):
    a = poly_trim(a)
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    ctx = b[-1].ctx
    quo = [ctx.zero] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] / b[-1]
        shift = len(a) - len(b)
        quo[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = a[shift + i] - c * y
        a = poly_trim(a)
    return poly_trim(quo), a


def poly_gcd(a, b):
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a
