"""Exact arithmetic in Q(zeta_N) on the power basis modulo Phi_N."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence

from .errors import ConductorMismatch, NotAMultiple


def _poly_div_exact(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for shift in range(len(out) - 1, -1, -1):
        c = num[shift + len(den) - 1]  # den is monic
        out[shift] = c
        if c:
            for i, d in enumerate(den):
                num[shift + i] -= c * d
    if any(num):
        raise ArithmeticError("inexact cyclotomic division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> tuple[int, ...]:
    """Coefficients of Phi_N, lowest degree first."""
    if N < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (N - 1) + [1]
    for d in range(1, N):
        if N % d == 0:
            poly = _poly_div_exact(poly, cyclotomic_poly(d))
    return tuple(poly)


def euler_phi(N: int) -> int:
    return len(cyclotomic_poly(N)) - 1


@lru_cache(maxsize=None)
def _power_table(N: int) -> tuple[tuple[int, ...], ...]:
    """Reduced coordinates of zeta_N^j for j in [0, N)."""
    phi = cyclotomic_poly(N)
    deg = len(phi) - 1
    rows = []
    vec = [0] * deg
    vec[0] = 1
    for _ in range(N):
        rows.append(tuple(vec))
        top = vec[-1]
        vec = [0] + vec[:-1]
        if top:
            for i in range(deg):
                vec[i] -= top * phi[i]
    return tuple(rows)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {c!r} as a rational coordinate")


class CycElem:
    """Element sum_i coords[i] zeta_N^i with deg < phi(N)."""

    __slots__ = ("N", "coords")

    def __init__(self, N: int, coords: Iterable):
        coords = tuple(_as_fraction(c) for c in coords)
        if len(coords) != euler_phi(N):
            raise ValueError(f"need {euler_phi(N)} coordinates for conductor {N}")
        self.N = N
        self.coords = coords

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, N: int) -> CycElem:
        return cls(N, [0] * euler_phi(N))

    @classmethod
    def scalar(cls, N: int, c) -> CycElem:
        v = [Fraction(0)] * euler_phi(N)
        v[0] = _as_fraction(c)
        return cls(N, v)

    @classmethod
    def from_exponent_counts(cls, N: int, counts: Sequence) -> CycElem:
        """Reduce sum_j counts[j] zeta_N^j (indices taken mod N)."""
        table = _power_table(N)
        acc = [0] * euler_phi(N)
        for j, c in enumerate(counts):
            if c:
                row = table[j % N]
                for i, r in enumerate(row):
                    if r:
                        acc[i] += c * r
        return cls(N, acc)

    # -- arithmetic -----------------------------------------------------
    def _check(self, other) -> CycElem:
        if isinstance(other, (int, Fraction)):
            return CycElem.scalar(self.N, other)
        if not isinstance(other, CycElem):
            return NotImplemented
        if other.N != self.N:
            raise ConductorMismatch(f"conductors {self.N} and {other.N}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return CycElem(self.N, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return CycElem(self.N, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return CycElem(self.N, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElem(self.N, [a * other for a in self.coords])
        other = self._check(other)
        if other is NotImplemented:
            return other
        N = self.N
        prod = [Fraction(0)] * N
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        prod[(i + j) % N] += a * b
        return CycElem.from_exponent_counts(N, prod)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElem(self.N, [a / other for a in self.coords])
        return NotImplemented

    def __pow__(self, n: int) -> CycElem:
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = CycElem.scalar(self.N, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycElem.scalar(self.N, other)
        if not isinstance(other, CycElem):
            return NotImplemented
        return self.N == other.N and self.coords == other.coords

    def __hash__(self):
        return hash((self.N, self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral(self) -> bool:
        """Membership in Z[zeta_N] (the power basis is an integral basis)."""
        return all(c.denominator == 1 for c in self.coords)

    def galois(self, c: int) -> CycElem:
        """Image under zeta_N -> zeta_N^c, gcd(c, N) = 1."""
        if gcd(c, self.N) != 1:
            raise ValueError(f"{c} is not a unit mod {self.N}")
        counts = [Fraction(0)] * self.N
        for i, a in enumerate(self.coords):
            counts[i * c % self.N] += a
        return CycElem.from_exponent_counts(self.N, counts)

    def lift(self, N2: int) -> CycElem:
        return lift(self, N2)

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                terms.append(f"{c}*z^{i}" if i else f"{c}")
        return f"CycElem(N={self.N}: {' + '.join(terms) or '0'})"

    def to_json(self) -> dict:
        return {"conductor": self.N, "coords": [str(c) for c in self.coords]}

    @classmethod
    def from_json(cls, d: dict) -> CycElem:
        return cls(int(d["conductor"]), [Fraction(c) for c in d["coords"]])


def cyc(N: int, i: int = 1) -> CycElem:
    """zeta_N^i."""
    return CycElem(N, _power_table(N)[i % N])


def lift(x: CycElem, N2: int) -> CycElem:
    """Rewrite ``x`` with conductor N2 using zeta_N = zeta_N2^(N2/N)."""
    if N2 % x.N:
        raise NotAMultiple(f"{N2} is not a multiple of {x.N}")
    r = N2 // x.N
    counts = [Fraction(0)] * N2
    for i, a in enumerate(x.coords):
        counts[i * r] += a
    return CycElem.from_exponent_counts(N2, counts)


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """Exact solve of rows @ x = rhs; None if inconsistent."""
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(aug[i][-1] != 0 for i in range(r, m)):
        return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][-1]
    return sol


def in_subring(x: CycElem, N0: int) -> Optional[CycElem]:
    """The conductor-N0 form of ``x`` if it lies in Q(zeta_N0), else None."""
    if x.N % N0:
        raise NotAMultiple(f"{N0} does not divide {x.N}")
    basis = [lift(cyc(N0, i), x.N).coords for i in range(euler_phi(N0))]
    rows = [[basis[j][i] for j in range(len(basis))] for i in range(euler_phi(x.N))]
    sol = _solve(rows, list(x.coords))
    if sol is None:
        return None
    return CycElem(N0, sol)
