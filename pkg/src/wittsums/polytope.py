"""Newton polytopes, the cone degree function, weight series and polygons.

Everything is exact: integer points, integer facet functionals and
Fraction-valued degrees.  Hulls are computed by brute force over subsets of
the (few) candidate points, which is adequate for dimension at most three.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Optional, Sequence, Union

from .errors import (
    AlreadyFullDimensional,
    DimensionUnsupported,
    NegativeCoefficient,
    NonPolynomialSeries,
    NotFullDimensional,
    OutsideCone,
)
from .ff import FieldElem, extend_field, poly_gcd, poly_trim
from .witt import WittInput, WittTerm

Vec = tuple[int, ...]


# -- small exact linear algebra ---------------------------------------------


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def rank(vectors: Sequence[Sequence[int]]) -> int:
    rows = [[Fraction(v) for v in r] for r in vectors]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / rows[r][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def affine_rank(points: Sequence[Vec]) -> int:
    if not points:
        return -1
    return rank([_sub(p, points[0]) for p in points[1:]])


def _det(rows: Sequence[Sequence[int]]) -> int:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * _det(minor)
    return total


def _primitive(v: Sequence[int]) -> Vec:
    g = reduce(gcd, (abs(x) for x in v), 0)
    return tuple(x // g for x in v) if g else tuple(v)


def _normal(diffs: Sequence[Vec], n: int) -> Optional[Vec]:
    """Integer vector orthogonal to n-1 difference vectors (None if degenerate)."""
    if n == 2:
        (a, b), = diffs
        v = (-b, a)
    elif n == 3:
        (a1, a2, a3), (b1, b2, b3) = diffs
        v = (a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1)
    else:
        raise DimensionUnsupported(f"dimension {n}")
    if not any(v):
        return None
    return _primitive(v)


# -- Newton data ------------------------------------------------------------


@dataclass(frozen=True)
class Facet:
    normal: Vec  # primitive, outward
    c: int  # Delta lies in <normal, .> <= c; c > 0 iff 0 is not on the facet
    points: frozenset  # candidate points on the facet


@dataclass
class NewtonData:
    n: int
    supports: list  # I_0 .. I_{m-1}
    points: list  # candidate points: scaled supports and the origin
    vertices: list
    facets: list  # all facets
    D: int
    volume_deg: int  # n! Vol(Delta_inf)
    faces: list = field(default_factory=list)  # frozensets of candidate points

    @property
    def outer_facets(self) -> list:
        return [F for F in self.facets if F.c > 0]

    @property
    def cone_facets(self) -> list:
        return [F for F in self.facets if F.c == 0]

    def in_cone(self, u: Sequence) -> bool:
        return all(_dot(F.normal, u) <= 0 for F in self.cone_facets)

    def degree(self, u: Sequence) -> Fraction:
        return degree(self, u)

    def bounding_box(self) -> list[tuple[int, int]]:
        return [(min(v[j] for v in self.vertices), max(v[j] for v in self.vertices)) for j in range(self.n)]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "vertices": [list(v) for v in self.vertices],
            "facets": [{"normal": list(F.normal), "c": F.c} for F in self.facets],
            "D": self.D,
            "volume_deg": self.volume_deg,
        }


def scaled_points(f: WittInput) -> list[Vec]:
    """p^(m-i-1) u for every term, which generate Delta_inf with the origin."""
    p, m = f.p, f.m
    return [tuple(p ** (m - t.level - 1) * x for x in t.u) for t in f.terms]


def _facets(points: list[Vec], n: int) -> list[Facet]:
    if n == 1:
        normals = {(1,), (-1,)}
    else:
        normals = set()
        for combo in itertools.combinations(points, n):
            diffs = [_sub(x, combo[0]) for x in combo[1:]]
            v = _normal(diffs, n)
            if v is not None:
                normals.add(v)
                normals.add(tuple(-x for x in v))
    out = []
    for v in sorted(normals):
        c = max(_dot(v, x) for x in points)
        on = [x for x in points if _dot(v, x) == c]
        if affine_rank(on) == n - 1:
            out.append(Facet(v, c, frozenset(on)))
    return out


def _order_polygon(points: list[Vec], normal: Vec) -> list[Vec]:
    """Cyclic order of the extreme points of a planar point set in R^3."""
    drop = max(range(3), key=lambda j: abs(normal[j]))
    keep = [j for j in range(3) if j != drop]
    proj = {(x[keep[0]], x[keep[1]]): x for x in points}
    pts = sorted(proj)
    if len(pts) <= 2:
        return [proj[x] for x in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for x in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], x) <= 0:
            lower.pop()
        lower.append(x)
    for x in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], x) <= 0:
            upper.pop()
        upper.append(x)
    return [proj[x] for x in lower[:-1] + upper[:-1]]


def _facet_volume(F: Facet, n: int) -> int:
    """n! Vol of the pyramid conv(0, F)."""
    pts = sorted(F.points)
    if n == 1:
        return abs(pts[0][0]) if len(pts) == 1 else 0
    if n == 2:
        ends = _order_polygon_2d(pts)
        return abs(_det([ends[0], ends[-1]]))
    ring = _order_polygon(pts, F.normal)
    total = 0
    for i in range(1, len(ring) - 1):
        total += abs(_det([ring[0], ring[i], ring[i + 1]]))
    return total


def _order_polygon_2d(points: list[Vec]) -> list[Vec]:
    # points on a segment: extremes are the lexicographic min and max
    return [min(points), max(points)]


def _faces(facets: list[Facet]) -> list[frozenset]:
    faces = {F.points for F in facets}
    frontier = set(faces)
    while frontier:
        new = set()
        for a in frontier:
            for b in faces:
                c = a & b
                if c and c not in faces:
                    new.add(c)
        faces |= new
        frontier = new
    return sorted(faces, key=lambda s: (len(s), sorted(s)))


def _sector_gcd(nd_facets: list[Facet], F: Facet, box_points) -> int:
    g = 0
    for u in box_points:
        vals = [Fraction(_dot(G.normal, u), G.c) for G in nd_facets]
        top = max(vals)
        if top <= 1 and Fraction(_dot(F.normal, u), F.c) == top:
            g = gcd(g, _dot(F.normal, u))
    return g


def build_delta(f: WittInput) -> NewtonData:
    n = f.n
    if n > 3:
        raise DimensionUnsupported(f"facet enumeration needs n <= 3, got {n}")
    origin = (0,) * n
    pts = sorted(set(scaled_points(f)) | {origin})
    if affine_rank(pts) < n:
        raise NotFullDimensional(f"Delta spans dimension {affine_rank(pts)} < {n}")
    facets = _facets(pts, n)
    vertices = []
    for x in pts:
        normals = [F.normal for F in facets if x in F.points]
        if rank(normals) == n:
            vertices.append(x)
    outer = [F for F in facets if F.c > 0]
    volume = sum(_facet_volume(F, n) for F in outer)
    box = [range(min(v[j] for v in vertices), max(v[j] for v in vertices) + 1) for j in range(n)]
    cone = [F for F in facets if F.c == 0]
    box_points = [u for u in itertools.product(*box) if all(_dot(F.normal, u) <= 0 for F in cone)]
    D = 1
    for F in outer:
        g = _sector_gcd(outer, F, box_points)
        D = lcm(D, F.c // gcd(F.c, g))
    return NewtonData(
        n=n,
        supports=f.supports(),
        points=pts,
        vertices=vertices,
        facets=facets,
        D=D,
        volume_deg=volume,
        faces=_faces(facets),
    )


def degree(nd: NewtonData, u: Sequence) -> Fraction:
    """Least t >= 0 with u in t * Delta_inf."""
    u = [Fraction(x) for x in u]
    if not nd.in_cone(u):
        raise OutsideCone(f"{tuple(u)} is outside the cone of Delta")
    if not any(u):
        return Fraction(0)
    return max([Fraction(0)] + [_dot(F.normal, u) / F.c for F in nd.outer_facets])


# -- weight series ------------------------------------------------------------


@dataclass
class WeightSeries:
    s: tuple[int, ...]
    M: int  # D (q-1)
    counts: dict  # k -> W_s(k), for k <= (n+1) M
    P: list[int]  # coefficients of P_s, lowest first

    def value_at_one(self) -> int:
        return sum(self.P)


def lattice_points(nd: NewtonData, s: Sequence[int], q: int, max_deg: Fraction):
    """Points w = s + (q-1) z of the cone with deg(w) <= max_deg*(q-1).

    Returned as integer vectors w; the actual point of L_s is w/(q-1).
    """
    n = nd.n
    B = max_deg * (q - 1)
    ranges = []
    for j, (lo, hi) in enumerate(nd.bounding_box()):
        a = _ceil(lo * B)
        b = _floor(hi * B)
        first = a + ((s[j] - a) % (q - 1))
        ranges.append(range(first, b + 1, q - 1))
    for w in itertools.product(*ranges):
        if nd.in_cone(w) and degree(nd, w) <= B:
            yield w


def _floor(x) -> int:
    x = Fraction(x)
    return x.numerator // x.denominator


def _ceil(x) -> int:
    return -_floor(-Fraction(x))


def _series_mul(a: list[int], b: list[int], limit: int) -> list[int]:
    out = [0] * (limit + 1)
    for i, x in enumerate(a[: limit + 1]):
        if x:
            for j, y in enumerate(b[: limit + 1 - i]):
                out[i + j] += x * y
    return out


def weight_series(nd: NewtonData, s: Sequence[int], q: int) -> WeightSeries:
    """W_s(k) by enumeration and P_s = (1 - t^M)^n sum_k W_s(k) t^k."""
    n = nd.n
    s = tuple(int(x) for x in s)
    if len(s) != n or any(not 0 <= x <= q - 2 for x in s):
        raise ValueError(f"twist {s} must have {n} entries in [0, {q - 2}]")
    M = nd.D * (q - 1)
    limit = (n + 1) * M
    counts: dict[int, int] = {}
    for w in lattice_points(nd, s, q, Fraction(n + 1)):
        k = degree(nd, w) * nd.D
        if k.denominator != 1:
            raise NonPolynomialSeries(f"degree of {w} is not in (1/M)Z")
        counts[int(k)] = counts.get(int(k), 0) + 1
    series = [counts.get(k, 0) for k in range(limit + 1)]
    factor = [1]
    one_minus = [1] + [0] * (M - 1) + [-1]
    for _ in range(n):
        factor = _series_mul(factor, one_minus, limit)
    P = _series_mul(factor, series, limit)
    if any(P[n * M + 1:]):
        raise NonPolynomialSeries(f"P_s for s={s} has terms beyond degree {n * M}")
    if any(c < 0 for c in P):
        raise NonPolynomialSeries(f"P_s for s={s} has a negative coefficient")
    P = P[: n * M + 1]
    while len(P) > 1 and P[-1] == 0:
        P.pop()
    return WeightSeries(s=s, M=M, counts=counts, P=P)


# -- polygons ---------------------------------------------------------------

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class RatPolygon:
    vertices: tuple[Point, ...]

    @classmethod
    def of(cls, pts) -> RatPolygon:
        return cls(tuple((Fraction(x), Fraction(y)) for x, y in pts))

    @property
    def end(self) -> Point:
        return self.vertices[-1]

    def slopes(self) -> list[Fraction]:
        v = self.vertices
        return [(b[1] - a[1]) / (b[0] - a[0]) for a, b in zip(v, v[1:])]

    def value_at(self, x) -> Fraction:
        x = Fraction(x)
        v = self.vertices
        for a, b in zip(v, v[1:]):
            if a[0] <= x <= b[0]:
                return a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
        if len(v) == 1 and x == v[0][0]:
            return v[0][1]
        raise ValueError(f"abscissa {x} outside the polygon")

    def is_lower_convex(self) -> bool:
        s = self.slopes()
        return self.vertices[0] == (0, 0) and all(a < b for a, b in zip(s, s[1:])) and all(
            a[0] < b[0] for a, b in zip(self.vertices, self.vertices[1:]))

    def to_json(self) -> list:
        return [[str(x), str(y)] for x, y in self.vertices]

    @classmethod
    def from_json(cls, data) -> RatPolygon:
        return cls.of((Fraction(x), Fraction(y)) for x, y in data)

    def __str__(self):
        return ",".join(f"({x},{y})" for x, y in self.vertices)


def lower_hull(points) -> RatPolygon:
    """Lower convex hull from the leftmost point to the rightmost one."""
    pts = sorted({(Fraction(x), Fraction(y)) for x, y in points})
    best: dict[Fraction, Fraction] = {}
    for x, y in pts:
        if x not in best or y < best[x]:
            best[x] = y
    pts = sorted(best.items())
    hull: list[Point] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return RatPolygon(tuple(hull))


def hodge_polygon(coeffs: Sequence, M: int) -> RatPolygon:
    """Segments of slope i/M and horizontal length coeffs[i]."""
    coeffs = [Fraction(c) for c in coeffs]
    if any(c < 0 for c in coeffs):
        raise NegativeCoefficient("Hodge polygons need nonnegative coefficients")
    pts: list[Point] = [(Fraction(0), Fraction(0))]
    x = y = Fraction(0)
    for i, c in enumerate(coeffs):
        if c:
            x += c
            y += c * Fraction(i, M)
            pts.append((x, y))
    # distinct i give distinct slopes, so no collinear vertices arise
    return RatPolygon(tuple(pts))


@dataclass(frozen=True)
class PolygonComparison:
    above: bool
    endpoints_equal: bool
    violations: tuple  # upper vertices strictly below the lower polygon
    equal: bool

    @property
    def ok(self) -> bool:
        return self.above and self.endpoints_equal

    @property
    def verdict(self) -> str:
        if self.ok:
            return "above_with_equal_endpoints"
        if not self.above:
            return "violation"
        return "endpoint_mismatch"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "equal": self.equal,
            "violations": [[str(x), str(y)] for x, y in self.violations],
        }


def polygon_above(upper: RatPolygon, lower: RatPolygon) -> PolygonComparison:
    """Compare vertexwise; convexity of the lower polygon makes this enough."""
    violations = []
    x_end = lower.end[0]
    for x, y in upper.vertices:
        if x > x_end:
            continue
        if y < lower.value_at(x):
            violations.append((x, y))
    endpoints = upper.end == lower.end
    return PolygonComparison(
        above=not violations,
        endpoints_equal=endpoints,
        violations=tuple(violations),
        equal=upper.vertices == lower.vertices,
    )


# -- non-degeneracy -----------------------------------------------------------


@dataclass(frozen=True)
class Nondegenerate:
    kind: str = "nondegenerate"

    def to_json(self):
        return {"verdict": self.kind}


@dataclass(frozen=True)
class Degenerate:
    face: tuple
    witness: object
    kind: str = "degenerate"

    def to_json(self):
        return {"verdict": self.kind, "face": [list(v) for v in self.face], "witness": str(self.witness)}


@dataclass(frozen=True)
class UnknownUpTo:
    R: int
    faces: tuple
    kind: str = "unknown"

    def to_json(self):
        return {"verdict": self.kind, "bound": self.R, "faces": [[list(v) for v in F] for F in self.faces]}


NondegVerdict = Union[Nondegenerate, Degenerate, UnknownUpTo]


def face_polynomials(f: WittInput, face: frozenset) -> list[dict]:
    """For each j, {exponent: coefficient} of the j-th face derivative."""
    p, m, n = f.p, f.m, f.n
    polys: list[dict] = [dict() for _ in range(n)]
    zero = f.field.zero
    for t in f.terms:
        e = p ** (m - t.level - 1)
        v = tuple(e * x for x in t.u)
        if v not in face:
            continue
        c = t.coeff**e
        for j in range(n):
            if t.u[j] % p:
                # the integer factor u_j acts through its image in F_p
                term = f.field.from_int(t.u[j]) * c
                polys[j][v] = polys[j].get(v, zero) + term
    return [{v: c for v, c in P.items() if not c.is_zero()} for P in polys]


def _edge_gcd(polys: list[dict], face: frozenset) -> list:
    pts = sorted(face)
    base = pts[0]
    w = _primitive(_sub(pts[-1], base))
    g = None
    for P in polys:
        coeffs: dict[int, FieldElem] = {}
        for v, c in P.items():
            d = _sub(v, base)
            j = next(i for i in range(len(w)) if w[i])
            coeffs[d[j] // w[j]] = c
        if not coeffs:
            continue
        lo = min(coeffs)
        ctx = next(iter(coeffs.values())).ctx
        uni = [ctx.zero] * (max(coeffs) - lo + 1)
        for t, c in coeffs.items():
            uni[t - lo] = c
        g = uni if g is None else poly_gcd(g, uni)
    return poly_trim(g or [])


def _search_zero(f: WittInput, polys: list[dict], R: int, budget: int):
    n = f.n
    for r in range(1, R + 1):
        ctx = extend_field(f.field, r)
        if (ctx.order) ** n > budget:
            return None, r - 1
        lifted = [{v: ctx.embed(c) for v, c in P.items()} for P in polys]
        units = list(ctx.units())
        for x in itertools.product(units, repeat=n):
            if all(_eval_laurent(P, x, ctx).is_zero() for P in lifted):
                return tuple(x), r
    return None, R


def _eval_laurent(P: dict, x, ctx):
    acc = ctx.zero
    for v, c in P.items():
        term = c
        for xi, vi in zip(x, v):
            term = term * xi**vi
        acc = acc + term
    return acc


def nondegeneracy_check(f: WittInput, nd: NewtonData, R: int = 2, budget: int = 200_000) -> NondegVerdict:
    origin = (0,) * f.n
    unknown = []
    searched = R
    for face in nd.faces:
        if origin in face:
            continue
        polys = face_polynomials(f, face)
        if any(len(P) == 1 for P in polys):
            continue  # a nonzero monomial has no torus zero
        if all(not P for P in polys):
            return Degenerate(tuple(sorted(face)), (1,) * f.n)
        dim = affine_rank(sorted(face))
        if dim == 1:
            g = _edge_gcd(polys, face)
            while g and g[0].is_zero():
                g = g[1:]
            if len(g) > 1:
                return Degenerate(tuple(sorted(face)), f"common factor of degree {len(g) - 1}")
            continue
        witness, reached = _search_zero(f, polys, R, budget)
        if witness is not None:
            return Degenerate(tuple(sorted(face)), witness)
        searched = min(searched, reached)
        unknown.append(tuple(sorted(face)))
    if unknown:
        return UnknownUpTo(searched, tuple(unknown))
    return Nondegenerate()


# -- unimodular change of variables ----------------------------------------


@dataclass(frozen=True)
class Reduction:
    f: WittInput  # in l variables
    s: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]  # unimodular A with x^u = y^(A u)
    l: int
    residual_twist: tuple[int, ...]  # A s mod (q-1) in the dropped coordinates

    @property
    def residual_trivial(self) -> bool:
        return not any(self.residual_twist)

    def scalar(self, k: int, q: int) -> int:
        """S_k(f, s) = scalar(k) * S_k(f', s')."""
        if not self.residual_trivial:
            return 0
        d = len(self.residual_twist)
        return (-1) ** d * (q**k - 1) ** d


def _row_echelon(U: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Unimodular A and H = A U in integer row echelon form."""
    n = len(U)
    ncols = len(U[0]) if U else 0
    H = [list(r) for r in U]
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    r = 0
    for c in range(ncols):
        if r == n:
            break
        while True:
            nz = [i for i in range(r, n) if H[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[piv] = H[piv], H[r]
            A[r], A[piv] = A[piv], A[r]
            done = True
            for i in range(r + 1, n):
                if H[i][c]:
                    qt = H[i][c] // H[r][c]
                    H[i] = [a - qt * b for a, b in zip(H[i], H[r])]
                    A[i] = [a - qt * b for a, b in zip(A[i], A[r])]
                    if H[i][c]:
                        done = False
            if done:
                r += 1
                break
    return A, H


def unimodular_reduce(f: WittInput, s: Sequence[int]) -> Reduction:
    n = f.n
    U = [[t.u[j] for t in f.terms] for j in range(n)]
    l = rank([list(t.u) for t in f.terms])
    if l == n:
        raise AlreadyFullDimensional("support already spans the full lattice")
    A, H = _row_echelon(U)
    assert all(not any(H[i]) for i in range(l, n))
    assert abs(_det(A)) == 1
    q = f.q
    s2 = [sum(A[i][j] * s[j] for j in range(n)) % (q - 1) for i in range(n)]
    terms = tuple(
        WittTerm(t.level, tuple(H[i][col] for i in range(l)), t.coeff) for col, t in enumerate(f.terms)
    )
    f2 = WittInput(f.field, f.m, l, terms)
    return Reduction(
        f=f2,
        s=tuple(s2[:l]),
        matrix=tuple(tuple(r) for r in A),
        l=l,
        residual_twist=tuple(s2[l:]),
    )


__all__ = [
    "Facet",
    "NewtonData",
    "RatPolygon",
    "WeightSeries",
    "PolygonComparison",
    "Nondegenerate",
    "Degenerate",
    "UnknownUpTo",
    "Reduction",
    "build_delta",
    "degree",
    "weight_series",
    "lattice_points",
    "hodge_polygon",
    "lower_hull",
    "polygon_above",
    "face_polynomials",
    "nondegeneracy_check",
    "unimodular_reduce",
]
