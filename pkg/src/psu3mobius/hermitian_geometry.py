"""Projective plane PG(2, q^2), the unitary polarity and the Hermitian curve.

Points and lines are triples of raw field ints, normalised so that the first
nonzero coordinate is 1; with that convention equality is tuple equality.
The working model is the Norm-Trace curve X^q Z + X Z^q = Y^(q+1), whose
Hermitian form matrix is the anti-identity.  The Fermat model
X^(q+1) + Y^(q+1) + Z^(q+1) = 0 (identity form matrix) is kept for
cross-checks, together with an explicit projectivity between the two.
"""

from __future__ import annotations

from collections import defaultdict
from functools import cached_property
from typing import NamedTuple

from .finite_fields import BinaryField, FieldTower, field_tower


class GeometryError(RuntimeError):
    pass


class ProjectivePoint(NamedTuple):
    x: int
    y: int
    z: int


class ProjectiveLine(NamedTuple):
    """Dual coordinates [a, b, c] of the line aX + bY + cZ = 0."""

    a: int
    b: int
    c: int


class Triangle(NamedTuple):
    vertices: tuple          # sorted triple of points
    kind: str                # "self_polar" or "frobenius"


def normalize(F: BinaryField, v) -> tuple:
    for c in v:
        if c:
            inv = F.inv(c)
            return tuple(F.mul(inv, t) for t in v)
    raise GeometryError("the zero vector is not a projective point")


def plane_points(F: BinaryField) -> list[ProjectivePoint]:
    """All q'^2 + q' + 1 normalised points of PG(2, F), in a fixed order."""
    n = F.order
    pts = [ProjectivePoint(1, y, z) for y in range(n) for z in range(n)]
    pts += [ProjectivePoint(0, 1, z) for z in range(n)]
    pts.append(ProjectivePoint(0, 0, 1))
    return pts


def cross(F: BinaryField, u, v) -> tuple:
    m = F.mul
    return (m(u[1], v[2]) ^ m(u[2], v[1]),
            m(u[2], v[0]) ^ m(u[0], v[2]),
            m(u[0], v[1]) ^ m(u[1], v[0]))


def dot(F: BinaryField, u, v) -> int:
    m = F.mul
    return m(u[0], v[0]) ^ m(u[1], v[1]) ^ m(u[2], v[2])


def det3(F: BinaryField, a, b, c) -> int:
    return dot(F, a, cross(F, b, c))


def join(F: BinaryField, P, Q) -> ProjectiveLine:
    return ProjectiveLine(*normalize(F, cross(F, P, Q)))


def meet(F: BinaryField, l1, l2) -> ProjectivePoint:
    return ProjectivePoint(*normalize(F, cross(F, l1, l2)))


class Polarity:
    """Unitary polarity attached to a Hermitian form matrix over GF(q^2)."""

    def __init__(self, tower: FieldTower, matrix):
        self.tower = tower
        self.F = tower.F2
        self.matrix = tuple(tuple(r) for r in matrix)
        conj = tower.conj
        for i in range(3):
            for j in range(3):
                if self.matrix[i][j] != conj(self.matrix[j][i]):
                    raise GeometryError("form matrix is not Hermitian")
        if det3(self.F, *self.matrix) == 0:
            raise GeometryError("form matrix is degenerate")
        self._inv = _inverse3(self.F, self.matrix)

    def form(self, u, v) -> int:
        """h(u, v) = u^T A v^q."""
        F, A, conj = self.F, self.matrix, self.tower.conj
        cv = [conj(t) for t in v]
        s = 0
        for i in range(3):
            if u[i]:
                row = A[i]
                for j in range(3):
                    s ^= F.mul(u[i], F.mul(row[j], cv[j]))
        return s

    def is_isotropic(self, P) -> bool:
        return self.form(P, P) == 0

    def polar(self, P) -> ProjectiveLine:
        F, A, conj = self.F, self.matrix, self.tower.conj
        cp = [conj(t) for t in P]
        l = [0, 0, 0]
        for i in range(3):
            for j in range(3):
                l[i] ^= F.mul(A[i][j], cp[j])
        return ProjectiveLine(*normalize(F, l))

    def pole(self, l) -> ProjectivePoint:
        F, B, conj = self.F, self._inv, self.tower.conj
        v = [0, 0, 0]
        for i in range(3):
            for j in range(3):
                v[i] ^= F.mul(B[i][j], l[j])
        return ProjectivePoint(*normalize(F, [conj(t) for t in v]))


def _inverse3(F: BinaryField, M):
    cof = [cross(F, M[1], M[2]), cross(F, M[2], M[0]), cross(F, M[0], M[1])]
    d = dot(F, M[0], cof[0])
    dinv = F.inv(d)
    # inverse = adj / det, adj[j][i] = cof[i][j]
    return tuple(tuple(F.mul(dinv, cof[j][i]) for j in range(3)) for i in range(3))


NORM_TRACE_FORM = ((0, 0, 1), (0, 1, 0), (1, 0, 0))
FERMAT_FORM = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class HermitianPlane:
    """PG(2, q^2) with the Norm-Trace Hermitian curve; q = 2^(2^n)."""

    def __init__(self, n: int):
        self.n = n
        self.tower = field_tower(n)
        self.q = self.tower.q
        self.F = self.tower.F2
        self.polarity = Polarity(self.tower, NORM_TRACE_FORM)
        self.fermat_polarity = Polarity(self.tower, FERMAT_FORM)

    def __repr__(self):
        return f"HermitianPlane(q={self.q})"

    @cached_property
    def points(self) -> list[ProjectivePoint]:
        """All points, isotropic (curve) points first, each block in plane order."""
        pts = plane_points(self.F)
        iso = [P for P in pts if self.polarity.is_isotropic(P)]
        rest = [P for P in pts if not self.polarity.is_isotropic(P)]
        return iso + rest

    @cached_property
    def point_index(self) -> dict:
        return {P: i for i, P in enumerate(self.points)}

    @cached_property
    def n_curve(self) -> int:
        return self.q ** 3 + 1

    @property
    def curve(self) -> list[ProjectivePoint]:
        return self.points[:self.n_curve]

    @property
    def noncurve(self) -> list[ProjectivePoint]:
        return self.points[self.n_curve:]

    @cached_property
    def lines(self) -> list[ProjectiveLine]:
        return [ProjectiveLine(*P) for P in plane_points(self.F)]

    def on_line(self, P, l) -> bool:
        return dot(self.F, P, l) == 0

    def polar(self, P) -> ProjectiveLine:
        return self.polarity.polar(P)

    def pole(self, l) -> ProjectivePoint:
        return self.polarity.pole(l)

    @cached_property
    def line_points(self) -> dict:
        """line -> list of indices of the points on it (small q only)."""
        F = self.F
        return {l: [i for i, P in enumerate(self.points) if dot(F, P, l) == 0]
                for l in self.lines}

    def curve_points(self, model: str = "norm_trace", level: int = 2) -> set:
        """Points of the Hermitian curve over GF(q^level), level in {2, 6}."""
        if level == 2:
            if model == "norm_trace":
                return set(self.curve)
            if model == "fermat":
                return {P for P in plane_points(self.F)
                        if self.fermat_polarity.is_isotropic(P)}
            raise ValueError(f"unknown model {model!r}")
        if level == 6:
            return set(_curve_points_ext(self.tower, model))
        raise ValueError("level must be 2 or 6")

    @cached_property
    def model_map(self):
        """Matrix M with M * (Fermat point) a Norm-Trace point.

        X = x + z, Y = y, Z = g x + g^q z where g has trace 1.
        """
        T = self.tower
        g = next(a for a in range(1, self.F.order) if T.trace(a) == 1)
        return ((1, 0, 1), (0, 1, 0), (g, 0, T.conj(g)))

    def fermat_to_norm_trace(self, P) -> ProjectivePoint:
        return ProjectivePoint(*normalize(self.F, apply_matrix(self.F, self.model_map, P)))

    def classify_line(self, l) -> str:
        k = sum(1 for i in self.line_points[l] if i < self.n_curve)
        if k == 1:
            return "tangent"
        if k == self.q + 1:
            return "chord"
        raise GeometryError(f"line {l} meets the curve in {k} points")

    def pole_polar(self, x):
        if isinstance(x, ProjectiveLine):
            return self.pole(x)
        return self.polar(ProjectivePoint(*x))

    @cached_property
    def self_polar_triangles(self) -> list[Triangle]:
        seen = set()
        F = self.F
        for P in self.noncurve:
            lP = self.polar(P)
            for j in self.line_points[lP]:
                Q = self.points[j]
                if j < self.n_curve:
                    continue
                R = meet(F, lP, self.polar(Q))
                if self.polarity.is_isotropic(R):
                    continue
                key = tuple(sorted((P, Q, R)))
                seen.add(key)
        return [Triangle(v, "self_polar") for v in sorted(seen)]

    @cached_property
    def frobenius_triangles(self) -> list[Triangle]:
        return [Triangle(v, "frobenius") for v in frobenius_triangles(self.tower)]

    def enumerate_triangles(self, kind: str) -> list[Triangle]:
        if kind == "self_polar":
            return self.self_polar_triangles
        if kind == "frobenius":
            return self.frobenius_triangles
        raise ValueError(f"unknown triangle kind {kind!r}")

    def is_self_polar(self, tri) -> bool:
        P, Q, R = tri
        F = self.F
        return all(self.polar(A) == join(F, B, C)
                   for A, B, C in ((P, Q, R), (Q, R, P), (R, P, Q)))


def apply_matrix(F: BinaryField, M, v) -> tuple:
    m = F.mul
    return tuple(m(r[0], v[0]) ^ m(r[1], v[1]) ^ m(r[2], v[2]) for r in M)


def _curve_points_ext(tower: FieldTower, model: str) -> list[ProjectivePoint]:
    """Curve points over GF(q^6) by bucketing one side of the equation."""
    F6, q = tower.F6, tower.q
    n = F6.order
    pts = []
    if model == "norm_trace":
        # affine z = 1: x^q + x = y^(q+1); at infinity only (1, 0, 0)
        buckets = defaultdict(list)
        for x in range(n):
            buckets[F6.pow(x, q) ^ x].append(x)
        for y in range(n):
            for x in buckets.get(F6.pow(y, q + 1), ()):
                pts.append(ProjectivePoint(*normalize(F6, (x, y, 1))))
        pts.append(ProjectivePoint(1, 0, 0))
    elif model == "fermat":
        buckets = defaultdict(list)
        for x in range(n):
            buckets[F6.pow(x, q + 1)].append(x)
        # (x, y, 1) with N(x) + N(y) = 1, then z = 0: (x, 1, 0) with N(x) = 1
        for c, xs in buckets.items():
            for y in buckets.get(c ^ 1, ()):
                for x in xs:
                    pts.append(ProjectivePoint(*normalize(F6, (x, y, 1))))
        for x in buckets[1]:
            pts.append(ProjectivePoint(*normalize(F6, (x, 1, 0))))
    else:
        raise ValueError(f"unknown model {model!r}")
    return sorted(set(pts))


def count_curve_points_ext(tower: FieldTower) -> int:
    """|H_q(GF(q^6))| for the Norm-Trace model without listing the points.

    Vectorised over GF(q^6); works without log tables, so it covers q = 16
    where GF(q^6) = GF(2^24).
    """
    import numpy as np

    F6, q = tower.F6, tower.q
    d, mod = F6.degree, F6.modulus
    y = np.arange(F6.order, dtype=np.uint32)

    def vmul(a, b):
        r = np.zeros_like(a)
        aa = a.copy()
        for i in range(d):
            bit = (b >> np.uint32(i)) & np.uint32(1)
            r ^= aa * bit
            aa <<= np.uint32(1)
            over = (aa >> np.uint32(d)) & np.uint32(1)
            aa ^= over * np.uint32(mod)
        return r

    # x -> x^q is GF(2)-linear: apply it byte by byte through small tables
    yq = np.zeros_like(y)
    for k in range(0, d, 8):
        tab = np.array([F6.pow(b << k, q) for b in range(min(256, 1 << (d - k)))], dtype=np.uint32)
        yq ^= tab[(y >> np.uint32(k)) & np.uint32(len(tab) - 1)]
    nrm = vmul(yq, y)
    # image of x -> x^q + x is a GF(2)-subspace; test membership by parity checks
    basis = [F6.pow(1 << i, q) ^ (1 << i) for i in range(d)]
    checks = _annihilator(basis, d)
    inside = np.ones(F6.order, dtype=bool)
    for h in checks:
        v = nrm & np.uint32(h)
        if hasattr(np, "bitwise_count"):
            par = np.bitwise_count(v) & 1
        else:
            par = np.zeros_like(v)
            for i in range(d):
                par ^= (v >> np.uint32(i)) & np.uint32(1)
        inside &= par == 0
    kernel = F6.order // (1 << _rank(basis))
    return int(inside.sum()) * kernel + 1


def _rank(vectors) -> int:
    rows = []
    for v in vectors:
        for r in rows:
            v = min(v, v ^ r)
        if v:
            rows.append(v)
    return len(rows)


def _annihilator(vectors, d: int) -> list[int]:
    """Basis of {h : <h, v> = 0 for all v} over GF(2)."""
    return _nullspace(vectors, d)


def _nullspace(rows, d: int) -> list[int]:
    # Gaussian elimination to reduced echelon form
    piv = {}
    for v in rows:
        for p, r in piv.items():
            if (v >> p) & 1:
                v ^= r
        if not v:
            continue
        p = v.bit_length() - 1
        for k in list(piv):
            if (piv[k] >> p) & 1:
                piv[k] ^= v
        piv[p] = v
    free = [i for i in range(d) if i not in piv]
    out = []
    for f in free:
        h = 1 << f
        for p, r in piv.items():
            if (r >> f) & 1:
                h |= 1 << p
        out.append(h)
    return out


def frobenius_triangles(tower: FieldTower) -> list[tuple]:
    """Orbits {P, P^(q^2), P^(q^4)} of GF(q^6)-points off GF(q^2)."""
    F6 = tower.F6
    k = 2 * tower.e
    pts = _curve_points_ext(tower, "norm_trace")
    off = [P for P in pts if not all(tower.in_subfield2(c) for c in P)]
    offset = set(off)
    seen = set()
    out = []
    for P in off:
        if P in seen:
            continue
        P1 = ProjectivePoint(*(F6.frobenius(c, k) for c in P))
        P2 = ProjectivePoint(*(F6.frobenius(c, k) for c in P1))
        orbit = {P, P1, P2}
        if len(orbit) != 3 or not orbit <= offset:
            raise GeometryError("Frobenius orbit of wrong size")
        if det3(F6, P, P1, P2) == 0:
            raise GeometryError("degenerate Frobenius triangle")
        seen |= orbit
        out.append(tuple(sorted(orbit)))
    return sorted(out)


def self_polar_triangle_count(q: int) -> int:
    return q ** 3 * (q - 1) * (q * q - q + 1) // 6


def frobenius_triangle_count(q: int) -> int:
    return (q ** 6 + q ** 5 - q ** 4 - q ** 3) // 3

