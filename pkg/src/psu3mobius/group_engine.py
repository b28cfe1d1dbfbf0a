"""PSU(3, q) = PGU(3, q) acting on the Hermitian curve, q = 2^(2^n).

The group is generated by unitary matrices for the Norm-Trace form
(an upper unitriangular transvection, a diagonal torus element and the
anti-identity involution), turned into permutations of the q^3 + 1 curve
points and checked against |G| = q^3 (q^3 + 1) (q^2 - 1) by Schreier-Sims.

For q = 4 the whole group is small enough to list: :class:`ElementTable`
holds every element as a permutation of all 273 points of PG(2, 16)
(curve points first) together with its normalised matrix, and offers
vectorised multiplication, conjugation and subgroup closure on element
indices.  Everything lattice-shaped in the package runs on those indices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from math import gcd

import numpy as np

from .bsgs import GroupConstructionError, PermGroup, perm_inv
from .hermitian_geometry import HermitianPlane, ProjectivePoint, normalize

log = logging.getLogger(__name__)

ELEMENT_TABLE_MAX_ORDER = 100_000
KEY_SEED = 0x5EED_0F_65


def group_order(q: int) -> int:
    return q ** 3 * (q ** 3 + 1) * (q * q - 1)


# matrices over GF(q^2) as tuples of tuples of raw ints

def mat_mul(F, A, B):
    m = F.mul
    return tuple(tuple(m(A[i][0], B[0][j]) ^ m(A[i][1], B[1][j]) ^ m(A[i][2], B[2][j])
                       for j in range(3)) for i in range(3))


def mat_apply(F, M, v):
    m = F.mul
    return tuple(m(r[0], v[0]) ^ m(r[1], v[1]) ^ m(r[2], v[2]) for r in M)


def mat_normalize(F, M):
    flat = [x for r in M for x in r]
    lead = next(x for x in flat if x)
    inv = F.inv(lead)
    return tuple(tuple(F.mul(inv, x) for x in r) for r in M)


def mat_transpose(M):
    return tuple(tuple(M[j][i] for j in range(3)) for i in range(3))


class PSU3:
    """Generators and the degree-(q^3+1) permutation group for PSU(3, q)."""

    def __init__(self, n: int):
        self.n = n
        self.plane = HermitianPlane(n)
        self.q = self.plane.q
        self.F = self.plane.F
        self.tower = self.plane.tower
        self.order_formula = group_order(self.q)

    @cached_property
    def generator_matrices(self) -> list:
        T, F, q = self.tower, self.F, self.q
        c = next(x for x in range(F.order) if T.trace(x) == 1)   # T(c) = N(1)
        lam = F.generator()
        transvection = ((1, 1, c), (0, 1, 1), (0, 0, 1))
        torus = ((F.pow(lam, q + 1), 0, 0), (0, lam, 0), (0, 0, 1))
        weyl = ((0, 0, 1), (0, 1, 0), (1, 0, 0))
        mats = [transvection, torus, weyl]
        for M in mats:
            if not self.is_unitary(M):
                raise GroupConstructionError(f"generator {M} does not preserve the form")
        return mats

    def is_unitary(self, M) -> bool:
        F, conj = self.F, self.tower.conj
        A = self.plane.polarity.matrix
        Mc = tuple(tuple(conj(x) for x in r) for r in M)
        lhs = mat_mul(F, mat_mul(F, mat_transpose(M), A), Mc)
        # equal to lambda * A for some lambda != 0
        lam = None
        for i in range(3):
            for j in range(3):
                a, b = A[i][j], lhs[i][j]
                if a == 0:
                    if b:
                        return False
                    continue
                r = F.div(b, a)
                if lam is None:
                    lam = r
                elif r != lam:
                    return False
        return bool(lam)

    def point_action(self, M, points, index) -> np.ndarray:
        F = self.F
        return np.array([index[ProjectivePoint(*normalize(F, mat_apply(F, M, P)))]
                         for P in points], dtype=np.int32)

    @cached_property
    def curve_index(self) -> dict:
        return {P: i for i, P in enumerate(self.curve_points)}

    @cached_property
    def curve_points(self) -> list:
        if self.n == 1:
            return self.plane.curve
        return _norm_trace_points(self.tower)

    @cached_property
    def generator_perms(self) -> list:
        return [self.point_action(M, self.curve_points, self.curve_index)
                for M in self.generator_matrices]

    @cached_property
    def perm_group(self) -> PermGroup:
        G = PermGroup(self.generator_perms, len(self.curve_points))
        if G.order() != self.order_formula:
            raise GroupConstructionError(
                f"BSGS order {G.order()} differs from q^3(q^3+1)(q^2-1) = {self.order_formula}")
        return G

    @cached_property
    def elements(self) -> "ElementTable":
        if self.order_formula > ELEMENT_TABLE_MAX_ORDER:
            raise GroupConstructionError("element table only available for q = 4")
        return ElementTable(self)

    def is_two_transitive(self) -> bool:
        G = self.perm_group
        if len(G.orbit(0)) != G.degree:
            return False
        S = G.stabilizer(0)
        return len(S.orbit(1)) == G.degree - 1


def _norm_trace_points(tower) -> list:
    """Curve points over GF(q^2) in plane order, without listing PG(2, q^2)."""
    F = tower.F2
    from collections import defaultdict

    by_trace = defaultdict(list)
    for x in range(F.order):
        by_trace[tower.trace(x)].append(x)
    pts = []
    for y in range(F.order):
        for x in by_trace[tower.norm(y)]:
            pts.append(ProjectivePoint(*normalize(F, (x, y, 1))))
    pts.append(ProjectivePoint(1, 0, 0))
    return sorted(pts)


def build_group(n: int) -> PSU3:
    G = PSU3(n)
    G.perm_group
    return G


# element table (q = 4)

@dataclass(frozen=True)
class ElementType:
    tag: str
    order: int
    fixed_curve_points: int


def classify(order: int, fixed: int, q: int) -> ElementType:
    """Type (A)-(E) of a nontrivial element from its order and curve fixed points."""
    if order == 1:
        raise ValueError("the identity has no type")
    if order == 2:
        tag = "C"
    elif order == 4:
        tag = "D"
    elif order % 2 == 0 and (q + 1) % (order // 2) == 0 and order // 2 > 1:
        tag = "E"
    elif (q + 1) % order == 0 and fixed == q + 1:
        tag = "A"
    elif (q + 1) % order == 0 and fixed == 0:
        tag = "B1"
    elif (q * q - 1) % order == 0 and (q + 1) % order != 0 and fixed == 2:
        tag = "B2"
    elif (q * q - q + 1) % order == 0 and fixed == 0:
        tag = "B3"
    else:
        raise GroupConstructionError(
            f"unclassifiable element: order {order}, {fixed} fixed curve points")
    return ElementType(tag, order, fixed)


class ElementTable:
    """Every element of G (q = 4) with vectorised index arithmetic."""

    def __init__(self, group: PSU3):
        self.group = group
        plane = group.plane
        self.q = group.q
        self.n_curve = plane.n_curve
        self.n_points = len(plane.points)
        self._enumerate(group, plane)
        rng = np.random.default_rng(KEY_SEED)
        self._w = rng.integers(1, 2 ** 62, size=self.n_curve, dtype=np.int64)
        keys = self._keys(self.perm[:, :self.n_curve])
        order = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[order]
        self._sorted_idx = order.astype(np.int32)
        if np.any(np.diff(self._sorted_keys) == 0):
            raise GroupConstructionError("element key collision")
        self.size = len(self.perm)
        self.identity = 0
        self.all = np.arange(self.size, dtype=np.int32)
        self._build_base_index(group.perm_group.base)
        self._inv_cperm = np.argsort(self.cperm, axis=1).astype(self.cperm.dtype)
        self.inv = self.lookup(self._inv_cperm)
        self.orders = self._orders()
        self.fixed_curve = (self.cperm == np.arange(self.n_curve)).sum(axis=1)
        self.fixed_points = (self.perm == np.arange(self.n_points)).sum(axis=1)

    def _enumerate(self, group, plane):
        F = group.F
        index = plane.point_index
        gens = group.generator_matrices
        gperm = [group.point_action(M, plane.points, index) for M in gens]
        ident = np.arange(len(plane.points), dtype=np.int32)
        perms = [ident]
        mats = [((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        seen = {ident[:plane.n_curve].tobytes()}
        frontier = [0]
        while frontier:
            new = []
            for i in frontier:
                for gp, gm in zip(gperm, gens):
                    p = gp[perms[i]]
                    k = p[:plane.n_curve].tobytes()
                    if k in seen:
                        continue
                    seen.add(k)
                    perms.append(p)
                    mats.append(mat_normalize(F, mat_mul(F, gm, mats[i])))
                    new.append(len(perms) - 1)
            frontier = new
        if len(perms) != group.order_formula:
            raise GroupConstructionError(f"enumerated {len(perms)} elements")
        dtype = np.uint16 if len(plane.points) < 65536 else np.int32
        self.perm = np.array(perms, dtype=dtype)
        self.cperm = np.ascontiguousarray(self.perm[:, :plane.n_curve]).astype(np.uint8 if plane.n_curve <= 256 else np.int32)
        self.mats = np.array(mats, dtype=np.int64)

    def _build_base_index(self, base):
        """Direct-address table from images of the base points to element indices."""
        self.base = np.array(base, dtype=np.intp)
        n = self.n_curve
        self._radix = n ** np.arange(len(base))[::-1]
        codes = self.cperm[:, self.base].astype(np.int64) @ self._radix
        index = np.full(n ** len(base), -1, dtype=np.int32)
        index[codes] = self.all
        if np.count_nonzero(index >= 0) != self.size:
            raise GroupConstructionError("base images do not determine elements")
        self._base_index = index

    def _from_base_images(self, imgs) -> np.ndarray:
        """imgs[..., i] = image of base point i."""
        out = self._base_index[imgs.astype(np.int64) @ self._radix]
        if np.any(out < 0):
            raise KeyError("base images of no group element")
        return out

    def _keys(self, rows) -> np.ndarray:
        return rows.astype(np.int64) @ self._w

    def lookup(self, rows) -> np.ndarray:
        """Element indices of curve permutations given as rows."""
        rows = np.asarray(rows)
        keys = self._keys(rows.reshape(-1, self.n_curve))
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, self.size - 1)
        if np.any(self._sorted_keys[pos] != keys):
            raise KeyError("permutation is not a group element")
        return self._sorted_idx[pos].reshape(rows.shape[:-1])

    def _orders(self):
        orders = np.zeros(self.size, dtype=np.int64)
        cur = self.all.copy()
        k = 1
        while np.any(orders == 0):
            hit = (cur == self.identity) & (orders == 0)
            orders[hit] = k
            cur = self.mul(cur, self.all)
            k += 1
        return orders

    # arithmetic on indices

    def mul(self, a, b):
        """Index of a*b (apply b first)."""
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        cp = self.cperm
        imgs = cp[a[..., None], cp[b][..., self.base]]
        return self._from_base_images(imgs)

    def conj(self, h, g):
        """Index of g h g^-1."""
        h, g = np.broadcast_arrays(np.asarray(h), np.asarray(g))
        cp = self.cperm
        x = self._inv_cperm[g][..., self.base]
        imgs = cp[g[..., None], cp[h[..., None], x]]
        return self._from_base_images(imgs)

    def conj_all(self, h: int) -> np.ndarray:
        """Array c with c[g] = g h g^-1 for every element g."""
        return self.conj(int(h), self.all)

    def power(self, a, k: int):
        a = np.asarray(a)
        out = np.zeros_like(a) + self.identity
        base = a.copy()
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def closure(self, gens, limit: int | None = None) -> np.ndarray | None:
        """Sorted indices of <gens>; ``None`` once the size exceeds ``limit``."""
        gens = np.unique(np.asarray(list(gens), dtype=np.int64))
        gens = gens[gens != self.identity]
        member = np.zeros(self.size, dtype=bool)
        member[self.identity] = True
        frontier = np.array([self.identity])
        count = 1
        while len(frontier) and len(gens):
            prod = self.mul(frontier[:, None], gens[None, :]).ravel()
            prod = np.unique(prod)
            prod = prod[~member[prod]]
            member[prod] = True
            count += len(prod)
            if limit is not None and count > limit:
                return None
            frontier = prod
        return np.nonzero(member)[0].astype(np.int32)

    def mask(self, elements) -> np.ndarray:
        m = np.zeros(self.size, dtype=bool)
        m[np.asarray(elements)] = True
        return m

    def normalizer(self, gens, members=None) -> np.ndarray:
        """Indices of N_G(<gens>); ``members`` is the element set of <gens>."""
        if members is None:
            members = self.closure(gens)
        inside = self.mask(members)
        ok = np.ones(self.size, dtype=bool)
        for h in np.asarray(list(gens)).ravel():
            if h == self.identity:
                continue
            ok &= inside[self.conj_all(int(h))]
        return np.nonzero(ok)[0].astype(np.int32)

    def type_of(self, g: int) -> ElementType:
        return classify(int(self.orders[g]), int(self.fixed_curve[g]), self.q)

    @cached_property
    def type_tags(self) -> np.ndarray:
        tags = np.empty(self.size, dtype=object)
        tags[self.identity] = "1"
        cache = {}
        for g in range(self.size):
            if g == self.identity:
                continue
            key = (int(self.orders[g]), int(self.fixed_curve[g]))
            if key not in cache:
                cache[key] = classify(key[0], key[1], self.q).tag
            tags[g] = cache[key]
        return tags

    def as_perm(self, g: int) -> np.ndarray:
        return self.cperm[g].astype(np.int32)

    def index_of_perm(self, p) -> int:
        return int(self.lookup(np.asarray(p)[None, :])[0])

    def generators_of(self, members) -> list[int]:
        """A small generating set for the subgroup with the given element set."""
        members = np.asarray(members)
        order = self.orders[members]
        cand = members[np.argsort(-order, kind="stable")]
        gens: list[int] = []
        inside = np.zeros(self.size, dtype=bool)
        inside[self.identity] = True
        target = len(members)
        for g in cand:
            if inside[g]:
                continue
            gens.append(int(g))
            span = self.closure(gens)
            inside[:] = False
            inside[span] = True
            if len(span) == target:
                break
        return gens

    def random_elements(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return rng.integers(0, self.size, size=k)

    def perm_group_of(self, gens) -> PermGroup:
        return PermGroup([self.as_perm(g) for g in gens], self.n_curve)

    def is_abelian(self, members) -> bool:
        gens = self.generators_of(members)
        for i, a in enumerate(gens):
            for b in gens[i + 1:]:
                if self.mul(a, b) != self.mul(b, a):
                    return False
        return True

    def exponent(self, members) -> int:
        e = 1
        for o in np.unique(self.orders[np.asarray(members)]):
            e = e * int(o) // gcd(e, int(o))
        return e


def normal_closure_is_whole_group(table: ElementTable, g: int) -> bool:
    """Normal closure of <g> in G equals G."""
    group = table.group.perm_group
    N = group.normal_closure([table.as_perm(g)])
    return N.order() == table.size


def element_census(table: ElementTable) -> dict:
    """Counts of elements per (order, fixed curve points), identity excluded."""
    from collections import Counter

    keys = Counter(zip(table.orders[1:].tolist(), table.fixed_curve[1:].tolist()))
    return dict(sorted(keys.items()))


def inverse_perm(p):
    return perm_inv(np.asarray(p, dtype=np.int32))
