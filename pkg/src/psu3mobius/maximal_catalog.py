"""Maximal subgroups of PSU(3, q) and the family of their intersections.

The four conjugacy families are stabilisers: of a curve point (M1), of a
point off the curve (M2), of a self-polar triangle (M3) and of a triangle
of conjugate GF(q^6)-points of the curve (M4).  At q = 4 every subgroup is
a sorted array of element indices of the :class:`ElementTable`, and the
element/maximal incidence is kept as a packed bit matrix; intersecting a
subgroup with every maximal at once is then a matter of finding the
distinct columns of a small bit block.
"""

from __future__ import annotations

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .bsgs import GroupConstructionError, ResourceError
from .group_engine import PSU3, ElementTable
from .hermitian_geometry import Triangle, frobenius_triangles, join

log = logging.getLogger(__name__)

FINGERPRINT_EXACT_LIMIT = 512


# isomorphism types of intersections of maximal subgroups

@dataclass(frozen=True)
class SubgroupType:
    key: str
    label: str
    order: object          # q -> int
    abelian: bool | None
    exponent: object       # q -> int, or None for non-abelian types
    fixed: object          # q -> curve points fixed by the whole subgroup
    normalizer: object     # q -> |N_G(H)|
    maximal: bool = False

    def signature(self, q: int):
        return (self.order(q), self.abelian,
                self.exponent(q) if self.exponent else None, self.fixed(q))


def _G(q):
    return q ** 3 * (q ** 3 + 1) * (q * q - 1)


SUBGROUP_TYPES = [
    SubgroupType("M1", "S_2⋊C_{q^2-1}", lambda q: q**3 * (q*q - 1), False, None, lambda q: 1,
                 lambda q: q**3 * (q*q - 1), True),
    SubgroupType("M2", "PSL(2,q)×C_{q+1}", lambda q: q * (q*q - 1) * (q + 1), False, None,
                 lambda q: 0, lambda q: q * (q*q - 1) * (q + 1), True),
    SubgroupType("M3", "(C_{q+1}×C_{q+1})⋊Sym(3)", lambda q: 6 * (q + 1)**2, False, None,
                 lambda q: 0, lambda q: 6 * (q + 1)**2, True),
    SubgroupType("M4", "C_{q^2-q+1}⋊C_3", lambda q: 3 * (q*q - q + 1), False, None,
                 lambda q: 0, lambda q: 3 * (q*q - q + 1), True),
    SubgroupType("EqC", "E_q⋊C_{q^2-1}", lambda q: q * (q*q - 1), False, None, lambda q: 1,
                 lambda q: q * (q*q - 1)),
    SubgroupType("CCC2", "(C_{q+1}×C_{q+1})⋊C_2", lambda q: 2 * (q + 1)**2, False, None,
                 lambda q: 0, lambda q: 2 * (q + 1)**2),
    SubgroupType("CC", "C_{q+1}×C_{q+1}", lambda q: (q + 1)**2, True, lambda q: q + 1,
                 lambda q: 0, lambda q: 6 * (q + 1)**2),
    SubgroupType("Cq2m1", "C_{q^2-1}", lambda q: q*q - 1, True, lambda q: q*q - 1, lambda q: 2,
                 lambda q: 2 * (q*q - 1)),
    SubgroupType("C2q1", "C_{2(q+1)}", lambda q: 2 * (q + 1), True, lambda q: 2 * (q + 1),
                 lambda q: 1, lambda q: q * (q + 1)),
    SubgroupType("Cq1", "C_{q+1}=Z(M_2(P))", lambda q: q + 1, True, lambda q: q + 1,
                 lambda q: q + 1, lambda q: q * (q*q - 1) * (q + 1)),
    SubgroupType("Eq", "E_q", lambda q: q, True, lambda q: 2, lambda q: 1,
                 lambda q: q**3 * (q*q - 1)),
    SubgroupType("Sym3", "Sym(3)", lambda q: 6, False, None, lambda q: 0, lambda q: 6 * (q + 1)),
    SubgroupType("C3", "C_3", lambda q: 3, True, lambda q: 3, lambda q: 2, lambda q: 2 * (q*q - 1)),
    SubgroupType("C2", "C_2", lambda q: 2, True, lambda q: 2, lambda q: 1,
                 lambda q: q**3 * (q + 1)),
    SubgroupType("1", "{1}", lambda q: 1, True, lambda q: 1, lambda q: q**3 + 1, _G),
]
TOP_TYPE = SubgroupType("G", "G", _G, False, None, lambda q: 0, _G)
TYPES_BY_KEY = {t.key: t for t in SUBGROUP_TYPES + [TOP_TYPE]}
MAXIMAL_KINDS = ("M1", "M2", "M3", "M4")


# subgroup records

def fingerprint(table: ElementTable, elements) -> str:
    """Canonical hash of a subgroup given by element indices.

    Small subgroups hash their sorted element keys (exact).  Larger ones
    hash an invariant signature; equal signatures are then settled by
    comparing element sets.
    """
    elements = np.asarray(elements)
    h = hashlib.sha256()
    if len(elements) <= FINGERPRINT_EXACT_LIMIT:
        keys = np.sort(table._keys(table.cperm[elements]))
        h.update(b"E")
        h.update(keys.tobytes())
    else:
        prof = Counter(zip(table.orders[elements].tolist(),
                           table.fixed_curve[elements].tolist()))
        fixed = np.all(table.cperm[elements] == np.arange(table.n_curve), axis=0)
        h.update(b"S")
        h.update(repr((len(elements), sorted(prof.items()),
                       np.nonzero(fixed)[0].tolist())).encode())
    return h.hexdigest()[:24]


@dataclass
class SubgroupRecord:
    elements: np.ndarray
    table: ElementTable = field(repr=False)
    class_id: int | None = None
    type_label: str | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def generators(self) -> list[int]:
        return self.table.generators_of(self.elements)

    @cached_property
    def fingerprint(self) -> str:
        return fingerprint(self.table, self.elements)

    @cached_property
    def mask(self) -> np.ndarray:
        return self.table.mask(self.elements)

    def contains(self, other: "SubgroupRecord") -> bool:
        return bool(self.mask[other.elements].all())

    def __eq__(self, other):
        return (isinstance(other, SubgroupRecord) and self.order == other.order
                and np.array_equal(self.elements, other.elements))

    def __hash__(self):
        return hash(self.fingerprint)


def subgroup_signature(table: ElementTable, elements):
    """(order, abelian?, exponent if abelian, curve points fixed by all)."""
    elements = np.asarray(elements)
    abelian = table.is_abelian(elements)
    exponent = table.exponent(elements) if abelian else None
    fixed = int(np.all(table.cperm[elements] == np.arange(table.n_curve), axis=0).sum())
    return (len(elements), abelian, exponent, fixed)


def label_for(signature, q: int, normalizer_order: int | None = None) -> str | None:
    hits = [t for t in SUBGROUP_TYPES if t.signature(q) == signature]
    if len(hits) > 1 and normalizer_order is not None:
        hits = [t for t in hits if t.normalizer(q) == normalizer_order]
    return hits[0].key if len(hits) == 1 else None


@dataclass
class MaximalFamily:
    kind: str
    anchor: object
    subgroup: SubgroupRecord


# the catalogue

class MaximalCatalog:
    """All 2289 maximal subgroups at q = 4 plus their element incidence."""

    def __init__(self, group: PSU3):
        self.group = group
        self.table = group.elements
        self.plane = group.plane
        self.q = group.q
        self.families: list[MaximalFamily] = []
        self._build()

    # construction

    def _build(self):
        T, plane, q = self.table, self.plane, self.q
        nc = plane.n_curve
        cols: list[np.ndarray] = []
        anchors = []
        for i in range(nc):
            cols.append(np.nonzero(T.cperm[:, i] == i)[0])
            anchors.append(("M1", plane.points[i]))
        for j in range(nc, len(plane.points)):
            cols.append(np.nonzero(T.perm[:, j] == j)[0])
            anchors.append(("M2", plane.points[j]))
        idx = plane.point_index
        self.self_polar = [tri for tri in plane.self_polar_triangles]
        self.self_polar_idx = np.array([[idx[v] for v in tri.vertices] for tri in self.self_polar])
        for tri, vs in zip(self.self_polar, self.self_polar_idx):
            img = np.sort(T.perm[:, vs].astype(np.int64), axis=1)
            cols.append(np.nonzero(np.all(img == np.sort(vs), axis=1))[0])
            anchors.append(("M3", tri))
        for tri, members in self._frobenius_stabilizers():
            cols.append(members)
            anchors.append(("M4", tri))
        expected = {k: TYPES_BY_KEY[k].order(q) for k in MAXIMAL_KINDS}
        for (kind, anchor), members in zip(anchors, cols):
            if len(members) != expected[kind]:
                raise GroupConstructionError(
                    f"{kind} stabiliser of {anchor} has order {len(members)}, expected {expected[kind]}")
            rec = SubgroupRecord(members.astype(np.int32), T, type_label=kind)
            self.families.append(MaximalFamily(kind, anchor, rec))
        self.n_max = len(self.families)
        self.incidence = np.zeros((T.size, (self.n_max + 7) // 8), dtype=np.uint8)
        for j, fam in enumerate(self.families):
            self.incidence[fam.subgroup.elements, j >> 3] |= np.uint8(128 >> (j & 7))
        log.info("built %d maximal subgroups", self.n_max)

    @cached_property
    def _ext(self):
        """Matrices of all elements re-read over GF(q^6), plus the Frobenius triangles."""
        tower = self.group.tower
        emb = np.array([tower.embed(x) for x in range(tower.F2.order)], dtype=np.int64)
        mats = emb[self.table.mats]
        tris = frobenius_triangles(tower)
        return mats, tris

    def _ext_keys(self, mats, pts):
        """Projective keys of M v for matrices (k,3,3) and points (m,3): shape (k,m)."""
        F6 = self.group.tower.F6
        k, m = len(mats), len(pts)
        out = np.zeros((k, m, 3), dtype=np.int64)
        for i in range(3):
            acc = np.zeros((k, m), dtype=np.int64)
            for j in range(3):
                acc ^= F6.vmul(np.broadcast_to(mats[:, i, j][:, None], (k, m)),
                               np.broadcast_to(pts[None, :, j], (k, m)))
            out[..., i] = acc
        lead = np.where(out[..., 0] != 0, out[..., 0], np.where(out[..., 1] != 0, out[..., 1], out[..., 2]))
        inv = F6.vinv(lead)
        for i in range(3):
            out[..., i] = F6.vmul(out[..., i], inv)
        bits = F6.degree
        return (out[..., 0] << (2 * bits)) | (out[..., 1] << bits) | out[..., 2]

    def _point_key(self, P):
        b = self.group.tower.F6.degree
        return (P[0] << (2 * b)) | (P[1] << b) | P[2]

    def _frobenius_stabilizers(self):
        mats, tris = self._ext
        T0 = tris[0]
        pts = np.array(T0, dtype=np.int64)
        keys = np.sort(self._ext_keys(mats, pts), axis=1)
        tri_key = {tuple(sorted(self._point_key(P) for P in tri)): tri for tri in tris}
        imgs, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.ravel()
        if len(imgs) != len(tris) or any(tuple(r) not in tri_key for r in imgs.tolist()):
            raise GroupConstructionError("G is not transitive on the Frobenius triangles")
        base = tuple(sorted(self._point_key(P) for P in T0))
        stab = np.nonzero(np.all(keys == np.array(base), axis=1))[0]
        out = {}
        for r, (row, u) in enumerate(zip(imgs.tolist(), first)):
            members = np.unique(self.table.conj(stab, int(u)))
            out[tri_key[tuple(row)]] = members
        return [(Triangle(tri, "frobenius"), out[tri]) for tri in tris]

    # queries

    def of_kind(self, kind: str) -> list[MaximalFamily]:
        return [f for f in self.families if f.kind == kind]

    def family_sizes(self) -> dict:
        return dict(Counter(f.kind for f in self.families))

    def maxset(self, elements) -> np.ndarray:
        """Packed bit row of the maximals containing the given elements."""
        return np.bitwise_and.reduce(self.incidence[np.asarray(elements)], axis=0)

    def index_of(self, kind: str, anchor) -> int:
        for j, f in enumerate(self.families):
            if f.kind == kind and (f.anchor == anchor or getattr(f.anchor, "vertices", None) == anchor):
                return j
        raise KeyError((kind, anchor))

    def intersect(self, *indices) -> np.ndarray:
        rows = np.unpackbits(self.incidence, axis=1, count=self.n_max)[:, list(indices)]
        return np.nonzero(rows.all(axis=1))[0].astype(np.int32)

    # triangle censuses

    def self_polar_fixed(self, elements) -> np.ndarray:
        """Indices of self-polar triangles stabilised (setwise) by all given elements."""
        vs = self.self_polar_idx
        ok = np.ones(len(vs), dtype=bool)
        target = np.sort(vs, axis=1)
        for g in np.asarray(elements):
            img = np.sort(self.table.perm[g][vs].astype(np.int64), axis=1)
            ok &= np.all(img == target, axis=1)
        return np.nonzero(ok)[0]

    def frobenius_fixed(self, elements) -> np.ndarray:
        mats, tris = self._ext
        pts = np.array([P for tri in tris for P in tri], dtype=np.int64)
        base = np.sort(np.array([self._point_key(P) for P in pts]).reshape(-1, 3), axis=1)
        ok = np.ones(len(tris), dtype=bool)
        for g in np.asarray(elements):
            keys = np.sort(self._ext_keys(mats[[g]], pts)[0].reshape(-1, 3), axis=1)
            ok &= np.all(keys == base, axis=1)
        return np.nonzero(ok)[0]


def build_maximals(group: PSU3) -> MaximalCatalog:
    return MaximalCatalog(group)


# intersection closure

class ClosurePoset:
    """G, the maximals and all their intersections, ordered by inclusion.

    Node 0 is G; nodes are sorted by decreasing order, then fingerprint.
    ``maxsets`` holds, per node, the packed set of maximals containing it;
    since every proper node is the intersection of the maximals above it,
    K contains H exactly when maxset(K) is a subset of maxset(H).
    """

    def __init__(self, catalog: MaximalCatalog, nodes: list[np.ndarray]):
        self.catalog = catalog
        self.table = catalog.table
        T = self.table
        fps = [fingerprint(T, e) for e in nodes]
        perm = sorted(range(len(nodes)), key=lambda i: (-len(nodes[i]), fps[i], nodes[i].tobytes()))
        self.records = [SubgroupRecord(nodes[i], T) for i in perm]
        for i, r in zip(perm, self.records):
            r.__dict__["fingerprint"] = fps[i]
        self.orders = np.array([r.order for r in self.records], dtype=np.int64)
        self.maxsets = np.array([catalog.maxset(r.elements) if r.order < T.size
                                 else np.zeros(catalog.incidence.shape[1], np.uint8)
                                 for r in self.records])
        self.maxbits = np.unpackbits(self.maxsets, axis=1, count=catalog.n_max).astype(bool)
        self.top = 0
        self._by_key = {r.elements.tobytes(): i for i, r in enumerate(self.records)}

    def __len__(self):
        return len(self.records)

    def find(self, elements) -> int | None:
        return self._by_key.get(np.sort(np.asarray(elements, dtype=np.int32)).tobytes())

    @cached_property
    def downsets_of_maximals(self) -> list[np.ndarray]:
        return [np.nonzero(self.maxbits[:, j])[0] for j in range(self.catalog.n_max)]

    def upset(self, i: int) -> np.ndarray:
        """Nodes strictly containing node i."""
        if i == self.top:
            return np.zeros(0, dtype=np.int64)
        S = self.maxbits[i]
        cols = np.nonzero(S)[0]
        cand = np.unique(np.concatenate([self.downsets_of_maximals[j] for j in cols]))
        inside = ~np.any(self.maxsets[cand] & ~self.maxsets[i], axis=1)
        cand = cand[inside & (cand != i)]
        return np.concatenate([[self.top], cand]).astype(np.int64)

    @cached_property
    def upsets(self) -> list[np.ndarray]:
        return [self.upset(i) for i in range(len(self))]

    def leq(self, i: int, j: int) -> bool:
        """Node i is contained in node j."""
        if j == self.top or i == j:
            return True
        if i == self.top:
            return False
        return not np.any(self.maxsets[j] & ~self.maxsets[i])

    @cached_property
    def hasse_edges(self) -> list[tuple[int, int]]:
        edges = []
        ups = self.upsets
        n = len(self)
        mark = np.zeros(n, dtype=bool)
        for i in range(n):
            up = ups[i]
            if not len(up):
                continue
            mark[:] = False
            for j in up:
                mark[ups[j]] = True
            for j in up:
                if not mark[j]:
                    edges.append((i, int(j)))
        return edges

    # classes and labels

    @cached_property
    def class_of(self) -> np.ndarray:
        """Conjugacy-class id per node: connected components under conjugation by the generators."""
        T = self.table
        n = len(self)
        parent = np.arange(n)

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        gens = [int(g) for g in T.lookup(np.stack(self.table.group.generator_perms).astype(np.int64))]
        for g in gens:
            for i, r in enumerate(self.records):
                img = np.sort(T.conj(r.elements, g))
                j = self._by_key.get(img.astype(np.int32).tobytes())
                if j is None:
                    raise GroupConstructionError("closure family is not closed under conjugation")
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        roots = np.array([find(i) for i in range(n)])
        _, ids = np.unique(roots, return_inverse=True)
        return ids.ravel()

    @cached_property
    def classes(self) -> list[dict]:
        """One entry per class: representative node, size, normaliser order and type label."""
        T, q = self.table, self.catalog.q
        out = []
        cls = self.class_of
        for c in range(cls.max() + 1):
            members = np.nonzero(cls == c)[0]
            rep = int(members[0])
            rec = self.records[rep]
            if rec.order == T.size:
                norm, key = T.size, "G"
            else:
                norm = len(T.normalizer(rec.generators, rec.elements))
                key = label_for(subgroup_signature(T, rec.elements), q, norm)
            out.append(dict(class_id=c, rep=rep, size=len(members), order=rec.order,
                            normalizer_order=norm, type=key))
        for entry in out:
            for m in np.nonzero(cls == entry["class_id"])[0]:
                self.records[m].class_id = entry["class_id"]
                self.records[m].type_label = entry["type"]
        return out

    def class_by_type(self) -> dict:
        return {c["type"]: c for c in self.classes}


def intersection_closure(catalog: MaximalCatalog, budget_nodes: int | None = None) -> ClosurePoset:
    """Close {G} ∪ maximals under intersection by a worklist over distinct column patterns."""
    T = catalog.table
    n_max = catalog.n_max
    seen: dict[bytes, np.ndarray] = {}
    work = []
    for fam in catalog.families:
        e = fam.subgroup.elements
        k = e.tobytes()
        if k not in seen:
            seen[k] = e
            work.append(e)
    trivial = np.array([T.identity], dtype=np.int32)
    seen[trivial.tobytes()] = trivial
    while work:
        H = work.pop()
        bits = np.unpackbits(catalog.incidence[H], axis=1, count=n_max).astype(bool)
        # maximals meeting H only in the identity all give {1}
        meet = bits[H != T.identity].any(axis=0)
        cols = np.packbits(bits[:, meet].T, axis=1)
        pats = np.unique(cols, axis=0)
        for pat in pats:
            sel = np.unpackbits(pat, count=len(H)).astype(bool)
            sub = H[sel]
            k = sub.tobytes()
            if k in seen:
                continue
            seen[k] = sub
            work.append(sub)
            if budget_nodes is not None and len(seen) + 1 > budget_nodes:
                raise ResourceError(
                    f"intersection closure exceeded {budget_nodes} nodes "
                    f"({len(seen)} found, {len(work)} pending)")
    nodes = [T.all.copy()] + list(seen.values())
    return ClosurePoset(catalog, nodes)


# triangle censuses

def _center_and_axis(catalog: MaximalCatalog, involution: int):
    T, plane = catalog.table, catalog.plane
    fixed = np.nonzero(T.cperm[involution] == np.arange(plane.n_curve))[0]
    if len(fixed) != 1:
        raise GroupConstructionError("involution without a unique fixed curve point")
    P = plane.points[int(fixed[0])]
    return P, plane.polar(P)


def triangle_fix_census(catalog: MaximalCatalog, record: SubgroupRecord, type_key: str | None = None) -> dict:
    """Triangles stabilised by H together with the vertex/axis incidence checks."""
    T, plane = catalog.table, catalog.plane
    key = type_key or record.type_label
    if key not in ("C2", "C3", "Sym3"):
        raise ValueError(f"triangle census is defined for C2, C3 and Sym3, not {key!r}")
    els = record.elements[record.elements != T.identity]
    sp = catalog.self_polar_fixed(els)
    fb = catalog.frobenius_fixed(els)
    out = dict(type=key, self_polar=len(sp), frobenius=len(fb), incidences_ok=True)
    pts = plane.points
    if key == "C2":
        P, axis = _center_and_axis(catalog, int(els[0]))
        on_axis = []
        ok = True
        for t in sp:
            vs = [pts[v] for v in catalog.self_polar_idx[t]]
            hits = [i for i, V in enumerate(vs) if plane.on_line(V, axis)]
            if len(hits) != 1:
                ok = False
                continue
            A = vs[hits[0]]
            B, C = [V for i, V in enumerate(vs) if i != hits[0]]
            ok &= plane.on_line(P, join(plane.F, B, C))
            on_axis.append(A)
        per_point = Counter(on_axis)
        out["axis_vertices"] = len(per_point)
        out["triangles_per_axis_vertex"] = sorted(set(per_point.values()))
        out["incidences_ok"] = bool(ok and P not in per_point)
    elif key == "Sym3":
        invs = [int(g) for g in els if T.orders[g] == 2]
        axes = [_center_and_axis(catalog, g)[1] for g in invs]
        ok = len(invs) == 3
        for t in sp:
            vs = [pts[v] for v in catalog.self_polar_idx[t]]
            hit = []
            for ax in axes:
                h = [i for i, V in enumerate(vs) if plane.on_line(V, ax)]
                ok &= len(h) == 1
                hit.extend(h)
            ok &= sorted(hit) == [0, 1, 2]
        out["incidences_ok"] = bool(ok)
    return out


def explicit_intersection(catalog: MaximalCatalog, a: int, b: int) -> dict:
    """Order and label of the intersection of two maximals given by index."""
    els = catalog.intersect(a, b)
    T = catalog.table
    sig = subgroup_signature(T, els)
    return dict(order=len(els), type=label_for(sig, catalog.q), signature=sig)


def tangent_chord_pair(catalog: MaximalCatalog) -> tuple[int, int]:
    """Indices (M1(P), M2(Q)) with Q a non-curve point on the tangent at P."""
    plane = catalog.plane
    P = plane.points[0]
    lP = plane.polar(P)
    j = next(j for j in range(plane.n_curve, len(plane.points)) if plane.on_line(plane.points[j], lP))
    return 0, j
