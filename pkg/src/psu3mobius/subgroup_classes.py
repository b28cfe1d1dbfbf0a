"""All conjugacy classes of subgroups of PSU(3, 4), and λ on their poset.

Solvable subgroups come from cyclic extension: every solvable U ≠ 1 has
a normal subgroup N of prime index, so U = N<g> with g normalising N and
gN of prime order.  Starting from {1} and always extending the smallest
unprocessed class reaches every solvable class.  Non-solvable subgroups
are found by searching for perfect subgroups generated by an involution
and an element of order 3, then extended the same way.

Conjugacy of two candidate subgroups is settled by an invariant signature
and then by a direct search over all of G using precomputed conjugation
arrays of the generators (cheap at |G| = 62400).
"""

from __future__ import annotations

import heapq
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .bsgs import ResourceError
from .group_engine import PSU3, ElementTable
from .maximal_catalog import fingerprint, label_for, subgroup_signature
from .moebius import PosetTable, mobius_from_top

log = logging.getLogger(__name__)


class CompletenessError(RuntimeError):
    pass


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % p for p in range(2, int(n ** 0.5) + 1))


def _phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


@dataclass
class ClassRecord:
    elements: np.ndarray
    generators: list[int]
    conj: list[np.ndarray] = field(repr=False)    # conj[i][g] = g gen_i g^-1
    solvable: bool
    signature: tuple
    normalizer: np.ndarray | None = field(default=None, repr=False)
    class_id: int = -1
    type: str | None = None
    _mask: np.ndarray | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def normalizer_order(self) -> int:
        return len(self.normalizer)

    @property
    def class_size(self) -> int:
        return int(self._group_order // self.normalizer_order)

    _group_order: int = 0

    def mask(self, size: int) -> np.ndarray:
        if self._mask is None:
            m = np.zeros(size, dtype=bool)
            m[self.elements] = True
            self._mask = m
        return self._mask


def _orbit_lengths(perms, n) -> tuple:
    seen = np.zeros(n, dtype=bool)
    out = []
    for s in range(n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        k = 0
        while stack:
            x = stack.pop()
            k += 1
            for p in perms:
                y = int(p[x])
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        out.append(k)
    return tuple(sorted(out))


def class_signature(T: ElementTable, elements, gens) -> tuple:
    """Conjugation invariants: order, element profile, orbit shapes on both point sets."""
    elements = np.asarray(elements)
    prof = Counter(zip(T.orders[elements].tolist(), T.fixed_curve[elements].tolist(),
                       T.fixed_points[elements].tolist()))
    curve = _orbit_lengths([T.cperm[g] for g in gens], T.n_curve)
    allp = _orbit_lengths([T.perm[g] for g in gens], T.n_points)
    return (len(elements), tuple(sorted(prof.items())), curve, allp)


def derived_subgroup(T: ElementTable, elements) -> np.ndarray:
    """[U, U] as the subgroup generated by all commutators."""
    e = np.asarray(elements)
    if len(e) > 2000:
        raise ResourceError("derived subgroup only for small subgroups")
    inv = T.inv[e]
    comm = T.mul(T.mul(inv[:, None], inv[None, :]), T.mul(e[:, None], e[None, :]))
    gens = np.unique(comm)
    return T.closure(gens)


def is_solvable(T: ElementTable, elements) -> bool:
    cur = np.asarray(elements)
    while len(cur) > 1:
        nxt = derived_subgroup(T, cur)
        if len(nxt) == len(cur):
            return False
        cur = nxt
    return True


class ClassCatalog:
    """Registry of subgroup classes, built by :func:`enumerate_all_classes`."""

    def __init__(self, group: PSU3):
        self.group = group
        self.T = group.elements
        self.classes: list[ClassRecord] = []
        self._by_sig: dict[tuple, list[int]] = {}
        self.conjugacy_tests = 0

    # registry

    def conj_arrays(self, gens) -> list[np.ndarray]:
        return [self.T.conj_all(g).astype(np.uint16) for g in gens]

    def find(self, elements, gens, conj=None, sig=None) -> int | None:
        T = self.T
        sig = sig or class_signature(T, elements, gens)
        cands = self._by_sig.get(sig, [])
        if not cands:
            return None
        if conj is None:
            conj = self.conj_arrays(gens)
        if not conj:
            return cands[0]
        for cid in cands:
            K = self.classes[cid]
            self.conjugacy_tests += 1
            m = K.mask(T.size)
            ok = m[conj[0]]
            for c in conj[1:]:
                ok &= m[c]
            if ok.any():
                return cid
        return None

    def add(self, elements, gens, conj, solvable, sig) -> int:
        T = self.T
        rec = ClassRecord(np.sort(np.asarray(elements)).astype(np.int32), list(gens), conj,
                          solvable, sig)
        rec._group_order = T.size
        m = rec.mask(T.size)
        ok = np.ones(T.size, dtype=bool)
        for c in conj:
            ok &= m[c]
        rec.normalizer = np.nonzero(ok)[0].astype(np.int32)
        cid = len(self.classes)
        rec.class_id = cid
        self.classes.append(rec)
        self._by_sig.setdefault(sig, []).append(cid)
        return cid

    def register(self, elements, gens, solvable, conj=None) -> tuple[int, bool]:
        sig = class_signature(self.T, elements, gens)
        if conj is None:
            conj = self.conj_arrays(gens)
        cid = self.find(elements, gens, conj, sig)
        if cid is not None:
            return cid, False
        return self.add(elements, gens, conj, solvable, sig), True

    # extension step

    def extensions(self, cid: int):
        """Yield (U, gens, conj) for U = N<g>, one per N_G(N)-orbit of prime-order cosets."""
        T = self.T
        N = self.classes[cid]
        NG = N.normalizer
        nmask = N.mask(T.size)
        outside = NG[~nmask[NG]]
        if not len(outside):
            return
        ord_mod = np.zeros(len(outside), dtype=np.int64)
        cur = outside.copy()
        k = 1
        while np.any(ord_mod == 0):
            hit = nmask[cur] & (ord_mod == 0)
            ord_mod[hit] = k
            cur = T.mul(cur, outside)
            k += 1
        prime = np.array([_is_prime(int(o)) for o in ord_mod])
        cand = np.zeros(T.size, dtype=bool)
        cand[outside[prime]] = True
        pord = np.zeros(T.size, dtype=np.int64)
        pord[outside] = ord_mod
        while cand.any():
            g = int(np.argmax(cand))
            p = int(pord[g])
            parts = [N.elements]
            gi = g
            for _ in range(p - 1):
                parts.append(T.mul(gi, N.elements))
                gi = int(T.mul(gi, g))
            U = np.unique(np.concatenate(parts)).astype(np.int32)
            diff = U[~nmask[U]]
            for chunk in np.array_split(NG, max(1, len(NG) * len(diff) // 2_000_000 + 1)):
                cand[T.conj(diff[:, None], chunk[None, :]).ravel()] = False
            gens = N.generators + [g]
            conj = N.conj + [T.conj_all(g).astype(np.uint16)]
            yield U, gens, conj

    def perfect_search(self) -> list[int]:
        """Classes of perfect proper subgroups generated by an involution and an element of order 3."""
        T = self.T
        invs = np.nonzero(T.orders == 2)[0]
        a = int(invs[0])
        cent = np.nonzero(T.conj_all(a) == a)[0]
        threes = np.nonzero(T.orders == 3)[0]
        todo = np.zeros(T.size, dtype=bool)
        todo[threes] = True
        found = []
        while todo.any():
            b = int(np.argmax(todo))
            todo[T.conj(b, cent)] = False
            U = T.closure([a, b], limit=T.size // 2)
            if U is None or len(U) in (1, 2, 3, 6):
                continue
            if len(derived_subgroup(T, U)) != len(U):
                continue
            cid, new = self.register(U, [a, b], solvable=False)
            if new:
                found.append(cid)
        self.perfect_classes = found
        return found


def enumerate_all_classes(group: PSU3, budget_classes: int = 10_000) -> ClassCatalog:
    """Every conjugacy class of subgroups of G (q = 4 only)."""
    if group.q != 4:
        raise ResourceError(f"full class enumeration is limited to q = 4 (got q = {group.q})")
    cat = ClassCatalog(group)
    T = cat.T
    trivial = np.array([T.identity], dtype=np.int32)
    cat.add(trivial, [], [], True, class_signature(T, trivial, []))
    cat.perfect_search()
    heap = [(c.order, c.class_id) for c in cat.classes]
    heapq.heapify(heap)
    done = set()
    while heap:
        _, cid = heapq.heappop(heap)
        if cid in done:
            continue
        done.add(cid)
        N = cat.classes[cid]
        for U, gens, conj in cat.extensions(cid):
            if len(U) == T.size:
                continue
            new_id, new = cat.register(U, gens, N.solvable, conj)
            if new:
                heapq.heappush(heap, (len(U), new_id))
                if len(cat.classes) > budget_classes:
                    raise ResourceError(f"more than {budget_classes} subgroup classes")
    gens = [int(g) for g in T.lookup(np.stack(group.generator_perms).astype(np.int64))]
    cat.add(T.all.copy(), gens, cat.conj_arrays(gens), False, ("G",))
    _relabel(cat)
    log.info("found %d subgroup classes after %d conjugacy tests", len(cat.classes), cat.conjugacy_tests)
    return cat


def _relabel(cat: ClassCatalog):
    """Sort classes by (order, class size, fingerprint) and attach closure type labels."""
    T = cat.T
    fps = [fingerprint(T, c.elements) for c in cat.classes]
    order = sorted(range(len(cat.classes)),
                   key=lambda i: (cat.classes[i].order, cat.classes[i].class_size, fps[i]))
    cat.classes = [cat.classes[i] for i in order]
    cat._by_sig = {}
    for new_id, c in enumerate(cat.classes):
        c.class_id = new_id
        cat._by_sig.setdefault(c.signature, []).append(new_id)
        if c.order == T.size:
            c.type = "G"
        else:
            c.type = label_for(subgroup_signature(T, c.elements), T.q, c.normalizer_order)


# the class poset

class ClassPoset:
    """Classes ordered by containment up to conjugacy.

    ``count[i][j]`` is the number of conjugates of class i inside a fixed
    member of class j; from it, ``over[i][j]`` is the number of members of
    class j containing a fixed member of class i.
    """

    def __init__(self, catalog: ClassCatalog):
        self.catalog = catalog
        T = catalog.T
        C = catalog.classes
        n = len(C)
        self.n = n
        self.count = np.zeros((n, n), dtype=np.int64)
        for i, H in enumerate(C):
            self.count[i, i] = 1
            if H.order == T.size:
                continue
            for j, K in enumerate(C):
                if K.order <= H.order or K.order % H.order:
                    continue
                if K.order == T.size:
                    self.count[i, j] = H.class_size
                    continue
                m = K.mask(T.size)
                ok = m[H.conj[0]] if H.conj else np.ones(T.size, dtype=bool)
                for c in H.conj[1:]:
                    ok &= m[c]
                hits = int(ok.sum())
                if hits % H.normalizer_order:
                    raise CompletenessError("conjugate count not divisible by |N_G(H)|")
                self.count[i, j] = hits // H.normalizer_order
        self.leq = self.count > 0
        self.over = np.zeros((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                if self.count[i, j]:
                    v = Fraction(int(self.count[i, j]) * C[j].class_size, C[i].class_size)
                    if v.denominator != 1:
                        raise CompletenessError("non-integral overgroup count")
                    self.over[i, j] = int(v)
        self.table = PosetTable([np.nonzero(self.leq[i] & (np.arange(n) != i))[0] for i in range(n)],
                                rank_key=list(range(n)))

    def lam(self) -> np.ndarray:
        return mobius_from_top(self.table)

    def full_mu(self) -> np.ndarray:
        """μ(H, G) on the full subgroup lattice, per class."""
        C = self.catalog.classes
        order = sorted(range(self.n), key=lambda i: -C[i].order)
        mu = np.zeros(self.n, dtype=object)
        for i in order:
            if C[i].type == "G":
                mu[i] = 1
                continue
            mu[i] = -sum(self.over[i, j] * mu[j] for j in range(self.n)
                         if j != i and self.count[i, j])
        return mu


def lambda_table(poset: ClassPoset, lam=None) -> list[dict]:
    if lam is None:
        lam = poset.lam()
    return [dict(class_id=c.class_id, type=c.type, order=c.order,
                 normalizer_order=c.normalizer_order, class_size=c.class_size,
                 solvable=c.solvable, lam=int(lam[c.class_id]))
            for c in poset.catalog.classes]


# audits

def cyclic_subgroup_count(T: ElementTable) -> int:
    """Number of cyclic subgroups: Σ_g 1/φ(o(g))."""
    total = Fraction(0)
    for o, k in Counter(T.orders.tolist()).items():
        total += Fraction(k, _phi(o))
    return int(total)


def audit_catalog(cat: ClassCatalog, closure=None, poset: ClassPoset | None = None,
                  pairs: int = 50, seed: int = 0) -> dict:
    T = cat.T
    C = cat.classes
    out = {}
    out["class_count"] = len(C)
    out["subgroup_count"] = sum(c.class_size for c in C)
    cyc = sum(c.class_size for c in C if int(T.orders[c.elements].max()) == c.order)
    out["cyclic_expected"] = cyclic_subgroup_count(T)
    out["cyclic_found"] = cyc
    out["class_equation_ok"] = all(c.class_size * c.normalizer_order == T.size for c in C)
    out["solvable_ok"] = all(
        (c.solvable == is_solvable(T, c.elements)) if c.order < T.size else not c.solvable
        for c in C)
    out["nonsolvable_orders_ok"] = all(c.order % 60 == 0 for c in C if not c.solvable)
    if closure is not None:
        mism = []
        for cl in closure.classes:
            rec = closure.records[cl["rep"]]
            if cl["type"] == "G":
                continue
            cid = cat.find(rec.elements, rec.generators)
            if cid is None or C[cid].class_size != cl["size"] or C[cid].normalizer_order != cl["normalizer_order"]:
                mism.append(cl["type"])
        out["closure_classes_found"] = not mism
        out["closure_mismatches"] = mism
    if poset is not None:
        rng = np.random.default_rng(seed)
        bad = 0
        for _ in range(pairs):
            i, j = (int(x) for x in rng.integers(0, len(C), size=2))
            bad += brute_force_leq(T, C[i], C[j]) != bool(poset.leq[i, j])
        out["containment_pairs"] = pairs
        out["containment_mismatches"] = bad
    return out


def brute_force_leq(T: ElementTable, H: ClassRecord, K: ClassRecord) -> bool:
    """Is some conjugate of H inside K, testing every element of every conjugate."""
    if H.order > K.order or K.order % H.order:
        return False
    if K.order == T.size:
        return True
    m = K.mask(T.size)
    step = max(1, 400_000 // max(1, H.order))
    for start in range(0, T.size, step):
        g = T.all[start:start + step]
        imgs = T.conj(H.elements[:, None], g[None, :])
        if np.any(m[imgs].all(axis=0)):
            return True
    return False


def overgroup_sum(poset: ClassPoset, mu_by_class, cid: int) -> int:
    """Σ μ(K, G) over all subgroups K ≥ H for a fixed H in class cid."""
    return sum(poset.over[cid, j] * mu_by_class[j] for j in range(poset.n) if poset.count[cid, j])
