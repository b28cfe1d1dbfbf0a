"""Permutation groups through a base and strong generating set.

Permutations are 1-d numpy integer arrays ``p`` with ``p[x]`` the image of
``x``; the product ``a * b`` means "apply b, then a", i.e. ``a[b]``.
Schreier-Sims is deterministic: new base points are always the lowest
moved point of the offending residue.
"""

from __future__ import annotations

import random
from collections import deque

import numpy as np


class GroupConstructionError(RuntimeError):
    pass


class ResourceError(RuntimeError):
    pass


def perm_mul(a, b):
    return a[b]


def perm_inv(a):
    out = np.empty_like(a)
    out[a] = np.arange(len(a), dtype=a.dtype)
    return out


def is_identity(a) -> bool:
    return bool(np.all(a == np.arange(len(a))))


def perm_key(a) -> bytes:
    return a.astype(np.int32, copy=False).tobytes()


def first_moved(a) -> int | None:
    moved = np.nonzero(a != np.arange(len(a)))[0]
    return int(moved[0]) if len(moved) else None


class PermGroup:
    """A permutation group with a deterministic Schreier-Sims BSGS.

    ``base_prefix`` forces the first base points, which is how point
    stabilisers are read off (``stabilizer``).
    """

    def __init__(self, generators, degree: int | None = None, base_prefix=()):
        gens = [np.asarray(g, dtype=np.int32) for g in generators]
        if degree is None:
            if not gens:
                raise ValueError("degree required for the trivial group")
            degree = len(gens[0])
        self.degree = degree
        self.identity = np.arange(degree, dtype=np.int32)
        self.generators = [g for g in gens if not is_identity(g)]
        for g in self.generators:
            if len(g) != degree or sorted(g.tolist()) != list(range(degree)):
                raise ValueError("not a permutation of the right degree")
        self._schreier_sims(list(base_prefix))

    # construction

    def _orbit_transversal(self, level: int):
        b = self.base[level]
        gens = self.strong[level]
        trans = {b: self.identity}
        queue = deque([b])
        while queue:
            x = queue.popleft()
            ux = trans[x]
            for s in gens:
                y = int(s[x])
                if y not in trans:
                    trans[y] = s[ux]
                    queue.append(y)
        self.transversals[level] = trans
        self.inv_transversals[level] = {x: perm_inv(u) for x, u in trans.items()}

    def _sift(self, g):
        h = g
        for i, b in enumerate(self.base):
            x = int(h[b])
            uinv = self.inv_transversals[i].get(x)
            if uinv is None:
                return h, i
            h = uinv[h]
        return h, len(self.base)

    def _schreier_sims(self, base):
        self.base = list(base)
        for g in self.generators:
            if all(g[b] == b for b in self.base):
                self.base.append(first_moved(g))
        if not self.base and self.generators:
            self.base.append(first_moved(self.generators[0]))
        nb = len(self.base)
        self.strong = [[g for g in self.generators if all(g[b] == b for b in self.base[:i])]
                       for i in range(nb)]
        self.transversals = [None] * nb
        self.inv_transversals = [None] * nb
        for i in range(nb):
            self._orbit_transversal(i)
        i = nb - 1
        while i >= 0:
            restart = False
            trans = self.transversals[i]
            for x, ux in list(trans.items()):
                for s in self.strong[i]:
                    y = int(s[x])
                    sg = self.inv_transversals[i][y][s[ux]]
                    if is_identity(sg):
                        continue
                    h, j = self._sift(sg)
                    if j == len(self.base):
                        if is_identity(h):
                            continue
                        self.base.append(first_moved(h))
                        self.strong.append([])
                        self.transversals.append(None)
                        self.inv_transversals.append(None)
                    for lvl in range(i + 1, j + 1):
                        self.strong[lvl].append(h)
                        self._orbit_transversal(lvl)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1
        # drop redundant trailing levels created by base_prefix
        self._order = 1
        for t in self.transversals:
            self._order *= len(t)

    # queries

    def order(self) -> int:
        return self._order

    def __len__(self):
        return self._order

    def contains(self, g) -> bool:
        g = np.asarray(g, dtype=np.int32)
        if len(g) != self.degree:
            return False
        h, j = self._sift(g)
        return j == len(self.base) and is_identity(h)

    __contains__ = contains

    @property
    def strong_generators(self):
        seen = {}
        for lvl in self.strong:
            for s in lvl:
                seen.setdefault(perm_key(s), s)
        return list(seen.values())

    def random_element(self, rng: random.Random):
        g = self.identity
        for trans in self.transversals:
            pts = sorted(trans)
            g = g[trans[pts[rng.randrange(len(pts))]]]
        return g

    def elements(self, limit: int = 200_000):
        """All elements as an (order, degree) array; refuses large groups."""
        if self._order > limit:
            raise ResourceError(f"group of order {self._order} exceeds element limit {limit}")
        elems = self.identity[None, :]
        for trans in reversed(self.transversals):
            us = np.stack([trans[x] for x in sorted(trans)])
            # new = u o e for every u, e
            elems = us[:, elems].reshape(-1, self.degree) if len(elems) else us
        return elems

    def orbit(self, point: int) -> list[int]:
        seen = {point}
        queue = deque([point])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = int(g[x])
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def stabilizer(self, point: int) -> "PermGroup":
        G = PermGroup(self.generators, self.degree, base_prefix=[point])
        return PermGroup(G.strong[1] if len(G.strong) > 1 else [], self.degree)

    def set_stabilizer(self, block) -> "PermGroup":
        block = frozenset(int(b) for b in block)
        return self.action_stabilizer(block, lambda g, B: frozenset(int(g[b]) for b in B))

    def action_stabilizer(self, seed, act, budget: int | None = None) -> "PermGroup":
        """Stabiliser of ``seed`` under ``act(g, obj)`` by orbit-stabiliser.

        Schreier generators of the orbit are added until the subgroup order
        times the orbit length reaches |G|.
        """
        trans = {seed: self.identity}
        queue = deque([seed])
        while queue:
            o = queue.popleft()
            uo = trans[o]
            for g in self.generators:
                o2 = act(g, o)
                if o2 not in trans:
                    trans[o2] = g[uo]
                    queue.append(o2)
                    if budget is not None and len(trans) > budget:
                        raise ResourceError(f"orbit exceeds budget {budget}")
        target = self._order // len(trans)
        if target * len(trans) != self._order:
            raise GroupConstructionError("orbit length does not divide the group order")
        K = PermGroup([], self.degree)
        if target == 1:
            return K
        for o, uo in trans.items():
            for g in self.generators:
                o2 = act(g, o)
                sg = perm_inv(trans[o2])[g[uo]]
                if not K.contains(sg):
                    K = PermGroup(K.generators + [sg], self.degree)
                    if K.order() == target:
                        return K
        raise GroupConstructionError("stabiliser order mismatch")

    def conjugate(self, g) -> "PermGroup":
        """g H g^-1."""
        g = np.asarray(g, dtype=np.int32)
        gi = perm_inv(g)
        return PermGroup([g[h[gi]] for h in self.generators], self.degree)

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(other.contains(g) for g in self.generators)

    def equals(self, other: "PermGroup") -> bool:
        return self.is_subgroup_of(other) and other.is_subgroup_of(self)

    def normal_closure(self, gens) -> "PermGroup":
        N = PermGroup([np.asarray(x, dtype=np.int32) for x in gens], self.degree)
        changed = True
        while changed:
            changed = False
            for g in self.generators:
                gi = perm_inv(g)
                for n in list(N.generators):
                    c = g[n[gi]]
                    if not N.contains(c):
                        N = PermGroup(N.generators + [c], self.degree)
                        changed = True
        return N

    def element_set(self) -> frozenset:
        return frozenset(perm_key(e) for e in self.elements())

    def normalizer_in(self, H: "PermGroup", budget: int | None = 500_000) -> "PermGroup":
        """N_G(H) via the conjugation action on the element set of H."""
        deg = self.degree
        elems = H.elements()
        if budget is not None and len(elems) * (self._order // max(1, H.order())) > budget * 64:
            raise ResourceError("conjugation orbit too large for the memory budget")

        def act(g, key):
            E = np.frombuffer(b"".join(sorted(key)), dtype=np.int32).reshape(-1, deg)
            gi = perm_inv(g)
            C = g[E[:, gi]]
            return frozenset(c.tobytes() for c in C)

        return self.action_stabilizer(frozenset(e.tobytes() for e in elems.astype(np.int32)),
                                      act, budget=budget)

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={self._order}, base={self.base})"


def perm_order(a) -> int:
    """Order of a permutation: lcm of its cycle lengths."""
    from math import lcm

    seen = np.zeros(len(a), dtype=bool)
    out = 1
    for i in range(len(a)):
        if seen[i]:
            continue
        n = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = a[j]
            n += 1
        out = lcm(out, n)
    return out
