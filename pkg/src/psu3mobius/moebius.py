"""Möbius functions of finite posets and what they say about PSU(3, q).

A poset is given by strict up-sets.  Since x < y forces up(y) to be a
proper subset of up(x), sorting by |up| is a linear extension, which is
all the two recursions below need.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .bsgs import PermGroup


class PosetError(ValueError):
    pass


class PosetTable:
    """Finite poset on nodes 0..n-1; ``up[i]`` lists the nodes strictly above i.

    ``rank_key`` breaks ties among nodes with equal |up| so that the
    processing order (and hence any output) does not depend on input order.
    """

    def __init__(self, up, rank_key=None):
        self.up = [np.asarray(u, dtype=np.int64) for u in up]
        self.n = len(self.up)
        key = rank_key if rank_key is not None else list(range(self.n))
        sizes = [len(u) for u in self.up]
        self.descending = sorted(range(self.n), key=lambda i: (sizes[i], key[i]))
        self._leq_cache = None

    @classmethod
    def from_leq(cls, leq, rank_key=None) -> "PosetTable":
        L = np.asarray(leq, dtype=bool)
        n = len(L)
        up = [np.array([j for j in range(n) if j != i and L[i, j]], dtype=np.int64) for i in range(n)]
        return cls(up, rank_key)

    @classmethod
    def from_relation(cls, items, leq, rank_key=None) -> "PosetTable":
        n = len(items)
        L = np.array([[leq(items[i], items[j]) for j in range(n)] for i in range(n)], dtype=bool)
        return cls.from_leq(L, rank_key)

    def __len__(self):
        return self.n

    def leq_matrix(self) -> np.ndarray:
        if self._leq_cache is None:
            L = np.eye(self.n, dtype=bool)
            for i, u in enumerate(self.up):
                L[i, u] = True
            self._leq_cache = L
        return self._leq_cache

    def is_partial_order(self) -> bool:
        L = self.leq_matrix()
        if np.any(L & L.T & ~np.eye(self.n, dtype=bool)):
            return False
        Li = L.astype(np.int64)
        return bool(np.all((Li @ Li > 0) <= L))

    @property
    def tops(self) -> list[int]:
        return [i for i in range(self.n) if len(self.up[i]) == 0]

    def top(self) -> int:
        tops = self.tops
        if len(tops) != 1:
            raise PosetError(f"poset has {len(tops)} maximal elements, need a unique top")
        t = tops[0]
        for i in range(self.n):
            if i != t and t not in set(self.up[i].tolist()):
                raise PosetError("maximal element is not above every node")
        return t


def mobius_from_top(poset: PosetTable) -> np.ndarray:
    """μ(x, top) for every x, by descending recursion Σ_{x ≤ z} μ(z, top) = 0."""
    t = poset.top()
    mu = np.zeros(poset.n, dtype=object)
    for x in poset.descending:
        if x == t:
            mu[x] = 1
        else:
            mu[x] = -sum(mu[z] for z in poset.up[x].tolist())
    return mu


def mobius_from_bottom(poset: PosetTable, bottom: int) -> dict:
    """μ(bottom, y) for every y ≥ bottom, by Σ_{bottom ≤ z ≤ y} μ(bottom, z) = 0."""
    interval = [bottom] + poset.up[bottom].tolist()
    inside = np.zeros(poset.n, dtype=bool)
    inside[interval] = True
    order = sorted(interval, key=lambda i: -len(poset.up[i]))
    acc = {i: 0 for i in interval}
    mu = {}
    for z in order:
        mu[z] = 1 if z == bottom else -acc[z]
        for y in poset.up[z].tolist():
            if inside[y]:
                acc[y] += mu[z]
    return mu


def mobius_dual_check(poset: PosetTable, mu_top, limit: int = 2000) -> bool:
    """Recompute every μ(x, top) by the bottom-rooted recursion and compare."""
    if poset.n > limit:
        raise PosetError(f"dual check limited to {limit} nodes, poset has {poset.n}")
    t = poset.top()
    return all(mobius_from_bottom(poset, x)[t] == mu_top[x] for x in range(poset.n))


def defining_identity_holds(poset: PosetTable, mu_top) -> bool:
    t = poset.top()
    return all(mu_top[x] + sum(mu_top[z] for z in poset.up[x].tolist()) == (1 if x == t else 0)
               for x in range(poset.n))


# μ on the intersection closure

def closure_poset_table(closure) -> PosetTable:
    keys = [(-r.order, r.fingerprint) for r in closure.records]
    return PosetTable(closure.upsets, rank_key=keys)


def closure_mu(closure) -> np.ndarray:
    return mobius_from_top(closure_poset_table(closure))


@dataclass
class MuRow:
    type: str
    order: int
    normalizer_order: int
    class_size: int
    mu: int


def mu_table(closure, mu=None) -> list[MuRow]:
    """One row per conjugacy class of the closure; μ is checked constant on each class."""
    if mu is None:
        mu = closure_mu(closure)
    rows = []
    cls = closure.class_of
    for c in closure.classes:
        vals = {int(mu[i]) for i in np.nonzero(cls == c["class_id"])[0]}
        if len(vals) != 1:
            raise PosetError(f"μ is not constant on the class of type {c['type']}: {sorted(vals)}")
        rows.append(MuRow(c["type"], c["order"], c["normalizer_order"], c["size"], vals.pop()))
    return rows


def generation_probability(closure, mu, s: int) -> Fraction:
    """Σ_H μ(H, G) / [G:H]^s over all closure nodes: P(s random elements generate G)."""
    if s < 1:
        raise ValueError("s must be at least 1")
    G = closure.table.size
    total = Fraction(0)
    for r, m in zip(closure.records, mu):
        if m:
            total += Fraction(int(m), (G // r.order) ** s)
    return total


def generates(catalog, a, b) -> np.ndarray:
    """Vectorised: does <a, b> equal G, i.e. lie in no maximal subgroup?"""
    inc = catalog.incidence
    return ~np.any(inc[np.asarray(a)] & inc[np.asarray(b)], axis=-1)


@dataclass
class MonteCarloResult:
    trials: int
    hits: int
    rate: float
    exact: float
    stderr: float
    z: float
    bsgs_checked: int
    bsgs_agree: bool

    @property
    def within(self) -> bool:
        return abs(self.z) <= 4.0


def monte_carlo_generation(catalog, exact: Fraction, trials: int = 100_000, seed: int = 0,
                           bsgs_sample: int = 200) -> MonteCarloResult:
    """Seeded estimate of P(<a,b> = G) with a BSGS-order cross-check on a subsample."""
    T = catalog.table
    rng = np.random.default_rng(seed)
    a = rng.integers(0, T.size, size=trials)
    b = rng.integers(0, T.size, size=trials)
    hit = generates(catalog, a, b)
    agree = True
    for i in range(min(bsgs_sample, trials)):
        H = PermGroup([T.as_perm(int(a[i])), T.as_perm(int(b[i]))], T.n_curve)
        agree &= (H.order() == T.size) == bool(hit[i])
    p = float(exact)
    se = sqrt(p * (1 - p) / trials) if 0 < p < 1 else 0.0
    rate = float(hit.mean())
    z = (rate - p) / se if se else (0.0 if rate == p else float("inf"))
    return MonteCarloResult(trials, int(hit.sum()), rate, p, se, z, min(bsgs_sample, trials), bool(agree))


def mann_bound_holds(closure, mu) -> bool:
    G = closure.table.size
    return all(abs(int(m)) <= G // r.order for r, m in zip(closure.records, mu))


# (μ, λ) checks

@dataclass
class PropertyRow:
    type: str
    order: int
    normalizer_order: int
    mu: int
    lam: int
    rhs: int
    holds: bool


def property_checks(rows) -> dict:
    """Evaluate μ({1}) = |G|·λ({1}) and μ(H) = [N_G(H):H]·λ(H) per class.

    ``rows`` are mappings with keys type, order, normalizer_order, mu, lam.
    G is simple, so its derived subgroup is G itself.
    """
    out = []
    G = None
    for r in rows:
        if r["order"] == r["normalizer_order"] and r["type"] == "G":
            G = r["order"]
    for r in rows:
        rhs = (r["normalizer_order"] // r["order"]) * r["lam"]
        out.append(PropertyRow(r["type"], r["order"], r["normalizer_order"], r["mu"], r["lam"],
                               rhs, r["mu"] == rhs))
    triv = next(r for r in rows if r["order"] == 1)
    G = G or max(r["order"] for r in rows)
    triv_check = dict(lhs=triv["mu"], rhs=G * triv["lam"], holds=triv["mu"] == G * triv["lam"])
    failures = [p for p in out if not p.holds]
    return dict(trivial=triv_check, per_class=out, generalized_holds=not failures,
                counterexamples=[p.type for p in failures])
