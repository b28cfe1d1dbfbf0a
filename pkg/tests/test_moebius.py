import itertools
from fractions import Fraction

import numpy as np
import pytest

from psu3mobius.moebius import (PosetError, PosetTable, defining_identity_holds, generates,
                                generation_probability, mann_bound_holds, mobius_dual_check,
                                mobius_from_bottom, mobius_from_top, monte_carlo_generation,
                                mu_table)


def numtheory_mu(n):
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def test_chain():
    n = 6
    P = PosetTable([list(range(i + 1, n)) for i in range(n)])
    assert mobius_from_top(P).tolist() == [0, 0, 0, 0, -1, 1]


def test_boolean_lattice():
    n = 4
    subsets = list(itertools.product([0, 1], repeat=n))
    leq = [[all(a <= b for a, b in zip(s, t)) for t in subsets] for s in subsets]
    P = PosetTable.from_leq(leq)
    mu = mobius_from_top(P)
    for s, m in zip(subsets, mu):
        assert m == (-1) ** (n - sum(s))


def test_divisor_lattice_matches_number_theory():
    N = 360
    divs = [d for d in range(1, N + 1) if N % d == 0]
    P = PosetTable.from_relation(divs, lambda a, b: b % a == 0)
    mu = mobius_from_top(P)
    assert [int(m) for m in mu] == [numtheory_mu(N // d) for d in divs]
    assert mobius_dual_check(P, mu)


def _subgroups(elements, compose):
    """All subgroups of a small permutation group, as closures of pairs."""
    def close(gens):
        S = {tuple(range(len(elements[0])))}
        frontier = list(S)
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = compose(g, x)
                    if y not in S:
                        S.add(y)
                        new.append(y)
            frontier = new
        return frozenset(S)
    return sorted({close([a, b]) for a in elements for b in elements}, key=len)


def _compose(g, x):
    return tuple(g[i] for i in x)


def _lattice(elements):
    subs = _subgroups(elements, _compose)
    return subs, PosetTable.from_relation(subs, lambda a, b: a <= b, rank_key=list(range(len(subs))))


def test_sym3_trivial_subgroup_has_mu_3():
    # S3 has three C2 and one C3 below it, each with mu = -1, so mu(1) = -(1 - 4)
    subs, P = _lattice(list(itertools.permutations(range(3))))
    assert len(subs) == 6
    mu = mobius_from_top(P)
    assert mu[0] == 3


@pytest.mark.parametrize("which", ["S4", "A5"])
def test_generating_pairs_equal_mobius_sum(which):
    if which == "S4":
        els = list(itertools.permutations(range(4)))
    else:
        els = [p for p in itertools.permutations(range(5))
               if sum(p[i] > p[j] for i in range(5) for j in range(i + 1, 5)) % 2 == 0]
    subs, P = _lattice(els)
    mu = mobius_from_top(P)
    G = frozenset(els)
    by_pair = 0
    for a in els:
        for b in els:
            by_pair += not any(a in H and b in H for H in subs[:-1])
    assert sum(int(m) * len(H) ** 2 for H, m in zip(subs, mu)) == by_pair
    assert defining_identity_holds(P, mu)
    assert subs[-1] == G
    expected_count = {"S4": 30, "A5": 59}[which]
    assert len(subs) == expected_count


def test_bottom_recursion_agrees_with_top():
    subs, P = _lattice(list(itertools.permutations(range(4))))
    mu = mobius_from_top(P)
    top = P.top()
    for x in range(len(P)):
        assert mobius_from_bottom(P, x)[top] == mu[x]


def test_errors():
    P = PosetTable([[], []])
    with pytest.raises(PosetError):
        mobius_from_top(P)
    bad = PosetTable.from_leq([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    assert not bad.is_partial_order()
    big = PosetTable([list(range(i + 1, 3000)) for i in range(3000)])
    with pytest.raises(PosetError):
        mobius_dual_check(big, mobius_from_top(big))


def test_relabelling_does_not_change_mu():
    subs, P = _lattice(list(itertools.permutations(range(4))))
    mu = mobius_from_top(P)
    rng = np.random.default_rng(5)
    perm = rng.permutation(len(subs))
    Q = PosetTable.from_relation([subs[i] for i in perm], lambda a, b: a <= b)
    mu2 = mobius_from_top(Q)
    assert [mu2[k] for k in np.argsort(perm)] == list(mu)


# PSU(3, 4)

def test_closure_mu_table(closure, mu):
    got = {r.type: r.mu for r in mu_table(closure, mu)}
    assert got == {"G": 1, "M1": -1, "M2": -1, "M3": -1, "M4": -1, "EqC": 1, "CCC2": 1, "CC": 0,
                   "Cq2m1": 0, "C2q1": 0, "Sym3": 5, "Cq1": 0, "Eq": 0, "C3": 10, "C2": -160, "1": 0}
    assert defining_identity_holds(PosetTable(closure.upsets), mu)


def test_generation_probability_by_counting_pairs(catalog, closure, mu, table):
    exact = generation_probability(closure, mu, 2)
    assert exact == Fraction(5089, 5200)
    # independent count: for one a per conjugacy class, count b with <a, b> not in any maximal
    seen = np.zeros(table.size, dtype=bool)
    total = 0
    for a in range(table.size):
        if seen[a]:
            continue
        cls = np.unique(table.conj_all(a))
        seen[cls] = True
        total += len(cls) * int(generates(catalog, np.full(table.size, a), table.all).sum())
    assert Fraction(total, table.size ** 2) == exact
    assert generation_probability(closure, mu, 1) == 0


def test_monte_carlo_and_mann(catalog, closure, mu):
    exact = generation_probability(closure, mu, 2)
    mc = monte_carlo_generation(catalog, exact, trials=20000, seed=3, bsgs_sample=30)
    assert mc.within and mc.bsgs_agree
    assert mc.hits == monte_carlo_generation(catalog, exact, 20000, 3, 0).hits
    assert mann_bound_holds(closure, mu)
