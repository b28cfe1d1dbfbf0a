import itertools

import numpy as np
import pytest

from psu3mobius.group_engine import group_order
from psu3mobius.moebius import PosetTable, mobius_from_bottom
from psu3mobius.p_poset_euler import (brown_check, census_formula, chi_via_hall, chi_via_poset,
                                      gaussian_binomial, mu_elementary, p_part, prime_case,
                                      subgroups_of_pgroup, sylow_subgroup, telescoping_sum)


def subspaces(m, p):
    vecs = list(itertools.product(range(p), repeat=m))

    def span(basis):
        out = set()
        for coeffs in itertools.product(range(p), repeat=len(basis)):
            out.add(tuple(sum(c * v[i] for c, v in zip(coeffs, basis)) % p for i in range(m)))
        return frozenset(out)

    found = set()
    for r in range(m + 1):
        for basis in itertools.combinations(vecs, r):
            found.add(span(basis))
    return found


@pytest.mark.parametrize("m,p", [(3, 2), (4, 2), (3, 3)])
def test_gaussian_binomial_counts_subspaces(m, p):
    subs = subspaces(m, p)
    for r in range(m + 1):
        assert sum(1 for S in subs if len(S) == p ** r) == gaussian_binomial(m, r, p)


def test_gaussian_binomial_errors():
    with pytest.raises(ValueError):
        gaussian_binomial(3, 4, 2)
    with pytest.raises(ValueError):
        gaussian_binomial(3, 1, 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_telescoping_sum(n):
    assert telescoping_sum(n) == -1


def test_full_alternating_sum_vanishes():
    # sum over r = 0..m of (-1)^r 2^C(r,2) [m r]_2 is 0 for every m >= 1
    for m in range(1, 12):
        assert sum((-1) ** r * 2 ** (r * (r - 1) // 2) * gaussian_binomial(m, r, 2)
                   for r in range(m + 1)) == 0


@pytest.mark.parametrize("m,p", [(3, 2), (2, 3)])
def test_mu_of_subspace_lattice(m, p):
    subs = sorted(subspaces(m, p), key=len)
    P = PosetTable.from_relation(subs, lambda a, b: a <= b)
    mu = mobius_from_bottom(P, 0)
    assert mu[len(subs) - 1] == mu_elementary(m, p)


def test_p_part_and_cases():
    G = group_order(4)
    assert [p_part(G, p) for p in (2, 3, 5, 7, 13)] == [64, 3, 25, 1, 13]
    tags = {p: prime_case(p, 4).case_tag for p in (2, 3, 5, 7, 13)}
    assert tags == {2: "p_eq_2", 3: "div_q_minus_1", 5: "div_q_plus_1", 7: "not_dividing",
                    13: "div_q2_q_1"}
    with pytest.raises(ValueError):
        prime_case(9, 4)


def test_brown_congruence():
    assert brown_check(2, 65, 4) and brown_check(5, -624, 4)
    assert brown_check(3, 2080, 4) and not brown_check(3, -2080, 4)
    assert brown_check(13, 1600, 4) and not brown_check(13, -1600, 4)


def _brute_lattice(T, S):
    """Every subgroup of S, grown one generator at a time."""
    found = {np.array([T.identity], dtype=np.int32).tobytes(): np.array([T.identity])}
    frontier = list(found.values())
    while frontier:
        new = []
        for H in frontier:
            for g in S:
                if g in H:
                    continue
                K = np.sort(T.closure(list(H) + [int(g)]))
                k = K.astype(np.int32).tobytes()
                if k not in found:
                    found[k] = K
                    new.append(K)
        frontier = new
    return found


def test_sylow2_subgroups_by_brute_force(table):
    S = sylow_subgroup(table, 2)
    assert len(S) == 64
    brute = _brute_lattice(table, S)
    fast = subgroups_of_pgroup(table, S)
    assert {np.sort(H).astype(np.int32).tobytes() for H in fast} == set(brute)
    from collections import Counter
    assert dict(sorted(Counter(len(H) for H in fast).items())) == {1: 1, 2: 3, 4: 31, 8: 15, 16: 35, 32: 15, 64: 1}


@pytest.mark.parametrize("p,chi", [(2, 65), (3, 2080), (5, -624), (7, 0), (13, 1600)])
def test_chi_two_routes(table, p, chi):
    hall = chi_via_hall(table, p)
    poset = chi_via_poset(table, p)
    assert hall["chi"] == poset["chi"] == chi
    if table.size % p == 0:
        assert hall["census"] == census_formula(prime_case(p, 4), 4)
        assert brown_check(p, chi, 4)


def test_chi_census_details(table):
    two = chi_via_hall(table, 2)
    assert two["census"] == {1: 195, 2: 65}
    assert chi_via_poset(table, 2)["components"] == 65
    five = chi_via_hall(table, 5)
    assert five["census"] == {1: 1456, 2: 416}
    assert five["cp_split"] == {"homology": 208, "B1": 1248} == five["cp_split_formula"]


def test_chi_independent_of_sylow_choice(table):
    assert chi_via_poset(table, 5, seed=11)["chi"] == chi_via_poset(table, 5, seed=0)["chi"]
