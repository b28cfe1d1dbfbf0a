import itertools
import random
from math import factorial

import numpy as np
import pytest

from psu3mobius.bsgs import PermGroup, ResourceError, perm_inv, perm_order


def cyc(n, *cycle):
    p = list(range(n))
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        p[a] = b
    return np.array(p, dtype=np.int32)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_symmetric_group_order(n):
    G = PermGroup([cyc(n, 0, 1), cyc(n, *range(n))], n)
    assert G.order() == factorial(n)


def test_alternating_group_membership():
    A5 = PermGroup([cyc(5, 0, 1, 2), cyc(5, 2, 3, 4)], 5)
    assert A5.order() == 60
    for p in itertools.permutations(range(5)):
        p = np.array(p, dtype=np.int32)
        inv = sum(1 for i in range(5) for j in range(i + 1, 5) if p[i] > p[j])
        assert A5.contains(p) == (inv % 2 == 0)


def test_dihedral_stabilizer_and_orbit():
    D = PermGroup([cyc(8, *range(8)), np.array([(-i) % 8 for i in range(8)], dtype=np.int32)], 8)
    assert D.order() == 16
    assert sorted(D.orbit(3)) == list(range(8))
    assert D.stabilizer(0).order() == 2


def test_elements_are_distinct_members():
    G = PermGroup([cyc(4, 0, 1), cyc(4, 0, 1, 2, 3)], 4)
    E = G.elements()
    assert len({e.tobytes() for e in E}) == 24


def test_element_limit():
    G = PermGroup([cyc(9, 0, 1), cyc(9, *range(9))], 9)
    with pytest.raises(ResourceError):
        G.elements(limit=1000)


def test_normal_closure_in_s4():
    S4 = PermGroup([cyc(4, 0, 1), cyc(4, 0, 1, 2, 3)], 4)
    v4 = np.array([1, 0, 3, 2], dtype=np.int32)
    assert S4.normal_closure([v4]).order() == 4
    assert S4.normal_closure([cyc(4, 0, 1, 2)]).order() == 12


def test_perm_helpers():
    rng = random.Random(3)
    for _ in range(20):
        p = np.array(rng.sample(range(7), 7), dtype=np.int32)
        assert np.all(p[perm_inv(p)] == np.arange(7))
        k = perm_order(p)
        q = np.arange(7)
        for _ in range(k):
            q = p[q]
        assert np.all(q == np.arange(7))
