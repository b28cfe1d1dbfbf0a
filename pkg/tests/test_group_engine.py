from collections import Counter

import numpy as np
import pytest

from psu3mobius.group_engine import classify, element_census, group_order, mat_mul


def test_order_formula():
    assert group_order(4) == 62400
    assert group_order(16) == 16 ** 3 * 4097 * 255


def test_generators_are_unitary(group):
    assert all(group.is_unitary(M) for M in group.generator_matrices)


def test_bsgs_order_and_two_transitivity(group):
    assert group.perm_group.order() == 62400
    assert group.is_two_transitive()


def test_table_is_closed_and_associative(table):
    rng = np.random.default_rng(0)
    a, b, c = (rng.integers(0, table.size, 300) for _ in range(3))
    assert np.all(table.mul(table.mul(a, b), c) == table.mul(a, table.mul(b, c)))
    assert np.all(table.mul(a, table.inv[a]) == table.identity)


def test_multiplication_matches_permutation_composition(table):
    rng = np.random.default_rng(1)
    a, b = rng.integers(0, table.size, 200), rng.integers(0, table.size, 200)
    ab = table.mul(a, b)
    composed = np.take_along_axis(table.perm[a], table.perm[b].astype(np.intp), axis=1)
    assert np.array_equal(table.perm[ab], composed)


def test_matrices_act_like_their_permutations(group, table):
    plane = group.plane
    F = group.F
    rng = np.random.default_rng(2)
    for g in rng.integers(0, table.size, 20):
        M = tuple(tuple(int(x) for x in r) for r in table.mats[g])
        perm = group.point_action(M, plane.points, plane.point_index)
        assert np.array_equal(perm, table.perm[g])
        h = int(rng.integers(0, table.size))
        N = tuple(tuple(int(x) for x in r) for r in table.mats[h])
        prod = group.point_action(mat_mul(F, M, N), plane.points, plane.point_index)
        assert np.array_equal(prod, table.perm[table.mul(g, h)])


def test_conjugation_preserves_order(table):
    rng = np.random.default_rng(3)
    for h in rng.integers(1, table.size, 5):
        c = table.conj_all(int(h))
        assert set(table.orders[c].tolist()) == {int(table.orders[h])}


def test_census_against_cycle_types(table):
    census = element_census(table)
    assert sum(census.values()) == 62399
    assert census == {(2, 1): 195, (3, 2): 4160, (4, 1): 3900, (5, 0): 4992, (5, 5): 832,
                      (10, 1): 12480, (13, 0): 19200, (15, 2): 16640}
    # fixed points on the curve from the permutations themselves
    fixed = (table.cperm == np.arange(65)).sum(axis=1)
    assert Counter(fixed[1:].tolist()) == Counter(f for (o, f), k in census.items() for _ in range(k))


def test_type_tags_partition(table):
    tags = Counter(table.type_tags[1:].tolist())
    assert sum(tags.values()) == 62399
    assert tags == {"A": 832, "B1": 4992, "B2": 20800, "B3": 19200, "C": 195, "D": 3900, "E": 12480}


def test_classify_rejects_impossible_element():
    with pytest.raises(Exception):
        classify(7, 0, 4)


def test_closure_of_generators(table):
    assert table.closure([1, 2, 3], limit=10) is None
    g = int(np.nonzero(table.orders == 13)[0][0])
    C = table.closure([g])
    assert len(C) == 13 and table.is_abelian(C) and table.exponent(C) == 13


def test_normalizer_of_sylow13(table):
    g = int(np.nonzero(table.orders == 13)[0][0])
    C = table.closure([g])
    assert len(table.normalizer([g], C)) == 39
