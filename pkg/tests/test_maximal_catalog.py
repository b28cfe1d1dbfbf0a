import numpy as np
import pytest

from psu3mobius.maximal_catalog import (TYPES_BY_KEY, ClosurePoset, explicit_intersection,
                                        intersection_closure, tangent_chord_pair,
                                        triangle_fix_census)
from psu3mobius.bsgs import ResourceError


def test_family_orders_and_sizes(catalog):
    sizes = catalog.family_sizes()
    assert sizes == {"M1": 65, "M2": 208, "M3": 416, "M4": 1600}
    for kind, order in [("M1", 960), ("M2", 300), ("M3", 150), ("M4", 39)]:
        fams = catalog.of_kind(kind)
        assert {f.subgroup.order for f in fams} == {order}
        assert TYPES_BY_KEY[kind].order(4) == order


def test_maximals_are_subgroups(catalog, table):
    rng = np.random.default_rng(0)
    for k in rng.integers(0, catalog.n_max, 12):
        H = catalog.families[k].subgroup
        m = H.mask
        a, b = rng.choice(H.elements, 50), rng.choice(H.elements, 50)
        assert m[table.mul(a, b)].all()


def test_incidence_matches_membership(catalog):
    rng = np.random.default_rng(1)
    for k in rng.integers(0, catalog.n_max, 10):
        H = catalog.families[k].subgroup
        col = np.unpackbits(catalog.incidence, axis=1, count=catalog.n_max)[:, k].astype(bool)
        assert np.array_equal(np.nonzero(col)[0], H.elements)


def test_every_element_lies_in_a_maximal(catalog):
    assert np.all(catalog.incidence.any(axis=1))


def test_closure_types_and_normalizers(closure):
    cls = closure.classes
    assert len(closure) == 14823
    types = [c["type"] for c in cls]
    assert len(types) == 16 and set(types) == set(TYPES_BY_KEY) | {"G"}
    for c in cls:
        if c["type"] != "G":
            assert c["normalizer_order"] == TYPES_BY_KEY[c["type"]].normalizer(4)
            assert c["size"] * c["normalizer_order"] == 62400
    by = closure.class_by_type()
    assert (by["C2"]["normalizer_order"], by["C3"]["normalizer_order"], by["Sym3"]["normalizer_order"]) == (320, 30, 30)


def test_closure_is_intersection_closed(closure):
    rng = np.random.default_rng(2)
    for i, j in rng.integers(0, len(closure), size=(300, 2)):
        A, B = closure.records[i], closure.records[j]
        assert closure.find(np.intersect1d(A.elements, B.elements)) is not None


def test_containment_by_maxsets_matches_elements(closure):
    rng = np.random.default_rng(3)
    for i, j in rng.integers(0, len(closure), size=(300, 2)):
        A, B = closure.records[i], closure.records[j]
        direct = bool(np.all(B.mask[A.elements]))
        assert closure.leq(i, j) == direct


def test_hasse_edges_are_covers(closure):
    edges = closure.hasse_edges
    assert all(closure.orders[a] < closure.orders[b] for a, b in edges)
    rng = np.random.default_rng(4)
    for a, b in [edges[k] for k in rng.integers(0, len(edges), 50)]:
        between = set(closure.upset(a).tolist()) - set(closure.upset(b).tolist()) - {b}
        assert not any(closure.leq(m, b) for m in between)


def test_tangent_pair_meets_in_eqc(catalog):
    a, b = tangent_chord_pair(catalog)
    meet = explicit_intersection(catalog, a, b)
    assert meet["order"] == 60 and meet["type"] == "EqC"


def test_triangle_censuses(catalog, closure):
    by = closure.class_by_type()
    c2 = triangle_fix_census(catalog, closure.records[by["C2"]["rep"]], "C2")
    assert c2["self_polar"] == 32 and c2["incidences_ok"]
    assert c2["axis_vertices"] == 16 and c2["triangles_per_axis_vertex"] == [2]
    c3 = triangle_fix_census(catalog, closure.records[by["C3"]["rep"]], "C3")
    assert (c3["self_polar"], c3["frobenius"]) == (5, 10)
    s3 = triangle_fix_census(catalog, closure.records[by["Sym3"]["rep"]], "Sym3")
    assert s3["self_polar"] == 5 and s3["incidences_ok"]
    with pytest.raises(ValueError):
        triangle_fix_census(catalog, closure.records[by["C3"]["rep"]], "M1")


def test_fingerprint_ignores_element_order_and_separates_subgroups(catalog):
    from psu3mobius.maximal_catalog import fingerprint as fp
    T = catalog.table
    for fam in (catalog.families[0], catalog.families[1], catalog.of_kind("M4")[0]):
        els = fam.subgroup.elements
        assert fp(T, els[::-1]) == fp(T, els)
    assert fp(T, catalog.families[0].subgroup.elements) != fp(T, catalog.families[1].subgroup.elements)
    a, b = catalog.of_kind("M4")[:2]
    assert fp(T, a.subgroup.elements) != fp(T, b.subgroup.elements)


def test_closure_rebuild_from_nodes_is_identical(catalog, closure):
    again = ClosurePoset(catalog, [r.elements for r in reversed(closure.records)])
    assert [r.fingerprint for r in again.records] == [r.fingerprint for r in closure.records]


def test_node_budget(catalog):
    with pytest.raises(ResourceError):
        intersection_closure(catalog, budget_nodes=100)
