import numpy as np
import pytest

from psu3mobius.moebius import defining_identity_holds, mobius_dual_check, mu_table
from psu3mobius.subgroup_classes import (audit_catalog, brute_force_leq, cyclic_subgroup_count,
                                         derived_subgroup, enumerate_all_classes, is_solvable,
                                         lambda_table, overgroup_sum)


def test_class_count_and_class_equation(classes, table):
    C = classes.classes
    assert len(C) == 34
    assert sum(c.class_size for c in C) == 31373
    assert all(c.class_size * c.normalizer_order == table.size for c in C)


def test_cyclic_subgroups_by_direct_listing(classes, table):
    cyc = set()
    for g in range(table.size):
        H = [0]
        x = g
        while x != 0:
            H.append(x)
            x = int(table.mul(x, g))
        cyc.add(tuple(sorted(H)))
    assert len(cyc) == cyclic_subgroup_count(table) == 12482
    found = sum(c.class_size for c in classes.classes
                if int(table.orders[c.elements].max()) == c.order)
    assert found == 12482


def test_every_class_is_a_subgroup(classes, table):
    rng = np.random.default_rng(0)
    for c in classes.classes:
        m = c.mask(table.size)
        a, b = rng.choice(c.elements, 40), rng.choice(c.elements, 40)
        assert m[table.mul(a, b)].all()
        assert np.array_equal(np.sort(table.closure(c.generators)), c.elements)


def test_nonsolvable_classes(classes, table):
    bad = sorted(c.order for c in classes.classes if not c.solvable)
    assert bad == [60, 300, 62400]
    a5 = next(c for c in classes.classes if c.order == 60 and not c.solvable)
    assert a5.class_size == 208
    assert len(derived_subgroup(table, a5.elements)) == 60
    assert not is_solvable(table, a5.elements)


def test_lambda_values(class_poset):
    lam = class_poset.lam()
    rows = lambda_table(class_poset, lam)
    nonzero = {r["type"]: r["lam"] for r in rows if r["lam"]}
    assert nonzero == {"G": 1, "M1": -1, "M2": -1, "M3": -1, "M4": -1, "EqC": 1, "CCC2": 1,
                       "Sym3": 1, "C3": 1, "C2": -1}
    assert mobius_dual_check(class_poset.table, lam)
    assert defining_identity_holds(class_poset.table, lam)


def test_full_lattice_mu_matches_closure(class_poset, closure, mu):
    full = class_poset.full_mu()
    by_type = {r.type: r.mu for r in mu_table(closure, mu)}
    for c in class_poset.catalog.classes:
        assert full[c.class_id] == by_type.get(c.type, 0)


def test_overgroup_sums_vanish(class_poset):
    full = class_poset.full_mu()
    for c in class_poset.catalog.classes:
        if c.type in ("C2", "C3", "Sym3", "1"):
            assert overgroup_sum(class_poset, full, c.class_id) == 0


def test_audit_against_closure_and_brute_force(classes, closure, class_poset):
    audit = audit_catalog(classes, closure, class_poset, pairs=25, seed=4)
    assert audit["closure_classes_found"], audit["closure_mismatches"]
    assert audit["containment_mismatches"] == 0
    assert audit["class_equation_ok"] and audit["solvable_ok"]


def test_brute_force_leq_examples(classes, table):
    C = {c.type: c for c in classes.classes if c.type}
    assert brute_force_leq(table, C["C2"], C["Sym3"])
    # orders divide but no conjugate fits
    assert not brute_force_leq(table, C["Sym3"], C["M1"])
    assert not brute_force_leq(table, C["Cq2m1"], C["M3"])


def test_relabel_is_deterministic(group, classes):
    again = enumerate_all_classes(group)
    key = lambda cat: [(c.order, c.class_size, c.type) for c in cat.classes]
    assert key(again) == key(classes)


def test_refuses_q16():
    from psu3mobius.bsgs import ResourceError
    from psu3mobius.group_engine import PSU3
    with pytest.raises(ResourceError):
        enumerate_all_classes(PSU3(2))
