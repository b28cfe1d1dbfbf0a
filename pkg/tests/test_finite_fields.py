import pytest
from hypothesis import given, settings, strategies as st

from psu3mobius.finite_fields import (BinaryField, FieldTower, clmul, is_irreducible,
                                      is_primitive, poly_mod)


def slow_polymul(a, b):
    """Schoolbook product over GF(2) on coefficient lists."""
    out = 0
    i = 0
    while b >> i:
        if (b >> i) & 1:
            out ^= a << i
        i += 1
    return out


def slow_mod(a, m):
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


@given(st.integers(0, 2 ** 40), st.integers(0, 2 ** 40))
def test_clmul_matches_schoolbook(a, b):
    assert clmul(a, b) == slow_polymul(a, b)


@given(st.integers(0, 2 ** 30), st.integers(2, 2 ** 12))
def test_poly_mod(a, m):
    assert poly_mod(a, m) == slow_mod(a, m)


def test_irreducibles_of_degree_4():
    # brute force: no factor of degree 1 or 2
    def reducible(m):
        return any(slow_mod(m, d) == 0 for d in range(2, 8))
    found = [m for m in range(16, 32) if not reducible(m)]
    assert found == [m for m in range(16, 32) if is_irreducible(m)]
    assert found == [0b10011, 0b11001, 0b11111]


def test_primitive_excludes_x4_x3_x2_x_1():
    assert is_primitive(0b10011)
    assert not is_primitive(0b11111)  # x^5 = 1 in that field


@pytest.mark.parametrize("degree", [2, 3, 4, 6])
def test_field_axioms_exhaustive(degree):
    F = BinaryField(degree)
    els = list(range(F.order))
    for a in els:
        assert F.mul(a, 1) == a and F.mul(a, 0) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in els[: min(F.order, 16)]:
            assert F.mul(a, b) == F.mul(b, a)
            assert F.mul(a, b) == slow_mod(slow_polymul(a, b), F.modulus)


@settings(max_examples=200)
@given(st.integers(0, 4095), st.integers(0, 4095), st.integers(0, 4095))
def test_gf4096_distributive_and_associative(a, b, c):
    F = BinaryField(12)
    assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        BinaryField(4).inv(0)


def test_generator_has_full_order():
    F = BinaryField(12)
    g = F.generator()
    assert F.element_order(g) == 4095
    assert len({F.pow(g, k) for k in range(4095)}) == 4095


def test_vectorised_ops_agree():
    import numpy as np
    F = BinaryField(8)
    a = np.arange(256)
    b = (a * 37 + 11) % 256
    assert F.vmul(a, b).tolist() == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    nz = a[1:]
    assert F.vmul(F.vinv(nz), nz).tolist() == [1] * 255


@pytest.fixture(scope="module")
def tower():
    return FieldTower(1)


def test_tower_sizes(tower):
    assert tower.q == 4 and tower.F2.order == 16 and tower.F6.order == 4096
    assert len(tower.Fq) == 4


def test_norm_and_trace_land_in_gfq_and_are_onto(tower):
    Fq = set(tower.Fq)
    norms = {tower.norm(x) for x in range(1, 16)}
    traces = {tower.trace(x) for x in range(16)}
    assert norms == Fq - {0}
    assert traces == Fq


def test_norm_multiplicative_trace_additive(tower):
    F = tower.F2
    for a in range(16):
        for b in range(16):
            assert tower.norm(F.mul(a, b)) == F.mul(tower.norm(a), tower.norm(b))
            assert tower.trace(a ^ b) == tower.trace(a) ^ tower.trace(b)


def test_each_norm_value_has_q_plus_1_preimages(tower):
    from collections import Counter
    c = Counter(tower.norm(x) for x in range(1, 16))
    assert set(c.values()) == {tower.q + 1}


def test_embedding_is_a_field_homomorphism(tower):
    F2, F6 = tower.F2, tower.F6
    for a in range(16):
        for b in range(16):
            assert tower.embed(F2.mul(a, b)) == F6.mul(tower.embed(a), tower.embed(b))
            assert tower.embed(a ^ b) == tower.embed(a) ^ tower.embed(b)
    image = {tower.embed(a) for a in range(16)}
    assert image == {y for y in range(4096) if F6.pow(y, 16) == y}
    assert all(tower.restrict(tower.embed(a)) == a for a in range(16))


def test_manifest_records_moduli_as_hex(tower):
    m = tower.manifest()
    assert int(m["GF(q^2)"]["modulus"], 16) == tower.F2.modulus
    assert m["GF(q^6)"]["degree"] == 12


def test_tower_rejects_n0():
    with pytest.raises(ValueError):
        FieldTower(0)
