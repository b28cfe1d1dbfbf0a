"""Exact arithmetic in binary fields GF(2^m).

Elements are plain Python ints whose bits are polynomial coefficients over
GF(2).  A :class:`BinaryField` carries the modulus and, for m <= 16, log and
antilog tables; larger fields fall back to carry-less multiplication with
modular reduction.  :class:`FieldElement` is a thin operator-overloading
wrapper for interactive use and tests; the heavy enumerations work on raw
ints through the field object.

The field tower GF(q) < GF(q^2) < GF(q^6) for q = 2^(2^n) is provided by
:func:`field_tower`, with explicit embeddings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

TABLE_MAX_DEGREE = 16


class FieldError(ArithmeticError):
    pass


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit vectors."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _mulmod(a: int, b: int, m: int) -> int:
    return poly_mod(clmul(a, b), m)


def _powmod(a: int, e: int, m: int) -> int:
    r = 1
    a = poly_mod(a, m)
    while e:
        if e & 1:
            r = _mulmod(r, a, m)
        a = _mulmod(a, a, m)
        e >>= 1
    return r


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(m: int) -> bool:
    """Rabin's irreducibility test for a polynomial over GF(2)."""
    d = m.bit_length() - 1
    if d < 1:
        return False
    x = 0b10
    # x^(2^d) == x mod m
    t = x
    for _ in range(d):
        t = _mulmod(t, t, m)
    if t != x:
        return False
    for r in _prime_factors(d):
        t = x
        for _ in range(d // r):
            t = _mulmod(t, t, m)
        if poly_gcd(m, t ^ x) != 1:
            return False
    return True


def is_primitive(m: int) -> bool:
    d = m.bit_length() - 1
    if not is_irreducible(m):
        return False
    order = (1 << d) - 1
    return all(_powmod(0b10, order // r, m) != 1 for r in _prime_factors(order))


@lru_cache(maxsize=None)
def default_modulus(degree: int) -> int:
    """Lexicographically smallest primitive polynomial of the given degree."""
    for tail in range(1, 1 << degree, 2):
        m = (1 << degree) | tail
        if is_primitive(m):
            return m
    raise FieldError(f"no primitive polynomial of degree {degree}")


class BinaryField:
    """GF(2^degree) with a fixed primitive modulus."""

    def __init__(self, degree: int, modulus: int | None = None):
        if degree < 1:
            raise ValueError("degree must be positive")
        if modulus is None:
            modulus = default_modulus(degree)
        if modulus.bit_length() - 1 != degree or not is_irreducible(modulus):
            raise FieldError(f"modulus {modulus:#x} is not irreducible of degree {degree}")
        self.degree = degree
        self.modulus = modulus
        self.order = 1 << degree
        self.mask = self.order - 1
        self.exp = self.log = None
        if degree <= TABLE_MAX_DEGREE:
            self._build_tables()

    def _build_tables(self):
        if not is_primitive(self.modulus):
            # tables need x to generate the multiplicative group
            return
        n = self.order - 1
        exp = np.zeros(2 * n + 2, dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        a = 1
        for i in range(n):
            exp[i] = a
            log[a] = i
            a <<= 1
            if a & self.order:
                a ^= self.modulus
        exp[n:2 * n] = exp[:n]
        self.exp = exp
        self.log = log
        self._exp_list = exp.tolist()
        self._log_list = log.tolist()

    def __repr__(self):
        return f"BinaryField(2^{self.degree}, modulus={self.modulus:#x})"

    def __eq__(self, other):
        return isinstance(other, BinaryField) and (self.degree, self.modulus) == (
            other.degree, other.modulus)

    def __hash__(self):
        return hash((self.degree, self.modulus))

    @property
    def modulus_hex(self) -> str:
        return f"{self.modulus:x}"

    def elements(self):
        return range(self.order)

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element of GF(2^{self.degree})")
        return a

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.exp is not None:
            return self._exp_list[self._log_list[a] + self._log_list[b]]
        return poly_mod(clmul(a, b), self.modulus)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.exp is not None:
            return self._exp_list[(self.order - 1 - self._log_list[a]) % (self.order - 1)]
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self.exp is not None:
            return self._exp_list[(self._log_list[a] * e) % (self.order - 1)]
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def frobenius(self, a: int, k: int = 1) -> int:
        """a^(2^k)."""
        return self.pow(a, 1 << (k % self.degree))

    def generator(self) -> int:
        """A primitive element (x itself, since the modulus is primitive)."""
        if is_primitive(self.modulus):
            return 0b10
        n = self.order - 1
        for g in range(2, self.order):
            if all(self.pow(g, n // r) != 1 for r in _prime_factors(n)):
                return g
        raise FieldError("no generator")

    def element_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        n = self.order - 1
        o = n
        for r in _prime_factors(n):
            while o % r == 0 and self.pow(a, o // r) == 1:
                o //= r
        return o

    def subfield(self, sub_degree: int) -> list[int]:
        """Elements of the subfield GF(2^sub_degree), sorted."""
        if self.degree % sub_degree:
            raise ValueError("not a subfield degree")
        return sorted(a for a in range(self.order) if self.frobenius(a, sub_degree) == a)

    # vectorised helpers (tables required)

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.exp is None:
            raise FieldError("vectorised arithmetic needs log tables")
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        out = self.exp[(self.log[a] * e) % (self.order - 1)]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(self.order - 1 - self.log[a]) % (self.order - 1)]


@dataclass(frozen=True)
class FieldElement:
    """An element of a :class:`BinaryField` with operator overloading."""

    field: BinaryField
    value: int

    def __post_init__(self):
        self.field.check(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise TypeError("operands live in different fields")
            return other.value
        if isinstance(other, int) and other in (0, 1):
            return other
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def __add__(self, other):
        return FieldElement(self.field, self.value ^ self._other(other))

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"<{self.value:#x} in GF(2^{self.field.degree})>"


@dataclass(frozen=True)
class FieldSpec:
    """One level of the tower: GF(2^(2^n * k)), k in {1, 2, 6}."""

    n: int
    k: int
    field: BinaryField = field(compare=False)

    @property
    def degree_over_prime(self) -> int:
        return self.field.degree

    @property
    def modulus(self) -> int:
        return self.field.modulus


class FieldTower:
    """GF(q) < GF(q^2) < GF(q^6) with q = 2^(2^n).

    GF(q) is realised inside GF(q^2) as the fixed field of x -> x^q, and
    GF(q^2) is embedded into GF(q^6) by sending a root of the GF(q^2)
    modulus to a chosen root of the same polynomial in GF(q^6).
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.e = 1 << n          # log2 q
        self.q = 1 << self.e
        self.F2 = BinaryField(2 * self.e)
        self.F6 = BinaryField(6 * self.e)
        self.specs = {
            2: FieldSpec(n, 2, self.F2),
            6: FieldSpec(n, 6, self.F6),
        }
        self.Fq = sorted(a for a in range(self.F2.order) if self.conj(a) == a)
        self._emb = self._build_embedding()
        self._emb_inv = {v: i for i, v in enumerate(self._emb)}

    def _build_embedding(self) -> list[int]:
        F2, F6 = self.F2, self.F6
        m = F2.modulus
        d = F2.degree
        # roots of m lie in the unique subfield of order q^2 (order-(q^2-1) elements)
        step = (F6.order - 1) // (F2.order - 1)
        g6 = F6.generator()
        root = None
        for k in range(1, F2.order - 1):
            cand = F6.pow(g6, step * k)
            acc = 0
            power = 1
            for i in range(d + 1):
                if (m >> i) & 1:
                    acc ^= power
                power = F6.mul(power, cand)
            if acc == 0:
                root = cand
                break
        if root is None:
            raise FieldError("GF(q^2) modulus has no root in GF(q^6)")
        # a = sum bits_i x^i  ->  sum bits_i root^i
        powers = [1]
        for _ in range(d - 1):
            powers.append(F6.mul(powers[-1], root))
        emb = []
        for a in range(F2.order):
            v = 0
            for i in range(d):
                if (a >> i) & 1:
                    v ^= powers[i]
            emb.append(v)
        return emb

    # GF(q^2) maps

    def conj(self, x: int) -> int:
        """x -> x^q on GF(q^2)."""
        return self.F2.pow(x, self.q)

    def norm(self, x: int) -> int:
        return self.F2.pow(x, self.q + 1)

    def trace(self, x: int) -> int:
        return x ^ self.conj(x)

    def embed(self, x: int) -> int:
        """GF(q^2) -> GF(q^6)."""
        return self._emb[x]

    def restrict(self, y: int) -> int:
        """Inverse of :meth:`embed`; raises if y is not in the image."""
        try:
            return self._emb_inv[y]
        except KeyError:
            raise ValueError(f"{y:#x} does not lie in GF(q^2)") from None

    def in_subfield2(self, y: int) -> bool:
        return y in self._emb_inv

    def manifest(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "GF(q^2)": {"degree": self.F2.degree, "modulus": self.F2.modulus_hex},
            "GF(q^6)": {"degree": self.F6.degree, "modulus": self.F6.modulus_hex},
        }


def field_arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch ``add``/``mul``/``inv``/``pow``; ``pow`` takes an int exponent as ``b``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a ** int(b)
    raise ValueError(f"unknown operation {op!r}")


@lru_cache(maxsize=None)
def field_tower(n: int) -> FieldTower:
    return FieldTower(n)
