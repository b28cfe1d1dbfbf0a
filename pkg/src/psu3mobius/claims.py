"""Registry of checked claims and their expected values as functions of q."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Claim:
    id: str
    title: str
    reference: str
    tasks: tuple


CLAIMS = {c.id: c for c in [
    Claim("C01", "geometry", "curve points, tangent/chord sizes, self-polar and Frobenius triangle counts",
          ("geometry",)),
    Claim("C02", "group", "group order, 2-transitivity, element-type census", ("group",)),
    Claim("C03", "maximals", "orders and sizes of the four maximal families", ("maximals",)),
    Claim("C04", "intersection closure", "fifteen types, one class each, normaliser orders", ("maximals",)),
    Claim("C05", "triangle censuses", "triangles stabilised by C_2, C_3 and Sym(3), with incidences",
          ("maximals",)),
    Claim("C06", "mu table", "μ(H, G) per closure type", ("mu",)),
    Claim("C07", "lambda table", "λ(H, G) on the class poset; closure classes inside the full list",
          ("lambda",)),
    Claim("C08", "mu-lambda properties", "μ({1}) = |G| λ({1}) and μ(H) = [N_G(H):H] λ(H) per class",
          ("lambda",)),
    Claim("C09", "euler characteristics", "χ of nontrivial p-subgroup posets, both routes, Brown's congruence",
          ("chi",)),
    Claim("C10", "gaussian telescoping", "alternating q-binomial sum equals -1 for n = 1, 2, 3", ("chi",)),
    Claim("C11", "generation probability", "exact s = 2 value, Monte Carlo agreement, Mann bound", ("mu",)),
    Claim("C12", "determinism", "repeated rendering of the reports is byte-identical", ("mu",)),
    Claim("C13", "stretch q = 16", "curve points, Frobenius triangles and |G| at n = 2", ("geometry",)),
]}


MAXIMAL_KEYS = ("M1", "M2", "M3", "M4")


def mu_expected(q: int) -> dict:
    return {"G": 1, "M1": -1, "M2": -1, "M3": -1, "M4": -1, "EqC": 1, "CCC2": 1,
            "CC": 0, "Cq2m1": 0, "C2q1": 0, "Cq1": 0, "Eq": 0,
            "Sym3": q + 1, "C3": 2 * (q * q - 1) // 3, "C2": -(q ** 3) * (q + 1) // 2, "1": 0}


def lambda_expected() -> dict:
    """λ column of the summary table; every other class has λ = 0."""
    return {"G": 1, "M1": -1, "M2": -1, "M3": -1, "M4": -1, "EqC": 1, "CCC2": 1,
            "Sym3": 1, "C3": 1, "C2": -1}


def lambda_row_statement() -> dict:
    """The row-wise sign rule as stated with the list of nonzero types."""
    first = {"EqC": -1, "CCC2": -1, "Sym3": -1, "C3": -1}
    second = {"M1": 1, "M2": 1, "M3": 1, "M4": 1, "C2": 1}
    return {**first, **second}


FORMULAS = {
    "G": ("q^3(q^3+1)(q^2-1)", "H", "1", "1"),
    "M1": ("q^3(q^2-1)", "H", "-1", "-1"),
    "M2": ("q(q^2-1)(q+1)", "H", "-1", "-1"),
    "M3": ("6(q+1)^2", "H", "-1", "-1"),
    "M4": ("3(q^2-q+1)", "H", "-1", "-1"),
    "EqC": ("q(q^2-1)", "H", "1", "1"),
    "CCC2": ("2(q+1)^2", "H", "1", "1"),
    "CC": ("(q+1)^2", "H⋊Sym(3)", "0", "0"),
    "Cq2m1": ("q^2-1", "H⋊C_2", "0", "0"),
    "C2q1": ("2(q+1)", "E_q×C_{q+1}", "0", "0"),
    "Cq1": ("q+1", "PSL(2,q)×H", "0", "0"),
    "Eq": ("q", "S_2⋊C_{q^2-1}", "0", "0"),
    "Sym3": ("6", "Sym(3)×C_{q+1}", "q+1", "1"),
    "C3": ("3", "C_{q^2-1}⋊C_2", "2(q^2-1)/3", "1"),
    "C2": ("2", "S_2⋊C_{q+1}", "-q^3(q+1)/2", "-1"),
    "1": ("1", "G", "0", "0"),
}

CHI_FORMULAS = {
    "not_dividing": ("0", "0"),
    "p_eq_2": ("q^3+1", "q^3+1"),
    "div_q_plus_1": ("-(q^6-2q^5-q^4+2q^3-3q^2)/3", "-(q^6-2q^5-q^4+2q^3-3q^2)/3"),
    "div_q_minus_1": ("(q^6+q^3)/2", "-(q^6+q^3)/2"),
    "div_q2_q_1": ("-(q^6+q^5-q^4-q^3)/3", "-(q^6+q^5-q^4-q^3)/3"),
}


def verdict(claim_id: str, expected, computed, status: str | None = None, detail: str = "") -> dict:
    if status is None:
        status = "pass" if expected == computed else "fail"
    c = CLAIMS[claim_id]
    return dict(claim=claim_id, title=c.title, reference=c.reference, expected=expected,
                computed=computed, status=status, detail=detail)
