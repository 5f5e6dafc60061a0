"""The symmetrising trace: tau(h) is the coefficient of 1 when h is written in
a good basis.  Gram matrices, the cyclic closed form, the vanishing
conditions on T_{w^-1} pi and the parabolic criterion tau(s^j) = 0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import flint

from .engine import MulTable, ReducedElement, build_mul_table, cyclic_basis, element_inverse, multiply, reduce
from .presentations import a_name, registry_get
from .rings import LaurentPoly, lp_is_unit
from .verify import determinant
from .words import Word


def tau(el: ReducedElement) -> LaurentPoly:
    """Coordinate of el at the basis word 1 (index 0)."""
    return el[0]


@dataclass
class GramReport:
    matrix: list
    symmetric: bool
    determinant: LaurentPoly
    unit: bool
    asymmetric: list
    seconds: float = 0.0

    @property
    def verdict(self):
        return "PASS" if self.symmetric and self.unit else "FAIL"

    def report(self) -> dict:
        return {"check": "gram", "size": len(self.matrix), "symmetric": self.symmetric,
                "determinant": str(self.determinant), "unit": self.unit,
                "asymmetric": self.asymmetric[:10], "verdict": self.verdict,
                "matrix": [[str(x) for x in row] for row in self.matrix] if len(self.matrix) <= 24 else None}


def gram_matrix(table: MulTable) -> GramReport:
    """A = (tau(b_i b_j)), its symmetry and determinant."""
    t0 = time.perf_counter()
    N = len(table.basis)
    d = table.domain
    raw = [[None] * N for _ in range(N)]
    if table.mode == "modular":
        # slice i of the word tensor is b_i acting on the basis; its row 0 holds tau
        T = table.word_tensor()
        for i in range(N):
            for j in range(N):
                x = T[i, 0, j] if table.side == "left" else T[j, 0, i]
                raw[i][j] = flint.nmod(int(x), d.p)
    else:
        for i in range(N):
            bi = table.basis_element(i)
            for j in range(N):
                raw[i][j] = multiply(bi, table.basis_element(j)).data.get(0, d.zero)
    asym = [(i, j) for i in range(N) for j in range(i + 1, N) if raw[i][j] != raw[j][i]]
    cols = [{i: raw[i][j] for i in range(N) if raw[i][j]} for j in range(N)]
    det = determinant(cols, d)
    unit = bool(det) if table.mode == "modular" else lp_is_unit(det)
    M = [[d.to_lp(x) for x in row] for row in raw]
    return GramReport(M, not asym, det, unit, asym, time.perf_counter() - t0)


def cyclic_gram_closed_form(d: int, coords: str = "a") -> LaurentPoly:
    """(-1)^((d-1)(d-2)/2) a_0^(d-1) for the cyclic group of order d."""
    if d < 2:
        raise ValueError("d must be >= 2")
    sign = -1 if ((d - 1) * (d - 2) // 2) % 2 else 1
    val = LaurentPoly.var(a_name("s", 0), exp=d - 1) * sign
    if coords == "u":
        return val.substitute(registry_get("C%d" % d).a_to_u())
    if coords != "a":
        raise ValueError("coords must be 'a' or 'u'")
    return val


def cyclic_gram(d: int, coords: str = "a") -> dict:
    p = registry_get("C%d" % d)
    t0 = time.perf_counter()
    table = build_mul_table(p, cyclic_basis(d), coords=coords)
    g = gram_matrix(table)
    closed = cyclic_gram_closed_form(d, coords)
    ok = g.determinant == closed and g.symmetric
    rep = g.report()
    rep.update({"check": "cyclic_gram", "d": d, "closed_form": str(closed), "matches": g.determinant == closed,
                "verdict": "PASS" if ok and g.unit else "FAIL", "seconds": round(time.perf_counter() - t0, 3)})
    return rep


def check_condition3(p, basis=None, table: MulTable | None = None) -> dict:
    """tau(b^-1 z^c) = 0 for every basis word b != 1, with T_pi = z^c."""
    if isinstance(p, str):
        p = registry_get(p)
    table = table or build_mul_table(p, basis)
    zpi = reduce(p.center_word ** p.pi_power, table)
    failures = []
    words = table.basis.words
    for j in range(1, len(words)):
        v = tau(multiply(element_inverse(words[j], table), zpi))
        if v:
            failures.append((str(words[j]), str(v)))
    return {"check": "condition3", "group": p.name, "basis": table.basis.name, "mode": table.mode,
            "checked": len(words) - 1, "failures": failures[:10], "nonvanishing": len(failures),
            "verdict": "FAIL" if failures else "PASS"}


def check_parabolic_crit(p, table: MulTable | None = None, s: str | None = None) -> dict:
    """tau(s^j) = 0 for j = 1..e-1."""
    if isinstance(p, str):
        p = registry_get(p)
    table = table or build_mul_table(p)
    s = s or p.generators[0]
    if s not in p.generators:
        raise ValueError("unknown generator %s" % s)
    vals = []
    for j in range(1, p.order(s)):
        vals.append((j, str(tau(reduce(Word([(s, j)]), table)))))
    ok = all(v == "0" for _, v in vals)
    return {"check": "parabolic_crit", "group": p.name, "generator": s, "tau": vals,
            "verdict": "PASS" if ok else "FAIL"}


def class_representatives(p) -> list:
    """One generator per hyperplane orbit."""
    seen, out = set(), []
    for g in p.generators:
        if p.orbit_of[g] not in seen:
            seen.add(p.orbit_of[g])
            out.append(g)
    return out
