"""Basis certificates.

A set of |W| elements is a basis of H(W) iff the matrix expressing it in a
known basis has unit determinant (H(W) is free of rank |W|, so spanning
suffices).  Exact determinants use fraction-free elimination; modular
screening evaluates the matrix at random parameter points instead.
"""

from __future__ import annotations

import bisect
import time
from dataclasses import dataclass, field

import flint
import numpy as np

from ._enumerate import DEFAULT_PRIMES, BadPoint, enumerate_points, vdet, vinv, vmatvec
from .engine import (
    FlintDomain, LPDomain, ModDomain, MulTable, TableMismatch, _opposite, reduce, reference_basis,
)
from .presentations import Presentation, a_name, registry_get, u_name
from .rings import ZZ, LaurentPoly, lp_is_unit
from .words import Word


class DeterminantError(ArithmeticError):
    pass


@dataclass
class ChangeOfBasis:
    columns: list                  # candidate j as {i: native scalar}
    table: MulTable
    determinant: LaurentPoly | None
    verdict: str
    mode: str
    first_row: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    seconds: float = 0.0

    def matrix(self) -> list:
        """Dense M with M[i][j] = coordinate of candidate j at reference word i."""
        d = self.table.domain
        n = len(self.columns)
        return [[d.to_lp(self.columns[j].get(i, d.zero)) for j in range(n)] for i in range(n)]

    def report(self) -> dict:
        return {"check": "change_of_basis", "mode": self.mode, "verdict": self.verdict,
                "determinant": None if self.determinant is None else str(self.determinant),
                "witnesses": self.witnesses, "first_row": [str(x) for x in self.first_row],
                "seconds": round(self.seconds, 3)}


# ---------------------------------------------------------------------------
# determinants


def det_bareiss(M: list) -> LaurentPoly:
    """Exact determinant of a square LaurentPoly matrix.

    Every row is first multiplied by a monomial so that all exponents are
    non-negative; the product of those monomials is divided out at the end.
    """
    n = len(M)
    if any(len(r) != n for r in M):
        raise DeterminantError("matrix is not square")
    if n == 0:
        return LaurentPoly.const(1)
    ring = M[0][0].ring
    A = []
    shift = LaurentPoly.const(1, ring)
    for row in M:
        low = {}
        for x in row:
            for v, e in x.min_exponents().items():
                low[v] = min(low.get(v, 0), e)
        mono = tuple(sorted((v, -e) for v, e in low.items() if e < 0))
        A.append([x.shift(mono) for x in row])
        shift = shift * LaurentPoly.monomial(mono, 1, ring)
    sign = 1
    prev = LaurentPoly.const(1, ring)
    for k in range(n - 1):
        if not A[k][k]:
            r = next((i for i in range(k + 1, n) if A[i][k]), None)
            if r is None:
                return LaurentPoly.const(0, ring)
            A[k], A[r] = A[r], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                try:
                    A[i][j] = num.divexact(prev)
                except ArithmeticError as exc:
                    raise DeterminantError("Bareiss division failed: %s" % exc) from None
            A[i][k] = LaurentPoly.const(0, ring)
        prev = A[k][k]
    det = A[n - 1][n - 1] * sign
    return det.divexact(shift)


def det_cofactor(M: list) -> LaurentPoly:
    """Laplace expansion along the first row; for small matrices and testing."""
    n = len(M)
    if n == 0:
        return LaurentPoly.const(1)
    if n == 1:
        return M[0][0]
    out = M[0][0].zero()
    for j in range(n):
        if not M[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        t = M[0][j] * det_cofactor(minor)
        out = out + t if j % 2 == 0 else out - t
    return out


def _is_unit_scalar(x):
    return x == 1 or x == -1


def det_sparse(cols: list, one, zero, is_unit=_is_unit_scalar, divexact=None):
    """Determinant of the matrix with the given sparse columns.

    Pivots on unit entries first (no growth, no division), sparsest column
    first, then runs Bareiss on whatever dense residue is left.
    """
    n = len(cols)
    cols = {j: dict(c) for j, c in enumerate(cols) if c}
    if len(cols) < n:
        return zero
    divexact = divexact or (lambda a, b: a / b)
    row_cols = {}
    for j, c in cols.items():
        for i in c:
            row_cols.setdefault(i, set()).add(j)
    alive_r = sorted(set(range(n)))
    alive_c = sorted(set(range(n)))
    det = one
    sign = 1
    while True:
        best = None
        for j in alive_c:
            c = cols[j]
            if best is not None and len(c) >= best[0]:
                continue
            for i, x in c.items():
                if is_unit(x):
                    best = (len(c), i, j)
                    break
        if best is None:
            break
        _, pi, pj = best
        piv = cols[pj][pi]
        ri = bisect.bisect_left(alive_r, pi)
        cj = bisect.bisect_left(alive_c, pj)
        if (ri + cj) % 2:
            sign = -sign
        det = det * piv
        pcol = cols.pop(pj)
        alive_c.pop(cj)
        alive_r.pop(ri)
        # column operations: c_j -= (c_j[pi] / piv) * pcol for every column meeting row pi
        for j in list(row_cols.get(pi, ())):
            if j == pj or j not in cols:
                continue
            c = cols[j]
            f = c.pop(pi) * piv        # piv = +-1, so 1/piv = piv
            for i, x in pcol.items():
                if i == pi:
                    continue
                y = c.get(i)
                v = -f * x if y is None else y - f * x
                if v:
                    c[i] = v
                    row_cols.setdefault(i, set()).add(j)
                else:
                    c.pop(i, None)
                    row_cols.get(i, set()).discard(j)
            if not c:
                return zero
        for i in pcol:
            row_cols.get(i, set()).discard(pj)
        row_cols.pop(pi, None)
        if not alive_c:
            break
    m = len(alive_c)
    if m == 0:
        return det * sign
    rpos = {r: k for k, r in enumerate(alive_r)}
    A = [[zero] * m for _ in range(m)]
    for k, j in enumerate(alive_c):
        for i, x in cols[j].items():
            A[rpos[i]][k] = x
    prev = one
    for k in range(m - 1):
        nz = [i for i in range(k, m) if A[i][k]]
        if not nz:
            return zero
        r = min(nz, key=lambda i: len(A[i][k]) if hasattr(A[i][k], "__len__") else 0)
        if r != k:
            A[k], A[r] = A[r], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, m):
            aik = A[i][k]
            for j in range(k + 1, m):
                num = A[i][j] * akk - aik * A[k][j]
                A[i][j] = divexact(num, prev) if num else zero
        prev = akk
    return det * A[m - 1][m - 1] * sign


def _det_laurent_columns(cols: list, ring):
    """LaurentPoly columns: shift to polynomials, eliminate in flint, shift back."""
    if ring != ZZ:
        n = len(cols)
        M = [[cols[j].get(i, LaurentPoly.const(0, ring)) for j in range(n)] for i in range(n)]
        return det_bareiss(M)
    names = sorted({v for c in cols for x in c.values() for v in x.variables()})
    if not names:
        dom = None
    shifted = []
    total = {}
    for c in cols:
        low = {}
        for x in c.values():
            for v, e in x.min_exponents().items():
                low[v] = min(low.get(v, 0), e)
        mono = tuple(sorted((v, -e) for v, e in low.items() if e < 0))
        for v, e in mono:
            total[v] = total.get(v, 0) + e
        shifted.append({i: x.shift(mono) for i, x in c.items()})
    if not names:
        vals = [{i: int(x.constant_term()) for i, x in c.items()} for c in shifted]
        dom = FlintDomain(["_t"])
        fl = [{i: dom.ctx.constant(v) for i, v in c.items()} for c in vals]
    else:
        dom = FlintDomain(names)
        fl = [{i: dom.from_lp(x) for i, x in c.items()} for c in shifted]
    d = det_sparse(fl, dom.one, dom.zero)
    det = dom.to_lp(d)
    mono = tuple(sorted((v, -e) for v, e in total.items() if e))
    return det.shift(mono)


def determinant(cols: list, domain) -> LaurentPoly:
    """Determinant of native sparse columns, returned as a LaurentPoly."""
    if isinstance(domain, FlintDomain):
        return domain.to_lp(det_sparse(cols, domain.one, domain.zero))
    if isinstance(domain, ModDomain):
        n = len(cols)
        m = flint.nmod_mat(n, n, [int(cols[j].get(i, 0)) for i in range(n) for j in range(n)], domain.p)
        return LaurentPoly.const(int(m.det()), domain.ring)
    return _det_laurent_columns(cols, domain.ring)


# ---------------------------------------------------------------------------
# change of basis


def change_of_basis(candidate: list, table: MulTable) -> ChangeOfBasis:
    t0 = time.perf_counter()
    p = table.presentation
    words = [p.parse(w) if isinstance(w, str) else Word(w) for w in candidate]
    if len(words) != len(table.basis):
        raise TableMismatch("candidate has %d elements, |W| = %d" % (len(words), len(table.basis)))
    cols = [reduce(w, table).data for w in words]
    d = table.domain
    first = [d.to_lp(c.get(0, d.zero)) for c in cols]
    det = determinant(cols, d)
    if table.mode == "modular":
        ok = bool(det)
        wit = [{"p": d.p, "nonzero": ok}]
        verdict = "PASS" if ok else "FAIL"
        return ChangeOfBasis(cols, table, det, verdict, "modular", first, wit, time.perf_counter() - t0)
    ok = lp_is_unit(det)
    return ChangeOfBasis(cols, table, det, "PASS" if ok else "FAIL", "exact", first, [],
                         time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# modular screening


def random_hecke_arrays(p: Presentation, prime: int, n: int, rng):
    """Hecke coefficients at n random points with nonzero u values."""
    out = {}
    for o in p.orbits:
        e = p.order_of_orbit[o]
        us = [rng.integers(1, prime, n) for _ in range(e)]
        # coefficients of prod (x - u_j) = x^e - sum a_i x^i
        poly = [np.ones(n, dtype=np.int64)]          # leading first
        for u in us:
            nxt = [np.zeros(n, dtype=np.int64) for _ in range(len(poly) + 1)]
            for i, c in enumerate(poly):
                nxt[i] = (nxt[i] + c) % prime
                nxt[i + 1] = (nxt[i + 1] - c * u) % prime
            poly = nxt
        # poly[e - i] is the coefficient of x^i; a_i = -poly[e - i]
        out[o] = [(-poly[e - i]) % prime for i in range(e)]
    return {g: out[p.orbit_of[g]] for g in p.generators}


class _Screen:
    def __init__(self, p, basis_words, hecke, prime):
        self.p = p
        self.prime = prime
        self.hecke = hecke
        E = enumerate_points(p.generators, hecke, p.braid_relations, basis_words, prime)
        self.D = E.dense()
        self.n = E.n
        self.N = E.nbasis
        self.a0inv = {g: vinv(a[0], prime) for g, a in hecke.items()}
        self.cache = {}

    def act(self, g, s, v):
        P = self.prime
        if s > 0:
            return vmatvec(self.D[g], v, P)
        a = self.hecke[g]
        e = len(a)
        pw = [v]
        for _ in range(e - 1):
            pw.append(vmatvec(self.D[g], pw[-1], P))
        out = pw[e - 1].copy()
        for i in range(e - 1):
            out = (out - a[i + 1][:, None] * pw[i] % P) % P
        return out * self.a0inv[g][:, None] % P

    def word(self, w):
        seq = tuple(Word(w).letters())[::-1]
        v = np.zeros((self.n, self.N), dtype=np.int64)
        v[:, 0] = 1
        start = 0
        for i in range(len(seq), 0, -1):
            hit = self.cache.get(seq[:i])
            if hit is not None:
                v, start = hit, i
                break
        for i in range(start, len(seq)):
            v = self.act(*seq[i], v)
            self.cache[seq[:i + 1]] = v
        return v


def modular_screen(candidate: list, p, trials: int = 20, primes=None, seed: int = 0,
                   basis=None) -> dict:
    """Determinant of the change of basis at random points over each prime.

    ``p`` is a Presentation, a group name or a MulTable (its presentation
    and basis are used).  The first row (coefficient of 1) is screened too:
    an entry that is nonzero at some point is certainly nonzero.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if isinstance(p, MulTable):
        basis = basis or p.basis
        p = p.presentation
    elif isinstance(p, str):
        p = registry_get(p)
    basis = basis or reference_basis(p)
    primes = list(primes or DEFAULT_PRIMES)
    words = [p.parse(w) if isinstance(w, str) else Word(w) for w in candidate]
    if len(words) != len(basis):
        raise TableMismatch("candidate has %d elements, |W| = %d" % (len(words), len(basis)))
    rng = np.random.default_rng(seed)
    witnesses = []
    tau_nonzero = np.zeros(len(words), dtype=bool)
    tau_one = np.ones(len(words), dtype=bool)
    t0 = time.perf_counter()
    for prime in primes:
        for _ in range(20):
            hecke = random_hecke_arrays(p, prime, trials, rng)
            try:
                S = _Screen(p, list(basis.words), hecke, prime)
                break
            except BadPoint:
                continue
        else:
            raise DeterminantError("no usable points modulo %d" % prime)
        M = np.zeros((trials, S.N, S.N), dtype=np.int64)
        for j, w in enumerate(words):
            M[:, :, j] = S.word(w)
        det = vdet(M, prime)
        nz = det != 0
        witnesses.append({"p": prime, "trials": trials, "nonzero": int(nz.sum())})
        first = M[:, 0, :]
        tau_nonzero |= (first != 0).any(axis=0)
        tau_one &= (first == 1).all(axis=0)
    ok = all(w["nonzero"] == w["trials"] for w in witnesses)
    offending = []
    for j, w in enumerate(words):
        if len(w) == 0:
            if not tau_one[j]:
                offending.append((str(w), "not 1"))
        elif tau_nonzero[j]:
            offending.append((str(w), "nonzero"))
    return {"check": "modular_screen", "verdict": "PASS" if ok else "FAIL", "probabilistic": True,
            "witnesses": witnesses, "good": not offending, "offending": offending,
            "seconds": round(time.perf_counter() - t0, 3)}


# ---------------------------------------------------------------------------
# group specialisation


def _specialize_entry(x: LaurentPoly, table: MulTable, smap):
    if table.coords.startswith("reduced") or table.coords == "a":
        vals = {}
        for v in x.variables():
            vals[v] = 1 if v.endswith("_0") else 0
        return x.evaluate(vals, ZZ)
    y = smap(x)
    if not y.is_constant():
        raise TableMismatch("entry did not specialise to a constant")
    return y.constant_term()


def specialized_permutations(table: MulTable) -> dict:
    """g -> list perm with g*b_j = b_perm[j] after u_{C,j} -> exp(2 pi i j / e_C)."""
    if table.mode != "exact":
        raise TableMismatch("group specialisation needs an exact table")
    p = table.presentation
    smap = p.group_specialization() if table.coords == "u" else None
    one = (smap.target.one() if smap else 1)
    perms = {}
    for g in p.generators:
        perm = []
        for j, row in enumerate(table.rows[g]):
            vals = {}
            for k, x in row.items():
                y = _specialize_entry(table.domain.to_lp(x), table, smap)
                if y != 0 and y != (smap.target.zero() if smap else 0):
                    vals[k] = y
            if len(vals) != 1 or next(iter(vals.values())) != one:
                raise TableMismatch("row %d of %s is not a standard unit vector after specialisation" % (j, g))
            perm.append(next(iter(vals)))
        perms[g] = perm
    return perms


def group_specialization_check(p, basis=None, table: MulTable | None = None) -> dict:
    """Specialise to the group algebra and check that the basis becomes W."""
    from .engine import build_mul_table
    if isinstance(p, str):
        p = registry_get(p)
    table = table or build_mul_table(p, basis, mode="exact")
    try:
        perms = specialized_permutations(table)
    except TableMismatch as exc:
        return {"check": "group_specialization", "group": p.name, "verdict": "FAIL", "reason": str(exc)}
    N = len(table.basis)
    inv_perm = {g: np.argsort(np.array(pm)) for g, pm in perms.items()}
    P = {g: np.array(pm) for g, pm in perms.items()}

    def act_word(w, idx):
        letters = list(Word(w).letters())
        if table.side == "left":
            letters.reverse()
        for g, s in letters:
            idx = P[g][idx] if s > 0 else inv_perm[g][idx]
        return idx

    allidx = np.arange(N)
    # product table: T[i, j] = index of b_i b_j
    T = np.zeros((N, N), dtype=np.int64)
    for i, w in enumerate(table.basis.words):
        if table.side == "left":
            T[i, :] = act_word(w, allidx)
        else:
            T[:, i] = act_word(w, allidx)
    issues = []
    if not all(sorted(T[i]) == list(range(N)) for i in range(N)):
        issues.append("rows of the product table are not permutations")
    if not (T[0] == allidx).all() or not (T[:, 0] == allidx).all():
        issues.append("basis word 0 is not the identity")
    # (b_i b_j) b_k == b_i (b_j b_k)
    lhs = T[T[:, :, None], allidx[None, None, :]]
    rhs = T[allidx[:, None, None], T[None, :, :]]
    if not (lhs == rhs).all():
        issues.append("specialised multiplication is not associative")
    has_inv = all((T[i] == 0).any() for i in range(N))
    if not has_inv:
        issues.append("some element has no inverse")
    gens_idx = {g: int(act_word(Word([(g, 1)]), np.array([0]))[0]) for g in p.generators}
    center = [i for i in range(N) if all(T[i, gi] == T[gi, i] for gi in gens_idx.values())]
    # order of the generated group: closure of the generators under T
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for gi in gens_idx.values():
                y = int(T[x, gi])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    if len(seen) != p.group_order:
        issues.append("generated group has order %d, expected %d" % (len(seen), p.group_order))
    if len(center) != p.center_order:
        issues.append("center has order %d, presentation says %d" % (len(center), p.center_order))
    return {"check": "group_specialization", "group": p.name, "basis": table.basis.name,
            "group_order": len(seen), "center_order": len(center),
            "verdict": "FAIL" if issues else "PASS", "issues": issues}
