"""Vectorised enumeration of the left regular representation over F_p.

The algebra is evaluated at ``n`` parameter points at once: every scalar is a
numpy int64 array of length ``n`` holding residues modulo a prime below 2^31,
so products fit in 64 bits.

The procedure is coset enumeration for modules.  Symbols stand for elements
of the algebra; symbol 0 is the identity and symbols 1..N-1 are seeded by the
basis words.  The action of each generator on symbols is recorded lazily,
creating new symbols for unknown images.  Each live symbol is then scanned:
the Hecke relation and every braid relation applied to it yield linear
relations among symbols, which are solved by pivoting on the newest symbol.
When only the basis symbols remain alive, the recorded actions are the left
multiplication matrices in the basis.
"""

from __future__ import annotations

import numpy as np

DEFAULT_PRIMES = (2147483629, 2147483587, 2147483579)
SYMBOL_BUDGET = 200000


class BadPoint(ArithmeticError):
    """A pivot vanished at some (but not all) evaluation points."""

    def __init__(self, where):
        super().__init__("pivot vanishes at %d point(s)" % len(where))
        self.where = where


class EnumerationFailed(RuntimeError):
    pass


def vinv(a, p):
    """Elementwise inverse modulo p by Fermat."""
    r = np.ones_like(a)
    b = a % p
    e = p - 2
    while e:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


def vmatvec(m, v, p):
    """Batched (n, N, N) @ (n, N) modulo p without int64 overflow."""
    lo = v & 0xFFFF
    hi = v >> 16
    # each partial sum is below N * 2^31 * 2^16 < 2^63 for N < 2^15
    r_lo = np.einsum("tij,tj->ti", m, lo) % p
    r_hi = np.einsum("tij,tj->ti", m, hi) % p
    return (r_hi * 65536 + r_lo) % p


def vdet(m, p):
    """Batched determinant modulo p of an (n, N, N) array."""
    m = m.copy() % p
    n, N, _ = m.shape
    det = np.ones(n, dtype=np.int64)
    for c in range(N):
        col = m[:, c:, c]
        nz = col != 0
        has = nz.any(axis=1)
        piv = np.where(has, nz.argmax(axis=1) + c, c)
        det = np.where(has, det, 0)
        idx = np.arange(n)
        swap = piv != c
        if swap.any():
            rows_c = m[idx, c].copy()
            m[idx, c] = m[idx, piv]
            m[idx, piv] = rows_c
            det = np.where(swap, (p - det) % p, det)
        pv = m[:, c, c]
        pv_safe = np.where(pv == 0, 1, pv)
        det = det * pv % p
        inv = vinv(pv_safe, p)
        if c + 1 < N:
            f = m[:, c + 1:, c] * inv[:, None] % p
            row = m[:, c, c:]
            # subtract f * row, one multiply at a time to stay in int64
            m[:, c + 1:, c:] = (m[:, c + 1:, c:] - f[:, :, None] * row[:, None, :] % p) % p
    return det


class VEnum:
    """Enumerator over ``n`` evaluation points.

    ``hecke[g]`` is the list of arrays a_0..a_{e-1} with g^e = sum a_i g^i.
    ``braids`` is a list of pairs of words (tuples of (generator, exponent)).
    """

    def __init__(self, gens, hecke, braids, nbasis, n, p=DEFAULT_PRIMES[0]):
        self.gens = list(gens)
        self.hecke = hecke
        self.braids = braids
        self.p = p
        self.nsym = nbasis
        self.nbasis = nbasis
        self.n = n
        self.one = np.ones(n, dtype=np.int64)
        self.dead = {}
        self.act = {g: {} for g in self.gens}
        self.queue = []
        self.a0inv = {g: vinv(a[0], p) for g, a in hecke.items()}
        for g, a in hecke.items():
            if not a[0].all():
                raise BadPoint(np.nonzero(a[0] == 0)[0])

    def _new(self):
        s = self.nsym
        self.nsym += 1
        return s

    def red(self, v):
        """Rewrite a vector in live symbols (with path compression)."""
        dead, p = self.dead, self.p
        if not any(s in dead for s in v):
            return v
        out = {}
        for s, c in v.items():
            if s in dead:
                e = dead[s]
                if any(t in dead for t in e):
                    e = self.red(e)
                    dead[s] = e
                for t, d in e.items():
                    x = out.get(t)
                    out[t] = c * d % p if x is None else (x + c * d) % p
            else:
                x = out.get(s)
                out[s] = c if x is None else (x + c) % p
        return {s: c for s, c in out.items() if c.any()}

    def img(self, g, v):
        v = self.red(v)
        out = {}
        act, p = self.act[g], self.p
        for s, c in v.items():
            w = act.get(s)
            if w is None:
                m = self._new()
                w = {m: self.one}
                act[s] = w
            for t, d in w.items():
                x = out.get(t)
                out[t] = c * d % p if x is None else (x + c * d) % p
        return {s: c for s, c in out.items() if c.any()}

    def relate(self, v):
        p = self.p
        self.queue.append(v)
        while self.queue:
            v = self.red(self.queue.pop())
            v = {s: c for s, c in v.items() if c.any()}
            if not v:
                continue
            piv = max(v)
            if piv < self.nbasis:
                raise EnumerationFailed("linear relation among the basis words")
            c = v[piv]
            if not c.all():
                raise BadPoint(np.nonzero(c == 0)[0])
            c = (p - vinv(c, p)) % p
            expr = {s: x * c % p for s, x in v.items() if s != piv}
            self.dead[piv] = expr
            for g in self.gens:
                w = self.act[g].pop(piv, None)
                if w is not None:
                    rhs = self.img(g, expr)
                    self.queue.append(self._sub(self.red(w), rhs))

    def _sub(self, a, b, scale=None):
        p = self.p
        d = dict(a)
        for t, x in b.items():
            if scale is not None:
                x = x * scale % p
            y = d.get(t)
            d[t] = (p - x) % p if y is None else (y - x) % p
        return d

    def imgpow(self, g, k, v):
        if k >= 0:
            for _ in range(k):
                v = self.img(g, v)
            return v
        a = self.hecke[g]
        e = len(a)
        p = self.p
        for _ in range(-k):
            # g^-1 = a_0^-1 (g^{e-1} - a_{e-1} g^{e-2} - ... - a_1)
            pw = [v]
            for _ in range(e - 1):
                pw.append(self.img(g, pw[-1]))
            out = dict(self.red(pw[e - 1]))
            for i in range(e - 1):
                out = self._sub(out, self.red(pw[i]), a[i + 1])
            v = {t: x * self.a0inv[g] % p for t, x in out.items()}
            v = {t: x for t, x in v.items() if x.any()}
        return v

    def wordv(self, w, v):
        for g, k in reversed(w):
            v = self.imgpow(g, k, v)
        return v

    def _scan(self, s):
        for g in self.gens:
            a = self.hecke[g]
            e = len(a)
            pw = [{s: self.one}]
            for _ in range(e):
                if s in self.dead:
                    return
                pw.append(self.img(g, pw[-1]))
            d = dict(pw[e])
            for i in range(e):
                if a[i].any():
                    d = self._sub(d, self.red(pw[i]), a[i])
            self.relate(d)
        for l, r in self.braids:
            if s in self.dead:
                return
            self.relate(self._sub(self.wordv(l, {s: self.one}), self.wordv(r, {s: self.one})))

    def run(self, basis, max_symbols=None):
        max_symbols = max_symbols or SYMBOL_BUDGET
        for j, w in enumerate(basis):
            if j == 0:
                if len(w):
                    raise EnumerationFailed("the first basis word must be 1")
                continue
            self.relate(self._sub(self.wordv(w, {0: self.one}), {j: self.one}))
        i = 0
        while True:
            s = next((s for s in range(i, self.nsym) if s not in self.dead), None)
            if s is None:
                break
            if self.nsym > max_symbols:
                raise EnumerationFailed("symbol budget of %d exhausted" % max_symbols)
            self._scan(s)
            i = s + 1
        live = [s for s in range(self.nsym) if s not in self.dead]
        if live != list(range(self.nbasis)):
            raise EnumerationFailed("%d live symbols remain, expected %d" % (len(live), self.nbasis))
        return self

    def table(self):
        """``{g: [row_j]}`` with row_j a dict k -> array, for g * b_j = sum_k row_j[k] b_k."""
        return {g: [self.red(self.act[g][s]) for s in range(self.nbasis)] for g in self.gens}

    def dense(self):
        """``{g: array (n, N, N)}`` whose [t, k, j] entry is the b_k coordinate of g * b_j."""
        N = self.nbasis
        out = {}
        for g, rows in self.table().items():
            m = np.zeros((self.n, N, N), dtype=np.int64)
            for j, row in enumerate(rows):
                for k, c in row.items():
                    m[:, k, j] = c
            out[g] = m
        return out


def enumerate_points(gens, hecke, braids, basis, p=DEFAULT_PRIMES[0], max_symbols=None):
    n = len(next(iter(hecke.values()))[0])
    return VEnum(gens, hecke, braids, len(basis), n, p).run(basis, max_symbols)
