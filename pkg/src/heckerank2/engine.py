"""Reduction engine for generic Hecke algebras.

A :class:`MulTable` records, for every generator g, the coordinates of
g*b_j (left tables) or b_j*g (right tables) in a reference basis.  With it any
word is reduced to basis coordinates by letting its letters act on the
identity vector one at a time, inverse letters going through the inverse
Hecke relation.

Exact tables are produced on the slice a_<orbit>_0 = 1 of the Hecke
coefficients, where every structure constant is an integer polynomial
(see :mod:`heckerank2._lift`), and are converted to the ``a`` or ``u``
coordinates on request.  Modular tables are the same object evaluated at one
random parameter point over a prime field.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import flint
import numpy as np

from . import _lift
from ._enumerate import DEFAULT_PRIMES, EnumerationFailed, enumerate_points, vmatvec
from .presentations import Presentation, a_name, elementary_symmetric, registry_get, u_name
from .rings import ZZ, CoeffRing, LaurentPoly, PrimeField, RingError, parse_poly
from .words import Word, parse_word

log = logging.getLogger(__name__)

CACHE_VERSION = 1
CACHE_ENV = "HECKERANK2_CACHE"
REFERENCE_SPECS = {"G4": "G4:l-s1", "G7": "G7:r-s2", "G8": "G8:l-s1", "G13": "G13:r-s2"}


class ReductionIncomplete(RuntimeError):
    """The table could not be completed; carries the offending word and a trace."""

    def __init__(self, message, word=None, trace=None):
        super().__init__(message)
        self.word = word
        self.trace = trace or []


class InconsistentTable(RuntimeError):
    pass


class TableMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class BasisSpec:
    name: str
    words: tuple
    good_candidate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(Word(w) for w in self.words))

    def __len__(self):
        return len(self.words)

    def index(self, w) -> int | None:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {}
            for i, x in enumerate(self.words):
                idx.setdefault(x, i)
            object.__setattr__(self, "_idx", idx)
        return idx.get(Word(w))

    def validate(self, p: Presentation) -> list:
        issues = []
        if not self.words or len(self.words[0]):
            issues.append("first basis word must be 1")
        if len(self.words) != p.group_order:
            issues.append("basis has %d words, |W| = %d" % (len(self.words), p.group_order))
        if len(set(self.words)) != len(self.words):
            issues.append("basis words are not distinct")
        for w in self.words:
            bad = w.generators() - set(p.generators)
            if bad:
                issues.append("word %s uses unknown generator(s) %s" % (w, sorted(bad)))
                break
        return issues


def cyclic_basis(d: int) -> BasisSpec:
    return BasisSpec("C%d:powers" % d, tuple(Word([("s", j)]) for j in range(d)))


def reference_basis(p: Presentation) -> BasisSpec:
    """The good basis B(W) used as the anchor of the trace."""
    if p.name.startswith("C") and p.name[1:].isdigit():
        return cyclic_basis(p.group_order)
    from .parabolic import catalog_spec, expand_parabolic, native_reference
    if p.name in REFERENCE_SPECS:
        spec = catalog_spec(REFERENCE_SPECS[p.name])
        return BasisSpec("B(%s)" % p.name, tuple(expand_parabolic(spec)))
    if p.native:
        return native_reference(p.name)
    raise TableMismatch("no reference basis for %s" % p.name)


# ---------------------------------------------------------------------------
# scalar domains: the native scalar type of a table and its conversion to LaurentPoly


class LPDomain:
    kind = "lp"

    def __init__(self, ring: CoeffRing = ZZ):
        self.ring = ring
        self.one = LaurentPoly.const(1, ring)
        self.zero = LaurentPoly.const(0, ring)

    def from_lp(self, x):
        if not isinstance(x, LaurentPoly):
            return LaurentPoly.const(x, self.ring)
        if x.ring != self.ring:
            raise TableMismatch("coefficient ring %s does not match table ring %s" % (x.ring, self.ring))
        return x

    def to_lp(self, x):
        return x

    def inv(self, x):
        return x.inverse()

    def describe(self):
        return {"kind": "lp", "ring": str(self.ring)}


class FlintDomain:
    """Integer polynomials in a fixed set of variables (python-flint)."""

    kind = "flint"

    def __init__(self, names):
        self.names = tuple(names)
        self.ctx = flint.fmpz_mpoly_ctx.get(self.names, "lex")
        self.pos = {n: i for i, n in enumerate(self.names)}
        self.one = self.ctx.constant(1)
        self.zero = self.ctx.constant(0)
        self.ring = ZZ

    def from_lp(self, x):
        if isinstance(x, flint.fmpz_mpoly):
            return x
        if not isinstance(x, LaurentPoly):
            return self.ctx.constant(int(x))
        if x.ring != ZZ:
            raise TableMismatch("polynomial table needs integer coefficients")
        d = {}
        n = len(self.names)
        for m, c in x.terms.items():
            e = [0] * n
            for k, v in m:
                if k not in self.pos:
                    raise TableMismatch("variable %s is not a table coordinate %s" % (k, self.names))
                if v < 0:
                    raise TableMismatch("negative exponent of %s in a polynomial table" % k)
                e[self.pos[k]] = v
            d[tuple(e)] = int(c)
        return self.ctx.from_dict(d)

    def to_lp(self, x):
        terms = {}
        for e, c in x.to_dict().items():
            m = tuple((self.names[i], v) for i, v in enumerate(e) if v)
            terms[tuple(sorted(m))] = int(c)
        return LaurentPoly(terms, ZZ)

    def inv(self, x):
        if x == 1 or x == -1:
            return x
        raise ZeroDivisionError("%s is not a unit of the polynomial ring" % x)

    def describe(self):
        return {"kind": "flint", "names": list(self.names)}


class ModDomain:
    """Residues modulo p at one parameter point."""

    kind = "mod"

    def __init__(self, p: int, point: dict):
        self.p = p
        self.point = dict(point)
        self.ring = PrimeField(p)
        self.one = flint.nmod(1, p)
        self.zero = flint.nmod(0, p)

    def from_lp(self, x):
        if isinstance(x, flint.nmod):
            return x
        if not isinstance(x, LaurentPoly):
            return flint.nmod(int(x), self.p)
        try:
            v = x.evaluate(self.point, self.ring) if x.ring == ZZ else x.map_coeffs(self.ring.coerce, self.ring).evaluate(self.point, self.ring)
        except KeyError as exc:
            raise TableMismatch("parameter %s has no value at the modular point" % exc) from None
        return flint.nmod(int(v), self.p)

    def to_lp(self, x):
        return LaurentPoly.const(int(x), self.ring)

    def inv(self, x):
        return 1 / x

    def describe(self):
        return {"kind": "mod", "p": self.p}


# ---------------------------------------------------------------------------
# elements


class FreeElement:
    """Finite linear combination of words with LaurentPoly coefficients."""

    __slots__ = ("terms", "ring")

    def __init__(self, terms=None, ring: CoeffRing = ZZ):
        self.ring = ring
        self.terms = {}
        for w, c in (terms or {}).items():
            if not isinstance(c, LaurentPoly):
                c = LaurentPoly.const(c, ring)
            if c:
                w = Word(w)
                x = self.terms.get(w)
                c = c if x is None else x + c
                if c:
                    self.terms[w] = c
                else:
                    self.terms.pop(w, None)

    @classmethod
    def word(cls, w, coeff=1, ring: CoeffRing = ZZ):
        return cls({Word(w): coeff}, ring)

    def __add__(self, o):
        t = dict(self.terms)
        for w, c in o.terms.items():
            t[w] = t[w] + c if w in t else c
        return FreeElement(t, self.ring)

    def __neg__(self):
        return FreeElement({w: -c for w, c in self.terms.items()}, self.ring)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not isinstance(o, FreeElement):
            return self.scale(o)
        t = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in o.terms.items():
                w = w1 * w2
                c = c1 * c2
                t[w] = t[w] + c if w in t else c
        return FreeElement(t, self.ring)

    def scale(self, c):
        if not isinstance(c, LaurentPoly):
            c = LaurentPoly.const(c, self.ring)
        return FreeElement({w: x * c for w, x in self.terms.items()}, self.ring)

    def __eq__(self, o):
        return isinstance(o, FreeElement) and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join("(%s)*[%s]" % (c, w) for w, c in sorted(self.terms.items(), key=lambda t: (t[0].length(), str(t[0]))))

    __repr__ = __str__


class ReducedElement:
    """Basis coordinates with respect to a table (native scalars, sparse)."""

    __slots__ = ("data", "table")

    def __init__(self, data, table):
        self.data = {k: v for k, v in data.items() if v}
        self.table = table

    def __getitem__(self, i):
        d = self.table.domain
        return d.to_lp(self.data.get(i, d.zero))

    def coords(self) -> list:
        return [self[i] for i in range(len(self.table.basis))]

    def _same(self, o):
        if o.table is not self.table and o.table.key != self.table.key:
            raise TableMismatch("elements reduced against different tables")

    def __add__(self, o):
        self._same(o)
        out = dict(self.data)
        _axpy(out, self.table.domain.one, o.data)
        return ReducedElement(out, self.table)

    def __sub__(self, o):
        self._same(o)
        out = dict(self.data)
        _axpy(out, -self.table.domain.one, o.data)
        return ReducedElement(out, self.table)

    def __neg__(self):
        return ReducedElement({k: -v for k, v in self.data.items()}, self.table)

    def scale(self, c):
        c = self.table.domain.from_lp(c)
        return ReducedElement({k: v * c for k, v in self.data.items()}, self.table)

    def is_zero(self):
        return not self.data

    def __eq__(self, o):
        if not isinstance(o, ReducedElement):
            return NotImplemented
        self._same(o)
        return self.data == o.data

    def __hash__(self):
        return hash(tuple(sorted((k, str(v)) for k, v in self.data.items())))

    def __str__(self):
        if not self.data:
            return "0"
        b = self.table.basis.words
        return " + ".join("(%s)*[%s]" % (self[k], b[k]) for k in sorted(self.data))

    __repr__ = __str__


def _axpy(out, c, vec):
    for k, x in vec.items():
        y = out.get(k)
        out[k] = c * x if y is None else y + c * x


def _clean(v):
    return {k: x for k, x in v.items() if x}


# ---------------------------------------------------------------------------
# multiplication tables


@dataclass(eq=False)
class MulTable:
    presentation: Presentation
    basis: BasisSpec
    side: str
    mode: str
    coords: str
    domain: object
    hecke: dict                    # g -> [a_0, ..., a_{e-1}] native
    rows: dict                     # g -> list of {k: native}
    meta: dict = field(default_factory=dict)
    _inv: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)
    _mats: dict = field(default_factory=dict, repr=False)

    @property
    def ring(self) -> CoeffRing:
        return self.domain.ring

    @property
    def key(self):
        return (self.presentation.fingerprint(), self.basis.name, self.side, self.mode, self.coords,
                self.meta.get("prime"), self.meta.get("seed"))

    def __len__(self):
        return len(self.basis)

    def unit_vector(self, j=0):
        return {j: self.domain.one}

    # single letters
    def _gen(self, g, v):
        out = {}
        rows = self.rows[g]
        for j, c in v.items():
            _axpy(out, c, rows[j])
        return _clean(out)

    def _inv_row(self, g, j):
        cache = self._inv.setdefault(g, {})
        r = cache.get(j)
        if r is None:
            a = self.hecke[g]
            e = len(a)
            pw = [{j: self.domain.one}]
            for _ in range(e - 1):
                pw.append(self._gen(g, pw[-1]))
            out = dict(pw[e - 1])
            for i in range(e - 1):
                if a[i + 1]:
                    _axpy(out, -a[i + 1], pw[i])
            a0i = self.domain.inv(a[0])
            r = cache[j] = _clean({k: x * a0i for k, x in out.items()})
        return r

    def act(self, g, sign, v):
        """Apply one letter g^(+1) or g^(-1) on the table's side."""
        if g not in self.rows:
            raise TableMismatch("unknown generator %s" % g)
        if sign > 0:
            return self._gen(g, v)
        out = {}
        for j, c in v.items():
            _axpy(out, c, self._inv_row(g, j))
        return _clean(out)

    def act_word(self, w, v):
        """w*v for left tables, v*w for right tables."""
        letters = list(Word(w).letters())
        if self.side == "left":
            letters.reverse()
        if self.mode == "modular" and len(letters) > 1:
            return self._act_dense(letters, v)
        for g, s in letters:
            v = self.act(g, s, v)
        return v

    def _dense(self):
        """Generator matrices (and inverses) modulo p, column j = g acting on b_j."""
        mats = self._mats
        if not mats:
            p, N = self.domain.p, len(self.basis)
            for g in self.presentation.generators:
                G = np.zeros((N, N), dtype=np.int64)
                for j, row in enumerate(self.rows[g]):
                    for k, c in row.items():
                        G[k, j] = int(c)
                Gi = np.zeros((N, N), dtype=np.int64)
                for j in range(N):
                    for k, c in self._inv_row(g, j).items():
                        Gi[k, j] = int(c)
                mats[(g, 1)], mats[(g, -1)] = G[None], Gi[None]
        return mats

    def word_tensor(self):
        """(N, N, N) array whose slice i is the action of basis word i (modular tables)."""
        T = self._mats.get("T")
        if T is None:
            mats, p, N = self._dense(), self.domain.p, len(self.basis)
            prefix = {(): np.eye(N, dtype=np.int64)}
            T = np.zeros((N, N, N), dtype=np.int64)
            for i, w in enumerate(self.basis.words):
                seq = tuple(Word(w).letters())
                if self.side == "left":
                    seq = seq[::-1]
                for t in range(len(seq)):
                    if seq[:t + 1] not in prefix:
                        prefix[seq[:t + 1]] = _matmul_mod(mats[seq[t]][0], prefix[seq[:t]], p)
                T[i] = prefix[seq]
            self._mats["T"] = T
        return T

    def _act_dense(self, letters, v):
        mats = self._dense()
        p = self.domain.p
        x = np.zeros((1, len(self.basis)), dtype=np.int64)
        for k, c in v.items():
            x[0, k] = int(c)
        for g, s in letters:
            if (g, s) not in mats:
                raise TableMismatch("unknown generator %s" % g)
            x = vmatvec(mats[(g, s)], x, p)
        return {k: flint.nmod(int(x[0, k]), p) for k in np.flatnonzero(x[0])}

    def word_vector(self, w):
        """Coordinates of the word w (cached on shared suffixes or prefixes)."""
        letters = tuple(Word(w).letters())
        if self.side == "left":
            seq = letters[::-1]
        else:
            seq = letters
        cache = self._cache
        if len(cache) > 50000:
            cache.clear()
        v = self.unit_vector(0)
        start = 0
        for i in range(len(seq), 0, -1):
            hit = cache.get(seq[:i])
            if hit is not None:
                v, start = hit, i
                break
        for i in range(start, len(seq)):
            g, s = seq[i]
            v = self.act(g, s, v)
            cache[seq[:i + 1]] = v
        return v

    def element(self, data) -> ReducedElement:
        return ReducedElement(data, self)

    def basis_element(self, j) -> ReducedElement:
        return ReducedElement(self.unit_vector(j), self)

    def check_relations(self):
        """Raise InconsistentTable unless every relation holds on every basis vector."""
        p = self.presentation
        rels = p.braid_relations
        for j in range(len(self.basis)):
            ej = self.unit_vector(j)
            for g in p.generators:
                a = self.hecke[g]
                pw = [ej]
                for _ in range(len(a)):
                    pw.append(self.act(g, 1, pw[-1]))
                rhs = {}
                for i, c in enumerate(a):
                    if c:
                        _axpy(rhs, c, pw[i])
                if _clean(rhs) != pw[-1]:
                    raise InconsistentTable("Hecke relation of %s fails on b_%d" % (g, j))
            for l, r in rels:
                if self.act_word(l, ej) != self.act_word(r, ej):
                    raise InconsistentTable("relation %s = %s fails on b_%d" % (l, r, j))
        e0 = self.unit_vector(0)
        for j, w in enumerate(self.basis.words):
            if self.word_vector(w) != {j: self.domain.one}:
                raise InconsistentTable("basis word %s does not reduce to itself" % w)
        return True

    def entry(self, g, j, k) -> LaurentPoly:
        return self.domain.to_lp(self.rows[g][j].get(k, self.domain.zero))

    def matrix(self, g) -> list:
        """Dense |W| x |W| matrix of LaurentPoly; row j = coordinates of g*b_j."""
        N = len(self.basis)
        return [[self.entry(g, j, k) for k in range(N)] for j in range(N)]


# ---------------------------------------------------------------------------
# coordinates and Hecke coefficients


def reduced_names(p: Presentation, fixed=None) -> list:
    fixed = fixed or {}
    return [a_name(o, i) for o in p.orbits for i in range(1, p.order_of_orbit[o]) if a_name(o, i) not in fixed]


def star(x: LaurentPoly, p: Presentation, coords: str = "u") -> LaurentPoly:
    """The ring automorphism induced by u -> u^-1, written in the given coordinates.

    In ``a`` coordinates a_0 -> a_0^-1 and a_m -> -a_0^-1 a_{e-m}; on the
    slice a_0 = 1 this is the polynomial map a_m -> -a_{e-m}.
    """
    values = {}
    for o in p.orbits:
        e = p.order_of_orbit[o]
        if coords == "u":
            for j in range(1, e + 1):
                values[u_name(o, j)] = LaurentPoly.var(u_name(o, j), x.ring, -1)
        elif coords == "a":
            a0i = LaurentPoly.var(a_name(o, 0), x.ring, -1)
            values[a_name(o, 0)] = a0i
            for m in range(1, e):
                values[a_name(o, m)] = -(a0i * LaurentPoly.var(a_name(o, e - m), x.ring))
        elif coords == "reduced":
            for m in range(1, e):
                values[a_name(o, m)] = -LaurentPoly.var(a_name(o, e - m), x.ring)
        else:
            raise TableMismatch("star is not defined in %r coordinates" % coords)
    return x.substitute(values)


def power_coefficients(coeffs, inv_coeffs, k: int):
    """Coordinates of s^k in {1, s, ..., s^(e-1)} modulo the Hecke relation."""
    e = len(coeffs)
    one = coeffs[0].one()
    zero = coeffs[0].zero()
    v = [one] + [zero] * (e - 1)
    for _ in range(abs(k)):
        if k > 0:
            carry = v[-1]
            v = [zero] + v[:-1]
            if carry:
                v = [x + carry * a for x, a in zip(v, coeffs)]
        else:
            c0 = v[0]
            v = v[1:] + [zero]
            if c0:
                v = [x + c0 * c for x, c in zip(v, inv_coeffs)]
    return v


def normalize_word(w, p: Presentation, coords: str = "u") -> FreeElement:
    """Rewrite every letter exponent into [1, e-1] using the Hecke relations only."""
    w = Word(w) if not isinstance(w, str) else p.parse(w)
    bad = w.generators() - set(p.generators)
    if bad:
        raise TableMismatch("unknown generator(s) %s" % sorted(bad))
    acc = {Word(): LaurentPoly.const(1)}
    for g, k in w:
        rel = p.hecke(p.orbit_of[g], coords)
        nxt = {}
        for base, c in acc.items():
            # a zero exponent earlier can leave g at the end of base: merge first
            m = 0
            if base and base[-1][0] == g:
                base, m = Word(base[:-1]), base[-1][1]
            for i, ci in enumerate(power_coefficients(rel.coeffs, rel.inverse_coeffs, k + m)):
                if ci:
                    key = base * Word([(g, i)])
                    x = c * ci
                    nxt[key] = nxt[key] + x if key in nxt else x
        acc = nxt
    return FreeElement(acc)


# ---------------------------------------------------------------------------
# building tables


def cache_dir() -> Path:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else Path.home() / ".cache" / "heckerank2"


def _opposite(p: Presentation, basis: BasisSpec, side: str):
    if side == "left":
        return p.braid_relations, list(basis.words)
    if side == "right":
        return [(l.reversed(), r.reversed()) for l, r in p.braid_relations], [w.reversed() for w in basis.words]
    raise ValueError("side must be 'left' or 'right'")


def _family(p: Presentation, fixed: dict):
    names = reduced_names(p, fixed)

    def coeff_names(g):
        o = p.orbit_of[g]
        return [a_name(o, i) for i in range(1, p.order_of_orbit[o])]

    def hecke(values, prime, n):
        one = np.ones(n, dtype=np.int64)
        out = {}
        for g in p.generators:
            out[g] = [one] + [values[nm] if nm in values else np.full(n, fixed[nm] % prime, dtype=np.int64)
                              for nm in coeff_names(g)]
        return out

    def exact(ctx):
        pos = {nm: i for i, nm in enumerate(names)}
        return {g: [ctx.constant(1)] + [ctx.gen(pos[nm]) if nm in pos else ctx.constant(fixed[nm])
                                        for nm in coeff_names(g)]
                for g in p.generators}

    return _lift.PointFamily(names, hecke, exact)


def _cache_key(p, basis, side, fixed, names):
    h = hashlib.sha256()
    h.update(json.dumps([CACHE_VERSION, p.fingerprint(), [str(w) for w in basis.words], side,
                         sorted(fixed.items()), list(names)]).encode())
    return h.hexdigest()[:32]


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _exact_reduced_rows(p, basis, side, fixed, use_cache=True, seed=0):
    """Certified table on the slice a_0 = 1 as flint rows (cached on disk)."""
    names = reduced_names(p, fixed)
    dom = FlintDomain(names)
    key = _cache_key(p, basis, side, fixed, names)
    path = cache_dir() / ("table-%s-%s-%s.json" % (p.name, side, key))
    if use_cache and path.exists():
        try:
            data = json.loads(path.read_text())
            if data.get("version") != CACHE_VERSION or data.get("key") != key or data.get("presentation") != p.fingerprint():
                raise TableMismatch("cache entry %s does not match" % path)
            rows = {g: [{int(k): dom.from_lp(parse_poly(s)) for k, s in row} for row in data["rows"][g]]
                    for g in p.generators}
            return dom, rows, dict(data.get("meta", {}), cache="hit")
        except (ValueError, KeyError, TableMismatch) as exc:
            log.warning("ignoring cache file %s: %s", path, exc)
    braids, words = _opposite(p, basis, side)
    fam = _family(p, fixed)
    ex = _lift.build_exact_table(p.generators, braids, words, fam, dom.ctx, seed=seed)
    meta = {"degrees": ex.degrees, "primes_used": ex.primes_used, "grid_points": ex.points, "certified": True}
    if use_cache:
        payload = {"version": CACHE_VERSION, "key": key, "presentation": p.fingerprint(), "basis": basis.name,
                   "side": side, "fixed": fixed, "names": names, "meta": meta,
                   "rows": {g: [[[k, str(dom.to_lp(x))] for k, x in sorted(row.items())] for row in ex.rows[g]]
                            for g in p.generators}}
        try:
            _write_atomic(path, json.dumps(payload, separators=(",", ":")))
        except OSError as exc:
            log.warning("could not write cache %s: %s", path, exc)
    return dom, ex.rows, dict(meta, cache="miss")


def _weights(p, words):
    return [p.weight(w) for w in words]


def _convert_rows(p, basis, side, dom, rows, coords):
    """Rehomogenize slice tables to ``a`` coordinates, then optionally to ``u``."""
    wt = _weights(p, basis.words)
    sub = p.a_to_u() if coords == "u" else None
    out = {}
    for g, grows in rows.items():
        wg = p.weight(Word([(g, 1)]))
        new = []
        for j, row in enumerate(grows):
            r = {}
            for k, x in row.items():
                w = {o: wg[o] + wt[j][o] - wt[k][o] for o in p.orbits}
                y = p.rehomogenize(dom.to_lp(x), w)
                if sub is not None:
                    y = y.substitute(sub)
                r[k] = y
            new.append(r)
        out[g] = new
    return out


def build_mul_table(p, basis: BasisSpec | None = None, side: str = "left", mode: str = "exact",
                    coords: str | None = None, prime: int | None = None, seed: int = 0,
                    fixed: dict | None = None, use_cache: bool = True, check: bool = False) -> MulTable:
    """Multiplication table of H(W) in ``basis``.

    mode ``exact``: certified structure constants.  ``coords`` is
    ``reduced`` (the slice a_0 = 1, integer polynomials), ``a`` or ``u``;
    the default is ``u`` for groups of order at most 24 and ``reduced``
    otherwise.  ``fixed`` pins some slice coordinates to integers, which is
    how the specialisations of H(G7) are realised.

    mode ``modular``: the table at one random parameter point modulo ``prime``.
    """
    if isinstance(p, str):
        p = registry_get(p)
    basis = basis or reference_basis(p)
    issues = basis.validate(p)
    if issues:
        raise TableMismatch("; ".join(issues))
    fixed = dict(fixed or {})
    try:
        return _build(p, basis, side, mode, coords, prime, seed, fixed, use_cache, check)
    except EnumerationFailed as exc:
        raise ReductionIncomplete("table for %s in %s did not close: %s" % (p.name, basis.name, exc),
                                  trace=[str(exc)]) from exc


def _build(p, basis, side, mode, coords, prime, seed, fixed, use_cache, check):
    if mode == "exact":
        if coords is None:
            coords = "u" if p.group_order <= 24 and not fixed else "reduced"
        dom, rows, meta = _exact_reduced_rows(p, basis, side, fixed, use_cache, seed)
        if coords == "reduced":
            hecke = {g: fam for g, fam in _family(p, fixed).exact(dom.ctx).items()}
            label = "reduced" if not fixed else "reduced[%s]" % ",".join("%s=%d" % kv for kv in sorted(fixed.items()))
            return MulTable(p, basis, side, mode, label, dom, hecke, rows, meta)
        if fixed:
            raise TableMismatch("pinned coordinates are only available on the slice")
        if coords not in ("a", "u"):
            raise TableMismatch("unknown coordinates %r" % coords)
        lrows = _convert_rows(p, basis, side, dom, rows, coords)
        ld = LPDomain(ZZ)
        hecke = {g: list(p.hecke(p.orbit_of[g], coords).coeffs) for g in p.generators}
        t = MulTable(p, basis, side, mode, coords, ld, hecke, lrows, meta)
        if check:
            t.check_relations()
        return t
    if mode == "modular":
        return _modular_table(p, basis, side, prime or DEFAULT_PRIMES[0], seed, fixed)
    raise ValueError("mode must be 'exact' or 'modular'")


def random_point(p: Presentation, prime: int, rng, fixed=None):
    """Random nonzero u values modulo prime and the matching a coefficients."""
    point = {}
    for o in p.orbits:
        e = p.order_of_orbit[o]
        us = [int(x) for x in rng.integers(1, prime, e)]
        for j, x in enumerate(us, start=1):
            point[u_name(o, j)] = x
        us_lp = [LaurentPoly.const(x, PrimeField(prime)) for x in us]
        for jj in range(1, e + 1):
            f = elementary_symmetric(us_lp, jj, PrimeField(prime)).constant_term()
            point[a_name(o, e - jj)] = f % prime if jj % 2 == 1 else (-f) % prime
    return point


def _modular_table(p, basis, side, prime, seed, fixed):
    rng = np.random.default_rng(seed)
    if fixed:
        raise TableMismatch("pinned coordinates are only available in exact mode")
    point = random_point(p, prime, rng)
    braids, words = _opposite(p, basis, side)
    hecke_arr = {g: [np.array([point[a_name(p.orbit_of[g], i)]], dtype=np.int64) for i in range(p.order(g))]
                 for g in p.generators}
    E = enumerate_points(p.generators, hecke_arr, braids, words, prime)
    dom = ModDomain(prime, point)
    rows = {g: [{k: flint.nmod(int(c[0]), prime) for k, c in row.items()} for row in grows]
            for g, grows in E.table().items()}
    hecke = {g: [flint.nmod(int(a[0]), prime) for a in arrs] for g, arrs in hecke_arr.items()}
    return MulTable(p, basis, side, "modular", "u", dom, hecke, rows, {"prime": prime, "seed": seed})


# ---------------------------------------------------------------------------
# operations on elements


def _as_free(el, table):
    if isinstance(el, FreeElement):
        return el
    if isinstance(el, str):
        return FreeElement.word(table.presentation.parse(el), ring=table.ring if table.mode == "exact" else ZZ)
    return FreeElement.word(Word(el))


def reduce(el, table: MulTable) -> ReducedElement:
    """Basis coordinates of a free element (or word) via the table."""
    el = _as_free(el, table)
    gens = set(table.presentation.generators)
    out = {}
    for w, c in el.terms.items():
        bad = w.generators() - gens
        if bad:
            raise TableMismatch("unknown generator(s) %s" % sorted(bad))
        _axpy(out, table.domain.from_lp(c), table.word_vector(w))
    return ReducedElement(_clean(out), table)


def multiply(a: ReducedElement, b: ReducedElement, table: MulTable | None = None) -> ReducedElement:
    table = table or a.table
    a._same(b)
    if table.mode == "modular":
        p, N = table.domain.p, len(table.basis)
        x, y = (a, b) if table.side == "left" else (b, a)
        xv = np.zeros((1, N), dtype=np.int64)
        yv = np.zeros((1, N), dtype=np.int64)
        for k, c in x.data.items():
            xv[0, k] = int(c)
        for k, c in y.data.items():
            yv[0, k] = int(c)
        # X[i] = (basis word i) acting on y, then sum x_i X[i]
        X = vmatvec(table.word_tensor(), np.repeat(yv, N, axis=0), p)
        r = vmatvec(X.T[None], xv, p)[0]
        return ReducedElement({int(k): flint.nmod(int(r[k]), p) for k in np.flatnonzero(r)}, table)
    words = table.basis.words
    out = {}
    if table.side == "left":
        for i, c in a.data.items():
            _axpy(out, c, table.act_word(words[i], b.data))
    else:
        for j, c in b.data.items():
            _axpy(out, c, table.act_word(words[j], a.data))
    return ReducedElement(_clean(out), table)


def _matmul_mod(A, B, p):
    lo, hi = B & 0xFFFF, B >> 16
    return ((A @ hi % p) * 65536 + A @ lo % p) % p


def element_inverse(w, table: MulTable) -> ReducedElement:
    w = table.presentation.parse(w) if isinstance(w, str) else Word(w)
    return reduce(FreeElement.word(w.inverse()), table)


def op_twist(el: FreeElement, p: Presentation, coords: str = "u") -> FreeElement:
    """Reverse words, invert letters and apply u -> u^-1 to the coefficients."""
    return FreeElement({w.inverse(): star(c, p, coords) for w, c in el.terms.items()}, el.ring)


def tau(el: ReducedElement) -> LaurentPoly:
    """Coefficient of the basis element 1."""
    return el[0]
