"""Exact scalar arithmetic.

Coefficient rings (integers, rationals, cyclotomic fields, prime fields) and
multivariate Laurent polynomials over any of them.  Every value is immutable.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by name with no zero
exponents; the empty tuple is the monomial 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd


class RingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cyclotomic polynomials and elements


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise RingError("cyclotomic index must be positive")
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _exact_divide_int(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_divide_int(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    assert not any(num), "non-exact cyclotomic division"
    return out


class Cyc:
    """Element of Q(zeta_n) stored as coordinates on 1, zeta, ..., zeta^(phi(n)-1)."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, coords):
        self.n = n
        self.c = tuple(coords)

    def __add__(self, o):
        return Cyc(self.n, [a + b for a, b in zip(self.c, o.c)])

    def __sub__(self, o):
        return Cyc(self.n, [a - b for a, b in zip(self.c, o.c)])

    def __neg__(self):
        return Cyc(self.n, [-a for a in self.c])

    def __mul__(self, o):
        prod = [Fraction(0)] * (2 * len(self.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        prod[i + j] += a * b
        return cyc_normalize(prod, self.n)

    def __eq__(self, o):
        return isinstance(o, Cyc) and self.n == o.n and self.c == o.c

    def __hash__(self):
        return hash((self.n, self.c))

    def __bool__(self):
        return any(self.c)

    def is_rational(self):
        return not any(self.c[1:])

    def inverse(self):
        # solve x * self = 1 in the basis of powers of zeta
        m = len(self.c)
        cols = []
        for k in range(m):
            e = [Fraction(0)] * m
            e[k] = Fraction(1)
            cols.append((self * Cyc(self.n, e)).c)
        rows = [[cols[k][i] for k in range(m)] + [Fraction(int(i == 0))] for i in range(m)]
        for col in range(m):
            piv = next((r for r in range(col, m) if rows[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("zero cyclotomic element")
            rows[col], rows[piv] = rows[piv], rows[col]
            inv = 1 / rows[col][col]
            rows[col] = [x * inv for x in rows[col]]
            for r in range(m):
                if r != col and rows[r][col]:
                    f = rows[r][col]
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
        return Cyc(self.n, [rows[i][m] for i in range(m)])

    def __repr__(self):
        return "Cyc(%d, %s)" % (self.n, format_cyc(self))


def cyc_normalize(coords, n: int) -> Cyc:
    """Reduce a coefficient sequence in zeta_n modulo Phi_n."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    c = [Fraction(x) for x in coords]
    c = [x for x in c] + [Fraction(0)] * max(0, deg - len(c))
    # phi is monic, so plain long division works over Q
    for i in range(len(c) - 1, deg - 1, -1):
        t = c[i]
        if t:
            for j in range(deg + 1):
                c[i - deg + j] -= t * phi[j]
    return Cyc(n, c[:deg])


def zeta(n: int, k: int = 1) -> Cyc:
    k %= n
    return cyc_normalize([0] * k + [1], n)


def format_cyc(x: Cyc) -> str:
    parts = []
    for k, a in enumerate(x.c):
        if a:
            parts.append("%s*z%d^%d" % (a, x.n, k) if k else str(a))
    return "(" + " + ".join(parts) + ")" if parts else "0"


# ---------------------------------------------------------------------------
# coefficient rings


@dataclass(frozen=True)
class CoeffRing:
    """Descriptor of a coefficient ring; ``kind`` is ZZ, QQ, CYC or GF."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("ZZ", "QQ", "CYC", "GF"):
            raise RingError("unknown ring kind %r" % self.kind)
        if self.kind in ("CYC", "GF") and self.n < 1:
            raise RingError("ring needs a positive modulus")
        if self.kind == "GF" and not _is_prime(self.n):
            raise RingError("%d is not prime" % self.n)

    def __str__(self):
        return {"ZZ": "ZZ", "QQ": "QQ"}.get(self.kind) or "%s(%d)" % (self.kind, self.n)

    @property
    def is_field(self):
        return self.kind != "ZZ"

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        k = self.kind
        if k == "ZZ":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise RingError("%s is not an integer" % x)
                return int(x.numerator)
            if isinstance(x, Cyc):
                raise RingError("cannot coerce cyclotomic into ZZ")
            return int(x)
        if k == "QQ":
            if isinstance(x, Cyc):
                if not x.is_rational():
                    raise RingError("irrational cyclotomic into QQ")
                return x.c[0]
            return Fraction(x)
        if k == "GF":
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.n) % self.n
            return int(x) % self.n
        if isinstance(x, Cyc):
            if x.n != self.n:
                raise RingError("cyclotomic order mismatch")
            return x
        return cyc_normalize([x], self.n)

    def add(self, a, b):
        return (a + b) % self.n if self.kind == "GF" else a + b

    def sub(self, a, b):
        return (a - b) % self.n if self.kind == "GF" else a - b

    def mul(self, a, b):
        return a * b % self.n if self.kind == "GF" else a * b

    def neg(self, a):
        return -a % self.n if self.kind == "GF" else -a

    def is_zero(self, a):
        return not a

    def is_unit(self, a):
        if self.kind == "ZZ":
            return a in (1, -1)
        return bool(a)

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError("%r is not invertible in %s" % (a, self))
        k = self.kind
        if k == "ZZ":
            return a
        if k == "QQ":
            return 1 / a
        if k == "GF":
            return pow(a, -1, self.n)
        return a.inverse()

    def format(self, a) -> str:
        if self.kind == "CYC":
            return format_cyc(a)
        return str(a)

    def parse(self, s: str):
        s = s.strip()
        if self.kind == "CYC":
            if s == "0":
                return self.zero()
            inner = s[1:-1] if s.startswith("(") else s
            coords = [Fraction(0)] * (len(cyclotomic_poly(self.n)) - 1)
            for part in inner.split(" + "):
                m = re.fullmatch(r"(.+)\*z\d+\^(\d+)", part.strip())
                if m:
                    coords[int(m.group(2))] += Fraction(m.group(1))
                else:
                    coords[0] += Fraction(part.strip())
            return Cyc(self.n, coords)
        return self.coerce(Fraction(s))


ZZ = CoeffRing("ZZ")
QQ = CoeffRing("QQ")


def Cyclotomic(n: int) -> CoeffRing:
    return CoeffRing("CYC", n)


def PrimeField(p: int) -> CoeffRing:
    return CoeffRing("GF", p)


def _is_prime(n):
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# monomials


def mono(**exps) -> tuple:
    return tuple(sorted((k, v) for k, v in exps.items() if v))


@lru_cache(maxsize=1 << 16)
def mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, v in b:
        e = d.get(k, 0) + v
        if e:
            d[k] = e
        else:
            del d[k]
    return tuple(sorted(d.items()))


def mono_inv(a: tuple) -> tuple:
    return tuple((k, -v) for k, v in a)


def mono_pow(a: tuple, k: int) -> tuple:
    return tuple((n, v * k) for n, v in a) if k else ()


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Multivariate Laurent polynomial with coefficients in a CoeffRing."""

    __slots__ = ("terms", "ring", "_hash")

    def __init__(self, terms=None, ring: CoeffRing = ZZ):
        self.ring = ring
        self.terms = {}
        self._hash = None
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = c

    @classmethod
    def _raw(cls, terms, ring):
        p = cls.__new__(cls)
        p.terms = terms
        p.ring = ring
        p._hash = None
        return p

    # constructors
    @classmethod
    def const(cls, c, ring: CoeffRing = ZZ):
        c = ring.coerce(c)
        return cls._raw({(): c} if c else {}, ring)

    @classmethod
    def var(cls, name: str, ring: CoeffRing = ZZ, exp: int = 1):
        return cls._raw({((name, exp),) if exp else (): ring.one()}, ring)

    @classmethod
    def monomial(cls, m: tuple, c=1, ring: CoeffRing = ZZ):
        c = ring.coerce(c)
        return cls._raw({m: c} if c else {}, ring)

    def zero(self):
        return LaurentPoly._raw({}, self.ring)

    def one(self):
        return LaurentPoly.const(1, self.ring)

    # structure
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def variables(self) -> set:
        return {k for m in self.terms for k, _ in m}

    def constant_term(self):
        return self.terms.get((), self.ring.zero())

    def is_constant(self):
        return not self.terms or list(self.terms) == [()]

    def _check(self, o):
        if not isinstance(o, LaurentPoly):
            return LaurentPoly.const(o, self.ring)
        if o.ring != self.ring:
            raise RingError("ring mismatch: %s vs %s" % (self.ring, o.ring))
        return o

    # arithmetic
    def __add__(self, o):
        o = self._check(o)
        if len(o.terms) > len(self.terms):
            self, o = o, self
        r = self.ring
        t = dict(self.terms)
        for m, c in o.terms.items():
            x = t.get(m)
            if x is None:
                t[m] = c
            else:
                x = r.add(x, c)
                if x:
                    t[m] = x
                else:
                    del t[m]
        return LaurentPoly._raw(t, r)

    __radd__ = __add__

    def __neg__(self):
        r = self.ring
        return LaurentPoly._raw({m: r.neg(c) for m, c in self.terms.items()}, r)

    def __sub__(self, o):
        return self + (-self._check(o))

    def __rsub__(self, o):
        return self._check(o) - self

    def __mul__(self, o):
        o = self._check(o)
        r = self.ring
        if not self.terms or not o.terms:
            return LaurentPoly._raw({}, r)
        t = {}
        mul, add = r.mul, r.add
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = mono_mul(m1, m2)
                c = mul(c1, c2)
                x = t.get(m)
                t[m] = c if x is None else add(x, c)
        return LaurentPoly._raw({m: c for m, c in t.items() if c}, r)

    __rmul__ = __mul__

    def scale(self, c):
        c = self.ring.coerce(c)
        if not c:
            return self.zero()
        mul = self.ring.mul
        return LaurentPoly._raw({m: mul(x, c) for m, x in self.terms.items()}, self.ring)

    def shift(self, m: tuple):
        """Multiply by the monomial m."""
        return LaurentPoly._raw({mono_mul(k, m): c for k, c in self.terms.items()}, self.ring)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, o):
        if not isinstance(o, LaurentPoly):
            try:
                o = LaurentPoly.const(o, self.ring)
            except (RingError, TypeError, ValueError):
                return NotImplemented
        return self.ring == o.ring and self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # units
    def is_unit(self, invertible=None) -> bool:
        """Single monomial with invertible coefficient.

        ``invertible`` optionally restricts which variables count as units
        (a predicate on names); by default every variable is invertible.
        """
        if len(self.terms) != 1:
            return False
        (m, c), = self.terms.items()
        if not self.ring.is_unit(c):
            return False
        if invertible is not None:
            return all(invertible(k) for k, _ in m)
        return True

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError("not a unit: %s" % self)
        (m, c), = self.terms.items()
        return LaurentPoly._raw({mono_inv(m): self.ring.inv(c)}, self.ring)

    def min_exponents(self) -> dict:
        out = {}
        for m in self.terms:
            for k, v in m:
                if v < out.get(k, 0):
                    out[k] = v
        return out

    def degree_in(self, name: str) -> tuple[int, int]:
        es = [dict(m).get(name, 0) for m in self.terms] or [0]
        return min(es), max(es)

    # exact division by a polynomial (used by fraction-free elimination)
    def divexact(self, d: "LaurentPoly") -> "LaurentPoly":
        d = self._check(d)
        if not d:
            raise ZeroDivisionError("division by zero polynomial")
        if not self:
            return self
        if len(d.terms) == 1:
            (m, c), = d.terms.items()
            r = self.ring
            if r.kind == "ZZ":
                out = {}
                for k, x in self.terms.items():
                    q, rem = divmod(x, c)
                    if rem:
                        raise ArithmeticError("inexact division")
                    out[mono_mul(k, mono_inv(m))] = q
                return LaurentPoly._raw(out, r)
            ci = r.inv(c)
            return LaurentPoly._raw(
                {mono_mul(k, mono_inv(m)): r.mul(x, ci) for k, x in self.terms.items()}, r)
        names = sorted(self.variables() | d.variables())
        key = lambda m: tuple(dict(m).get(n, 0) for n in names)
        r = self.ring
        lm_d = max(d.terms, key=key)
        lc_d = d.terms[lm_d]
        rem = dict(self.terms)
        q = {}
        while rem:
            lm = max(rem, key=key)
            lc = rem[lm]
            if r.kind == "ZZ":
                c, bad = divmod(lc, lc_d)
                if bad:
                    raise ArithmeticError("inexact division")
            else:
                c = r.mul(lc, r.inv(lc_d))
            m = mono_mul(lm, mono_inv(lm_d))
            q[m] = c
            for dm, dc in d.terms.items():
                mm = mono_mul(dm, m)
                x = r.sub(rem.get(mm, r.zero()), r.mul(dc, c))
                if x:
                    rem[mm] = x
                else:
                    rem.pop(mm, None)
            if len(q) > 100000:
                raise ArithmeticError("inexact division")
        return LaurentPoly._raw(q, r)

    # evaluation and substitution
    def substitute(self, values: dict, ring: CoeffRing | None = None) -> "LaurentPoly":
        """Ring morphism sending each assigned variable to a LaurentPoly.

        Unassigned variables map to themselves.  A variable occurring with a
        negative exponent must be sent to a unit.
        """
        ring = ring or self.ring
        out = LaurentPoly._raw({}, ring)
        cache = {}

        def power(name, e):
            key = (name, e)
            if key not in cache:
                v = values[name]
                if not isinstance(v, LaurentPoly):
                    v = LaurentPoly.const(v, ring)
                if e < 0 and not v.is_unit():
                    raise RingError("variable %s sent to non-unit %s" % (name, v))
                cache[key] = v ** e
            return cache[key]

        for m, c in self.terms.items():
            term = LaurentPoly.const(ring.coerce(c) if ring != self.ring else c, ring)
            rest = []
            for k, e in m:
                if k in values:
                    term = term * power(k, e)
                else:
                    rest.append((k, e))
            if rest:
                term = term.shift(tuple(rest))
            out = out + term
        return out

    def evaluate(self, values: dict, ring: CoeffRing):
        """Evaluate at scalar values (all variables must be assigned)."""
        acc = ring.zero()
        for m, c in self.terms.items():
            t = ring.coerce(c)
            for k, e in m:
                v = values[k]
                if e < 0:
                    v = ring.inv(v)
                    e = -e
                for _ in range(e):
                    t = ring.mul(t, v)
            acc = ring.add(acc, t)
        return acc

    def map_coeffs(self, f, ring: CoeffRing):
        t = {}
        for m, c in self.terms.items():
            x = f(c)
            if x:
                t[m] = x
        return LaurentPoly._raw(t, ring)

    # text form
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0])

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            s = self.ring.format(c)
            for k, e in m:
                s += "*%s" % k if e == 1 else "*%s^%d" % (k, e)
            parts.append(s)
        return " + ".join(parts)

    def __repr__(self):
        return "LaurentPoly(%s)" % self


_TERM = re.compile(r"\s*\+\s*(?![^()]*\))")


def parse_poly(s: str, ring: CoeffRing = ZZ) -> LaurentPoly:
    """Inverse of ``str`` on LaurentPoly."""
    s = s.strip()
    if s == "0":
        return LaurentPoly._raw({}, ring)
    terms = {}
    for part in _TERM.split(s):
        if ring.kind == "CYC" and part.startswith("("):
            close = part.index(")")
            c = ring.parse(part[:close + 1])
            rest = part[close + 1:]
        else:
            head, _, rest = part.partition("*")
            c = ring.parse(head)
            rest = "*" + rest if rest else ""
        m = {}
        for factor in filter(None, rest.split("*")):
            name, _, e = factor.partition("^")
            m[name] = m.get(name, 0) + (int(e) if e else 1)
        key = tuple(sorted((k, v) for k, v in m.items() if v))
        terms[key] = ring.add(terms[key], c) if key in terms else c
    return LaurentPoly(terms, ring)


def lp_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    if a.ring != b.ring:
        raise RingError("ring mismatch")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError("unknown op %r" % op)


def lp_is_unit(a: LaurentPoly, invertible=None) -> bool:
    return a.is_unit(invertible)


# ---------------------------------------------------------------------------
# specialisation maps


class SpecializationMap:
    """Ring morphism on parameters; every assigned value must be a unit."""

    def __init__(self, assignments: dict, target: CoeffRing, strict_units: bool = True):
        self.target = target
        self.assignments = {}
        for k, v in assignments.items():
            if not isinstance(v, LaurentPoly):
                v = LaurentPoly.const(v, target)
            if v.ring != target:
                v = v.map_coeffs(target.coerce, target)
            if strict_units and not v.is_unit():
                raise RingError("parameter %s assigned non-unit %s" % (k, v))
            self.assignments[k] = v

    def __call__(self, a: LaurentPoly) -> LaurentPoly:
        return lp_specialize(a, self)

    def surviving(self) -> set:
        out = set()
        for k, v in self.assignments.items():
            out |= v.variables()
        return out


def lp_specialize(a: LaurentPoly, m: SpecializationMap) -> LaurentPoly:
    missing = a.variables() - set(m.assignments)
    if missing:
        raise RingError("unassigned parameters: %s" % ", ".join(sorted(missing)))
    return a.substitute(m.assignments, m.target)


def content(p: LaurentPoly) -> int:
    g = 0
    for c in p.terms.values():
        g = gcd(g, int(c))
    return g
