"""Registry of Hecke algebra presentations.

Presentations are loaded from ``data/presentations.json`` (schema version 1)
and validated on load.  Cyclic groups ``C<d>`` are generated on demand.

Three coordinate systems are used for the scalars:

``u``        the parameters u_<orbit>_<j> (all invertible);
``a``        the Hecke coefficients a_<orbit>_<i>, i = 0..e-1, with
             s^e = sum a_i s^i; only a_<orbit>_0 is invertible;
``reduced``  the ``a`` coordinates on the slice a_<orbit>_0 = 1.

The algebra is defined over Z[a, a_0^-1], so tables computed in ``a`` or
``reduced`` coordinates map to ``u`` coordinates by substitution.  Each
structure constant is homogeneous for the grading that gives s and
u_<orbit>_j degree 1 within an orbit, so nothing is lost on the slice.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import combinations
from math import lcm

from .rings import (
    ZZ, CoeffRing, Cyclotomic, LaurentPoly, RingError, SpecializationMap, zeta,
)
from .words import Word, parse_word

SCHEMA_VERSION = 1


class PresentationError(ValueError):
    pass


def u_name(orbit: str, j: int) -> str:
    return "u_%s_%d" % (orbit, j)


def a_name(orbit: str, i: int) -> str:
    return "a_%s_%d" % (orbit, i)


_A_VAR = re.compile(r"a_(.+)_(\d+)$")


def is_invertible_var(name: str) -> bool:
    """u parameters and a_<orbit>_0 are units; the other a coordinates are not."""
    m = _A_VAR.match(name)
    return m is None or m.group(2) == "0"


@dataclass(frozen=True)
class HeckeRelation:
    orbit: str
    coeffs: tuple          # a_0 .. a_{e-1}:  s^e = sum a_i s^i
    inverse_coeffs: tuple  # c_0 .. c_{e-1}:  s^-1 = sum c_i s^i

    @property
    def order(self):
        return len(self.coeffs)


def elementary_symmetric(vals, j: int, ring: CoeffRing = ZZ) -> LaurentPoly:
    out = LaurentPoly.const(0, ring)
    for combo in combinations(vals, j):
        t = LaurentPoly.const(1, ring)
        for v in combo:
            t = t * v
        out = out + t
    return out


def _relation_from_coeffs(orbit, coeffs) -> HeckeRelation:
    e = len(coeffs)
    a0i = coeffs[0].inverse()
    inv = [(-coeffs[i + 1]) * a0i for i in range(e - 1)] + [a0i]
    return HeckeRelation(orbit, tuple(coeffs), tuple(inv))


def hecke_coefficients(e: int, params, orbit: str = "", ring: CoeffRing = ZZ) -> HeckeRelation:
    """a_{e-j} = (-1)^(j-1) f_j(params) with f_j elementary symmetric."""
    if e < 2:
        raise PresentationError("Hecke relation needs e >= 2")
    if len(params) != e:
        raise PresentationError("need %d parameters, got %d" % (e, len(params)))
    vals = [p if isinstance(p, LaurentPoly) else LaurentPoly.var(p, ring) for p in params]
    coeffs = [None] * e
    for j in range(1, e + 1):
        f = elementary_symmetric(vals, j, ring)
        coeffs[e - j] = f if j % 2 == 1 else -f
    if not coeffs[0].is_unit():
        raise PresentationError("a_0 is not a unit")
    return _relation_from_coeffs(orbit, coeffs)


@dataclass
class Presentation:
    name: str
    generators: list
    orbit_of: dict
    order_of_orbit: dict
    braid_relations: list            # list of (Word, Word)
    group_order: int
    center_word: Word
    center_order: int
    pi_power: int
    native: bool = False
    raw_relations: list = field(default_factory=list)

    @property
    def orbits(self) -> list:
        seen = []
        for g in self.generators:
            o = self.orbit_of[g]
            if o not in seen:
                seen.append(o)
        return seen

    @property
    def params(self) -> dict:
        return {o: [u_name(o, j) for j in range(1, self.order_of_orbit[o] + 1)]
                for o in self.orbits}

    def order(self, g: str) -> int:
        return self.order_of_orbit[self.orbit_of[g]]

    def parse(self, s: str) -> Word:
        w = parse_word(s, center=self.center_word)
        bad = w.generators() - set(self.generators)
        if bad:
            raise PresentationError("unknown generator(s) %s in %r" % (sorted(bad), s))
        return w

    # Hecke relations in the three coordinate systems
    def hecke(self, orbit: str, coords: str = "u") -> HeckeRelation:
        e = self.order_of_orbit[orbit]
        if coords == "u":
            return hecke_coefficients(e, self.params[orbit], orbit)
        if coords == "a":
            cs = [LaurentPoly.var(a_name(orbit, i)) for i in range(e)]
        elif coords == "reduced":
            cs = [LaurentPoly.const(1)] + [LaurentPoly.var(a_name(orbit, i)) for i in range(1, e)]
        else:
            raise PresentationError("unknown coordinates %r" % coords)
        return _relation_from_coeffs(orbit, cs)

    def a_to_u(self) -> dict:
        """Substitution a_<orbit>_i -> its expression in the u parameters."""
        out = {}
        for o in self.orbits:
            rel = self.hecke(o, "u")
            for i, c in enumerate(rel.coeffs):
                out[a_name(o, i)] = c
        return out

    def weight(self, w: Word) -> dict:
        """Degree of a word for each orbit grading."""
        out = {o: 0 for o in self.orbits}
        for g, e in w:
            out[self.orbit_of[g]] += e
        return out

    def rehomogenize(self, p: LaurentPoly, weight: dict) -> LaurentPoly:
        """Lift a polynomial on the slice a_0 = 1 to the homogeneous one of the given weight."""
        terms = {}
        for m, c in p.terms.items():
            d = dict(m)
            for o in self.orbits:
                e = self.order_of_orbit[o]
                rest = weight.get(o, 0)
                for i in range(1, e):
                    rest -= (e - i) * d.get(a_name(o, i), 0)
                if rest % e:
                    raise PresentationError("entry is not homogeneous of weight %s" % weight)
                if rest:
                    d[a_name(o, 0)] = d.get(a_name(o, 0), 0) + rest // e
            terms[tuple(sorted((k, v) for k, v in d.items() if v))] = c
        return LaurentPoly(terms, p.ring)

    def group_specialization(self) -> SpecializationMap:
        n = lcm(*self.order_of_orbit.values())
        ring = Cyclotomic(n)
        assign = {}
        for o in self.orbits:
            e = self.order_of_orbit[o]
            for j in range(1, e + 1):
                assign[u_name(o, j)] = LaurentPoly.const(zeta(n, j * (n // e)), ring)
        return SpecializationMap(assign, ring)

    def fingerprint(self) -> str:
        rels = ";".join("%s=%s" % (l, r) for l, r in self.braid_relations)
        orbs = ",".join("%s:%s:%d" % (g, self.orbit_of[g], self.order(g)) for g in self.generators)
        return "%s|%s|%s|%s|%d" % (self.name, orbs, rels, self.center_word, self.group_order)


def validate_presentation(p: Presentation) -> list:
    """List of human-readable violations (empty when valid)."""
    issues = []
    gens = set(p.generators)
    for g in p.generators:
        if g not in p.orbit_of:
            issues.append("generator %s has no orbit" % g)
        elif p.orbit_of[g] not in p.order_of_orbit:
            issues.append("orbit %s has no order" % p.orbit_of[g])
    for o, e in p.order_of_orbit.items():
        if e < 2:
            issues.append("orbit %s has order %d < 2" % (o, e))
    for l, r in p.braid_relations:
        if l.length() != r.length():
            issues.append("inhomogeneous relation %s = %s" % (l, r))
        if not (l.is_positive() and r.is_positive()):
            issues.append("relation %s = %s is not positive" % (l, r))
        bad = (l.generators() | r.generators()) - gens
        if bad:
            issues.append("relation uses undeclared generator(s) %s" % sorted(bad))
    bad = p.center_word.generators() - gens
    if bad:
        issues.append("center word uses undeclared generator(s) %s" % sorted(bad))
    if p.pi_power != p.center_order:
        issues.append("pi_power %d differs from center order %d" % (p.pi_power, p.center_order))
    if p.group_order < 1:
        issues.append("group order must be positive")
    return issues


def _from_record(rec: dict) -> Presentation:
    gens = list(rec["generators"])

    def parse(s, center=None):
        return parse_word(s, center=center)

    rels = [(parse(l), parse(r)) for l, r in rec["braid_relations"]]
    p = Presentation(
        name=rec["name"], generators=gens, orbit_of=dict(rec["orbit_of"]),
        order_of_orbit=dict(rec["order_of_orbit"]), braid_relations=rels,
        group_order=int(rec["group_order"]), center_word=parse(rec["center_word"]),
        center_order=int(rec["center_order"]), pi_power=int(rec["pi_power"]),
        native=bool(rec.get("native", False)), raw_relations=rec["braid_relations"])
    return p


def cyclic(d: int) -> Presentation:
    if d < 2:
        raise PresentationError("cyclic group needs d >= 2")
    return Presentation(
        name="C%d" % d, generators=["s"], orbit_of={"s": "s"}, order_of_orbit={"s": d},
        braid_relations=[], group_order=d, center_word=Word([("s", 1)]), center_order=d,
        pi_power=d)


@lru_cache(maxsize=None)
def _load() -> dict:
    text = resources.files(__package__).joinpath("data/presentations.json").read_text()
    data = json.loads(text)
    if data.get("schema_version") != SCHEMA_VERSION:
        raise PresentationError("unsupported presentation schema %r" % data.get("schema_version"))
    out = {}
    for rec in data["presentations"]:
        p = _from_record(rec)
        issues = validate_presentation(p)
        if issues:
            raise PresentationError("%s: %s" % (p.name, "; ".join(issues)))
        out[p.name] = p
    return out


def registry_names() -> list:
    return list(_load())


def registry_get(name: str) -> Presentation:
    m = re.fullmatch(r"C(\d+)", name)
    if m:
        return cyclic(int(m.group(1)))
    try:
        return _load()[name]
    except KeyError:
        raise PresentationError("unknown presentation %r" % name) from None


def make_theta(source: str, target: str) -> SpecializationMap:
    """The specialisations of H(G7) whose images contain H(G6) and H(G5)."""
    if source != "G7" or target not in ("G5", "G6"):
        raise PresentationError("unsupported specialisation %s -> %s" % (source, target))
    p = registry_get("G7")
    names = [n for o in p.orbits for n in p.params[o]]
    if target == "G6":
        ring = Cyclotomic(3)
        assign = {n: LaurentPoly.var(n, ring) for n in names}
        assign["u_s2_1"] = LaurentPoly.const(1, ring)
        assign["u_s2_2"] = LaurentPoly.const(zeta(3, 1), ring)
        assign["u_s2_3"] = LaurentPoly.const(zeta(3, 2), ring)
        assign["u_s3_3"] = LaurentPoly.var("u_s3_1", ring)
    else:
        ring = ZZ
        assign = {n: LaurentPoly.var(n, ring) for n in names}
        assign["u_s1_1"] = LaurentPoly.const(1, ring)
        assign["u_s1_2"] = LaurentPoly.const(-1, ring)
    return SpecializationMap(assign, ring)


def to_integer_ring(p: LaurentPoly) -> LaurentPoly:
    """Map a polynomial with rational cyclotomic coefficients back to ZZ."""
    def conv(c):
        c = c.c[0] if hasattr(c, "c") and c.is_rational() else c
        if hasattr(c, "c"):
            raise RingError("coefficient %r is not rational" % (c,))
        return ZZ.coerce(c)
    return p.map_coeffs(conv, ZZ)


def theta_in_a(target: str) -> tuple[dict, CoeffRing]:
    """theta written on the a coordinates of G7.

    Orbits on which theta is the identity keep their a coordinates; the other
    coefficients become Laurent polynomials in the surviving u parameters.
    """
    p = registry_get("G7")
    th = make_theta("G7", target)
    out = {}
    for o in p.orbits:
        params = p.params[o]
        if all(th.assignments[n] == LaurentPoly.var(n, th.target) for n in params):
            continue
        rel = hecke_coefficients(len(params), [th.assignments[n] for n in params], o, th.target)
        for i, c in enumerate(rel.coeffs):
            out[a_name(o, i)] = to_integer_ring(c) if th.target != ZZ else c
    return out, ZZ
