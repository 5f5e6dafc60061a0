import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckerank2 import _enumerate
from heckerank2.engine import (
    BasisSpec, FreeElement, ReductionIncomplete, TableMismatch, build_mul_table, cyclic_basis,
    element_inverse, multiply, normalize_word, op_twist, reduce, reference_basis, star,
)
from heckerank2.presentations import registry_get
from heckerank2.rings import LaurentPoly
from heckerank2.verify import change_of_basis
from heckerank2.words import Word


def v(n, e=1):
    return LaurentPoly.var(n, exp=e)


U1, U2 = v("u_s_1"), v("u_s_2")


def random_word(p, rng, max_len=4, exps=(-2, -1, 1, 2)):
    return Word([(rng.choice(p.generators), rng.choice(exps)) for _ in range(rng.randint(0, max_len))])


def random_element(t, rng, terms=2):
    """Reduced combination of a few short words with small scalar coefficients."""
    p = t.presentation
    out = reduce(random_word(p, rng), t)
    for _ in range(terms - 1):
        c = t.domain.from_lp(LaurentPoly.const(rng.randint(-9, 9)))
        out = out + reduce(random_word(p, rng), t).scale(c)
    return out


@pytest.fixture(scope="module")
def c2():
    return build_mul_table("C2", cyclic_basis(2))


@pytest.fixture(scope="module")
def g4_slice():
    return build_mul_table("G4", coords="reduced")


# ---------------------------------------------------------------------------
# normalize_word


def test_normalize_c2():
    p = registry_get("C2")
    s = Word([("s", 1)])
    assert normalize_word("s^2", p) == FreeElement({s: U1 + U2, Word(): -U1 * U2})
    inv = (U1 * U2) ** -1
    assert normalize_word("s^-1", p) == FreeElement({s: -inv, Word(): inv * (U1 + U2)})
    assert normalize_word("1", p) == FreeElement.word(Word())


def test_normalize_exponent_range():
    p = registry_get("G8")
    el = normalize_word("s1^-3 s2^9 s1^5", p)
    for w in el.terms:
        assert all(1 <= e <= 3 for _, e in w)


def test_normalize_unknown_generator():
    with pytest.raises(TableMismatch):
        normalize_word(Word([("s9", 1)]), registry_get("G4"))


# ---------------------------------------------------------------------------
# tables


def test_c3_row():
    t = build_mul_table("C3", cyclic_basis(3), coords="a")
    row = [t.entry("s", 2, k) for k in range(3)]
    assert row == [v("a_s_0"), v("a_s_1"), v("a_s_2")]


def test_g4_rows(g4):
    b = g4.basis
    assert g4.rows["s1"][0] == {b.index(Word([("s1", 1)])): g4.domain.one}
    p = g4.presentation
    a = p.hecke("s").coeffs
    j = b.index(Word([("s2", 2)]))
    want = {b.index(Word()): a[0], b.index(Word([("s2", 1)])): a[1], j: a[2]}
    assert g4.rows["s2"][j] == want


def test_reference_basis_shape():
    for name in ("G4", "G7", "G8", "G13"):
        p = registry_get(name)
        b = reference_basis(p)
        assert len(b) == p.group_order and b.words[0] == Word()
        assert b.validate(p) == []


@pytest.mark.parametrize("name", ["G4", "C3", "C5"])
def test_check_relations_exact(name):
    p = registry_get(name)
    basis = cyclic_basis(p.group_order) if name.startswith("C") else None
    assert build_mul_table(p, basis, check=True).check_relations()


def test_check_relations_slices(exact_tables, theta_g5, theta_g6):
    for t in list(exact_tables.values()) + [theta_g5, theta_g6]:
        assert t.check_relations()


def test_check_relations_modular(modular_tables):
    for t in modular_tables.values():
        assert t.check_relations()


def test_right_table_relations(g4_right):
    assert g4_right.check_relations()


def test_relation_soundness(g4, exact_tables):
    for t in [g4] + list(exact_tables.values()):
        p = t.presentation
        for l, r in p.braid_relations:
            assert reduce(l, t) == reduce(r, t)
        for g in p.generators:
            e = p.order(g)
            a = t.hecke[g]
            rhs = None
            for i in range(e):
                term = reduce(Word([(g, i)]), t).scale(a[i])
                rhs = term if rhs is None else rhs + term
            assert reduce(Word([(g, e)]), t) == rhs


# ---------------------------------------------------------------------------
# reduce, multiply, inverse


def test_reduce_examples(g4, c2):
    for j, w in enumerate(g4.basis.words):
        assert reduce(w, g4).data == {j: g4.domain.one}
    assert reduce("s1 s2 s1", g4) == reduce("s2 s1 s2", g4)
    r = reduce("s s", c2)
    assert r.coords() == [-U1 * U2, U1 + U2]


def test_reduce_idempotent_all_groups(exact_tables):
    for t in exact_tables.values():
        for j, w in enumerate(t.basis.words):
            assert reduce(w, t).data == {j: t.domain.one}


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(-5, 5))
def test_reduce_linear(g4, rnd, k):
    p = g4.presentation
    w1, w2 = random_word(p, rnd), random_word(p, rnd)
    c = U1 ** k + 2 * U2
    lhs = reduce(FreeElement.word(w1, c) + FreeElement.word(w2), g4)
    assert lhs == reduce(w1, g4).scale(c) + reduce(w2, g4)


def test_multiply_identities(g4):
    one = g4.basis_element(0)
    for j in range(len(g4.basis)):
        b = g4.basis_element(j)
        assert multiply(one, b) == b
        assert multiply(b, one) == b


def test_multiply_matches_concatenation(g4, g4_right):
    rng = random.Random(3)
    p = g4.presentation
    for _ in range(30):
        w1, w2 = random_word(p, rng), random_word(p, rng)
        for t in (g4, g4_right):
            assert multiply(reduce(w1, t), reduce(w2, t)) == reduce(w1 * w2, t)


def test_multiply_modular_matches_concatenation(modular_tables):
    rng = random.Random(5)
    for t in modular_tables.values():
        p = t.presentation
        for _ in range(10):
            w1, w2 = random_word(p, rng), random_word(p, rng)
            assert multiply(reduce(w1, t), reduce(w2, t)) == reduce(w1 * w2, t)


def test_center_commutes(g4, exact_tables):
    for t in [g4] + list(exact_tables.values()):
        p = t.presentation
        z = reduce(p.center_word, t)
        for j in range(len(t.basis)):
            b = t.basis_element(j)
            assert multiply(z, b) == multiply(b, z)


def test_g4_z_commutes_with_s1(g4):
    z, s1 = reduce("z", g4), reduce("s1", g4)
    assert multiply(z, s1) == multiply(s1, z)


def test_element_inverse(g4, c2):
    assert element_inverse(Word(), g4) == g4.basis_element(0)
    assert element_inverse("s", c2) == reduce(normalize_word("s^-1", c2.presentation), c2)
    w = g4.presentation.parse("s2 s1")
    assert multiply(element_inverse(w, g4), reduce(w, g4)) == g4.basis_element(0)


def test_element_inverse_modular(modular_tables):
    rng = random.Random(11)
    for t in modular_tables.values():
        for _ in range(10):
            w = random_word(t.presentation, rng, max_len=6)
            assert multiply(element_inverse(w, t), reduce(w, t)) == t.basis_element(0)


def test_basis_mismatch(g4, g4_right):
    with pytest.raises(TableMismatch):
        multiply(reduce("s1", g4), reduce("s1", g4_right))
    with pytest.raises(TableMismatch):
        reduce(Word([("s3", 1)]), g4)
    with pytest.raises(TableMismatch):
        build_mul_table("G4", BasisSpec("short", (Word(), Word([("s1", 1)]))))


# ---------------------------------------------------------------------------
# associativity on random triples


def _associativity(t, rng, n=200):
    bad = 0
    for _ in range(n):
        a, b, c = (random_element(t, rng) for _ in range(3))
        if multiply(multiply(a, b), c) != multiply(a, multiply(b, c)):
            bad += 1
    return bad


def test_associativity_exact_g4(g4_slice):
    assert _associativity(g4_slice, random.Random(0)) == 0


@pytest.mark.parametrize("d", [2, 3, 4])
def test_associativity_exact_cyclic(d):
    t = build_mul_table("C%d" % d, cyclic_basis(d), coords="a")
    assert _associativity(t, random.Random(d)) == 0


@pytest.mark.parametrize("name", ["G7", "G8", "G13"])
def test_associativity_modular(modular_tables, name):
    assert _associativity(modular_tables[name], random.Random(1)) == 0


# ---------------------------------------------------------------------------
# op_twist


def test_op_twist_examples():
    p = registry_get("G4")
    c = U1 + 3 * U2 ** -2
    el = FreeElement.word(p.parse("s1 s2"), c)
    cstar = U1 ** -1 + 3 * U2 ** 2
    assert op_twist(el, p) == FreeElement.word(p.parse("s2^-1 s1^-1"), cstar)
    one = FreeElement.word(Word())
    assert op_twist(one, p) == one


def test_star_is_involution():
    p = registry_get("G7")
    x = v("a_s2_1") * v("a_s3_2") ** 2 - v("a_s1_1")
    assert star(star(x, p, "reduced"), p, "reduced") == x
    y = v("a_s2_0") ** -1 * v("a_s2_1") + v("a_s3_2")
    assert star(star(y, p, "a"), p, "a") == y


def _twist_pair(t, coords, rng):
    p = t.presentation
    x = v("u_s_1") if coords == "u" else v("a_s_1")
    h1 = FreeElement.word(random_word(p, rng)) + FreeElement.word(random_word(p, rng), x)
    h2 = FreeElement.word(random_word(p, rng), 2) - FreeElement.word(random_word(p, rng))
    lhs = reduce(op_twist(h1 * h2, p, coords), t)
    rhs = multiply(reduce(op_twist(h2, p, coords), t), reduce(op_twist(h1, p, coords), t))
    return lhs == rhs


def test_op_twist_anti_multiplicative(g4_slice):
    rng = random.Random(2)
    assert all(_twist_pair(g4_slice, "reduced", rng) for _ in range(150))


def test_op_twist_anti_multiplicative_u(g4):
    rng = random.Random(4)
    assert all(_twist_pair(g4, "u", rng) for _ in range(20))


def test_op_twist_of_left_parabolic_set(g4):
    from heckerank2.parabolic import catalog_spec, expand_parabolic
    words = expand_parabolic(catalog_spec("G4:l-s1"))
    twisted = [w.inverse() for w in words]
    assert len(set(twisted)) == 24
    assert change_of_basis(twisted, g4).verdict == "PASS"


# ---------------------------------------------------------------------------
# centre identities in H(G7)


@pytest.mark.parametrize("g,h,hh", [("s1", "s2", "s3"), ("s2", "s3", "s1"), ("s3", "s1", "s2")])
def test_g7_center_identities(exact_tables, g, h, hh):
    t = exact_tables["G7"]
    p = t.presentation
    for k in range(13):
        z = reduce(p.parse("z^%d" % k), t)
        assert z == reduce(p.parse("%s^%d (%s %s)^%d" % (g, k, h, hh, k)), t)
        assert z == reduce(p.parse("(%s %s)^%d %s^%d" % (h, hh, k, g, k)), t)


# ---------------------------------------------------------------------------
# group oracle on random words


def test_random_words_specialise_to_group_elements(g4):
    p = g4.presentation
    m = p.group_specialization()
    one = LaurentPoly.const(1, m.target)
    rng = random.Random(8)
    for _ in range(40):
        el = reduce(random_word(p, rng, max_len=6), g4)
        vals = {k: m(c) for k, c in el.data.items()}
        vals = {k: c for k, c in vals.items() if c}
        assert len(vals) == 1 and next(iter(vals.values())) == one


# ---------------------------------------------------------------------------
# cache and budget


def test_cache_hit_same_verdict(tmp_cache):
    from heckerank2.parabolic import catalog_spec, expand_parabolic
    words = expand_parabolic(catalog_spec("G4:r-s1"))
    cold = build_mul_table("G4")
    assert cold.meta["cache"] == "miss"
    assert list(tmp_cache.glob("table-*.json"))
    warm = build_mul_table("G4")
    assert warm.meta["cache"] == "hit"
    a, b = change_of_basis(words, cold), change_of_basis(words, warm)
    assert a.verdict == b.verdict == "PASS"
    assert a.determinant == b.determinant
    assert cold.rows == warm.rows


def test_corrupt_cache_is_rebuilt(tmp_cache):
    build_mul_table("C3", cyclic_basis(3))
    (f,) = tmp_cache.glob("table-*.json")
    f.write_text("{not json")
    t = build_mul_table("C3", cyclic_basis(3))
    assert t.meta["cache"] == "miss"


def test_budget_exhausted(tmp_cache, monkeypatch):
    monkeypatch.setattr(_enumerate, "SYMBOL_BUDGET", 5)
    with pytest.raises(ReductionIncomplete):
        build_mul_table("G4", use_cache=False)
