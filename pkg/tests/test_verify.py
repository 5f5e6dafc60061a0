import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckerank2.engine import build_mul_table, cyclic_basis, reduce
from heckerank2.parabolic import catalog_spec, expand_parabolic
from heckerank2.presentations import registry_get
from heckerank2.rings import LaurentPoly, PrimeField, lp_is_unit, mono
from heckerank2.verify import (
    DeterminantError, change_of_basis, det_bareiss, det_cofactor, determinant, group_specialization_check,
    modular_screen,
)


def v(n, e=1):
    return LaurentPoly.var(n, exp=e)


entries = st.dictionaries(
    st.dictionaries(st.sampled_from(["u1", "u2"]), st.integers(-2, 2), max_size=2).map(lambda d: mono(**d)),
    st.integers(-3, 3), max_size=3).map(LaurentPoly)


@st.composite
def laurent_matrices(draw):
    n = draw(st.integers(1, 5))
    return [[draw(entries) for _ in range(n)] for _ in range(n)]


def test_bareiss_examples():
    assert det_bareiss([[v("u1")]]) == v("u1")
    a0 = v("a_s_0")
    assert det_bareiss([[LaurentPoly.const(1), LaurentPoly.const(0)], [LaurentPoly.const(0), a0]]) == a0
    assert det_bareiss([]) == LaurentPoly.const(1)


def test_bareiss_negative_exponents():
    M = [[v("u1", -1), v("u2")], [v("u2", -2), v("u1", 3)]]
    assert det_bareiss(M) == v("u1", 2) - v("u2", -1)


def test_bareiss_non_square():
    with pytest.raises(DeterminantError):
        det_bareiss([[v("u1"), v("u2")]])


@settings(max_examples=150, deadline=None)
@given(laurent_matrices())
def test_bareiss_matches_cofactor(M):
    assert det_bareiss(M) == det_cofactor(M)


@settings(max_examples=100, deadline=None)
@given(laurent_matrices())
def test_sparse_determinant_matches_cofactor(M):
    from heckerank2.engine import LPDomain
    n = len(M)
    cols = [{i: M[i][j] for i in range(n) if M[i][j]} for j in range(n)]
    assert determinant(cols, LPDomain()) == det_cofactor(M)


def test_change_of_basis_identity(g4):
    cob = change_of_basis(list(g4.basis.words), g4)
    n = len(g4.basis)
    one, zero = LaurentPoly.const(1), LaurentPoly.const(0)
    assert cob.matrix() == [[one if i == j else zero for j in range(n)] for i in range(n)]
    assert cob.determinant == one and cob.verdict == "PASS"


def test_change_of_basis_repeated_word(g4):
    words = list(expand_parabolic(catalog_spec("G4:r-s1")))
    words[5] = words[3]
    cob = change_of_basis(words, g4)
    assert not cob.determinant and cob.verdict == "FAIL"


def test_change_of_basis_g4_right_parabolic(g4):
    spec = catalog_spec("G4:r-s1")
    assert [str(w) for w in spec.coset_words] == [
        "1", "s1*s2*s1*s2*s1*s2", "s2", "s2^2", "s1*s2", "s1*s2^2", "s1^2*s2", "s1^2*s2^2"]
    cob = change_of_basis(expand_parabolic(spec), g4)
    assert cob.verdict == "PASS" and lp_is_unit(cob.determinant)


def test_change_of_basis_size(g4):
    from heckerank2.engine import TableMismatch
    with pytest.raises(TableMismatch):
        change_of_basis(["s1"], g4)


def test_change_of_basis_modular_table(modular_tables):
    t = modular_tables["G8"]
    cob = change_of_basis(expand_parabolic(catalog_spec("G8:r-s2")), t)
    assert cob.mode == "modular" and cob.verdict == "PASS"


def test_cyclic_reference_determinant():
    t = build_mul_table("C4", cyclic_basis(4))
    words = [t.presentation.parse(w) for w in ("1", "s^-1", "s^-2", "s^-3")]
    cob = change_of_basis(words, t)
    assert cob.verdict == "PASS"


def test_modular_screen_reference():
    p = registry_get("G4")
    t = build_mul_table(p)
    r = modular_screen(list(t.basis.words), p, trials=5)
    assert r["verdict"] == "PASS" and r["good"] and r["probabilistic"]
    assert all(w["nonzero"] == 5 for w in r["witnesses"])
    assert len(r["witnesses"]) == 3


def test_modular_screen_repeated():
    p = registry_get("G4")
    words = list(expand_parabolic(catalog_spec("G4:l-s2")))
    words[-1] = words[1]
    r = modular_screen(words, p, trials=5)
    assert r["verdict"] == "FAIL"
    assert all(w["nonzero"] == 0 for w in r["witnesses"])


def test_modular_screen_rejects_zero_trials():
    with pytest.raises(ValueError):
        modular_screen([], "G4", trials=0)


def test_exact_pass_implies_modular_pass(g4):
    for sid in ("G4:l-s1", "G4:r-s1", "G4:l-s2", "G4:r-s2"):
        words = expand_parabolic(catalog_spec(sid))
        assert change_of_basis(words, g4).verdict == "PASS"
        assert modular_screen(words, g4, trials=4, seed=3)["verdict"] == "PASS"


def test_group_specialization_g4(g4):
    r = group_specialization_check("G4", table=g4)
    assert r["verdict"] == "PASS"
    assert (r["group_order"], r["center_order"]) == (24, 2)


@pytest.mark.parametrize("d", [2, 3, 5, 6])
def test_group_specialization_cyclic(d):
    r = group_specialization_check(registry_get("C%d" % d), cyclic_basis(d))
    assert r["verdict"] == "PASS" and r["group_order"] == d and r["center_order"] == d


@pytest.mark.parametrize("name,order,center", [("G7", 144, 12), ("G8", 96, 4), ("G13", 96, 4)])
def test_group_specialization_large(exact_tables, name, order, center):
    r = group_specialization_check(name, table=exact_tables[name])
    assert r["verdict"] == "PASS"
    assert (r["group_order"], r["center_order"]) == (order, center)


@pytest.mark.parametrize("name,order,center", [("G5", 72, 6), ("G6", 48, 4)])
def test_group_specialization_native(name, order, center):
    r = group_specialization_check(name)
    assert (r["verdict"], r["group_order"], r["center_order"]) == ("PASS", order, center)


def test_modular_prime_field():
    t = build_mul_table("G4", mode="modular", prime=1000003)
    assert t.ring == PrimeField(1000003)
    assert reduce("s1 s2 s1", t) == reduce("s2 s1 s2", t)
