import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckerank2.words import Word, WordSyntaxError, parse_word, word_key

letters = st.lists(st.tuples(st.sampled_from(["s1", "s2", "s3"]), st.integers(-3, 3)), max_size=8)


def test_merge_on_construction():
    assert Word([("s1", 1), ("s1", 2), ("s2", 1)]) == Word([("s1", 3), ("s2", 1)])
    assert Word([("s1", 1), ("s1", -1)]) == Word()
    assert Word([("s1", 0)]) == Word()


def test_parse():
    z = parse_word("s1 s2")
    assert parse_word("z^2 s3", center=z) == Word([("s1", 1), ("s2", 1), ("s1", 1), ("s2", 1), ("s3", 1)])
    assert parse_word("(s1s2s1)^-1") == Word([("s1", -1), ("s2", -1), ("s1", -1)])
    assert parse_word("s1*s2^-1*s1^3") == Word([("s1", 1), ("s2", -1), ("s1", 3)])
    assert parse_word("1") == Word()
    with pytest.raises(WordSyntaxError):
        parse_word("(s1")


def test_str_and_repr():
    w = Word([("s1", 2), ("s2", -1)])
    assert str(w) == "s1^2*s2^-1"
    assert repr(w) == "Word(s1^2*s2^-1)"
    assert str(Word()) == "1"


@settings(max_examples=300, deadline=None)
@given(letters, letters)
def test_group_laws(a, b):
    a, b = Word(a), Word(b)
    assert a * a.inverse() == Word()
    assert (a * b).inverse() == b.inverse() * a.inverse()
    assert parse_word(str(a)) == a
    assert a.length() == len(list(a.letters()))


def test_canonical_order():
    gens = ["s1", "s2"]
    ws = [Word([("s2", 1)]), Word([("s1", 1), ("s2", 1)]), Word(), Word([("s1", 1)])]
    assert [str(w) for w in sorted(ws, key=lambda w: word_key(w, gens))] == ["1", "s1", "s2", "s1*s2"]
