from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modctrl.pauli import (PauliWord, SizeMismatchError, SkewOperator, commutator, embed, embed_at,
                           scale_add, word_multiply, words_commute)

from conftest import op

TABLE = {  # a * b = phase * c
    ("X", "Y"): (1j, "Z"), ("Y", "Z"): (1j, "X"), ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"), ("Z", "Y"): (-1j, "X"), ("X", "Z"): (-1j, "Y"),
}


@pytest.mark.parametrize("a", "IXYZ")
@pytest.mark.parametrize("b", "IXYZ")
def test_single_qubit_table(a, b):
    p = word_multiply(PauliWord.from_string(a), PauliWord.from_string(b))
    if a == b:
        assert (p.phase, str(p.word)) == (1, "I")
    elif "I" in (a, b):
        assert (p.phase, str(p.word)) == (1, a if b == "I" else b)
    else:
        assert (p.phase, str(p.word)) == TABLE[(a, b)]


def test_multi_qubit_phase():
    p = word_multiply(PauliWord.from_string("XY"), PauliWord.from_string("YX"))
    # (XY)(YX) = (i Z)(-i Z) = ZZ
    assert p.phase == 1 and str(p.word) == "ZZ"


def test_commutation():
    assert words_commute(PauliWord.from_string("XX"), PauliWord.from_string("ZZ"))
    assert not words_commute(PauliWord.from_string("XI"), PauliWord.from_string("ZI"))


def test_bracket_of_generators():
    # [iX, iY] = -[X, Y] = -2iZ
    c = commutator(SkewOperator.from_word("X"), SkewOperator.from_word("Y"))
    assert c == op(1, {"Z": -2})
    assert c.to_text() == "-2 * i·Z"


def test_commuting_words_bracket_to_zero():
    assert commutator(op(2, {"XX": 1}), op(2, {"ZZ": 3})).is_zero


def test_size_mismatch():
    with pytest.raises(SizeMismatchError):
        commutator(op(1, {"X": 1}), op(2, {"XX": 1}))


def test_invalid_letters():
    with pytest.raises(ValueError):
        PauliWord.from_string("XQ")


def test_identity_term_dropped_with_flag():
    with pytest.warns(UserWarning):
        s = SkewOperator(2, {PauliWord.from_string("II"): 1, PauliWord.from_string("XZ"): 2})
    assert s.dropped_identity and len(s) == 1


def test_canonical_order():
    s = op(2, {"ZI": 1, "XI": 1, "IY": 1, "YX": 1})
    assert [str(w) for w in s.words()] == ["IY", "XI", "YX", "ZI"]


def test_embedding():
    assert embed(op(2, {"XZ": 1}), 4, 1) == op(4, {"IXZI": 1})
    assert embed_at(op(2, {"XZ": 1}), 4, (3, 0)) == op(4, {"ZIIX": 1})


def test_scale_add_exact():
    s = scale_add([(Fraction(1, 2), op(1, {"X": 1})), (2, op(1, {"X": 1, "Z": 1}))])
    assert s == op(1, {"X": Fraction(5, 2), "Z": 2})


words = st.integers(1, 4).flatmap(lambda n: st.tuples(*[st.text("IXYZ", min_size=n, max_size=n)] * 3))
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def _ops(letters, cs):
    n = len(letters[0])
    out = []
    for w, c in zip(letters, cs):
        word = PauliWord.from_string(w)
        out.append(SkewOperator.zero(n) if word.is_identity else SkewOperator(n, {word: c}))
    return out


@settings(max_examples=150, deadline=None)
@given(words, st.tuples(coeff, coeff, coeff))
def test_antisymmetry(letters, cs):
    a, b, _ = _ops(letters, cs)
    assert commutator(a, b) == -commutator(b, a)


@settings(max_examples=150, deadline=None)
@given(words, st.tuples(coeff, coeff, coeff))
def test_jacobi(letters, cs):
    a, b, c = _ops(letters, cs)
    total = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
    assert total.is_zero


@settings(max_examples=100, deadline=None)
@given(words, st.tuples(coeff, coeff, coeff))
def test_bilinearity(letters, cs):
    a, b, c = _ops(letters, cs)
    assert commutator(a + b, c) == commutator(a, c) + commutator(b, c)
