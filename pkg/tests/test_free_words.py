import pytest
from hypothesis import given, strategies as st

from ncschur.free_words import (
    WordIndex,
    concat,
    enumerate_words,
    factorizations,
    transpose,
    word_count,
)

words = st.text(alphabet="123", max_size=6)


def test_concat_examples():
    assert concat("1", "2") == "12"
    assert concat("", "122") == "122"
    assert concat("21", "1") == "211"


def test_transpose_examples():
    assert transpose("12") == "21"
    assert transpose("") == ""
    assert transpose("112") == "211"


def test_enumerate_examples():
    assert enumerate_words(2, 2) == ["", "1", "2", "11", "12", "21", "22"]
    assert enumerate_words(1, 3) == ["", "1", "11", "111"]
    assert enumerate_words(3, 0) == [""]


@pytest.mark.parametrize("d", [0, 10])
def test_enumerate_rejects_alphabet(d):
    with pytest.raises(ValueError):
        enumerate_words(d, 2)


def test_factorizations_examples():
    assert factorizations("12") == [("", "12"), ("1", "2"), ("12", "")]
    assert factorizations("") == [("", "")]


@given(words, words)
def test_transpose_reverses_concat(a, b):
    assert transpose(concat(a, b)) == concat(transpose(b), transpose(a))


@given(words)
def test_factorization_count_and_product(v):
    splits = factorizations(v)
    assert len(splits) == len(v) + 1
    assert all(a + b == v for a, b in splits)


@pytest.mark.parametrize("d,N", [(1, 4), (2, 3), (3, 3)])
def test_enumeration_closed_under_factors(d, N):
    ws = enumerate_words(d, N)
    assert len(ws) == len(set(ws)) == word_count(d, N) == sum(d ** k for k in range(N + 1))
    pool = set(ws)
    assert all(a in pool and b in pool for v in ws for a, b in factorizations(v))


def test_word_index_round_trip():
    idx = WordIndex(3, 3)
    assert all(idx.index(idx.word(i)) == i for i in range(len(idx)))
    assert list(idx.of_length(1)) == ["1", "2", "3"]
    with pytest.raises(KeyError):
        idx.index("1111")
