"""Words over the alphabet {1, ..., d}.

A word is stored as a digit string in monomial order: ``"12"`` is the
monomial ``z_1 z_2`` and the empty string is the unit.  Digit strings keep
JSON keys readable, which is why the alphabet is capped at nine letters.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable, List, Tuple

MAX_LETTERS = 9

Word = str

__all__ = [
    "Word",
    "WordIndex",
    "concat",
    "transpose",
    "enumerate_words",
    "factorizations",
    "word_count",
    "check_word",
    "letters",
]


def check_word(v: Word, d: int) -> Word:
    """Return `v` unchanged, raising ``ValueError`` on letters outside 1..d."""
    for ch in v:
        if not ch.isdigit() or not 1 <= int(ch) <= d:
            raise ValueError(f"letter {ch!r} of word {v!r} not in 1..{d}")
    return v


def letters(v: Word) -> Tuple[int, ...]:
    return tuple(int(ch) for ch in v)


def concat(alpha: Word, beta: Word) -> Word:
    return alpha + beta


def transpose(alpha: Word) -> Word:
    return alpha[::-1]


def word_count(d: int, N: int) -> int:
    """Number of words of length at most `N`."""
    if d == 1:
        return N + 1
    return (d ** (N + 1) - 1) // (d - 1)


@lru_cache(maxsize=64)
def _enumerate(d: int, N: int) -> Tuple[Word, ...]:
    alphabet = "".join(str(k) for k in range(1, d + 1))
    out: List[Word] = []
    for k in range(N + 1):
        out.extend("".join(p) for p in product(alphabet, repeat=k))
    return tuple(out)


def enumerate_words(d: int, N: int) -> List[Word]:
    """All words of length ``<= N`` in graded lexicographic order.

    Parameters
    ----------
    d : int
        Alphabet size, between 1 and 9.
    N : int
        Maximum word length.
    """
    if not 1 <= d <= MAX_LETTERS:
        raise ValueError(f"alphabet size must lie in 1..{MAX_LETTERS}, got {d}")
    if N < 0:
        raise ValueError(f"degree must be nonnegative, got {N}")
    return list(_enumerate(d, N))


def factorizations(v: Word) -> List[Tuple[Word, Word]]:
    """All splits ``v = alpha + beta``, shortest `alpha` first."""
    return [(v[:k], v[k:]) for k in range(len(v) + 1)]


class WordIndex:
    """Bijection between words of length ``<= N`` and ``range(count)``."""

    def __init__(self, d: int, N: int):
        self.d = d
        self.N = N
        self.words: Tuple[Word, ...] = tuple(enumerate_words(d, N))
        self._pos = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def __contains__(self, v) -> bool:
        return v in self._pos

    def index(self, v: Word) -> int:
        try:
            return self._pos[v]
        except KeyError:
            raise KeyError(f"word {v!r} not indexed for d={self.d}, N={self.N}") from None

    def word(self, i: int) -> Word:
        return self.words[i]

    def of_length(self, k: int) -> Iterable[Word]:
        return (w for w in self.words if len(w) == k)

    def __repr__(self) -> str:
        return f"WordIndex(d={self.d}, N={self.N}, count={len(self)})"
