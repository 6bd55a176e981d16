"""Truncated formal power series in noncommuting indeterminates.

A :class:`FormalSeries` holds matrix coefficients keyed by words (digit
strings, see :mod:`ncschur.free_words`).  Every product takes an explicit
truncation degree ``N``; since ``|alpha beta| = |alpha| + |beta|`` the
coefficients of degree ``<= N`` of a product are exact whenever both
factors are exact to degree ``N``.
"""
from __future__ import annotations

from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from . import _jsonio
from .errors import DimensionError
from .free_words import WordIndex, check_word, enumerate_words, transpose

__all__ = [
    "FormalSeries",
    "KernelTable",
    "as_operator_tuple",
    "multiply",
    "right_multiply",
    "adjoint_series",
    "tau",
    "functional_calculus",
    "left_eval",
    "szego_kernel",
]

# storage pruning only, never a numerical tolerance
PRUNE = 1e-300


def as_operator_tuple(A, d: Optional[int] = None) -> np.ndarray:
    """Stack a d-tuple of square matrices into a ``(d, n, n)`` complex array."""
    T = np.asarray(A, dtype=complex)
    if T.ndim == 2 and d == 1:
        T = T[None]
    if T.ndim != 3 or T.shape[1] != T.shape[2]:
        raise DimensionError(f"operator tuple must have shape (d, n, n), got {T.shape}")
    if d is not None and T.shape[0] != d:
        raise DimensionError(f"expected a {d}-tuple, got {T.shape[0]} matrices")
    return T


def _graded_key(v: str):
    return (len(v), v)


class FormalSeries:
    """Series ``sum_v c_v z^v`` truncated at degree `degree`.

    Coefficients are ``rows x cols`` complex blocks; absent words are zero.
    Instances are treated as immutable.
    """

    __slots__ = ("d", "degree", "rows", "cols", "_coeffs")

    def __init__(self, d: int, degree: int, rows: int, cols: int,
                 coeffs: Optional[Mapping[str, np.ndarray]] = None):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        self.d = int(d)
        self.degree = int(degree)
        self.rows = int(rows)
        self.cols = int(cols)
        store: Dict[str, np.ndarray] = {}
        for v, c in (coeffs or {}).items():
            check_word(v, self.d)
            if len(v) > self.degree:
                raise ValueError(f"word {v!r} exceeds truncation degree {self.degree}")
            block = np.array(c, dtype=complex)
            if block.size != self.rows * self.cols:
                raise DimensionError(
                    f"coefficient at {v!r} has shape {block.shape}, "
                    f"expected {(self.rows, self.cols)}")
            block = block.reshape(self.rows, self.cols)
            if block.size and np.max(np.abs(block)) >= PRUNE:
                block.setflags(write=False)
                store[v] = block
        self._coeffs = MappingProxyType(dict(sorted(store.items(), key=lambda kv: _graded_key(kv[0]))))

    # construction helpers
    @classmethod
    def zero(cls, d, degree, rows=1, cols=1):
        return cls(d, degree, rows, cols)

    @classmethod
    def constant(cls, c, d, degree):
        c = np.atleast_2d(np.asarray(c, dtype=complex))
        return cls(d, degree, c.shape[0], c.shape[1], {"": c})

    @classmethod
    def monomial(cls, word, c, d, degree):
        c = np.atleast_2d(np.asarray(c, dtype=complex))
        return cls(d, degree, c.shape[0], c.shape[1], {word: c})

    @classmethod
    def from_scalars(cls, values: Mapping[str, complex], d, degree):
        return cls(d, degree, 1, 1, {v: [[c]] for v, c in values.items()})

    @property
    def coeffs(self) -> Mapping[str, np.ndarray]:
        return self._coeffs

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def coeff(self, v: str) -> np.ndarray:
        c = self._coeffs.get(v)
        if c is None:
            return np.zeros((self.rows, self.cols), dtype=complex)
        return c

    def __getitem__(self, v: str) -> np.ndarray:
        return self.coeff(v)

    def words(self) -> Tuple[str, ...]:
        return tuple(self._coeffs)

    def max_word_length(self) -> int:
        """Length of the longest stored word, -1 for the zero series."""
        return max((len(v) for v in self._coeffs), default=-1)

    def truncate(self, N: int) -> "FormalSeries":
        return FormalSeries(self.d, N, self.rows, self.cols,
                            {v: c for v, c in self._coeffs.items() if len(v) <= N})

    def _check_compatible(self, other: "FormalSeries"):
        if self.d != other.d or self.shape != other.shape:
            raise DimensionError(
                f"incompatible series: d={self.d}/{other.d}, shape={self.shape}/{other.shape}")

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        self._check_compatible(other)
        N = min(self.degree, other.degree)
        out = {v: c for v, c in self._coeffs.items() if len(v) <= N}
        for v, c in other._coeffs.items():
            if len(v) <= N:
                out[v] = out[v] + c if v in out else c
        return FormalSeries(self.d, N, self.rows, self.cols, out)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(self.d, self.degree, self.rows, self.cols,
                            {v: -c for v, c in self._coeffs.items()})

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def __mul__(self, scalar) -> "FormalSeries":
        if isinstance(scalar, FormalSeries):
            return NotImplemented
        return FormalSeries(self.d, self.degree, self.rows, self.cols,
                            {v: scalar * c for v, c in self._coeffs.items()})

    __rmul__ = __mul__

    def max_abs_diff(self, other: "FormalSeries", max_degree: Optional[int] = None) -> float:
        """Largest entrywise difference over words of length ``<= max_degree``."""
        self._check_compatible(other)
        if max_degree is None:
            max_degree = min(self.degree, other.degree)
        err = 0.0
        for v in set(self._coeffs) | set(other._coeffs):
            if len(v) <= max_degree:
                diff = self.coeff(v) - other.coeff(v)
                if diff.size:
                    err = max(err, float(np.max(np.abs(diff))))
        return err

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "degree": self.degree,
            "rows": self.rows,
            "cols": self.cols,
            "coeffs": {v: _jsonio.encode_matrix(c) for v, c in self._coeffs.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FormalSeries":
        rows, cols = int(data["rows"]), int(data["cols"])
        coeffs = {v: _jsonio.decode_matrix(c, (rows, cols)) for v, c in data.get("coeffs", {}).items()}
        return cls(int(data["d"]), int(data["degree"]), rows, cols, coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return (self.d == other.d and self.degree == other.degree and self.shape == other.shape
                and set(self._coeffs) == set(other._coeffs)
                and all(np.array_equal(c, other._coeffs[v]) for v, c in self._coeffs.items()))

    __hash__ = None

    def __repr__(self) -> str:
        return (f"FormalSeries(d={self.d}, degree={self.degree}, shape={self.shape}, "
                f"terms={len(self._coeffs)})")


def multiply(S: FormalSeries, f: FormalSeries, N: Optional[int] = None) -> FormalSeries:
    """Left product ``S(z) f(z)``: coefficient at `v` is ``sum_{ab=v} s_a f_b``.

    Coefficients are kept for words of length ``<= N`` (default: the smaller
    of the two truncation degrees).
    """
    if S.d != f.d:
        raise DimensionError(f"alphabet sizes differ: {S.d} vs {f.d}")
    if S.cols != f.rows:
        raise DimensionError(f"cannot multiply {S.shape} by {f.shape} blocks")
    if N is None:
        N = min(S.degree, f.degree)
    acc: Dict[str, np.ndarray] = {}
    for a, sa in S.coeffs.items():
        room = N - len(a)
        if room < 0:
            continue
        for b, fb in f.coeffs.items():
            if len(b) > room:
                continue
            v = a + b
            term = sa @ fb
            if v in acc:
                acc[v] += term
            else:
                acc[v] = term.copy()
    return FormalSeries(S.d, N, S.rows, f.cols, acc)


def right_multiply(S: FormalSeries, f: FormalSeries, N: Optional[int] = None) -> FormalSeries:
    """Right multiplication action: coefficient at `v` is ``sum_{ab=v} s_{b^T} f_a``.

    For scalar series this is ``f(z) . (tau S)(z)``.
    """
    if S.d != f.d:
        raise DimensionError(f"alphabet sizes differ: {S.d} vs {f.d}")
    if S.cols != f.rows:
        raise DimensionError(f"cannot multiply {S.shape} by {f.shape} blocks")
    if N is None:
        N = min(S.degree, f.degree)
    acc: Dict[str, np.ndarray] = {}
    for bt, sb in S.coeffs.items():
        b = transpose(bt)
        for a, fa in f.coeffs.items():
            if len(a) + len(b) > N:
                continue
            v = a + b
            term = sb @ fa
            if v in acc:
                acc[v] += term
            else:
                acc[v] = term.copy()
    return FormalSeries(S.d, N, S.rows, f.cols, acc)


def adjoint_series(H: FormalSeries) -> FormalSeries:
    """Coefficient at `b` of the result is the conjugate transpose of ``H_{b^T}``."""
    return FormalSeries(H.d, H.degree, H.cols, H.rows,
                        {transpose(v): c.conj().T for v, c in H.coeffs.items()})


def tau(f: FormalSeries) -> FormalSeries:
    """Reindex coefficients by word reversal."""
    return FormalSeries(f.d, f.degree, f.rows, f.cols,
                        {transpose(v): c for v, c in f.coeffs.items()})


def functional_calculus(A, v: str) -> np.ndarray:
    """Ordered product ``A_{a_1} A_{a_2} ... A_{a_k}`` for ``v = a_1 ... a_k``."""
    T = as_operator_tuple(A)
    out = np.eye(T.shape[1], dtype=complex)
    for ch in v:
        out = out @ T[int(ch) - 1]
    return out


def _unpack_pair(pair):
    if hasattr(pair, "Z") and hasattr(pair, "X"):
        return as_operator_tuple(pair.Z), np.atleast_2d(np.asarray(pair.X, dtype=complex))
    Z, X = pair
    return as_operator_tuple(Z), np.atleast_2d(np.asarray(X, dtype=complex))


def left_eval(pair, f: FormalSeries) -> np.ndarray:
    """Left evaluation ``sum_v Z^{v^T} X f_v`` at an operator argument.

    `pair` is an input pair ``(Z, X)`` (tuple or object with ``Z`` and ``X``
    attributes).  `f` has coefficient blocks with ``X.shape[1]`` rows; the
    result has ``Z.shape[1]`` rows and ``f.cols`` columns.
    """
    Z, X = _unpack_pair(pair)
    if Z.shape[0] != f.d:
        raise DimensionError(f"pair has {Z.shape[0]} operators, series has d={f.d}")
    if X.shape[0] != Z.shape[1] or X.shape[1] != f.rows:
        raise DimensionError(
            f"X of shape {X.shape} does not map {f.rows}-vectors into the {Z.shape[1]}-dim state")
    # powers[v] = Z^{v^T}, built from powers[v[:-1]] by left multiplication with Z_{v[-1]}
    powers = {"": np.eye(Z.shape[1], dtype=complex)}
    out = np.zeros((Z.shape[1], f.cols), dtype=complex)
    for v in sorted(f.coeffs, key=_graded_key):
        for k in range(len(v)):
            u = v[: k + 1]
            if u not in powers:
                powers[u] = Z[int(u[-1]) - 1] @ powers[u[:-1]]
        out += powers[v] @ (X @ f.coeff(v))
    return out


class KernelTable:
    """Coefficients ``K_{a,b}`` of a kernel ``sum K_{a,b} z^a w^{b^T}``.

    Only nonzero ``block x block`` entries are stored; `entry` returns zero
    blocks for missing keys.  Tables are treated as immutable, so the dense
    Gram matrix is cached after first use.
    """

    def __init__(self, d: int, degree: int, block: int,
                 entries: Optional[Mapping[Tuple[str, str], np.ndarray]] = None):
        self.d = int(d)
        self.degree = int(degree)
        self.block = int(block)
        store = {}
        for (a, b), M in (entries or {}).items():
            if len(a) > degree or len(b) > degree:
                raise ValueError(f"key ({a!r}, {b!r}) exceeds degree {degree}")
            M = np.asarray(M, dtype=complex).reshape(self.block, self.block)
            if M.size and np.max(np.abs(M)) >= PRUNE:
                store[(a, b)] = M
        self.entries: Dict[Tuple[str, str], np.ndarray] = store
        self._gram: Optional[np.ndarray] = None

    def entry(self, a: str, b: str) -> np.ndarray:
        M = self.entries.get((a, b))
        if M is None:
            return np.zeros((self.block, self.block), dtype=complex)
        return M

    def gram(self) -> np.ndarray:
        """Assemble the full matrix ``[K_{a,b}]`` in graded-lex, word-major order."""
        if self._gram is None:
            idx = WordIndex(self.d, self.degree)
            p = self.block
            G = np.zeros((len(idx) * p, len(idx) * p), dtype=complex)
            for (a, b), M in self.entries.items():
                i, j = idx.index(a) * p, idx.index(b) * p
                G[i:i + p, j:j + p] = M
            self._gram = G
        return self._gram.copy()

    @classmethod
    def from_gram(cls, G: np.ndarray, d: int, degree: int, block: int) -> "KernelTable":
        words = enumerate_words(d, degree)
        p, W = block, len(words)
        G = np.asarray(G, dtype=complex)
        if G.shape != (W * p, W * p):
            raise DimensionError(f"Gram matrix of shape {G.shape} does not fit d={d}, N={degree}")
        blocks = G.reshape(W, p, W, p).transpose(0, 2, 1, 3)
        mags = np.abs(blocks).max(axis=(2, 3)) if p else np.zeros((W, W))
        out = cls(d, degree, block)
        for i, j in zip(*np.nonzero(mags >= PRUNE)):
            out.entries[(words[i], words[j])] = blocks[i, j].copy()
        out._gram = G.copy()
        return out

    def keys(self) -> Iterable[Tuple[str, str]]:
        return self.entries.keys()

    def _band(self, N: int) -> np.ndarray:
        """Gram matrix restricted to words of length ``<= N`` (a leading block)."""
        n = len(enumerate_words(self.d, N)) * self.block
        return self.gram()[:n, :n]

    def _combine(self, other: "KernelTable", sign: float) -> "KernelTable":
        if (self.d, self.block) != (other.d, other.block):
            raise DimensionError("kernel tables have different alphabets or block sizes")
        N = min(self.degree, other.degree)
        return KernelTable.from_gram(self._band(N) + sign * other._band(N), self.d, N, self.block)

    def __add__(self, other: "KernelTable") -> "KernelTable":
        return self._combine(other, 1.0)

    def __sub__(self, other: "KernelTable") -> "KernelTable":
        return self._combine(other, -1.0)

    def max_abs(self, max_degree: Optional[int] = None) -> float:
        if max_degree is None:
            max_degree = self.degree
        G = self._band(min(max_degree, self.degree))
        return float(np.max(np.abs(G))) if G.size else 0.0

    def max_abs_diff(self, other: "KernelTable", max_degree: Optional[int] = None) -> float:
        return (self - other).max_abs(max_degree)

    def symmetry_defect(self) -> float:
        G = self.gram()
        return float(np.max(np.abs(G - G.conj().T))) if G.size else 0.0

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "degree": self.degree,
            "block": self.block,
            "entries": {f"{a}|{b}": _jsonio.encode_matrix(M)
                        for (a, b), M in sorted(self.entries.items(),
                                                key=lambda kv: (_graded_key(kv[0][0]), _graded_key(kv[0][1])))},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "KernelTable":
        p = int(data["block"])
        entries = {}
        for key, M in data.get("entries", {}).items():
            a, b = key.split("|")
            entries[(a, b)] = _jsonio.decode_matrix(M, (p, p))
        return cls(int(data["d"]), int(data["degree"]), p, entries)

    def __repr__(self) -> str:
        return f"KernelTable(d={self.d}, degree={self.degree}, block={self.block}, nnz={len(self.entries)})"


def szego_kernel(d: int, N: int, block: int = 1) -> KernelTable:
    """Truncated noncommutative Szego kernel: identity on the diagonal, zero elsewhere."""
    eye = np.eye(block, dtype=complex)
    return KernelTable(d, N, block, {(a, a): eye for a in enumerate_words(d, N)})
