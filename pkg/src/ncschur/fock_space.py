"""Shift, multiplication and evaluation operators on the truncated Fock space.

Vectors of the truncated space ``H^2_Y(F_d)`` (words of length ``<= N``,
coefficients in ``C^m``) are flattened word-major in graded-lex order.  All
matrices below are compressions ``P_N T P_N``; statements that hold for
the untruncated operator hold for the compression only on the degrees where
nothing is pushed past ``N``.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .errors import DimensionError
from .formal_series import FormalSeries, multiply, right_multiply, transpose
from .free_words import WordIndex

__all__ = [
    "FockBasis",
    "DENSE_LIMIT",
    "series_to_vector",
    "vector_to_series",
    "shift_matrix",
    "tau_matrix",
    "eval_operator",
    "mult_operator_matrix",
    "mult_operator_right",
    "apply_shift",
    "mult_linear_operator",
]

# above this dimension callers should prefer the matrix-free path
DENSE_LIMIT = 2000


class FockBasis:
    """Orthonormal basis ``e_{v,i}`` of the truncated ``C^m``-valued Fock space."""

    def __init__(self, d: int, N: int, m: int = 1):
        self.d = int(d)
        self.N = int(N)
        self.m = int(m)
        self.words = WordIndex(self.d, self.N)
        self.degrees = np.repeat([len(w) for w in self.words], self.m)

    @property
    def dim(self) -> int:
        return len(self.words) * self.m

    def index(self, word: str, i: int = 0) -> int:
        if not 0 <= i < self.m:
            raise IndexError(f"coefficient index {i} out of range for m={self.m}")
        return self.words.index(word) * self.m + i

    def label(self, k: int):
        """Inverse of `index`: the ``(word, coefficient index)`` of basis vector `k`."""
        return self.words.word(k // self.m), k % self.m

    def block(self, word: str) -> slice:
        i = self.words.index(word) * self.m
        return slice(i, i + self.m)

    def band(self, max_degree: int) -> np.ndarray:
        """Indices of basis vectors whose word has length ``<= max_degree``."""
        return np.flatnonzero(self.degrees <= max_degree)

    def unit(self, word: str, i: int = 0) -> np.ndarray:
        e = np.zeros(self.dim, dtype=complex)
        e[self.index(word, i)] = 1.0
        return e

    def __eq__(self, other) -> bool:
        return isinstance(other, FockBasis) and (self.d, self.N, self.m) == (other.d, other.N, other.m)

    def __repr__(self) -> str:
        return f"FockBasis(d={self.d}, N={self.N}, m={self.m}, dim={self.dim})"


def series_to_vector(f: FormalSeries, basis: FockBasis) -> np.ndarray:
    """Flatten a ``m x k`` series into a ``dim x k`` array (``dim`` vector if k == 1)."""
    if f.d != basis.d or f.rows != basis.m:
        raise DimensionError(f"series {f.shape} over d={f.d} does not live in {basis}")
    out = np.zeros((basis.dim, f.cols), dtype=complex)
    for v, c in f.coeffs.items():
        if len(v) <= basis.N:
            out[basis.block(v)] = c
    return out[:, 0] if f.cols == 1 else out


def vector_to_series(x: np.ndarray, basis: FockBasis) -> FormalSeries:
    x = np.asarray(x, dtype=complex)
    X = x.reshape(basis.dim, -1)
    coeffs = {w: X[basis.block(w)] for w in basis.words}
    return FormalSeries(basis.d, basis.N, basis.m, X.shape[1], coeffs)


def _check_letter(basis: FockBasis, j: int):
    if not 1 <= j <= basis.d:
        raise ValueError(f"letter {j} not in 1..{basis.d}")


def shift_matrix(basis: FockBasis, side: str = "right", j: int = 1, adjoint: bool = False) -> np.ndarray:
    """Compressed shift: ``right`` appends letter `j`, ``left`` prepends it.

    Basis vectors of top degree are sent to zero.  With ``adjoint=True`` the
    conjugate transpose is returned.
    """
    _check_letter(basis, j)
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    m = basis.m
    M = np.zeros((basis.dim, basis.dim), dtype=complex)
    eye = np.eye(m)
    for w in basis.words:
        if len(w) == basis.N:
            continue
        target = w + str(j) if side == "right" else str(j) + w
        M[basis.block(target), basis.block(w)] = eye
    return M.conj().T if adjoint else M


def apply_shift(x: np.ndarray, basis: FockBasis, side: str = "right", j: int = 1,
                adjoint: bool = False) -> np.ndarray:
    """Matrix-free version of ``shift_matrix(...) @ x``."""
    _check_letter(basis, j)
    x = np.asarray(x, dtype=complex)
    out = np.zeros_like(x)
    letter = str(j)
    for w in basis.words:
        if len(w) == basis.N:
            continue
        target = w + letter if side == "right" else letter + w
        if adjoint:
            out[basis.block(w)] = x[basis.block(target)]
        else:
            out[basis.block(target)] = x[basis.block(w)]
    return out


def tau_matrix(basis: FockBasis) -> np.ndarray:
    """Permutation matrix of the word-reversal involution."""
    P = np.zeros((basis.dim, basis.dim), dtype=complex)
    eye = np.eye(basis.m)
    for w in basis.words:
        P[basis.block(transpose(w)), basis.block(w)] = eye
    return P


def eval_operator(basis: FockBasis) -> np.ndarray:
    """``m x dim`` matrix extracting the coefficient of the empty word."""
    E = np.zeros((basis.m, basis.dim), dtype=complex)
    E[:, basis.block("")] = np.eye(basis.m)
    return E


def _check_mult(S: FormalSeries, basis_in: FockBasis, basis_out: FockBasis):
    if not (S.d == basis_in.d == basis_out.d):
        raise DimensionError("alphabet sizes of series and bases differ")
    if S.cols != basis_in.m or S.rows != basis_out.m:
        raise DimensionError(
            f"series blocks {S.shape} do not map C^{basis_in.m} into C^{basis_out.m}")
    if basis_in.N != basis_out.N:
        raise DimensionError("input and output bases must share the truncation degree")


def mult_operator_matrix(S: FormalSeries, basis_in: FockBasis,
                         basis_out: Optional[FockBasis] = None) -> np.ndarray:
    """Compression of ``f -> S f``: block ``(a b, b)`` equals ``s_a``."""
    if basis_out is None:
        basis_out = FockBasis(basis_in.d, basis_in.N, S.rows)
    _check_mult(S, basis_in, basis_out)
    N = basis_in.N
    M = np.zeros((basis_out.dim, basis_in.dim), dtype=complex)
    for a, sa in S.coeffs.items():
        for b in basis_in.words:
            if len(a) + len(b) <= N:
                M[basis_out.block(a + b), basis_in.block(b)] = sa
    return M


def mult_operator_right(S: FormalSeries, basis_in: FockBasis,
                        basis_out: Optional[FockBasis] = None) -> np.ndarray:
    """Compression of the right multiplication operator.

    Block ``(a b, a)`` equals ``s_{b^T}``; for ``S = z_j`` this is the right shift.
    """
    if basis_out is None:
        basis_out = FockBasis(basis_in.d, basis_in.N, S.rows)
    _check_mult(S, basis_in, basis_out)
    N = basis_in.N
    M = np.zeros((basis_out.dim, basis_in.dim), dtype=complex)
    for bt, sb in S.coeffs.items():
        b = transpose(bt)
        for a in basis_in.words:
            if len(a) + len(b) <= N:
                M[basis_out.block(a + b), basis_in.block(a)] = sb
    return M


def mult_linear_operator(S: FormalSeries, basis_in: FockBasis,
                         basis_out: Optional[FockBasis] = None, side: str = "left") -> LinearOperator:
    """Matrix-free multiplication operator (and its adjoint) for large truncations."""
    if basis_out is None:
        basis_out = FockBasis(basis_in.d, basis_in.N, S.rows)
    _check_mult(S, basis_in, basis_out)
    product = multiply if side == "left" else right_multiply
    N = basis_in.N
    # adjoint of a multiplication operator is computed by transposing the block pattern
    S_adj_blocks = {v: c.conj().T for v, c in S.coeffs.items()}

    def matvec(x):
        f = vector_to_series(x, basis_in)
        return series_to_vector(product(S, f, N), basis_out)

    def rmatvec(y):
        Y = np.asarray(y, dtype=complex).reshape(basis_out.dim)
        out = np.zeros(basis_in.dim, dtype=complex)
        for v, ch in S_adj_blocks.items():
            vt = transpose(v) if side == "right" else v
            for b in basis_in.words:
                if len(b) + len(vt) > N:
                    continue
                row = vt + b if side == "left" else b + vt
                out[basis_in.block(b)] += ch @ Y[basis_out.block(row)]
        return out

    return LinearOperator((basis_out.dim, basis_in.dim), matvec=matvec, rmatvec=rmatvec, dtype=complex)
