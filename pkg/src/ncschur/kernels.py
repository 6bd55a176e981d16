"""Noncommutative kernels, positivity, factorization and the lifted-norm space.

A kernel table entry at ``(a, b)`` is the coefficient of ``z^a w^{b^T}``.
Everything here is computed on the truncated index set ``|a|, |b| <= N``,
where the suffix-sum formulas are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .colligation import (
    Colligation,
    OutputPair,
    canonical_factor,
    observability_operator,
)
from .errors import DimensionError, KernelMismatchError, NotContractiveError
from .fock_space import (
    FockBasis,
    mult_operator_matrix,
    shift_matrix,
)
from .formal_series import FormalSeries, KernelTable
from .free_words import WordIndex, enumerate_words, transpose

__all__ = [
    "kernel_KS",
    "kernel_KCA",
    "defect_kernel",
    "positivity_check",
    "factor_kernel",
    "find_linking_isometry",
    "bilateral_identity_residual",
    "DbrSpace",
    "dbr_space",
    "dq_inequality_slack",
    "multiplier_estimate_slack",
]


def _suffix_gram(blocks: Mapping[str, np.ndarray], d: int, N: int, p: int,
                 middle: Optional[np.ndarray] = None) -> np.ndarray:
    """Gram matrix of ``sum_gamma F_a M F_b^*`` placed at ``(a gamma, b gamma)``.

    `blocks` maps words to ``p x k`` coefficient blocks of ``F``; `middle` is
    the ``k x k`` matrix ``M`` (identity if omitted).
    """
    idx = WordIndex(d, N)
    W = len(idx)
    G = np.zeros((W * p, W * p), dtype=complex)
    k = next(iter(blocks.values())).shape[1] if blocks else 0
    if k == 0:
        return G
    # the stacked prefix factor only depends on the suffix length
    stacks = {}
    for g in range(N + 1):
        prefixes = enumerate_words(d, N - g)
        F = np.vstack([blocks.get(a, np.zeros((p, k), dtype=complex)) for a in prefixes])
        FM = F if middle is None else F @ middle
        stacks[g] = (prefixes, FM @ F.conj().T)
    offs = np.arange(p)
    for gamma in idx:
        prefixes, T = stacks[len(gamma)]
        rows = (np.array([idx.index(a + gamma) for a in prefixes])[:, None] * p + offs).ravel()
        G[np.ix_(rows, rows)] += T
    return G


def _reverse_permutation(d: int, N: int, p: int) -> np.ndarray:
    idx = WordIndex(d, N)
    offs = np.arange(p)
    return (np.array([idx.index(transpose(w)) for w in idx])[:, None] * p + offs).ravel()


def kernel_KS(S: FormalSeries, N: Optional[int] = None, side: str = "left") -> KernelTable:
    """Kernel ``I - S(z) S(w)^*`` of a series, truncated at degree `N`.

    The left entry at ``(a g, b g)`` collects ``-s_a s_b^*`` over every
    common suffix ``g``, plus the identity on the diagonal.  ``side="right"``
    gives the kernel of the right multiplication operator, which is the left
    table with both indices reversed.
    """
    if N is None:
        N = S.degree
    if N > S.degree:
        raise ValueError(f"series known to degree {S.degree}, kernel requested to {N}")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    p = S.rows
    blocks = {v: c for v, c in S.coeffs.items() if len(v) <= N}
    G = np.eye(len(enumerate_words(S.d, N)) * p, dtype=complex)
    if blocks:
        G -= _suffix_gram(blocks, S.d, N, p)
    if side == "right":
        perm = _reverse_permutation(S.d, N, p)
        G = G[np.ix_(perm, perm)]
    return KernelTable.from_gram(G, S.d, N, p)


def kernel_KCA(pair: OutputPair, N: int) -> KernelTable:
    """Kernel ``C (I - Z(z) A)^{-1} (I - A^* Z(w)^*)^{-1} C^*``: entry ``C A^a (C A^b)^*``."""
    O = observability_operator(pair, N)
    return KernelTable.from_gram(O @ O.conj().T, pair.d, N, pair.p)


def defect_kernel(U: Colligation, N: int) -> KernelTable:
    """Defect kernel built from ``[C (I - Z(z) A)^{-1} Z(z), I]`` and ``I - U U^*``.

    The factor has ``[0, I]`` at the empty word and ``C A^v`` in column block
    `j` at the word ``v j``.  Together with :func:`kernel_KCA` it decomposes
    the kernel of the transfer function of any contractive colligation.
    """
    d, n, p = U.d, U.n, U.p
    k = d * n + p
    M = U.stacked()
    middle = np.eye(k) - M @ M.conj().T
    blocks: Dict[str, np.ndarray] = {}
    head = np.zeros((p, k), dtype=complex)
    head[:, d * n:] = np.eye(p)
    blocks[""] = head
    obs = {"": U.C}
    for v in enumerate_words(d, max(N - 1, 0)) if N >= 1 else []:
        if v:
            obs[v] = obs[v[:-1]] @ U.A[int(v[-1]) - 1]
        for j in range(d):
            blk = np.zeros((p, k), dtype=complex)
            blk[:, j * n:(j + 1) * n] = obs[v]
            blocks[v + str(j + 1)] = blk
    return KernelTable.from_gram(_suffix_gram(blocks, d, N, p, middle), d, N, p)


def positivity_check(K: KernelTable, tol: float = 1e-10) -> Tuple[bool, float]:
    """Whether the assembled Gram matrix is positive semidefinite up to `tol`.

    Returns ``(flag, min_eigenvalue)``.  A table that is not Hermitian to
    within `tol` raises :class:`KernelMismatchError`.
    """
    defect = K.symmetry_defect()
    if defect > tol:
        raise KernelMismatchError(f"kernel table is not Hermitian: defect {defect:.3g}")
    G = K.gram()
    lam = float(np.linalg.eigvalsh((G + G.conj().T) / 2).min())
    return bool(lam >= -tol), lam


def factor_kernel(K: KernelTable, tol: float = 1e-10) -> FormalSeries:
    """Series ``H`` with ``H_a H_b^* = K_{a,b}`` on the truncated index set.

    The Gram matrix is factored with :func:`canonical_factor`; the number of
    columns of ``H`` is the numerical rank.  Only the column space of the
    factor is intrinsic.
    """
    ok, lam = positivity_check(K, tol)
    if not ok:
        raise NotContractiveError(f"kernel has negative eigenvalue {lam:.3g}")
    G = K.gram()
    F = canonical_factor(G, tol)
    p = K.block
    words = enumerate_words(K.d, K.degree)
    coeffs = {w: F[i * p:(i + 1) * p] for i, w in enumerate(words)}
    return FormalSeries(K.d, K.degree, p, F.shape[1], coeffs)


def _stack(F: FormalSeries, N: int) -> np.ndarray:
    return np.vstack([F.coeff(w) for w in enumerate_words(F.d, N)])


def find_linking_isometry(F: FormalSeries, G: FormalSeries, tol: float = 1e-10) -> Tuple[np.ndarray, float]:
    """Isometry ``V`` with ``V F_v^* = G_v^*`` for factors of the same kernel.

    Returns ``V`` (shape ``G.cols x F.cols``) and the isometry defect
    ``||V^* V - P||``, where ``P`` projects onto the span of the ``F_v^*``.
    Raises :class:`KernelMismatchError` if ``F F^*`` and ``G G^*`` differ.
    """
    if F.d != G.d or F.rows != G.rows:
        raise DimensionError("factors must share the alphabet and the row dimension")
    N = min(F.degree, G.degree)
    Fs, Gs = _stack(F, N), _stack(G, N)
    mismatch = np.max(np.abs(Fs @ Fs.conj().T - Gs @ Gs.conj().T)) if Fs.size else 0.0
    if mismatch > tol:
        raise KernelMismatchError(f"factors do not generate the same kernel: {mismatch:.3g}")
    Vh, *_ = np.linalg.lstsq(Fs, Gs, rcond=None)
    V = Vh.conj().T
    # projection onto the span of the rows of Fs (the domain of V)
    _, sv, Wh = np.linalg.svd(Fs, full_matrices=False)
    keep = sv > tol * sv[0] if sv.size and sv[0] > 0 else np.zeros(0, dtype=bool)
    Wk = Wh[keep]
    P = Wk.conj().T @ Wk
    defect = float(np.linalg.norm(V.conj().T @ V - P, 2)) if P.size else 0.0
    return V, defect


def bilateral_identity_residual(pair: OutputPair, S: FormalSeries, N: Optional[int] = None) -> float:
    """Compare the bilateral form of ``(C, A)`` with ``I - S(z) S(w)^*``.

    The form ``C (I - Z(z)A)^{-1} (I - Z(z) Z(w)^*) (I - A^* Z(w)^*)^{-1} C^*``
    has coefficient ``K(a, b) - K(a', b')`` when ``a = a' j`` and
    ``b = b' j`` share their last letter, and ``K(a, b)`` otherwise.  The
    largest entrywise difference over words of length ``<= N - 1`` is
    returned; it vanishes exactly when the two kernels agree on that band.
    """
    if N is None:
        N = S.degree
    KCA = kernel_KCA(pair, N)
    band = N - 1
    err = 0.0
    for a in enumerate_words(pair.d, band):
        for b in enumerate_words(pair.d, band):
            lhs = KCA.entry(a, b)
            if a and b and a[-1] == b[-1]:
                lhs = lhs - KCA.entry(a[:-1], b[:-1])
            rhs = -S.coeff(a) @ S.coeff(b).conj().T
            if not a and not b:
                rhs = rhs + np.eye(S.rows)
            err = max(err, float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0)
    return err


@dataclass
class DbrSpace:
    """Range of ``I - M M^*`` with the lifted norm, for a truncated multiplier ``M``.

    Attributes
    ----------
    basis : FockBasis
        Ambient output space.
    eigenvalues, eigenvectors : ndarray
        Retained spectral data of ``I - M M^*``.
    frame : ndarray
        Columns ``sqrt(lambda_k) q_k``; orthonormal in the lifted norm.
    M : ndarray
        The truncated multiplication matrix.
    """

    S: FormalSeries
    N: int
    basis: FockBasis
    input_basis: FockBasis
    M: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    frame: np.ndarray
    tol: float
    min_eigenvalue: float = 0.0
    _band: Dict[int, Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)

    @property
    def r(self) -> int:
        return self.frame.shape[1]

    def coords(self, h: np.ndarray) -> np.ndarray:
        """Coordinates of `h` in the lifted-orthonormal frame (``h`` assumed in the range)."""
        return (self.eigenvectors.conj().T @ h) / np.sqrt(self.eigenvalues).reshape(
            (-1,) + (1,) * (np.ndim(h) - 1))

    def range_residual(self, h: np.ndarray) -> float:
        """Ambient distance from `h` to the space."""
        Q = self.eigenvectors
        return float(np.linalg.norm(h - Q @ (Q.conj().T @ h)))

    def norm(self, h: np.ndarray) -> float:
        return float(np.linalg.norm(self.coords(h)))

    def inner(self, g: np.ndarray, h: np.ndarray) -> complex:
        return complex(np.vdot(self.coords(h), self.coords(g)))

    def band_coordinates(self, max_degree: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Rows of the band ``deg <= max_degree`` and the pseudoinverse of the frame on it.

        For ``g`` supported in the band, ``P @ g[rows]`` are the coordinates of
        the smallest-norm element of the space that agrees with `g` there.
        """
        if max_degree is None:
            max_degree = self.N - 1
        if max_degree not in self._band:
            rows = self.basis.band(max_degree)
            P = np.linalg.pinv(self.frame[rows], rcond=1e-12) if self.r else np.zeros((0, rows.size))
            self._band[max_degree] = (rows, P)
        return self._band[max_degree]

    def sup_check(self, h: np.ndarray, rng: np.random.Generator, samples: int = 64,
                  tol: float = 1e-10) -> Tuple[bool, float]:
        """Sampled check of ``||h + M g||^2 - ||g||^2 <= ||h||_H^2``.

        The random draws are supplemented by the maximizing ``g``, so the
        returned gap (largest value of the left side minus the right side) is
        close to zero for a sharp norm and never positive beyond `tol`.
        """
        M = self.M
        target = self.norm(h) ** 2
        K = np.eye(M.shape[0]) - M @ M.conj().T
        g_opt = M.conj().T @ (np.linalg.pinv(K, rcond=1e-12, hermitian=True) @ h)
        cands = [g_opt] + [rng.standard_normal(M.shape[1]) + 1j * rng.standard_normal(M.shape[1])
                           for _ in range(samples)]
        gap = -np.inf
        for g in cands:
            val = np.linalg.norm(h + M @ g) ** 2 - np.linalg.norm(g) ** 2
            gap = max(gap, float(val - target))
        return bool(gap <= tol * max(1.0, target)), gap


def dbr_space(S: FormalSeries, N: Optional[int] = None, tol: float = 1e-10) -> DbrSpace:
    """Lifted-norm range of ``I - M_S M_S^*`` on the degree-`N` truncation.

    Eigenvalues above ``tol * lambda_max`` are kept.  Raises
    :class:`NotContractiveError` if an eigenvalue is below ``-tol``.
    """
    if N is None:
        N = S.degree
    if N > S.degree:
        raise ValueError(f"series known to degree {S.degree}, space requested to {N}")
    b_in = FockBasis(S.d, N, S.cols)
    b_out = FockBasis(S.d, N, S.rows)
    M = mult_operator_matrix(S.truncate(N), b_in, b_out)
    K = np.eye(b_out.dim) - M @ M.conj().T
    w, Q = np.linalg.eigh((K + K.conj().T) / 2)
    if w[0] < -tol:
        raise NotContractiveError(f"series is not contractive at degree {N}: eigenvalue {w[0]:.3g}")
    lmax = max(float(w[-1]), 0.0)
    keep = w > tol * lmax if lmax > 0 else np.zeros_like(w, dtype=bool)
    order = np.argsort(-w[keep], kind="stable")
    lam = w[keep][order]
    Q = Q[:, keep][:, order]
    # fix eigenvector phases so the frame is reproducible
    for k in range(Q.shape[1]):
        i = int(np.argmax(np.abs(Q[:, k]) > 1e-8 * np.max(np.abs(Q[:, k]))))
        Q[:, k] *= np.conj(Q[i, k]) / abs(Q[i, k])
    return DbrSpace(S=S, N=N, basis=b_out, input_basis=b_in, M=M, eigenvalues=lam,
                    eigenvectors=Q, frame=Q * np.sqrt(lam), tol=tol, min_eigenvalue=float(w[0]))


def _backward_shift_coords(space: DbrSpace, vectors: np.ndarray) -> np.ndarray:
    """Band coordinates of ``(S_j^R)^* v`` for every column `v`, stacked over ``j``."""
    rows, P = space.band_coordinates()
    out = []
    for j in range(1, space.S.d + 1):
        Rj = shift_matrix(space.basis, "right", j, adjoint=True)
        out.append(P @ (Rj @ vectors)[rows])
    return np.stack(out)


def dq_inequality_slack(space: DbrSpace) -> float:
    """Smallest eigenvalue of ``I - sum_j A_j^* A_j - C^* C`` in frame coordinates.

    ``A_j`` maps a frame vector to the coordinates of its right backward
    shift, measured on the band of degree ``<= N - 1``; ``C`` reads off the
    empty-word coefficient.  A nonnegative value is the difference-quotient
    inequality ``sum_j ||(S_j^R)^* f||^2 <= ||f||^2 - ||f_0||^2``.
    """
    if space.r == 0:
        return 0.0
    A = _backward_shift_coords(space, space.frame)
    C = space.frame[space.basis.block("")]
    G = np.eye(space.r) - sum(Aj.conj().T @ Aj for Aj in A) - C.conj().T @ C
    return float(np.linalg.eigvalsh((G + G.conj().T) / 2).min())


def multiplier_estimate_slack(space: DbrSpace) -> float:
    """Smallest eigenvalue of ``I - s_0^* s_0 - sum_j B_j^* B_j``.

    ``B_j u`` are the band coordinates of ``(S_j^R)^* (S u)`` for constant
    inputs ``u``.  A nonnegative value is the multiplier estimate.
    """
    S = space.S
    D = S.coeff("")
    cols = space.input_basis.block("")
    Su = space.M[:, cols]
    G = np.eye(S.cols) - D.conj().T @ D
    if space.r:
        B = _backward_shift_coords(space, Su)
        G = G - sum(Bj.conj().T @ Bj for Bj in B)
    return float(np.linalg.eigvalsh((G + G.conj().T) / 2).min())
