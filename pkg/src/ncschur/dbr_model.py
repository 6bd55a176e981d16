"""Canonical observable coisometric model on the reflected lifted-norm space.

The state space is the word-reversed image of the range of ``I - M_S M_S^*``
with frame ``tau f_k``, ``f_k = sqrt(lambda_k) q_k``.  In those coordinates
the lifted metric is the identity, so plain adjoints are metric adjoints.
``A_j`` is the left backward shift and ``B_j u`` the left backward shift of
``tau(S u)``, both read off on the band of degree ``<= N - 1`` (the
backward shift lowers degree, so the top degree carries no information).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import subspace_angles

from .colligation import (
    Colligation,
    classify,
    observability_rank,
    transfer_function,
)
from .errors import DimensionError, RankCollapseError
from .fock_space import mult_operator_right, shift_matrix, tau_matrix
from .formal_series import FormalSeries
from .kernels import DbrSpace, dbr_space

__all__ = ["DbrColligation", "build_dbr_colligation", "verify_realization", "reflection_angle"]


@dataclass
class DbrColligation:
    """Model colligation together with the data it was built from.

    Attributes
    ----------
    colligation : Colligation
        The model ``[A B; C D]`` in frame coordinates.
    space : DbrSpace
        Unreflected lifted-norm space; the state frame is ``tau @ space.frame``.
    invariance_residual : float
        Largest band mismatch ``||F_R A_j - ((S_j^L)^* F)_R||`` over `j`.
    """

    colligation: Colligation
    space: DbrSpace
    frame: np.ndarray
    N: int
    tol: float
    invariance_residual: float

    @property
    def r(self) -> int:
        return self.colligation.n

    def provenance(self) -> dict:
        return {
            "degree": self.N,
            "rank_tol": self.tol,
            "state_dim": self.r,
            "invariance_residual": self.invariance_residual,
        }

    def to_json(self) -> dict:
        out = self.colligation.to_json()
        out["provenance"] = self.provenance()
        return out


def build_dbr_colligation(S: FormalSeries, N: Optional[int] = None, tol: float = 1e-10) -> DbrColligation:
    """Build the model colligation of a Schur-class series truncated at `N`.

    When `S` has a finite-dimensional observable coisometric realization
    whose observability matrix has full rank on degree ``N - 1``, the model
    is unitarily equivalent to it and reproduces `S` exactly.  Otherwise it
    is a truncation of the infinite-dimensional model and only the
    validation band ``|v| <= N - 1`` is meaningful.

    Raises
    ------
    NotContractiveError
        If ``I - M_S M_S^*`` has an eigenvalue below ``-tol``.
    RankCollapseError
        If the space is trivial while `S` has non-constant terms.
    """
    if N is None:
        N = S.degree
    if N < 2:
        raise ValueError("the model needs truncation degree N >= 2")
    space = dbr_space(S, N, tol)
    basis, d, r = space.basis, S.d, space.r
    D = S.coeff("")
    if r == 0:
        if S.truncate(N).max_word_length() > 0:
            raise RankCollapseError("state space is trivial but the series is not constant")
        empty = Colligation(np.zeros((d, 0, 0)), np.zeros((d, 0, S.cols)), np.zeros((S.rows, 0)), D)
        return DbrColligation(empty, space, np.zeros((basis.dim, 0)), N, tol, 0.0)
    T = tau_matrix(basis)
    frame = T @ space.frame
    rows = basis.band(N - 1)
    P = np.linalg.pinv(frame[rows], rcond=1e-12)
    Su = T @ space.M[:, space.input_basis.block("")]
    A = np.zeros((d, r, r), dtype=complex)
    B = np.zeros((d, r, S.cols), dtype=complex)
    resid = 0.0
    for j in range(d):
        Lj = shift_matrix(basis, "left", j + 1, adjoint=True)
        shifted = (Lj @ frame)[rows]
        A[j] = P @ shifted
        B[j] = P @ (Lj @ Su)[rows]
        resid = max(resid, float(np.linalg.norm(frame[rows] @ A[j] - shifted, 2)))
    C = frame[basis.block("")]
    U = Colligation(A, B, C, D)
    return DbrColligation(U, space, frame, N, tol, resid)


def verify_realization(U: Colligation, S: FormalSeries, N: Optional[int] = None,
                       tol: float = 1e-8) -> dict:
    """Report how well `U` realizes `S` on words of length ``<= N``.

    Keys: ``coefficient_residual`` (largest entrywise mismatch),
    ``constant_residual`` (``||D - s_0||``), ``coisometry_residual``
    (``||U U^* - I||``), ``observability_singular_values``,
    ``observability_rank``, ``degree``, ``tol`` and ``passed``.
    """
    if N is None:
        N = S.degree
    N = min(N, S.degree)
    if (U.d, U.p, U.m) != (S.d, S.rows, S.cols):
        raise DimensionError("colligation and series have different signatures")
    T = transfer_function(U, N)
    coeff = T.max_abs_diff(S.truncate(N))
    const = float(np.linalg.norm(U.D - S.coeff(""), 2)) if U.D.size else 0.0
    M = U.stacked()
    cois = float(np.linalg.norm(M @ M.conj().T - np.eye(M.shape[0]), 2)) if M.size else 0.0
    obs_deg = max(N - 1, 0)
    rank, sv = observability_rank(U.output_pair, obs_deg) if U.n else (0, np.zeros(0))
    return {
        "degree": N,
        "tol": tol,
        "coefficient_residual": coeff,
        "constant_residual": const,
        "coisometry_residual": cois,
        "observability_degree": obs_deg,
        "observability_rank": rank,
        "observability_singular_values": [float(s) for s in sv],
        "state_dim": U.n,
        "flags": classify(U, tol),
        "passed": bool(coeff <= tol and cois <= tol and rank == U.n),
    }


def reflection_angle(model: DbrColligation) -> float:
    """Largest principal angle between the state frame and ``range(I - M^R M^R*)``."""
    space = model.space
    if model.r == 0:
        return 0.0
    MR = mult_operator_right(space.S.truncate(space.N), space.input_basis, space.basis)
    K = np.eye(space.basis.dim) - MR @ MR.conj().T
    w, Q = np.linalg.eigh((K + K.conj().T) / 2)
    lmax = max(float(w[-1]), 0.0)
    rng = Q[:, w > space.tol * lmax]
    return float(np.max(subspace_angles(model.frame, rng)))
