"""Colligations ``U = [A B; C D]`` and their systems-theoretic invariants.

``A`` and ``B`` are d-tuples stored as arrays of shape ``(d, n, n)`` and
``(d, n, m)``.  The stacked operator maps ``X + U`` into ``X^d + Y``.
Words follow the monomial-order convention of :mod:`ncschur.free_words`, so
the transfer function has coefficients ``s_{v j} = C A^v B_j`` with
``A^v = A_{v_1} ... A_{v_k}``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from . import _jsonio
from .errors import (
    ConvergenceError,
    DimensionError,
    KernelMismatchError,
    NotContractiveError,
    NotObservableError,
    StabilityError,
)
from .formal_series import FormalSeries, as_operator_tuple, check_word
from .free_words import enumerate_words

__all__ = [
    "Colligation",
    "OutputPair",
    "InputPair",
    "classify",
    "transfer_function",
    "simulate",
    "observability_operator",
    "observability_rank",
    "stability_map",
    "is_strongly_stable",
    "stability_iterates",
    "gramian",
    "coisometry_completion",
    "complete",
    "canonical_factor",
    "unique_B_from_S",
    "unitary_equivalence",
]

log = logging.getLogger(__name__)

OBS_RANK_TOL = 1e-8
STABILITY_MARGIN = 1e-12


@dataclass(frozen=True)
class OutputPair:
    """Observation map ``C`` (p x n) together with the state tuple ``A``."""

    C: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.C, dtype=complex))
        A = as_operator_tuple(self.A)
        if C.shape[1] != A.shape[1]:
            raise DimensionError(f"C has {C.shape[1]} columns but the state dimension is {A.shape[1]}")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "A", A)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    def stacked(self) -> np.ndarray:
        """The column ``[A_1; ...; A_d; C]``."""
        return np.vstack(list(self.A) + [self.C])

    def contractivity_defect(self) -> float:
        """Smallest eigenvalue of ``I - sum A_j^* A_j - C^* C``."""
        V = self.stacked()
        return float(np.linalg.eigvalsh(np.eye(self.n) - V.conj().T @ V).min()) if self.n else 0.0

    def is_contractive(self, tol: float = 1e-10) -> bool:
        return self.contractivity_defect() >= -tol

    def is_isometric(self, tol: float = 1e-10) -> bool:
        V = self.stacked()
        return bool(np.linalg.norm(V.conj().T @ V - np.eye(self.n), 2) <= tol) if self.n else True

    def adjoint(self) -> "InputPair":
        return InputPair(Z=self.A.conj().transpose(0, 2, 1), X=self.C.conj().T)


@dataclass(frozen=True)
class InputPair:
    """State tuple ``Z`` with input map ``X`` (n x p); adjoint of an output pair."""

    Z: np.ndarray
    X: np.ndarray

    def __post_init__(self):
        Z = as_operator_tuple(self.Z)
        X = np.asarray(self.X, dtype=complex)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != Z.shape[1]:
            raise DimensionError(f"X has {X.shape[0]} rows but the state dimension is {Z.shape[1]}")
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "X", X)

    @property
    def d(self) -> int:
        return self.Z.shape[0]

    @property
    def n(self) -> int:
        return self.Z.shape[1]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def adjoint(self) -> OutputPair:
        return OutputPair(C=self.X.conj().T, A=self.Z.conj().transpose(0, 2, 1))

    def stein_residual(self, H: Optional[np.ndarray] = None) -> float:
        """``|| H - sum Z_j H Z_j^* - X X^* ||``; ``H = I`` tests isometry."""
        if H is None:
            H = np.eye(self.n)
        R = H - sum(Zj @ H @ Zj.conj().T for Zj in self.Z) - self.X @ self.X.conj().T
        return float(np.linalg.norm(R, 2)) if self.n else 0.0

    def is_isometric(self, tol: float = 1e-10) -> bool:
        return self.stein_residual() <= tol

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "dim_state": self.n,
            "dim_coeff": self.p,
            "Z": _jsonio.encode_tuple(self.Z),
            "X": _jsonio.encode_matrix(self.X),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "InputPair":
        d, n, p = int(data["d"]), int(data["dim_state"]), int(data["dim_coeff"])
        return cls(Z=_jsonio.decode_tuple(data["Z"], d, (n, n)),
                   X=_jsonio.decode_matrix(data["X"], (n, p)))


@dataclass(frozen=True)
class Colligation:
    """Block operator ``[A B; C D] : X + U -> X^d + Y``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = as_operator_tuple(self.A)
        d, n = A.shape[0], A.shape[1]
        B = np.asarray(self.B, dtype=complex)
        if B.ndim == 2 and d == 1:
            B = B[None]
        C = np.asarray(self.C, dtype=complex)
        D = np.asarray(self.D, dtype=complex)
        if C.ndim < 2:
            C = C.reshape(-1, n) if n else C.reshape(D.shape[0] if D.ndim == 2 else 1, 0)
        if D.ndim < 2:
            D = np.atleast_2d(D)
        if B.ndim != 3 or B.shape[0] != d or B.shape[1] != n:
            raise DimensionError(f"B must have shape ({d}, {n}, m), got {B.shape}")
        m = B.shape[2]
        if C.shape[1] != n:
            raise DimensionError(f"C must have {n} columns, got {C.shape}")
        if D.shape != (C.shape[0], m):
            raise DimensionError(f"D must have shape {(C.shape[0], m)}, got {D.shape}")
        for name, val in zip("ABCD", (A, B, C, D)):
            object.__setattr__(self, name, val)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.B.shape[2]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def output_pair(self) -> OutputPair:
        return OutputPair(self.C, self.A)

    def stacked(self) -> np.ndarray:
        """``(d n + p) x (n + m)`` matrix of the colligation."""
        top = np.hstack([np.vstack(list(self.A)) if self.n else np.zeros((0, 0)),
                         np.vstack(list(self.B)) if self.n else np.zeros((0, self.m))]) \
            if self.n else np.zeros((0, self.m), dtype=complex)
        bottom = np.hstack([self.C, self.D])
        return np.vstack([top, bottom]).astype(complex)

    @classmethod
    def from_stacked(cls, U: np.ndarray, d: int, n: int) -> "Colligation":
        U = np.asarray(U, dtype=complex)
        A = np.stack([U[j * n:(j + 1) * n, :n] for j in range(d)])
        B = np.stack([U[j * n:(j + 1) * n, n:] for j in range(d)])
        return cls(A, B, U[d * n:, :n], U[d * n:, n:])

    def rotate_state(self, R: np.ndarray) -> "Colligation":
        """Unitarily equivalent copy with state ``x -> R x``."""
        R = np.asarray(R, dtype=complex)
        Ri = R.conj().T
        return Colligation(np.stack([R @ Aj @ Ri for Aj in self.A]),
                           np.stack([R @ Bj for Bj in self.B]), self.C @ Ri, self.D)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "dim_state": self.n,
            "dim_input": self.m,
            "dim_output": self.p,
            "A": _jsonio.encode_tuple(self.A),
            "B": _jsonio.encode_tuple(self.B),
            "C": _jsonio.encode_matrix(self.C),
            "D": _jsonio.encode_matrix(self.D),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Colligation":
        d, n = int(data["d"]), int(data["dim_state"])
        m, p = int(data["dim_input"]), int(data["dim_output"])
        return cls(A=_jsonio.decode_tuple(data["A"], d, (n, n)),
                   B=_jsonio.decode_tuple(data["B"], d, (n, m)),
                   C=_jsonio.decode_matrix(data["C"], (p, n)),
                   D=_jsonio.decode_matrix(data["D"], (p, m)))


def classify(U: Colligation, tol: float = 1e-10) -> Dict[str, bool]:
    """Contractive / isometric / coisometric / unitary flags of the stacked operator."""
    M = U.stacked()
    rows, cols = M.shape
    norm = np.linalg.norm(M, 2) if M.size else 0.0
    iso = np.linalg.norm(M.conj().T @ M - np.eye(cols), 2) <= tol if cols else True
    coiso = np.linalg.norm(M @ M.conj().T - np.eye(rows), 2) <= tol if rows else True
    return {
        "contractive": bool(norm <= 1 + tol),
        "isometric": bool(iso),
        "coisometric": bool(coiso),
        "unitary": bool(iso and coiso),
    }


def _observations(C: np.ndarray, A: np.ndarray, N: int) -> Dict[str, np.ndarray]:
    """``C A^v`` for all words of length ``<= N``."""
    d = A.shape[0]
    obs = {"": C}
    for v in enumerate_words(d, N)[1:]:
        obs[v] = obs[v[:-1]] @ A[int(v[-1]) - 1]
    return obs


def transfer_function(U: Colligation, N: int) -> FormalSeries:
    """Series with ``s_0 = D`` and ``s_{v j} = C A^v B_j`` up to degree `N`."""
    if N < 0:
        raise ValueError("degree must be nonnegative")
    coeffs = {"": U.D}
    if N >= 1:
        for v, CAv in _observations(U.C, U.A, N - 1).items():
            for j in range(U.d):
                coeffs[v + str(j + 1)] = CAv @ U.B[j]
    return FormalSeries(U.d, N, U.p, U.m, coeffs)


def simulate(U: Colligation, inputs: Mapping[str, np.ndarray], side: str = "left",
             N: int = 4) -> Dict[str, np.ndarray]:
    """Run the system driven along the free semigroup from ``x(empty) = 0``.

    ``side="left"`` uses ``x(j a) = A_j x(a) + B_j u(a)``, ``side="right"``
    uses ``x(a j) = A_j x(a) + B_j u(a)``; in both cases
    ``y(a) = C x(a) + D u(a)``.  Returns the output at every word of length
    ``<= N``.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    zero_u = np.zeros(U.m, dtype=complex)
    u = {}
    for w, val in inputs.items():
        check_word(w, U.d)
        if len(w) > N:
            raise ValueError(f"input word {w!r} is longer than the horizon {N}")
        val = np.asarray(val, dtype=complex).reshape(U.m)
        u[w] = val
    x: Dict[str, np.ndarray] = {"": np.zeros(U.n, dtype=complex)}
    y: Dict[str, np.ndarray] = {}
    for w in enumerate_words(U.d, N):
        if w:
            j, prev = (int(w[0]), w[1:]) if side == "left" else (int(w[-1]), w[:-1])
            x[w] = U.A[j - 1] @ x[prev] + U.B[j - 1] @ u.get(prev, zero_u)
        y[w] = U.C @ x[w] + U.D @ u.get(w, zero_u)
    return y


def observability_operator(pair: OutputPair, N: int) -> np.ndarray:
    """Stacked blocks ``C A^v`` over words of length ``<= N`` (graded-lex)."""
    obs = _observations(pair.C, pair.A, N)
    return np.vstack([obs[v] for v in enumerate_words(pair.d, N)])


def observability_rank(pair: OutputPair, N: int, rel_tol: float = OBS_RANK_TOL) -> Tuple[int, np.ndarray]:
    """Numerical rank of the truncated observability matrix and its singular values."""
    O = observability_operator(pair, N)
    if not O.size:
        return 0, np.zeros(0)
    sv = np.linalg.svd(O, compute_uv=False)
    rank = int(np.sum(sv > rel_tol * sv[0])) if sv[0] > 0 else 0
    return rank, sv


def stability_map(A) -> np.ndarray:
    """Matrix of ``H -> sum_j A_j^* H A_j`` acting on row-major ``vec(H)``."""
    T = as_operator_tuple(A)
    n = T.shape[1]
    M = np.zeros((n * n, n * n), dtype=complex)
    for Aj in T:
        M += np.kron(Aj.conj().T, Aj.T)
    return M


def is_strongly_stable(A, tol: float = 1e-10) -> Tuple[bool, float]:
    """Strong stability via the spectral radius of the completely positive map.

    In finite dimensions ``sum_{|a|=N} ||A^a x||^2 = <Phi^N(I) x, x>`` so the
    limit condition holds iff ``rho(Phi) < 1``.
    """
    T = as_operator_tuple(A)
    if T.shape[1] == 0:
        return True, 0.0
    rho = float(np.max(np.abs(np.linalg.eigvals(stability_map(T)))))
    return bool(rho < 1 - tol), rho


def stability_iterates(A, N: int, H0: Optional[np.ndarray] = None) -> List[float]:
    """Norms ``||Phi^k(H0)||`` for ``k = 0..N`` (default ``H0 = I``)."""
    T = as_operator_tuple(A)
    H = np.eye(T.shape[1], dtype=complex) if H0 is None else np.asarray(H0, dtype=complex)
    out = [float(np.linalg.norm(H, 2))]
    for _ in range(N):
        H = sum(Aj.conj().T @ H @ Aj for Aj in T)
        out.append(float(np.linalg.norm(H, 2)))
    return out


@dataclass
class SteinSolution:
    """Fixed point of a Stein iteration with its residual history."""

    H: np.ndarray
    residuals: List[float] = field(default_factory=list)
    iterations: int = 0


def gramian(pair: Union[OutputPair, InputPair], tol: float = 1e-12, max_iter: int = 10000,
            return_history: bool = False):
    """Solve the Stein equation of a pair by fixed-point iteration.

    For an output pair this is ``G = C^* C + sum A_j^* G A_j``; for an input
    pair ``H = X X^* + sum Z_j H Z_j^*``.  Strong stability (of ``A``,
    respectively ``Z^*``) is checked first since it is what makes the fixed
    point unique.  Iteration stops once ``||H_{k+1} - H_k|| <= tol ||H_{k+1}||``.
    """
    if isinstance(pair, InputPair):
        ops = [Zj.conj().T for Zj in pair.Z]
        Q = pair.X @ pair.X.conj().T
    elif isinstance(pair, OutputPair):
        ops = list(pair.A)
        Q = pair.C.conj().T @ pair.C
    else:
        raise TypeError(f"expected an OutputPair or InputPair, got {type(pair).__name__}")
    # margin guards against rho = 1 rounding to just below 1
    stable, rho = is_strongly_stable(np.stack(ops), tol=STABILITY_MARGIN) if ops else (True, 0.0)
    if not stable:
        raise StabilityError(f"Stein iteration has no unique fixed point: spectral radius {rho:.6g}")
    H = np.zeros_like(Q)
    residuals = []
    for k in range(1, max_iter + 1):
        H_next = Q + sum(Aj.conj().T @ H @ Aj for Aj in ops)
        step = float(np.linalg.norm(H_next - H, 2)) if H.size else 0.0
        residuals.append(step)
        H = H_next
        scale = float(np.linalg.norm(H, 2)) if H.size else 0.0
        if step <= tol * max(scale, np.finfo(float).tiny):
            sol = SteinSolution(H=H, residuals=residuals, iterations=k)
            return sol if return_history else H
    raise ConvergenceError(
        f"Stein iteration did not converge in {max_iter} steps (rho={rho:.6g}, last step {residuals[-1]:.3g})")


def canonical_factor(M: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Factor ``F`` with ``F F^* = M`` for a positive semidefinite `M`.

    Eigenvalues above ``tol * lambda_max`` are kept in descending order.  The
    factor is then rotated into lower-trapezoidal form (QR of ``F^*``) and
    the first nonzero entry of every column is made real positive, which
    removes the unitary right-factor freedom.
    """
    n = M.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    w, Q = np.linalg.eigh((M + M.conj().T) / 2)
    lmax = max(float(w.max()), 0.0)
    keep = w > tol * lmax if lmax > 0 else np.zeros_like(w, dtype=bool)
    order = np.argsort(-w[keep], kind="stable")
    F = Q[:, keep][:, order] * np.sqrt(w[keep][order])
    if F.shape[1] == 0:
        return F
    _, R = np.linalg.qr(F.conj().T)
    F = R.conj().T
    scale = np.max(np.abs(F))
    for k in range(F.shape[1]):
        nz = np.flatnonzero(np.abs(F[:, k]) > 1e-12 * scale)
        if nz.size:
            z = F[nz[0], k]
            F[:, k] *= np.conj(z) / abs(z)
    return F


def coisometry_completion(pair: OutputPair, tol: float = 1e-10) -> Tuple[np.ndarray, np.ndarray, int]:
    """Complete a contractive output pair to a coisometric colligation.

    Solves ``[B; D][B; D]^* = I - [A; C][A; C]^*`` with the canonical factor.
    Returns ``(B, D, m)`` with ``B`` of shape ``(d, n, m)``.
    """
    d, n, p = pair.d, pair.n, pair.p
    V = pair.stacked()
    defect = np.eye(d * n + p) - V @ V.conj().T
    lam_min = float(np.linalg.eigvalsh((defect + defect.conj().T) / 2).min())
    if lam_min < -tol:
        raise NotContractiveError(f"output pair is not contractive: defect eigenvalue {lam_min:.3g}")
    F = canonical_factor(defect, tol)
    m = F.shape[1]
    B = np.stack([F[j * n:(j + 1) * n] for j in range(d)]) if n else np.zeros((d, 0, m), dtype=complex)
    D = F[d * n:]
    return B, D, m


def complete(pair: OutputPair, tol: float = 1e-10) -> Colligation:
    """The coisometric colligation obtained from :func:`coisometry_completion`."""
    B, D, _ = coisometry_completion(pair, tol)
    return Colligation(pair.A, B, pair.C, D)


def unique_B_from_S(pair: OutputPair, S: FormalSeries, N: Optional[int] = None,
                    tol: float = 1e-8) -> np.ndarray:
    """Recover ``B`` from an observable pair and a series with matching kernel.

    Each ``B_j`` is the least-squares solution of ``O B_j = [s_{v j}]`` over
    words ``|v| <= N - 1``.  Raises :class:`NotObservableError` when the
    truncated observability matrix loses rank and
    :class:`KernelMismatchError` when either the linear residual or the
    kernel comparison ``K_S = K_{C,A}`` exceeds `tol`.
    """
    from .kernels import kernel_KCA, kernel_KS

    if N is None:
        N = S.degree
    if S.d != pair.d or S.rows != pair.p:
        raise DimensionError(f"series {S.shape} over d={S.d} does not match the pair")
    if N < 1:
        raise ValueError("need degree >= 1 to read off B")
    rank, _ = observability_rank(pair, N - 1)
    if rank < pair.n:
        raise NotObservableError(f"observability rank {rank} < state dimension {pair.n}")
    O = observability_operator(pair, N - 1)
    words = enumerate_words(pair.d, N - 1)
    B = np.zeros((pair.d, pair.n, S.cols), dtype=complex)
    worst = 0.0
    for j in range(pair.d):
        rhs = np.vstack([S.coeff(v + str(j + 1)) for v in words])
        Bj, *_ = np.linalg.lstsq(O, rhs, rcond=None)
        B[j] = Bj
        if rhs.size:
            worst = max(worst, float(np.max(np.abs(O @ Bj - rhs))))
    if worst > tol:
        raise KernelMismatchError(f"no B reproduces the series: residual {worst:.3g}")
    mismatch = kernel_KS(S, N).max_abs_diff(kernel_KCA(pair, N))
    if mismatch > tol:
        raise KernelMismatchError(f"K_S differs from K_(C,A) by {mismatch:.3g}")
    return B


def unitary_equivalence(U1: Colligation, U2: Colligation, N: int = 4,
                        tol: float = 1e-8) -> Optional[np.ndarray]:
    """Unitary ``R`` with ``R A1_j = A2_j R``, ``R B1_j = B2_j``, ``C1 = C2 R``.

    Returns ``None`` when the state dimensions differ, the transfer
    functions disagree to degree `N`, or the solved ``R`` fails the unitarity
    and intertwining checks at `tol`.
    """
    if (U1.d, U1.m, U1.p) != (U2.d, U2.m, U2.p):
        log.debug("colligations have different signatures")
        return None
    if U1.n != U2.n:
        log.debug("state dimensions differ: %d vs %d", U1.n, U2.n)
        return None
    if transfer_function(U1, N).max_abs_diff(transfer_function(U2, N)) > tol:
        log.debug("transfer functions differ")
        return None
    O1 = observability_operator(U1.output_pair, N)
    O2 = observability_operator(U2.output_pair, N)
    R = np.linalg.pinv(O2) @ O1
    n = U1.n
    checks = [np.linalg.norm(R.conj().T @ R - np.eye(n), 2) if n else 0.0,
              np.linalg.norm(U1.C - U2.C @ R) if n else 0.0,
              np.linalg.norm(U1.D - U2.D)]
    for j in range(U1.d):
        checks.append(np.linalg.norm(R @ U1.A[j] - U2.A[j] @ R) if n else 0.0)
        checks.append(np.linalg.norm(R @ U1.B[j] - U2.B[j]) if n else 0.0)
    if max(checks) > tol:
        log.debug("intertwining residual %.3g exceeds tolerance", max(checks))
        return None
    return R
