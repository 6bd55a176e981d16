"""Homogeneous interpolation and inner multipliers.

An input pair ``(Z, X)`` determines the subspace of Fock-space elements
``f`` with ``sum_v Z^{v^T} X f_v = 0``.  Once the pair is isometric, the
coisometric completion of ``(X^*, Z^*)`` has an inner transfer function
whose range is exactly that subspace.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import subspace_angles

from .colligation import (
    Colligation,
    InputPair,
    classify,
    complete,
    gramian,
    is_strongly_stable,
    observability_rank,
    stability_iterates,
    transfer_function,
)
from .errors import DimensionError, NotCoisometricError, SingularGramianError, StabilityError
from .fock_space import FockBasis, mult_operator_matrix
from .formal_series import FormalSeries, left_eval
from .free_words import enumerate_words

__all__ = [
    "normalize_input_pair",
    "synthesize_inner",
    "InnerSynthesis",
    "InnerCertificate",
    "SubspaceReport",
    "membership_check",
    "interpolation_matrix",
    "subspace_check",
    "is_inner",
]


def normalize_input_pair(pair: InputPair, tol: float = 1e-10) -> Tuple[InputPair, np.ndarray]:
    """Similar isometric pair ``(H^{-1/2} Z_j H^{1/2}, H^{-1/2} X)`` and the gramian ``H``.

    Raises
    ------
    StabilityError
        If ``Z^*`` is not strongly stable.
    SingularGramianError
        If ``sigma_min(H) <= tol * sigma_max(H)`` (pair not exactly controllable).
    """
    stable, rho = is_strongly_stable(pair.Z.conj().transpose(0, 2, 1), tol)
    if not stable:
        raise StabilityError(f"Z^* is not strongly stable (spectral radius {rho:.6g})")
    H = gramian(pair)
    H = (H + H.conj().T) / 2
    w, Q = np.linalg.eigh(H)
    if w.size == 0 or w[-1] <= 0 or w[0] <= tol * w[-1]:
        raise SingularGramianError("controllability gramian is numerically singular")
    half = Q @ np.diag(np.sqrt(w)) @ Q.conj().T
    ihalf = Q @ np.diag(1 / np.sqrt(w)) @ Q.conj().T
    Z = np.stack([ihalf @ Zj @ half for Zj in pair.Z])
    return InputPair(Z, ihalf @ pair.X), H


@dataclass
class InnerCertificate:
    """Evidence collected by :func:`is_inner`; routes that were not run stay ``None``."""

    realization_pass: Optional[bool] = None
    strongly_stable: Optional[bool] = None
    spectral_radius: Optional[float] = None
    isometric_pair: Optional[bool] = None
    observable: Optional[bool] = None
    gram_pass: Optional[bool] = None
    gram_deviation: Optional[float] = None
    tail_bound: Optional[float] = None
    input_degree: Optional[int] = None
    tail_below_tol: Optional[bool] = None
    tol: float = 1e-10
    routes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class InnerSynthesis:
    """Result of :func:`synthesize_inner`."""

    colligation: Colligation
    theta: FormalSeries
    pair: InputPair
    gramian: np.ndarray
    inner: bool
    certificate: InnerCertificate


def synthesize_inner(pair: InputPair, N: int = 4, tol: float = 1e-10) -> InnerSynthesis:
    """Inner multiplier whose range is the interpolation subspace of `pair`.

    A pair that is not already isometric to `tol` is normalized first.  The
    output pair ``(X^*, Z^*)`` is then completed to a coisometric colligation
    and its transfer function is expanded to degree `N`.
    """
    if pair.is_isometric(tol):
        used, H = pair, np.eye(pair.n)
    else:
        used, H = normalize_input_pair(pair, tol)
    U = complete(used.adjoint(), tol)
    theta = transfer_function(U, N)
    flag, cert = is_inner(U, N, tol)
    return InnerSynthesis(U, theta, used, H, flag, cert)


def membership_check(f: FormalSeries, pair: InputPair) -> float:
    """Norm of ``sum_v Z^{v^T} X f_v``; zero exactly on the interpolation subspace."""
    return float(np.linalg.norm(left_eval(pair, f)))


def interpolation_matrix(pair: InputPair, N: int) -> np.ndarray:
    """Matrix of ``f -> sum_v Z^{v^T} X f_v`` on the degree-`N` truncation."""
    basis = FockBasis(pair.d, N, pair.p)
    cols = []
    P = {"": np.eye(pair.n, dtype=complex)}
    for w in basis.words.words:
        if w:
            P[w] = pair.Z[int(w[-1]) - 1] @ P[w[:-1]]
        cols.append(P[w] @ pair.X)
    return np.hstack(cols)


def _input_tail(pair: InputPair, k: int) -> float:
    """``||sum_{|v| >= k} Z^{v^T} X X^* (Z^{v^T})^*||``, the squared interpolation tail."""
    try:
        H = gramian(pair)
    except StabilityError:
        return float("inf")
    adj = pair.Z.conj().transpose(0, 2, 1)
    # Psi(H) = sum Z_j H Z_j^*, i.e. the stability map of the adjoint tuple
    return stability_iterates(adj, k, H)[-1]


@dataclass
class SubspaceReport:
    """Comparison of the range of ``M_theta`` with the interpolation kernel."""

    degree: int
    input_degree: int
    dim_kernel: int
    dim_range: int
    expected_kernel_dim: int
    max_angle: float
    angle_bound: float
    tail: float
    exact: bool
    passed: bool

    def to_json(self) -> dict:
        return asdict(self)


def _orth(M: np.ndarray, rtol: float) -> np.ndarray:
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    Uu, s, _ = np.linalg.svd(M, full_matrices=False)
    keep = s > rtol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    return Uu[:, keep]


def subspace_check(theta: FormalSeries, pair: InputPair, N: int, tol: float = 1e-10,
                   input_degree: Optional[int] = None) -> SubspaceReport:
    """Check ``theta H^2 = {f : interpolation condition}`` on the degree-`N` truncation.

    The kernel of the interpolation matrix is compared with the span of the
    columns of the truncated ``M_theta`` for inputs of degree
    ``<= input_degree``.  When the interpolation tail beyond degree `N`
    vanishes (jointly nilpotent ``Z``) every input degree up to `N` is exact
    and both spaces must coincide.  Otherwise the sine of the largest angle
    is bounded by ``tail^{1/2} / (sigma_min(L) sigma_min(M_theta))``, where
    ``L`` is the interpolation matrix; the report carries that bound.
    """
    if theta.d != pair.d or theta.rows != pair.p:
        raise DimensionError("theta and pair do not share the alphabet and coefficient space")
    if N > theta.degree:
        raise ValueError(f"theta known to degree {theta.degree}, check requested to {N}")
    L = interpolation_matrix(pair, N)
    _, sL, Vh = np.linalg.svd(L, full_matrices=True)
    rankL = int(np.sum(sL > 1e-10 * sL[0])) if sL.size and sL[0] > 0 else 0
    kernel = Vh[rankL:].conj().T
    tail = _input_tail(pair, N + 1)
    exact = tail <= tol
    if input_degree is None:
        input_degree = N if exact else N - 1
    b_in = FockBasis(theta.d, N, theta.cols)
    b_out = FockBasis(theta.d, N, theta.rows)
    M = mult_operator_matrix(theta.truncate(N), b_in, b_out)[:, b_in.band(input_degree)]
    rng_basis = _orth(M, 1e-10)
    W = len(b_out.words)
    expected = W * pair.p - pair.n
    if rng_basis.shape[1] and kernel.shape[1]:
        angle = float(np.max(subspace_angles(rng_basis, kernel)))
    else:
        angle = 0.0 if rng_basis.shape[1] == 0 else np.pi / 2
    if tail == 0.0:
        bound = 0.0
    else:
        sM = np.linalg.svd(M, compute_uv=False)
        smin = float(sM[-1]) if sM.size else 0.0
        bound = float(np.sqrt(tail) / (sL[rankL - 1] * smin)) if rankL and smin > 0 else float("inf")
    ok_angle = np.sin(angle) <= max(bound, 0.0) + 1e-9
    dims_ok = kernel.shape[1] == expected and (not exact or rng_basis.shape[1] == kernel.shape[1])
    return SubspaceReport(
        degree=N, input_degree=int(input_degree), dim_kernel=int(kernel.shape[1]),
        dim_range=int(rng_basis.shape[1]), expected_kernel_dim=int(expected),
        max_angle=angle, angle_bound=bound, tail=float(tail), exact=bool(exact),
        passed=bool(ok_angle and dims_ok))


def _gram_deviation(theta: FormalSeries, N: int, c: int) -> float:
    b_in = FockBasis(theta.d, N, theta.cols)
    b_out = FockBasis(theta.d, N, theta.rows)
    M = mult_operator_matrix(theta.truncate(N), b_in, b_out)[:, b_in.band(c)]
    G = M.conj().T @ M
    return float(np.linalg.norm(G - np.eye(G.shape[0]), 2))


def _realization_tail(U: Colligation, N: int, c: int, G: np.ndarray) -> float:
    """Upper bound on ``||P_{>N} M_theta P_{<=c}||^2`` for the transfer function of `U`.

    Inputs of degree ``<= c`` leave no input beyond degree `N`, so every
    output past degree `N` is ``C A^u x(w)`` with ``|w| = N + 1`` and
    ``x(w) = sum_{w = u j b} A^u B_j g_b``.  Summing over the prefixes gives
    ``sum_w x(w)^* G x(w)`` with ``G`` the observability gramian; the bound
    is ``||G|| ||X||^2`` where ``X`` maps ``g`` to the states ``x(w)``.
    """
    d, n, m = U.d, U.n, U.m
    if n == 0:
        return 0.0
    inputs = enumerate_words(d, c)
    col = {b: i for i, b in enumerate(inputs)}
    powers = {"": np.eye(n, dtype=complex)}
    for u in enumerate_words(d, N):
        if u:
            powers[u] = powers[u[:-1]] @ U.A[int(u[-1]) - 1]
    rows = []
    for w in enumerate_words(d, N + 1)[-d ** (N + 1):]:
        blk = np.zeros((n, len(inputs) * m), dtype=complex)
        for k in range(len(w)):
            u, j, b = w[:k], int(w[k]), w[k + 1:]
            if b in col:
                i = col[b]
                blk[:, i * m:(i + 1) * m] += powers[u] @ U.B[j - 1]
        rows.append(blk)
    X = np.vstack(rows)
    return float(np.linalg.norm(G, 2) * np.linalg.norm(X, 2) ** 2)


def is_inner(obj: Union[Colligation, FormalSeries], N: int = 4, tol: float = 1e-10) -> Tuple[bool, InnerCertificate]:
    """Decide whether a multiplier is inner (isometric multiplication operator).

    For a :class:`Colligation` the realization route requires ``U``
    coisometric (otherwise :class:`NotCoisometricError`) and passes when the
    output pair is isometric and strongly stable.  The Gram route is run as
    well: the columns of the truncated ``M_theta`` for inputs of degree
    ``<= N - K`` must be orthonormal up to ``tol`` plus a computed tail
    bound, with ``K`` the first degree loss for which the tail drops below
    `tol`.  If no such ``K <= N`` exists only constant inputs are tested,
    against their (larger) tail, and ``tail_below_tol`` is recorded as false.
    For a :class:`FormalSeries` only the Gram route runs and the series is
    taken to be a polynomial, so ``K`` is its degree.
    """
    cert = InnerCertificate(tol=tol)
    if isinstance(obj, Colligation):
        U = obj
        if not classify(U, tol)["coisometric"]:
            raise NotCoisometricError("the realization route needs a coisometric colligation")
        cert.routes.append("realization")
        stable, rho = is_strongly_stable(U.A, tol)
        pair = U.output_pair
        cert.strongly_stable, cert.spectral_radius = stable, rho
        cert.isometric_pair = pair.is_isometric(max(tol, 1e-10))
        cert.observable = U.n == 0 or observability_rank(pair, max(N - 1, 0))[0] == U.n
        cert.realization_pass = bool(stable and cert.isometric_pair)
        theta = transfer_function(U, N)
        K, tail = None, float("inf")
        if stable:
            G = gramian(pair)
            for k in range(N + 1):
                t = _realization_tail(U, N, N - k, G)
                if t < tol:
                    K, tail = k, t
                    break
            if K is None:
                # tail never drops below tol: fall back to constant inputs, smallest tail
                K, tail = N, _realization_tail(U, N, 0, G)
        flag = cert.realization_pass
    elif isinstance(obj, FormalSeries):
        theta = obj.truncate(min(N, obj.degree))
        N = theta.degree
        K, tail = max(theta.max_word_length(), 0), 0.0
        flag = None
    else:
        raise TypeError(f"expected a Colligation or FormalSeries, got {type(obj).__name__}")
    cert.routes.append("gram")
    cert.tail_bound = tail
    cert.tail_below_tol = bool(tail < tol) if np.isfinite(tail) else False
    if K is not None:
        c = N - K
        cert.input_degree = c
        dev = _gram_deviation(theta, N, c)
        cert.gram_deviation = dev
        cert.gram_pass = bool(dev <= tol + tail)
    else:
        # unstable realization: no finite tail bound exists
        cert.gram_pass = False
    if flag is None:
        flag = cert.gram_pass
    return bool(flag), cert
