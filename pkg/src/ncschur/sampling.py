"""Seeded random generators for colligations, pairs and Schur-class series."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .colligation import (
    Colligation,
    InputPair,
    OutputPair,
    complete,
    is_strongly_stable,
    observability_rank,
)
from .errors import SingularGramianError

__all__ = [
    "random_unitary",
    "random_contraction",
    "random_contractive_colligation",
    "random_isometric_output_pair",
    "random_contractive_output_pair",
    "random_coisometric_realization",
    "random_nilpotent_input_pair",
]


def _cgauss(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def random_contraction(rows: int, cols: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    """Gaussian matrix rescaled to operator norm `norm`."""
    M = _cgauss(rng, rows, cols)
    s = np.linalg.norm(M, 2)
    return M * (norm / s) if s > 0 else M


def random_contractive_colligation(d: int, n: int, m: int, p: int, rng: np.random.Generator,
                                   norm: float = 1.0) -> Colligation:
    """Colligation whose stacked matrix has operator norm `norm`."""
    U = random_contraction(d * n + p, n + m, rng, norm)
    return Colligation.from_stacked(U, d, n)


def random_isometric_output_pair(d: int, n: int, p: int, rng: np.random.Generator,
                                 attempts: int = 20) -> OutputPair:
    """Isometric pair (``sum A_j^* A_j + C^* C = I``) with strongly stable ``A``.

    ``[A; C]`` is the Q factor of a Gaussian matrix; draws with spectral
    radius of the stability map too close to one are rejected.
    """
    for _ in range(attempts):
        V, _ = np.linalg.qr(_cgauss(rng, d * n + p, n))
        pair = OutputPair(V[d * n:], np.stack([V[j * n:(j + 1) * n] for j in range(d)]))
        if is_strongly_stable(pair.A, tol=1e-3)[0]:
            return pair
    raise RuntimeError("could not draw a strongly stable isometric pair")


def random_contractive_output_pair(d: int, n: int, p: int, rng: np.random.Generator,
                                   norm: float = 1.0) -> OutputPair:
    V = random_contraction(d * n + p, n, rng, norm)
    return OutputPair(V[d * n:], np.stack([V[j * n:(j + 1) * n] for j in range(d)]))


def random_coisometric_realization(d: int, n: int, p: int, rng: np.random.Generator,
                                   norm: float = 0.95, N: int = 3, attempts: int = 20) -> Colligation:
    """Observable coisometric colligation from completing a random contractive pair.

    The pair is redrawn until its observability matrix to degree `N` has
    full column rank.
    """
    for _ in range(attempts):
        pair = random_contractive_output_pair(d, n, p, rng, norm)
        rank, _ = observability_rank(pair, N)
        if rank == n:
            return complete(pair)
    raise RuntimeError("could not draw an observable pair")


def random_nilpotent_input_pair(d: int, n: int, p: int, rng: np.random.Generator,
                                normalize: bool = True, attempts: int = 20) -> InputPair:
    """Input pair with strictly upper triangular ``Z_j`` (jointly nilpotent).

    With ``normalize=True`` the pair is made isometric by a similarity,
    which preserves joint nilpotency; draws whose gramian is numerically
    singular are redrawn.
    """
    from .beurling_lax import normalize_input_pair

    for _ in range(attempts):
        Z = np.stack([np.triu(_cgauss(rng, n, n), k=1) * 0.5 for _ in range(d)])
        pair = InputPair(Z, _cgauss(rng, n, p))
        if not normalize:
            return pair
        try:
            return normalize_input_pair(pair)[0]
        except SingularGramianError:
            continue
    raise RuntimeError("could not draw an exactly controllable nilpotent pair")
