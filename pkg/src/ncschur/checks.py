"""Seeded property suite shared by the ``check`` subcommand and the demos.

Each group draws from its own generator, spawned from the top-level seed,
so results do not depend on which groups run or in what order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from .beurling_lax import is_inner, subspace_check, synthesize_inner
from .colligation import (
    InputPair,
    OutputPair,
    complete,
    gramian,
    simulate,
    transfer_function,
    unique_B_from_S,
    unitary_equivalence,
)
from .dbr_model import build_dbr_colligation, verify_realization
from .fock_space import FockBasis, mult_operator_matrix
from .formal_series import FormalSeries, multiply, right_multiply
from .free_words import enumerate_words
from .kernels import (
    dbr_space,
    defect_kernel,
    dq_inequality_slack,
    kernel_KCA,
    kernel_KS,
    multiplier_estimate_slack,
)
from .sampling import (
    random_coisometric_realization,
    random_contractive_colligation,
    random_contractive_output_pair,
    random_nilpotent_input_pair,
)

__all__ = ["Residual", "GROUPS", "run_checks"]


@dataclass
class Residual:
    """A measured quantity and the bound it was compared against."""

    name: str
    value: float
    tol: float
    # "le": value <= tol, "ge": value >= -tol
    sense: str = "le"

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return bool(self.value <= self.tol if self.sense == "le" else self.value >= -self.tol)

    def to_json(self) -> dict:
        return {"name": self.name, "value": float(self.value), "tol": self.tol,
                "sense": self.sense, "passed": bool(self.passed)}


def _kernels(rng, d, N, trials):
    oracle = split = cois = 0.0
    for _ in range(trials):
        U = random_contractive_colligation(d, 2, 1, 1, rng)
        S = transfer_function(U, N)
        KS = kernel_KS(S, N)
        M = mult_operator_matrix(S, FockBasis(d, N, 1))
        oracle = max(oracle, float(np.max(np.abs(KS.gram() - (np.eye(M.shape[0]) - M @ M.conj().T)))))
        split = max(split, (KS - kernel_KCA(U.output_pair, N) - defect_kernel(U, N)).max_abs())
        Uc = complete(U.output_pair)
        cois = max(cois, defect_kernel(Uc, N).max_abs())
    return [Residual("kernel_oracle", oracle, 1e-12),
            Residual("kernel_decomposition", split, 1e-10),
            Residual("coisometric_defect", cois, 1e-10)]


def _systems(rng, d, N, trials):
    err = 0.0
    for _ in range(trials):
        U = random_contractive_colligation(d, 2, 2, 1, rng)
        S = transfer_function(U, N)
        u = {w: rng.standard_normal(2) + 1j * rng.standard_normal(2)
             for w in enumerate_words(d, max(N - 2, 0))}
        uh = FormalSeries(d, N, 2, 1, {w: v.reshape(2, 1) for w, v in u.items()})
        for side, prod in (("left", multiply), ("right", right_multiply)):
            y = simulate(U, u, side, N)
            yh = prod(S, uh, N)
            err = max(err, max(float(np.max(np.abs(y[w] - yh.coeff(w)[:, 0]))) for w in y))
    return [Residual("transfer_vs_simulate", err, 1e-12)]


def _completion(rng, d, N, trials):
    cois = 0.0
    for _ in range(trials):
        pair = random_contractive_output_pair(d, 2, 1, rng, norm=float(rng.uniform(0.5, 1.0)))
        M = complete(pair).stacked()
        cois = max(cois, float(np.linalg.norm(M @ M.conj().T - np.eye(M.shape[0]), 2)))
    blaschke = transfer_function(complete(OutputPair([[np.sqrt(3) / 2]], [[[0.5]]])), 4)
    expected = FormalSeries.from_scalars({"": -0.5, "1": 0.75, "11": 0.375, "111": 0.1875,
                                          "1111": 0.09375}, 1, 4)
    return [Residual("completion_coisometry", cois, 1e-10),
            Residual("blaschke_series", blaschke.max_abs_diff(expected), 1e-12)]


def _realizations(rng, d, N, trials):
    b_err = coeff = cois = equiv = 0.0
    for _ in range(trials):
        U = random_coisometric_realization(d, 2, 1, rng, N=N - 1)
        S = transfer_function(U, N)
        B = unique_B_from_S(U.output_pair, S, N)
        b_err = max(b_err, float(np.max(np.abs(B - U.B))))
        model = build_dbr_colligation(S, N)
        rep = verify_realization(model.colligation, S, N - 1)
        coeff = max(coeff, rep["coefficient_residual"])
        cois = max(cois, rep["coisometry_residual"])
        R = unitary_equivalence(U, model.colligation, N - 1, 1e-8)
        equiv = max(equiv, 0.0 if R is not None else np.inf)
    return [Residual("unique_B", b_err, 1e-8),
            Residual("dbr_coefficients", coeff, 1e-8),
            Residual("dbr_coisometry", cois, 1e-8),
            Residual("dbr_unitary_equivalence", equiv, 1e-8)]


def _inequalities(rng, d, N, trials):
    dq = mult = np.inf
    for _ in range(trials):
        U = random_contractive_colligation(d, 2, 1, 1, rng)
        space = dbr_space(transfer_function(U, N), N)
        dq = min(dq, dq_inequality_slack(space))
        mult = min(mult, multiplier_estimate_slack(space))
    return [Residual("dq_inequality_slack", dq, 1e-8, "ge"),
            Residual("multiplier_estimate_slack", mult, 1e-8, "ge")]


def _inner(rng, d, N, trials):
    angle = 0.0
    dims = 0.0
    gram = 0.0
    for _ in range(trials):
        pair = random_nilpotent_input_pair(d, 2, 1, rng)
        syn = synthesize_inner(pair, N)
        rep = subspace_check(syn.theta, syn.pair, N)
        angle = max(angle, rep.max_angle)
        dims = max(dims, abs(rep.dim_kernel - rep.expected_kernel_dim) + abs(rep.dim_range - rep.dim_kernel))
        gram = max(gram, 0.0 if syn.certificate.gram_pass and syn.inner else np.inf)
    U = complete(OutputPair(np.zeros((1, 1)), np.stack([np.eye(1) / np.sqrt(2)] * 2)))
    rejected = not is_inner(U, N)[0]
    return [Residual("subspace_angle", angle, 1e-9),
            Residual("subspace_dimension_mismatch", dims, 0.0),
            Residual("inner_gram_route", gram, 0.0),
            Residual("unstable_rejected", 0.0 if rejected else np.inf, 0.0)]


def _stein(rng, d, N, trials):
    x = float(rng.uniform(0.5, 2.0))
    # the default relative stop leaves an error of about tol * ||H||; tighten it here
    H = gramian(InputPair(np.full((2, 1, 1), 0.5), [[x]]), tol=1e-15)
    return [Residual("stein_scalar", abs(H[0, 0] - 2 * x * x), 1e-12)]


GROUPS: Dict[str, Callable] = {
    "kernels": _kernels,
    "systems": _systems,
    "completion": _completion,
    "realizations": _realizations,
    "inequalities": _inequalities,
    "inner": _inner,
    "stein": _stein,
}


def run_checks(seed: int = 0, d: int = 2, N: int = 4, trials: int = 5) -> Dict[str, List[Residual]]:
    """Run every property group and return the residuals keyed by group name."""
    if N < 2:
        raise ValueError("the property suite needs degree N >= 2")
    children = np.random.SeedSequence(seed).spawn(len(GROUPS))
    out = {}
    for (name, fn), ss in zip(GROUPS.items(), children):
        out[name] = fn(np.random.default_rng(ss), d, N, trials)
    return out
