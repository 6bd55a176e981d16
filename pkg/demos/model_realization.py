"""
Recovering a realization from its transfer function
===================================================

Given only the coefficients of a series, the lifted-norm model builds an
observable coisometric colligation that realizes it.  When the series came
from a finite-dimensional observable coisometric colligation, the model is
that colligation up to a unitary change of state coordinates.
"""

import numpy as np

from ncschur import (
    build_dbr_colligation,
    dbr_space,
    transfer_function,
    unique_B_from_S,
    unitary_equivalence,
    verify_realization,
)
from ncschur.kernels import dq_inequality_slack, multiplier_estimate_slack
from ncschur.sampling import random_coisometric_realization

rng = np.random.default_rng(3)
N = 4

###############################################################################
# A hidden realization: three letters, state dimension 2.
U = random_coisometric_realization(3, 2, 1, rng, N=N - 1)
S = transfer_function(U, N)
print("series with", len(S.words()), "stored coefficients")

###############################################################################
# The model only sees ``S``.  Its state space is the range of
# ``I - M_S M_S^*`` (here of rank 2), and it is validated on words of length
# at most ``N - 1``.
model = build_dbr_colligation(S, N)
rep = verify_realization(model.colligation, S, N - 1)
for key in ("state_dim", "coefficient_residual", "coisometry_residual", "observability_rank"):
    print(f"{key:>22}: {rep[key]}")

###############################################################################
# The unitary that carries the hidden state onto the model state.
R = unitary_equivalence(U, model.colligation, N - 1)
print("R^* R =\n", np.round(R.conj().T @ R, 12))

###############################################################################
# Knowing ``(C, A)`` and ``S`` also pins down ``B``.
B = unique_B_from_S(U.output_pair, S, N)
print("max |B - B_true| =", f"{np.max(np.abs(B - U.B)):.2e}")

###############################################################################
# The two contractive estimates that make the model work, as slacks that
# should be nonnegative.
space = dbr_space(S, N)
print("difference-quotient slack:", f"{dq_inequality_slack(space):+.2e}")
print("multiplier estimate slack:", f"{multiplier_estimate_slack(space):+.2e}")
