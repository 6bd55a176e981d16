"""
Kernels of a contractive colligation
====================================

A contractive colligation realizes a Schur-class series ``S``.  Its kernel
``I - S(z) S(w)^*`` splits into an observability part and a defect part, and
the defect part vanishes exactly when the colligation is coisometric.
"""

import numpy as np

from ncschur import (
    FormalSeries,
    complete,
    defect_kernel,
    kernel_KCA,
    kernel_KS,
    positivity_check,
    transfer_function,
)
from ncschur.sampling import random_contractive_colligation

rng = np.random.default_rng(0)
N = 4

###############################################################################
# Draw a random contraction with two letters, a 3-dimensional state and
# scalar input and output, then expand its transfer function.
U = random_contractive_colligation(2, 3, 1, 1, rng, norm=0.9)
S = transfer_function(U, N)
print(S)

###############################################################################
# The three kernel tables, and the size of what is left after subtracting.
KS = kernel_KS(S)
KCA = kernel_KCA(U.output_pair, N)
DS = defect_kernel(U, N)
print("max |K_S - K_CA - D_S| =", f"{(KS - KCA - DS).max_abs():.2e}")
print("max |D_S|              =", f"{DS.max_abs():.2e}")

###############################################################################
# Completing the output pair to a coisometry changes ``B`` and ``D`` but
# keeps ``(C, A)``.  The defect kernel collapses and the two remaining
# tables agree.
Uc = complete(U.output_pair)
Sc = transfer_function(Uc, N)
print("coisometric completion, input dim", Uc.m)
print("max |D_S|              =", f"{defect_kernel(Uc, N).max_abs():.2e}")
print("max |K_S - K_CA|       =", f"{kernel_KS(Sc).max_abs_diff(kernel_KCA(Uc.output_pair, N)):.2e}")

###############################################################################
# Positivity separates Schur-class series from the rest: ``2z`` has
# diagonal entries ``1 - 4`` in its kernel table.
for name, series in (("S", S), ("2z", FormalSeries.from_scalars({"1": 2}, 1, N))):
    ok, lam = positivity_check(kernel_KS(series))
    print(f"{name:>3}: positive={ok}, smallest eigenvalue {lam:+.3f}")
