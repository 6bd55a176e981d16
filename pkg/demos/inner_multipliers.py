"""
Inner multipliers from interpolation data
=========================================

An input pair ``(Z, X)`` defines the subspace of Fock-space vectors ``f``
with ``sum_v Z^{v^T} X f_v = 0``.  That subspace is the range of an inner
multiplier ``theta``, obtained by completing ``(X^*, Z^*)`` to a
coisometry.  We look at the scalar Blaschke factor and a jointly nilpotent
pair in two variables.
"""

import numpy as np

from ncschur import InputPair, OutputPair, complete, is_inner, subspace_check, synthesize_inner
from ncschur.sampling import random_nilpotent_input_pair

###############################################################################
# One variable, ``Z = 1/2``.  The pair is already isometric
# (``1/4 + 3/4 = 1``) and ``theta`` is ``(z - 1/2) / (1 - z/2)``.
pair = InputPair([[[0.5]]], [[np.sqrt(3) / 2]])
syn = synthesize_inner(pair, 8)
print("theta coefficients:", np.round([syn.theta.coeff("1" * k)[0, 0].real for k in range(5)], 6))
print("inner:", syn.inner, " spectral radius", syn.certificate.spectral_radius)

###############################################################################
# ``Z`` is not nilpotent, so the interpolation condition involves every
# degree.  The truncated subspaces then agree only up to a tail, and the
# computed bound shrinks geometrically with the degree.
print(" N   sin(angle)   bound")
for N in (2, 4, 6, 8):
    rep = subspace_check(synthesize_inner(pair, N).theta, pair, N)
    print(f"{N:2d}   {np.sin(rep.max_angle):.3e}   {rep.angle_bound:.3e}")

###############################################################################
# A jointly nilpotent pair in two variables: the identity is exact at every
# truncation, and the kernel dimension is ``p (2^{N+1} - 1) - n``.
rng = np.random.default_rng(11)
nil = random_nilpotent_input_pair(2, 3, 1, rng)
syn = synthesize_inner(nil, 4)
rep = subspace_check(syn.theta, syn.pair, 4)
print(f"dim ker {rep.dim_kernel} (expected {rep.expected_kernel_dim}), "
      f"dim range {rep.dim_range}, max angle {rep.max_angle:.1e}")

###############################################################################
# Strong stability matters: with ``A_j = I / sqrt(2)`` the output pair is
# isometric and the colligation coisometric, but the map is not inner.
U = complete(OutputPair(np.zeros((1, 1)), np.stack([np.eye(1) / np.sqrt(2)] * 2)))
ok, cert = is_inner(U, 4)
print("inner:", ok, " strongly stable:", cert.strongly_stable, " rho =", round(cert.spectral_radius, 12))
