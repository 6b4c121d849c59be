"""Minimal Stinespring dilations and derivatives of dominated maps.

Every CP map phi: M_d1 -> M_d2 factors as phi(X) = V* (X (x) I_k) V for an
isometry-like operator V into a dilation space; the minimal such dilation
has k equal to the Choi rank.  Maps dominated by phi (phi - psi still CP)
correspond one-to-one to positive contractions D in the commutant factor
M_k via psi(X) = V* (X (x) D) V -- a derivative of psi with respect to phi.
This script builds the dilation, checks the correspondence both ways, and
shows the cyclic/reducing projections that express locality in the
dilation space.
"""

import numpy as np

from cpmaps import (
    apply,
    cyclic_projection,
    cyclic_subspace_dim,
    dominates,
    map_from_contraction,
    maps_close,
    minimal_stinespring,
    radon_nikodym,
    reducing_projection,
)
from cpmaps.gallery import (
    conjugation_map,
    flip_twirl_map,
    random_positive_contraction,
)

np.set_printoptions(precision=4, suppress=True, linewidth=100)

# ---------------------------------------------------------------------------
# 1. The minimal dilation of the flip twirl.
# ---------------------------------------------------------------------------
phi = flip_twirl_map()
triple = minimal_stinespring(phi)
print("flip twirl: d_in =", triple.d_in, " d_out =", triple.d_out,
      " multiplicity k =", triple.multiplicity)
print("V has shape", triple.v.shape, "and V*V = phi(1):")
print((triple.v.conj().T @ triple.v).real)

x = np.array([[1.0, 2.0], [3.0, 4.0]])
lhs = apply(phi, x)
rhs = triple.v.conj().T @ np.kron(x, np.eye(triple.multiplicity)) @ triple.v
print("reproduction error on a test input:",
      f"{np.abs(lhs - rhs).max():.2e}")

# ---------------------------------------------------------------------------
# 2. Domination and the derivative.  sigma_x-conjugation sits below phi.
# ---------------------------------------------------------------------------
sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
psi = conjugation_map(sigma_x)
print("\nphi dominates sigma_x-conjugation:", dominates(phi, psi))

rn = radon_nikodym(phi, psi)
print("its derivative D (in the commutant factor M_k):")
print(rn.matrix.real)
print("reconstruct from D reproduces psi:", maps_close(rn.reconstruct(), psi))

# ---------------------------------------------------------------------------
# 3. The correspondence in the other direction: pick D, get a dominated map.
# ---------------------------------------------------------------------------
rng = np.random.default_rng(3)
d = random_positive_contraction(triple.multiplicity, rng=rng)
below = map_from_contraction(triple, d)
print("\nrandom contraction D -> map below phi; dominated:",
      dominates(phi, below))
recovered = radon_nikodym(phi, below).matrix
print("D recovered from the pair, error:",
      f"{np.abs(recovered - d).max():.2e}")

# ---------------------------------------------------------------------------
# 4. Cyclic subspaces in the dilation space.
# ---------------------------------------------------------------------------
e1 = np.array([1.0, 0.0])
print("\ncyclic subspace dim from h0 = e1:", cyclic_subspace_dim(triple, e1),
      "of", triple.dilation_dim)
q = cyclic_projection(triple, e1)
print("cyclic projection is idempotent:",
      np.abs(q @ q - q).max() < 1e-12)

# The reducing projection of a block commutes with every pi(X) = X (x) I_k.
p = reducing_projection(triple, e1.reshape(-1, 1))
comm = p @ np.kron(x, np.eye(triple.multiplicity)) \
    - np.kron(x, np.eye(triple.multiplicity)) @ p
print("reducing projection commutes with pi(X):",
      np.abs(comm).max() < 1e-12)

print("\nDilation, domination, and derivative all verified.")
