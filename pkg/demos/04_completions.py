"""Minimal completions: PSD block matrices and partially specified CP maps.

Two completion problems, one finite-dimensional story.  First: given the
diagonal block A and off-diagonal block C of a 2x2 block matrix, when can
the remaining corner D be filled so the whole matrix is PSD, and which D
is smallest?  Second: given only the compressions X -> phi(X) R of a CP
map onto a subspace, which CP maps extend that partial data, and which
extension is minimal?  The second problem reduces to the first, and the
package solves it by two independent routes that must agree.
"""

import numpy as np

from cpmaps import (
    apply,
    block_completable,
    BlockCompletionProblem,
    cp_completable,
    dominates,
    maps_close,
    minimal_block_completion,
    minimal_cp_completion_choi,
    minimal_cp_completion_stinespring,
    PartialCpMap,
)
from cpmaps import linalg
from cpmaps.gallery import random_cp_map, trace_state_map

np.set_printoptions(precision=4, suppress=True, linewidth=100)

# ---------------------------------------------------------------------------
# 1. Block completion.  A = [[1,0],[0,0]] and C = [1, 0]: the kernel of A
#    must stay inside the kernel of C, and here it does.
# ---------------------------------------------------------------------------
a = np.diag([1.0, 0.0])
c = np.array([[1.0, 0.0]])
prob = BlockCompletionProblem.from_blocks(a, c)
print("completable:", block_completable(prob))
m = minimal_block_completion(prob)
print("minimal completion:\n", m.real)
print("eigenvalues:", np.linalg.eigvalsh(m).round(6))

# The corner is minimal: shaving anything PSD off it breaks positivity.
d = m[2:, 2:]
smaller = m.copy()
smaller[2:, 2:] = d - 1e-3 * np.eye(1)
print("corner minus 1e-3 still PSD?", linalg.psd_check(smaller))

# And it is the limit of the regularized family C (A + t)^(-1) C*.
print("\nregularized approach to the corner:")
for t in (1e-2, 1e-4, 1e-6):
    approx = c @ np.linalg.inv(a + t * np.eye(2)) @ c.conj().T
    print(f"  t = {t:.0e}:  {approx[0, 0].real:.6f}")
print(f"  corner:    {d[0, 0].real:.6f}")

# A failure case: C leaking outside the range of A is not completable.
bad = BlockCompletionProblem.from_blocks(np.diag([1.0, 0.0]),
                                         np.array([[0.0, 1.0]]))
print("\nleaky data completable?", block_completable(bad))

# ---------------------------------------------------------------------------
# 2. Partial CP maps.  Start from a known map, keep only X -> phi(X) R,
#    and ask for the smallest CP extension.
# ---------------------------------------------------------------------------
rho = np.diag([0.3, 0.7]).astype(complex)
v = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
phi = trace_state_map(rho, v)        # M_2 -> M_3, quasi-pure
r = np.diag([1.0, 0.0, 0.0]).astype(complex)
beta = PartialCpMap.from_map(phi, r)
print("\npartial data is CP-completable:", cp_completable(beta))

via_choi = minimal_cp_completion_choi(beta)
via_stine = minimal_cp_completion_stinespring(beta, phi)
print("routes agree:", maps_close(via_choi, via_stine))
print("completion reproduces the partial data:",
      np.abs(apply(via_choi, np.eye(2)) @ r
             - apply(phi, np.eye(2)) @ r).max() < 1e-9)

# For this quasi-pure map the compressions pin the whole map back down.
print("minimal completion equals the original map:",
      maps_close(via_choi, phi))

# ---------------------------------------------------------------------------
# 3. For a generic map the minimal completion sits strictly below any other
#    extension of the same data.
# ---------------------------------------------------------------------------
rng = np.random.default_rng(9)
psi = random_cp_map(2, 3, 3, rng=rng)
beta = PartialCpMap.from_map(psi, r)
minimal = minimal_cp_completion_choi(beta)
print("\ngeneric map: minimal completion equals it?",
      maps_close(minimal, psi))
print("original dominates the minimal completion:",
      dominates(psi, minimal))

print("\nBoth completion problems solved and cross-validated.")
