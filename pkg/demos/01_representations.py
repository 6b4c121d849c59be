"""Representations of completely positive maps and conversions between them.

A CP map phi: M_d1 -> M_d2 can be handed around as a Kraus family
{K_j} with phi(X) = sum_j K_j* X K_j, or as its Choi matrix, the
d1*d2 x d1*d2 block matrix whose (i, j) block is phi(E_ij).  This script
walks through building maps both ways, converting losslessly between the
two pictures, and asking the classifier what kind of map we have.
"""

import numpy as np

from cpmaps import (
    CpMap,
    apply,
    choi_rank,
    choi_to_kraus,
    classify,
    is_cp,
    kraus_to_choi,
    maps_close,
    minimal_kraus,
)
from cpmaps.gallery import flip_twirl_map, transpose_map

np.set_printoptions(precision=4, suppress=True, linewidth=100)

# ---------------------------------------------------------------------------
# 1. A map from its Kraus family: conjugation by I and by sigma_x.
# ---------------------------------------------------------------------------
sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
phi = CpMap.from_kraus([np.eye(2, dtype=complex), sigma_x])
print("phi(X) = X + sigma_x X sigma_x, applied to [[1,2],[3,4]]:")
print(apply(phi, np.array([[1.0, 2.0], [3.0, 4.0]])).real)

print("\nIts Choi matrix (blocks are phi(E_ij)):")
print(phi.choi.real)
print("Choi rank (minimal Kraus count):", choi_rank(phi))

# ---------------------------------------------------------------------------
# 2. Round trip: Choi -> Kraus -> Choi reproduces the map exactly.
# ---------------------------------------------------------------------------
rng = np.random.default_rng(7)
g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
choi = g @ g.conj().T  # a random PSD Choi matrix for a map M_3 -> M_2
factors = choi_to_kraus(choi, 3, 2)
back = kraus_to_choi(factors, 3, 2)
print("\nRandom PSD Choi on M_3 -> M_2, round-trip error:",
      f"{np.abs(back - choi).max():.2e}")
print("Factors returned:", len(factors), "(= rank of the Choi matrix)")

# ---------------------------------------------------------------------------
# 3. Redundant families are reduced to a minimal one.
# ---------------------------------------------------------------------------
redundant = CpMap.from_kraus([np.eye(2, dtype=complex),
                              np.eye(2, dtype=complex)])
reduced = minimal_kraus(redundant)
print("\n{I, I} reduces to", len(reduced), "factor:")
print(reduced[0].real, " (= sqrt(2) * I)")

# ---------------------------------------------------------------------------
# 4. The classifier: purity, unitality, entanglement-breaking form.
# ---------------------------------------------------------------------------
half_twirl = 0.5 * flip_twirl_map()
info = classify(half_twirl)
print("\nclassify(0.5 * flip twirl):")
print("  pure:", info.is_pure, " unital:", info.is_unital,
      " EB form:", info.is_entanglement_breaking_quasipure_form)

rho = np.diag([0.25, 0.75]).astype(complex)
v = np.array([1.0, 1.0]) / np.sqrt(2.0)
eb = CpMap.from_kraus(
    [np.sqrt(w) * np.outer(u.conj(), v)
     for w, u in zip(*np.linalg.eigh(rho)) if w > 0]
)
info = classify(eb)
print("classify(X -> trace(rho X)|v><v|):")
print("  EB form:", info.is_entanglement_breaking_quasipure_form)
print("  recovered state:\n", info.eb_state.real)

# ---------------------------------------------------------------------------
# 5. Complete positivity is a real constraint: the transpose fails it.
# ---------------------------------------------------------------------------
t = transpose_map(2)
print("\nTranspose on M_2: is_cp =", is_cp(t))
print("Choi eigenvalues:", np.linalg.eigvalsh(t.choi).round(6))

# Arithmetic stays in the CP cone: phi + phi equals 2 * phi.
print("\nphi + phi == 2 * phi:", maps_close(phi + phi, 2.0 * phi))
print("\nAll representation conversions behaved as expected.")
